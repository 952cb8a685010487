import numpy as np
import pandas as pd

from engine.coin import format_state
from engine.parrondo import PersistenceReport, RegionMap
from engine.payoff import classify, payoff_analytic


def histogram_frame(hist, label=None):
    """
    Turns a position histogram into a table.

    Args:
        hist (list[tuple[int, float]]): (position, probability) pairs.
        label (str, optional): Walk label added as a column when several histograms are stacked.

    Returns:
        pd.DataFrame: DataFrame with columns ['position', 'probability'] (plus 'walk').
    """
    data = [{'position': int(m), 'probability': float(p)} for m, p in hist]
    frame = pd.DataFrame(data, columns=['position', 'probability'])
    if label is not None:
        frame.insert(0, 'walk', label)
    return frame


def analysis_frame(analyses, home=None):
    """
    One row per walk with the reduced operator, its eigenpairs and Omega.

    Args:
        analyses (list[CoinObservableAnalysis]): Per-walk analyses.
        home (CoinLike, optional): When given, adds the home payoff and outcome.

    Returns:
        pd.DataFrame: Indexed by 'walk' (1-based).
    """
    data = []
    for i, a in enumerate(analyses):
        m = a.o_matrix
        row = {
            'walk': i + 1,
            'o00': float(m[0, 0].real),
            'o01_re': float(m[0, 1].real),
            'o01_im': float(m[0, 1].imag),
            'o11': float(m[1, 1].real),
            'o_max': a.o_max,
            'o_min': a.o_min,
            'v_max': format_state(a.v_max),
            'v_min': format_state(a.v_min),
            'Omega': a.omega_cap,
        }
        if home is not None:
            row['payoff'] = payoff_analytic(a, home)
            row['outcome'] = classify(a, home).value
        data.append(row)
    return pd.DataFrame(data).set_index('walk')


def payoff_frame(analyses, homes):
    """
    Payoff table with one row per home state and one column per walk.

    Args:
        analyses (list[CoinObservableAnalysis]): Per-walk analyses.
        homes (dict[str, CoinLike]): Labelled home states.

    Returns:
        pd.DataFrame: Rows are homes, columns 'W1'..'W{m+1}'.
    """
    data = {
        name: {f'W{i + 1}': payoff_analytic(a, home) for i, a in enumerate(analyses)}
        for name, home in homes.items()
    }
    return pd.DataFrame.from_dict(data, orient='index')


def region_counts(region: RegionMap):
    """Number of grid nodes per label vector, largest first."""
    labels = pd.Series(region.label_strings().ravel(), name='label')
    counts = labels.value_counts().rename('nodes').to_frame()
    counts.index.name = 'label'
    return counts


def cap_frame(caps):
    """
    Cap report: one line per walk.

    Returns:
        pd.DataFrame: Columns ['walk_index', 'nx', 'ny', 'nz', 'Omega', 'sense'].
    """
    data = [
        {
            'walk_index': c.walk_index,
            'nx': c.normal[0],
            'ny': c.normal[1],
            'nz': c.normal[2],
            'Omega': c.omega,
            'sense': c.sense,
        }
        for c in caps
    ]
    return pd.DataFrame(data, columns=['walk_index', 'nx', 'ny', 'nz', 'Omega', 'sense'])


def persistence_frame(report: PersistenceReport):
    """The persistence table indexed by n."""
    return report.table.set_index('n')


def steps_frame(steps):
    """Serialized step list, one row per step."""
    data = [step.model_dump(by_alias=True, mode='json') for step in steps]
    return pd.DataFrame(data)


def summarize_payoffs(table: pd.DataFrame):
    """
    Sign summary of a persistence table.

    Returns:
        pd.DataFrame: Per walk column, the min and max payoff and the count of
                      positive and negative entries.
    """
    columns = [c for c in table.columns if c.startswith('payoff_')]
    values = table[columns]
    return pd.DataFrame({
        'min': values.min(),
        'max': values.max(),
        'positive': (values > 0).sum(),
        'negative': (values < 0).sum(),
    })


def node_states(region: RegionMap, mask=None):
    """Theta and phi of the nodes selected by `mask` (defaults to Parrondo nodes)."""
    mask = region.parrondo if mask is None else mask
    idx = np.argwhere(mask)
    data = [{'theta': float(region.thetas[j]), 'phi': float(region.phis[k])} for j, k in idx]
    return pd.DataFrame(data, columns=['theta', 'phi'])
