"""
Walk families, Bloch-sphere region maps and Parrondo states.

A family of m steps yields m homogeneous walks T_i^{nm} and the sequenced walk
[T_m...T_1]^n. A home state is a Parrondo state when it loses every
homogeneous walk and wins the sequenced one.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np
import pandas as pd

import config
from engine.coin import CoinLike, CoinState, perp
from engine.errors import ConfigError, DesignConstraintError
from engine.models import DesignSpec, GeneralStep, QuantumStep, Walk
from engine.observables import Observable, mu
from engine.payoff import (
    CoinObservableAnalysis,
    Outcome,
    analyze,
    classify,
    classify_vectors,
    payoff_analytic,
)
from engine.walks import power, sequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class WalkFamily:
    base_steps: tuple
    cycles: int
    walks: tuple

    @property
    def m(self) -> int:
        return len(self.base_steps)


def build_family(steps: Sequence[QuantumStep], n: int) -> WalkFamily:
    """
    Walks W_i = T_i^{nm} (i = 1..m) and W_{m+1} = [T_m...T_1]^n.

    Raises:
        ConfigError: for an empty step list or n < 1.
    """
    steps = tuple(steps)
    if not steps:
        raise ConfigError("A walk family needs at least one step")
    if n < 1:
        raise ConfigError(f"Cycle count must be positive, got {n}")
    m = len(steps)
    walks = tuple(power(step, n * m) for step in steps) + (sequence(steps, n),)
    logger.debug("Built family with m=%d, n=%d", m, n)
    return WalkFamily(steps, n, walks)


def analyze_family(fam: WalkFamily, o: Observable, omega: float) -> list[CoinObservableAnalysis]:
    return [analyze(o, walk, omega) for walk in fam.walks]


def is_parrondo_labels(labels: Sequence[Outcome]) -> bool:
    return all(label == Outcome.LOSE for label in labels[:-1]) and labels[-1] == Outcome.WIN


def label_vector(fam: WalkFamily, o: Observable, omega: float, home: CoinLike,
                 tie_tol: float = config.TIE_TOL,
                 analyses: Optional[Sequence[CoinObservableAnalysis]] = None) -> list[Outcome]:
    """Win/Lose/Tie of the home state for each of the m+1 walks."""
    analyses = analyses or analyze_family(fam, o, omega)
    return [classify(a, home, tie_tol) for a in analyses]


def parrondo_test(fam: WalkFamily, o: Observable, omega: float, home: CoinLike,
                  tie_tol: float = config.TIE_TOL,
                  analyses: Optional[Sequence[CoinObservableAnalysis]] = None) -> bool:
    return is_parrondo_labels(label_vector(fam, o, omega, home, tie_tol, analyses))


# --- Region maps ---

def bloch_grid(thetas: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """(n_theta, n_phi, 3) Bloch vectors; pole rows are exactly (0, 0, +-1)."""
    theta, phi = np.meshgrid(thetas, phis, indexing="ij")
    sin_t = np.sin(theta)
    vectors = np.stack([sin_t * np.cos(phi), sin_t * np.sin(phi), np.cos(theta)], axis=-1)
    for j, t in enumerate(thetas):
        if t == 0.0 or t == math.pi:
            vectors[j] = (0.0, 0.0, 1.0 if t == 0.0 else -1.0)
    return vectors


@dataclass(frozen=True, eq=False)
class RegionMap:
    thetas: np.ndarray
    phis: np.ndarray
    labels: np.ndarray
    parrondo: np.ndarray
    analyses: tuple

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.thetas), len(self.phis)

    def label_strings(self) -> np.ndarray:
        """(n_theta, n_phi) array of label vectors such as 'LLW'."""
        return np.apply_along_axis(lambda row: "".join(row), -1, self.labels)

    def distinct_labels(self) -> set[str]:
        return set(self.label_strings().ravel().tolist())

    def codes(self) -> np.ndarray:
        """Integer code per node with bit i set when walk i+1 wins; -1 on ties."""
        wins = self.labels == Outcome.WIN.value
        code = np.zeros(self.shape, dtype=int)
        for i in range(self.labels.shape[-1]):
            code |= wins[..., i].astype(int) << i
        code[np.any(self.labels == Outcome.TIE.value, axis=-1)] = -1
        return code

    def nearest_node(self, theta: float, phi: float) -> tuple[int, int]:
        j = int(np.argmin(np.abs(self.thetas - theta)))
        k = int(np.argmin(np.abs(self.phis - (phi % (2 * math.pi)))))
        return j, k

    def label_at(self, theta: float, phi: float) -> str:
        j, k = self.nearest_node(theta, phi)
        return "".join(self.labels[j, k])

    @property
    def parrondo_fraction(self) -> float:
        return float(self.parrondo.mean())

    def to_frame(self) -> pd.DataFrame:
        """One row per node: theta, phi, label_w1..label_w{m+1}, parrondo."""
        theta, phi = np.meshgrid(self.thetas, self.phis, indexing="ij")
        data = {"theta": theta.ravel(), "phi": phi.ravel()}
        for i in range(self.labels.shape[-1]):
            data[f"label_w{i + 1}"] = self.labels[..., i].ravel()
        data["parrondo"] = self.parrondo.ravel()
        return pd.DataFrame(data)


def region_map(fam: WalkFamily, o: Observable, omega: float,
               grid: tuple[int, int] = config.DEFAULT_GRID,
               tie_tol: float = config.TIE_TOL) -> RegionMap:
    """
    Classify the home states at the nodes of a (theta, phi) raster.

    Nodes are theta = linspace(0, pi, n_theta), phi = linspace(0, 2pi, n_phi).
    Each walk is analysed once and every node is classified exactly by its
    Bloch dot product with that walk's v_max.
    """
    n_theta, n_phi = grid
    if n_theta < 2 or n_phi < 2:
        raise ConfigError(f"Grid must be at least 2x2, got {n_theta}x{n_phi}")
    thetas = np.linspace(0.0, math.pi, n_theta)
    phis = np.linspace(0.0, 2 * math.pi, n_phi)
    vectors = bloch_grid(thetas, phis)
    analyses = tuple(analyze_family(fam, o, omega))
    labels = np.stack([classify_vectors(a, vectors, tie_tol) for a in analyses], axis=-1)
    parrondo = np.all(labels[..., :-1] == Outcome.LOSE.value, axis=-1) & (labels[..., -1] == Outcome.WIN.value)
    logger.info("Region map %dx%d: %d Parrondo nodes", n_theta, n_phi, int(parrondo.sum()))
    return RegionMap(thetas, phis, labels, parrondo, analyses)


@dataclass(frozen=True)
class ParrondoCap:
    """
    One walk's contribution to the Parrondo set.

    sense is 'below' (S(v_max).S(u) < omega needed), 'above' (> omega needed),
    or for degenerate walks 'always' / 'never'.
    """
    walk_index: int
    normal: tuple
    omega: Optional[float]
    sense: str


def parrondo_caps(fam: WalkFamily, o: Observable, omega: float,
                  tie_tol: float = config.TIE_TOL) -> list[ParrondoCap]:
    caps = []
    analyses = analyze_family(fam, o, omega)
    for i, a in enumerate(analyses):
        wanted = Outcome.WIN if i == fam.m else Outcome.LOSE
        if a.degenerate:
            met = classify(a, CoinState(1, 0), tie_tol) == wanted
            caps.append(ParrondoCap(i + 1, (0.0, 0.0, 0.0), None, "always" if met else "never"))
        else:
            sense = "above" if wanted == Outcome.WIN else "below"
            caps.append(ParrondoCap(i + 1, tuple(float(x) for x in a.normal), a.omega_cap, sense))
    return caps


# --- Persistence ---

@dataclass(frozen=True, eq=False)
class PersistenceReport:
    table: pd.DataFrame
    persistent: bool
    first_parrondo: Optional[int]
    commutators: pd.DataFrame


def _n_values(n_range: Union[tuple[int, int], range]) -> list[int]:
    """Cycle counts from a range or an inclusive (first, last) tuple; other sequences are rejected."""
    if isinstance(n_range, range):
        values = list(n_range)
    elif isinstance(n_range, tuple) and len(n_range) == 2:
        values = list(range(int(n_range[0]), int(n_range[1]) + 1))
    else:
        raise ConfigError(f"n-range must be a range or an inclusive (first, last) tuple, got {n_range!r}")
    if not values:
        raise ConfigError("n-range must not be empty")
    if min(values) < 1:
        raise ConfigError(f"n-range values must be positive, got {values}")
    return values


def _commutator_norm(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a @ b - b @ a))


def persistence_scan(steps: Sequence[QuantumStep], o: Observable, omega: float, home: CoinLike,
                     n_range: Union[tuple[int, int], range],
                     tie_tol: float = config.TIE_TOL) -> PersistenceReport:
    """
    Rebuild the family for every n and record the m+1 payoffs and Parrondo flag.

    Args:
        n_range: a range, or an inclusive (first, last) tuple; lists and
            other sequences are rejected.

    Returns:
        PersistenceReport: per-n table (payoff_w1..payoff_w{m+1}, parrondo),
            the persistent flag over the scanned range, and commutator norms
            ||[o_i(n), o_i(n')]|| between consecutive scanned n.
    """
    rows, comm_rows = [], []
    previous = None
    for n in _n_values(n_range):
        fam = build_family(steps, n)
        analyses = analyze_family(fam, o, omega)
        row = {"n": n}
        for i, a in enumerate(analyses):
            row[f"payoff_w{i + 1}"] = payoff_analytic(a, home)
        row["parrondo"] = parrondo_test(fam, o, omega, home, tie_tol, analyses)
        rows.append(row)
        matrices = [a.o_matrix for a in analyses]
        if previous is not None:
            comm = {"n": previous[0], "n_next": n}
            for i, (before, after) in enumerate(zip(previous[1], matrices)):
                comm[f"commutator_w{i + 1}"] = _commutator_norm(before, after)
            comm_rows.append(comm)
        previous = (n, matrices)
    table = pd.DataFrame(rows)
    flags = table["parrondo"].tolist()
    first = next((i for i, f in enumerate(flags) if f), None)
    persistent = first is not None and all(flags[first:])
    first_n = int(table["n"].iloc[first]) if first is not None else None
    comm_columns = ["n", "n_next"] + [f"commutator_w{i + 1}" for i in range(len(steps) + 1)]
    return PersistenceReport(table, persistent, first_n, pd.DataFrame(comm_rows, columns=comm_columns))


def commutator_diagnostic(steps: Sequence[QuantumStep], o: Observable,
                          n_range: Union[tuple[int, int], range]) -> pd.DataFrame:
    """Norms of [o_i(n), o_i(n')] for consecutive scanned cycle counts."""
    report = persistence_scan(steps, o, 0.0, CoinState(1, 0), n_range)
    return report.commutators


# --- Constructions ---

def design_daisy_chain(spec: DesignSpec) -> list[GeneralStep]:
    """
    Build daisy-chained steps making `spec.target` a Parrondo state for mu, omega = 0.

    The steps are T_1 = T(p_1,q_1;c_1,w), T_i = T(p_i,q_i;c_i,c_{i-1}),
    T_{m-1} = T(p,q;w_perp,c_{m-2}) and T_m = T(p_m,q_m;w,w_perp).

    Raises:
        DesignConstraintError: listing every violated constraint by name.
    """
    m = spec.m
    if m % 2:
        raise DesignConstraintError([f"m must be even (got m={m})"])
    structural = []
    if len(spec.strides) != m:
        structural.append(f"strides: expected {m} (p, q) pairs, got {len(spec.strides)}")
    if len(spec.intermediates) != m - 2:
        structural.append(f"intermediates: expected {m - 2} states, got {len(spec.intermediates)}")
    if structural:
        raise DesignConstraintError(structural)

    p = [s[0] for s in spec.strides]
    q = [s[1] for s in spec.strides]
    p_sum = sum(p[:-1])
    violations = []
    for i in range(m - 1):
        if not p[i] < 0:
            violations.append(f"p_i < 0 for i < m: p_{i + 1} = {p[i]}")
        if not q[i] < 0:
            violations.append(f"q_i < 0 for i < m: q_{i + 1} = {q[i]}")
    if not p[-1] > -p_sum:
        violations.append(f"p_m > -sum(p_i): p_m = {p[-1]} <= {-p_sum}")
    if not q[-1] < p_sum:
        violations.append(f"q_m < sum(p_i): q_m = {q[-1]} >= {p_sum}")
    if not p[-1] < -q[-1]:
        violations.append(f"p_m < -q_m: p_m = {p[-1]} >= {-q[-1]}")
    if violations:
        raise DesignConstraintError(violations)

    w = spec.target
    w_perp = perp(w)
    coins = list(spec.intermediates) + [w_perp, w]
    shifts = [w] + list(spec.intermediates) + [w_perp]
    return [
        GeneralStep(p=p[i], q=q[i], coin_out=coins[i], shift_in=shifts[i])
        for i in range(m)
    ]


def parrondo_cap(steps: Sequence[GeneralStep]) -> tuple[Fraction, float]:
    """
    Threshold Q = sum q / sum (q - p) and the cap half-angle arccos(2Q - 1).

    A pure home at angle nu from the target is a Parrondo state of a designed
    family iff cos^2(nu/2) > Q.
    """
    p_total = sum(s.p for s in steps)
    q_total = sum(s.q for s in steps)
    if q_total - p_total == 0:
        raise ConfigError("Threshold undefined: sum(q) equals sum(p)")
    threshold = Fraction(q_total, q_total - p_total)
    if not 0 < threshold < 1:
        raise ConfigError(f"Threshold {threshold} outside (0, 1); steps do not come from a valid design")
    return threshold, math.acos(2 * float(threshold) - 1)


def latitude_state(w: CoinState, nu: float) -> CoinState:
    """cos(nu/2)|w> + sin(nu/2)|w_perp>, at Bloch angle nu from w."""
    wp = perp(w)
    c, s = math.cos(nu / 2), math.sin(nu / 2)
    return CoinState(c * w.s0 + s * wp.s0, c * w.s1 + s * wp.s1)


def scan_latitude(steps: Sequence[QuantumStep], w: CoinState, n: int = 1,
                  o: Optional[Observable] = None, omega: float = 0.0,
                  step_deg: float = 0.5, tie_tol: float = config.TIE_TOL) -> pd.DataFrame:
    """Parrondo flag of latitude_state(w, nu) for nu = 0..180 degrees."""
    o = o or mu()
    fam = build_family(steps, n)
    analyses = analyze_family(fam, o, omega)
    count = int(round(180.0 / step_deg)) + 1
    rows = []
    for k in range(count):
        nu = math.radians(k * step_deg)
        rows.append({"nu": nu, "parrondo": parrondo_test(fam, o, omega, latitude_state(w, nu), tie_tol, analyses)})
    return pd.DataFrame(rows)


def bracket_boundary(scan: pd.DataFrame) -> tuple[float, float]:
    """(last nu flagged Parrondo, first nu after it that is not)."""
    flags = scan["parrondo"].tolist()
    if not flags or not flags[0]:
        raise ValueError("Scan does not start inside the Parrondo cap")
    k = next((i for i, f in enumerate(flags) if not f), None)
    if k is None:
        raise ValueError("Scan never leaves the Parrondo cap")
    return float(scan["nu"].iloc[k - 1]), float(scan["nu"].iloc[k])


def zero_position_steps(m: int, c1: CoinState, s1: CoinState, c2: CoinState, s2: CoinState) -> tuple[GeneralStep, GeneralStep]:
    """T_A = T(m,m;c1,s1) and T_B = T(-m,-m;c2,s2)."""
    if m == 0:
        raise ConfigError("Zero-position construction needs m != 0")
    return (
        GeneralStep(p=m, q=m, coin_out=c1, shift_in=s1),
        GeneralStep(p=-m, q=-m, coin_out=c2, shift_in=s2),
    )


def zero_position_walks(m: int, n: int, c1: CoinState, s1: CoinState,
                        c2: CoinState, s2: CoinState) -> dict[str, Walk]:
    """W_A = T_A^{2n}, W_B = T_B^{2n}, W_AB = [T_B T_A]^n, W_BA = [T_A T_B]^n."""
    step_a, step_b = zero_position_steps(m, c1, s1, c2, s2)
    return {
        "A": power(step_a, 2 * n),
        "B": power(step_b, 2 * n),
        "AB": sequence([step_a, step_b], n),
        "BA": sequence([step_b, step_a], n),
    }


def zero_position_family(m: int, n: int, c1: CoinState, s1: CoinState,
                         c2: CoinState, s2: CoinState) -> WalkFamily:
    """The family (W_A, W_B, W_AB) whose whole Bloch sphere is Parrondo for 0 < omega < 1."""
    return build_family(zero_position_steps(m, c1, s1, c2, s2), n)


def designed_payoffs(steps: Sequence[GeneralStep], n: int, home: CoinLike, o: Optional[Observable] = None) -> list[float]:
    """Payoffs of the m+1 walks of a family, evaluated analytically."""
    o = o or mu()
    fam = build_family(steps, n)
    return [payoff_analytic(a, home) for a in analyze_family(fam, o, 0.0)]


def sample_parrondo_states(region: RegionMap, rng: np.random.Generator, count: int) -> list[CoinState]:
    """Draw node states from the Parrondo-flagged nodes of a region map."""
    nodes = np.argwhere(region.parrondo)
    if len(nodes) == 0:
        return []
    picks = rng.integers(0, len(nodes), size=count)
    states = []
    for j, k in nodes[picks]:
        theta, phi = region.thetas[j], region.phis[k]
        states.append(CoinState(math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)))
    return states


def flags_over(fam: WalkFamily, o: Observable, omega: float, homes: Iterable[CoinLike],
               tie_tol: float = config.TIE_TOL) -> list[bool]:
    analyses = analyze_family(fam, o, omega)
    return [parrondo_test(fam, o, omega, h, tie_tol, analyses) for h in homes]
