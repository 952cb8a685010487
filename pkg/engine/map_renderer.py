import math

import numpy as np
import plotly.graph_objects as go

import config
from engine.coin import bloch_angles, as_density, format_home


def _region_colors(n_walks):
    """Tie colour followed by one palette colour per possible label vector."""
    count = 2 ** n_walks
    palette = [config.REGION_PALETTE[i % len(config.REGION_PALETTE)] for i in range(count)]
    return [config.COLOR_TIE] + palette


def _discrete_colorscale(colors):
    n = len(colors)
    scale = []
    for i, c in enumerate(colors):
        scale.append([i / n, c])
        scale.append([(i + 1) / n, c])
    return scale


def render_region_map(region, markers=None):
    """
    Renders a region map as a (phi, theta) heatmap, one colour per label vector.

    Args:
        region (RegionMap): Classified grid.
        markers (list[CoinLike], optional): Home states drawn as stars.

    Returns:
        go.Figure: The heatmap figure.
    """
    n_walks = region.labels.shape[-1]
    colors = _region_colors(n_walks)
    labels = region.label_strings()
    hover = np.where(region.parrondo, np.char.add(labels, ' (Parrondo)'), labels)

    fig = go.Figure(data=go.Heatmap(
        z=region.codes(),
        x=np.degrees(region.phis),
        y=np.degrees(region.thetas),
        text=hover,
        hoverinfo='text+x+y',
        colorscale=_discrete_colorscale(colors),
        zmin=-1.5,
        zmax=len(colors) - 1.5,
        showscale=False,
    ))

    if markers:
        xs, ys, texts = [], [], []
        for home in markers:
            angles = bloch_angles(as_density(home).basis)
            xs.append(math.degrees(angles.phi))
            ys.append(math.degrees(angles.theta))
            texts.append(format_home(home))
        fig.add_trace(go.Scatter(
            x=xs,
            y=ys,
            mode='markers',
            marker=dict(symbol='star', size=14, color=config.COLOR_MARKER, line=dict(width=1, color='white')),
            hovertext=texts,
            hoverinfo='text',
            showlegend=False,
        ))

    fig.update_layout(
        width=config.SVG_WIDTH,
        height=config.SVG_HEIGHT,
        margin=dict(l=40, r=10, t=10, b=40),
        xaxis=dict(title='phi (deg)', range=[0, 360]),
        yaxis=dict(title='theta (deg)', range=[180, 0]),
        paper_bgcolor='rgba(0,0,0,0)',
        plot_bgcolor='rgba(0,0,0,0)'
    )
    return fig


def bar_colors(positions):
    return [
        config.COLOR_NEGATIVE if m < 0 else config.COLOR_POSITIVE if m > 0 else config.COLOR_ORIGIN
        for m in positions
    ]


def render_histogram(frame):
    """
    Renders a position histogram as horizontal bars.

    Args:
        frame (pd.DataFrame): Columns ['position', 'probability'].
    """
    fig = go.Figure(data=go.Bar(
        x=frame['probability'],
        y=frame['position'],
        orientation='h',
        marker=dict(color=bar_colors(frame['position'])),
    ))
    fig.update_layout(
        width=config.SVG_WIDTH,
        height=config.SVG_HEIGHT,
        margin=dict(l=40, r=10, t=10, b=40),
        xaxis=dict(title='probability', range=[0, 1]),
        yaxis=dict(title='position', dtick=1),
        bargap=0.2,
    )
    return fig


def render_persistence(table):
    """
    Renders payoff curves against the cycle count n, one per walk.

    Args:
        table (pd.DataFrame): Columns 'n', 'payoff_w1'... as produced by persistence_scan.
    """
    fig = go.Figure()
    columns = [c for c in table.columns if c.startswith('payoff_')]
    for i, column in enumerate(columns):
        fig.add_trace(go.Scatter(
            x=table['n'],
            y=table[column],
            mode='lines+markers',
            name=f'W{i + 1}',
            line=dict(color=config.WALK_COLORS[i % len(config.WALK_COLORS)]),
        ))
    fig.add_hline(y=0, line=dict(color=config.COLOR_AXIS, width=1))
    fig.update_layout(
        width=config.SVG_WIDTH,
        height=config.SVG_HEIGHT,
        margin=dict(l=40, r=10, t=10, b=40),
        xaxis=dict(title='n'),
        yaxis=dict(title='payoff'),
    )
    return fig
