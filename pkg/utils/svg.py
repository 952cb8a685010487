"""Static SVG figures: histograms, region rasters and persistence curves."""
import io
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import BoundaryNorm, ListedColormap  # noqa: E402

import config  # noqa: E402
from engine.coin import as_density, bloch_angles  # noqa: E402

plt.rcParams["svg.hashsalt"] = "parrondo-walks"
_SIZE = (config.SVG_WIDTH / 100, config.SVG_HEIGHT / 100)


def _to_svg(fig) -> str:
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buffer.getvalue()


def histogram_svg(frame, title=None) -> str:
    """
    Horizontal probability bars per position.

    Bars left of the origin are red, right of it green, the origin itself black.
    """
    fig, ax = plt.subplots(figsize=_SIZE)
    positions = frame["position"].to_numpy()
    colors = [
        config.COLOR_NEGATIVE if m < 0 else config.COLOR_POSITIVE if m > 0 else config.COLOR_ORIGIN
        for m in positions
    ]
    ax.barh(positions, frame["probability"].to_numpy(), color=colors, height=0.8)
    ax.set_xlim(0, 1)
    ax.set_xlabel("probability")
    ax.set_ylabel("position")
    if len(positions):
        ax.set_yticks(np.arange(positions.min(), positions.max() + 1))
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _to_svg(fig)


def region_svg(region, markers=None, title=None) -> str:
    """
    (phi, theta) raster of a region map, one colour per label vector.

    Tie nodes are white; Parrondo nodes are hatched; `markers` are drawn as stars.
    """
    n_walks = region.labels.shape[-1]
    colors = [config.COLOR_TIE] + [
        config.REGION_PALETTE[i % len(config.REGION_PALETTE)] for i in range(2 ** n_walks)
    ]
    cmap = ListedColormap(colors)
    norm = BoundaryNorm(np.arange(-1.5, len(colors) - 0.5), cmap.N)

    fig, ax = plt.subplots(figsize=_SIZE)
    phis, thetas = np.degrees(region.phis), np.degrees(region.thetas)
    ax.pcolormesh(phis, thetas, region.codes(), cmap=cmap, norm=norm, shading="nearest")
    if region.parrondo.any():
        ax.contourf(phis, thetas, region.parrondo.astype(float), levels=[0.5, 1.5],
                    colors="none", hatches=["//"])
        ax.contour(phis, thetas, region.parrondo.astype(float), levels=[0.5],
                   colors=config.COLOR_PARRONDO_OUTLINE, linewidths=1.0)

    for home in markers or []:
        angles = bloch_angles(as_density(home).basis)
        ax.plot(math.degrees(angles.phi), math.degrees(angles.theta), marker="*",
                markersize=14, color=config.COLOR_MARKER, markeredgecolor="white")

    present = sorted(set(region.codes().ravel().tolist()))
    handles = [
        plt.Rectangle((0, 0), 1, 1, color=colors[c + 1])
        for c in present
    ]
    names = [_code_label(c, n_walks) for c in present]
    ax.legend(handles, names, loc="upper left", bbox_to_anchor=(1.01, 1.0), fontsize=8, frameon=False)

    ax.set_xlim(0, 360)
    ax.set_ylim(180, 0)
    ax.set_xlabel("phi (deg)")
    ax.set_ylabel("theta (deg)")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _to_svg(fig)


def _code_label(code: int, n_walks: int) -> str:
    if code < 0:
        return "tie"
    return "".join("W" if code >> i & 1 else "L" for i in range(n_walks))


def persistence_svg(table, title=None) -> str:
    """Payoff against n, one curve per walk, with the zero line."""
    fig, ax = plt.subplots(figsize=_SIZE)
    columns = [c for c in table.columns if c.startswith("payoff_")]
    for i, column in enumerate(columns):
        ax.plot(table["n"], table[column], marker="o", markersize=3,
                color=config.WALK_COLORS[i % len(config.WALK_COLORS)], label=f"W{i + 1}")
    ax.axhline(0.0, color=config.COLOR_AXIS, linewidth=0.8)
    ax.set_xlabel("n")
    ax.set_ylabel("payoff")
    ax.legend(fontsize=8, frameon=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return _to_svg(fig)
