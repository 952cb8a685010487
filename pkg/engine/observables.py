"""Hermitian observables on the coin-position space and their expectation values."""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence, Union

import numpy as np
import pandas as pd

import config
from engine.composite import CompositeEnsemble, CompositeLike, CompositeState, from_mapping, inner
from engine.errors import ObservableError, StateError

logger = logging.getLogger(__name__)

SPECTRAL_COLUMNS = ["index", "lambda", "position", "re0", "im0", "re1", "im1"]


@dataclass(frozen=True, eq=False)
class PositionFunction:
    """I_2 (x) sum_m f(m)|m><m|; `f` is evaluated on integer position arrays."""
    name: str
    f: Callable[[np.ndarray], np.ndarray]

    def weights(self, positions: np.ndarray) -> np.ndarray:
        return np.asarray(self.f(positions), dtype=float)


@dataclass(frozen=True, eq=False)
class Spectral:
    """sum_i lambda_i |U_i><U_i| over mutually orthogonal composite states."""
    terms: tuple

    def __post_init__(self):
        terms = tuple((float(lam), u) for lam, u in self.terms)
        if not terms:
            raise ObservableError("Spectral observable needs at least one term")
        for lam, _ in terms:
            if not math.isfinite(lam):
                raise ObservableError(f"Spectral eigenvalue {lam} is not finite")
        for i in range(len(terms)):
            for j in range(i + 1, len(terms)):
                ov = abs(inner(terms[i][1], terms[j][1]))
                if ov > config.ORTHO_TOL:
                    raise ObservableError(f"Spectral states {i} and {j} are not orthogonal (|<U_i|U_j>| = {ov:.3e})")
        object.__setattr__(self, "terms", terms)

    @property
    def name(self) -> str:
        return f"spectral[{len(self.terms)}]"


@dataclass(frozen=True, eq=False)
class CoinKronPosition:
    """A (x) sum_m f(m)|m><m| with A a 2x2 Hermitian coin matrix."""
    coin: np.ndarray
    position: PositionFunction

    def __post_init__(self):
        a = np.asarray(self.coin, dtype=complex)
        if a.shape != (2, 2) or not np.allclose(a, a.conj().T, atol=config.ORTHO_TOL):
            raise ObservableError("Coin factor must be a 2x2 Hermitian matrix")
        object.__setattr__(self, "coin", a)

    @property
    def name(self) -> str:
        return f"coin(x){self.position.name}"


Observable = Union[PositionFunction, Spectral, CoinKronPosition]


def mu() -> PositionFunction:
    """Mean-position operator, f(m) = m."""
    return PositionFunction("mu", lambda m: np.asarray(m, dtype=float))


def delta() -> PositionFunction:
    """Probability difference between positive and negative sites, f(m) = sign(m)."""
    return PositionFunction("delta", lambda m: np.sign(np.asarray(m, dtype=float)))


def zero_projector() -> PositionFunction:
    return PositionFunction("zero", lambda m: (np.asarray(m) == 0).astype(float))


def combine(observables: Sequence[PositionFunction], weights: Sequence[float]) -> PositionFunction:
    """Pointwise sum_i w_i f_i."""
    pairs = list(zip(weights, observables))
    name = "+".join(f"{w:g}*{o.name}" for w, o in pairs)
    return PositionFunction(name, lambda m: sum(w * o.weights(m) for w, o in pairs))


def _overlap_block(a: CompositeState, b: CompositeState):
    lo = max(a.offset, b.offset)
    hi = min(a.offset + len(a.amplitudes), b.offset + len(b.amplitudes))
    if hi <= lo:
        return None
    return (
        np.arange(lo, hi),
        a.amplitudes[lo - a.offset:hi - a.offset],
        b.amplitudes[lo - b.offset:hi - b.offset],
    )


def matrix_element(o: Observable, a: CompositeState, b: CompositeState) -> complex:
    """<a|O|b>."""
    if isinstance(o, Spectral):
        return complex(sum(lam * inner(a, u) * inner(u, b) for lam, u in o.terms))
    block = _overlap_block(a, b)
    if block is None:
        return 0j
    positions, block_a, block_b = block
    if isinstance(o, PositionFunction):
        site = np.sum(block_a.conj() * block_b, axis=1)
        return complex(o.weights(positions) @ site)
    if isinstance(o, CoinKronPosition):
        site = np.einsum("ki,ij,kj->k", block_a.conj(), o.coin, block_b)
        return complex(o.position.weights(positions) @ site)
    raise TypeError(f"Not an observable: {type(o).__name__}")


def expectation(o: Observable, x: CompositeLike) -> float:
    """
    Expectation value of an observable.

    Args:
        o (Observable): The observable.
        x (CompositeState | CompositeEnsemble): Pure state or weighted ensemble.

    Returns:
        float: <x|O|x>, weight-averaged for ensembles.
    """
    if isinstance(x, CompositeEnsemble):
        return float(sum(w * expectation(o, s) for w, s in x.components))
    value = matrix_element(o, x, x)
    if abs(value.imag) > config.PROB_TOL:
        logger.warning("Discarding imaginary part %.3e of %s expectation", value.imag, getattr(o, "name", o))
    return float(value.real)


def expectation_from_histogram(o: PositionFunction, hist: Sequence[tuple[int, float]]) -> float:
    if not hist:
        return 0.0
    positions = np.array([m for m, _ in hist])
    probs = np.array([p for _, p in hist])
    return float(o.weights(positions) @ probs)


def load_spectral(path: Union[str, Path]) -> Spectral:
    """
    Read a spectral observable from CSV.

    Each row holds one site of one eigenstate: columns
    index, lambda, position, re0, im0, re1, im1.
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path)
    except FileNotFoundError:
        raise ObservableError(f"Spectral file '{path}' not found") from None
    missing = [c for c in SPECTRAL_COLUMNS if c not in frame.columns]
    if missing:
        raise ObservableError(f"Spectral file '{path}' is missing columns {missing}")
    terms = []
    for index, rows in frame.groupby("index", sort=True):
        lambdas = rows["lambda"].unique()
        if len(lambdas) != 1:
            raise ObservableError(f"Spectral file '{path}': eigenstate {index} has several eigenvalues")
        amplitudes = {}
        for row in rows.itertuples(index=False):
            amplitudes[int(row.position)] = (complex(row.re0, row.im0), complex(row.re1, row.im1))
        try:
            state = from_mapping(amplitudes)
        except StateError as exc:
            raise ObservableError(f"Spectral file '{path}': eigenstate {index}: {exc}") from None
        terms.append((float(lambdas[0]), state))
    logger.debug("Loaded %d spectral terms from %s", len(terms), path)
    return Spectral(tuple(terms))


def parse_observable(token: str) -> Observable:
    """mu, delta, zero or spectral:<file>."""
    token = token.strip()
    if token == config.ObservableKind.MU.value:
        return mu()
    if token == config.ObservableKind.DELTA.value:
        return delta()
    if token == config.ObservableKind.ZERO.value:
        return zero_projector()
    if token.startswith(config.ObservableKind.SPECTRAL.value + ":"):
        return load_spectral(token.split(":", 1)[1])
    raise ObservableError(f"Unknown observable '{token}'; expected mu, delta, zero or spectral:<file>")
