"""Coin-position composite states on the unbounded integer lattice."""
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

import config
from engine.coin import CoinState
from engine.errors import StateError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CompositeState:
    """
    A pure state sum_m (a0(m)|0> + a1(m)|1>)|m>.

    Amplitudes are stored as a dense (L, 2) block starting at `offset`; sites
    outside the block are implicit zeros. Empty sites at both ends are trimmed
    on construction so `support()` is tight.
    """
    offset: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.ndim != 2 or amps.shape[1] != 2:
            raise StateError(f"Amplitude block must have shape (L, 2), got {amps.shape}")
        probs = np.sum(np.abs(amps) ** 2, axis=1)
        total = float(probs.sum())
        if abs(total - 1.0) > config.PROB_TOL:
            raise StateError(f"Composite state has total probability {total:.12g}, expected 1")
        occupied = np.nonzero(probs > config.SUPPORT_TOL)[0]
        first, last = int(occupied[0]), int(occupied[-1])
        dropped = float(probs[:first].sum() + probs[last + 1:].sum())
        if dropped > 0.0:
            logger.debug("Trimmed %d edge sites holding probability %.3g", len(probs) - (last - first + 1), dropped)
        amps = amps[first:last + 1].copy()
        amps.flags.writeable = False
        object.__setattr__(self, "offset", int(self.offset) + first)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.offset, self.offset + len(self.amplitudes))

    @property
    def probabilities(self) -> np.ndarray:
        """Site probabilities aligned with `positions`."""
        return np.sum(np.abs(self.amplitudes) ** 2, axis=1)

    def support(self) -> tuple[int, int]:
        return self.offset, self.offset + len(self.amplitudes) - 1

    def amplitude_at(self, m: int) -> np.ndarray:
        k = m - self.offset
        if 0 <= k < len(self.amplitudes):
            return self.amplitudes[k].copy()
        return np.zeros(2, dtype=complex)

    def mean_position(self) -> float:
        return float(self.positions @ self.probabilities)


@dataclass(frozen=True, eq=False)
class CompositeEnsemble:
    """Weighted pure composite states; weights sum to 1."""
    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        components = tuple((float(w), s) for w, s in self.components)
        if not components:
            raise StateError("Ensemble needs at least one component")
        weights = np.array([w for w, _ in components])
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > config.PROB_TOL:
            raise StateError(f"Ensemble weights {weights.tolist()} must be non-negative and sum to 1")
        object.__setattr__(self, "components", components)

    def histogram(self) -> list[tuple[int, float]]:
        totals: dict[int, float] = {}
        for weight, state in self.components:
            for m, p in histogram(state):
                totals[m] = totals.get(m, 0.0) + weight * p
        return sorted((m, p) for m, p in totals.items() if p > config.SUPPORT_TOL)

    def mean_position(self) -> float:
        return sum(w * s.mean_position() for w, s in self.components)


def localized(s: CoinState, m: int) -> CompositeState:
    """|s;m>."""
    return CompositeState(m, np.array([s.vector]))


def from_terms(terms: Iterable[tuple[complex, CoinState, int]]) -> CompositeState:
    """
    Superposition sum_k c_k |s_k; m_k>.

    Args:
        terms: (coefficient, coin state, position) triples. The result must be normalized.
    """
    terms = list(terms)
    if not terms:
        raise StateError("Superposition needs at least one term")
    lo = min(m for _, _, m in terms)
    hi = max(m for _, _, m in terms)
    amps = np.zeros((hi - lo + 1, 2), dtype=complex)
    for c, s, m in terms:
        amps[m - lo] += complex(c) * s.vector
    return CompositeState(lo, amps)


def from_mapping(amplitudes: Mapping[int, Sequence[complex]]) -> CompositeState:
    """Build a state from a sparse {position: (a0, a1)} map."""
    if not amplitudes:
        raise StateError("Composite state needs a non-empty support")
    lo, hi = min(amplitudes), max(amplitudes)
    amps = np.zeros((hi - lo + 1, 2), dtype=complex)
    for m, vec in amplitudes.items():
        amps[m - lo] = np.asarray(vec, dtype=complex)
    return CompositeState(lo, amps)


def inner(a: CompositeState, b: CompositeState) -> complex:
    """<a|b>, conjugate-linear in a."""
    lo = max(a.offset, b.offset)
    hi = min(a.offset + len(a.amplitudes), b.offset + len(b.amplitudes))
    if hi <= lo:
        return 0j
    block_a = a.amplitudes[lo - a.offset:hi - a.offset]
    block_b = b.amplitudes[lo - b.offset:hi - b.offset]
    return complex(np.sum(block_a.conj() * block_b))


def shift_by(a: CompositeState, d: int) -> CompositeState:
    return CompositeState(a.offset + int(d), a.amplitudes)


def is_translationally_invariant(a: CompositeState, tol: float = config.TI_TOL) -> bool:
    """True iff a is orthogonal to every shift of itself by d = 1..e-b."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    amps = a.amplitudes
    for d in range(1, len(amps)):
        overlap = np.sum(amps[:-d].conj() * amps[d:])
        if abs(overlap) > tol:
            logger.debug("Shift %d overlap %.3e exceeds %.1e", d, abs(overlap), tol)
            return False
    return True


def histogram(a: CompositeState) -> list[tuple[int, float]]:
    """(position, probability) pairs over the occupied sites, ascending."""
    return [
        (int(m), float(p))
        for m, p in zip(a.positions, a.probabilities)
        if p > config.SUPPORT_TOL
    ]


CompositeLike = Union[CompositeState, CompositeEnsemble]
