"""
Payoffs of a single walk and the reduced coin operator o.

Every payoff of a walk is fixed by the 2x2 Hermitian matrix o built from the
walk's images of |0;0> and |1;0>. Its eigenpairs give the extreme payoffs,
and any home density is classified by one Bloch dot product against the
v_max direction.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

import config
from engine.coin import CoinLike, CoinState, as_density, perp, qubit_vector
from engine.models import Walk
from engine.observables import Observable, expectation, matrix_element
from engine.walks import run, run_mixed

logger = logging.getLogger(__name__)

Outcome = config.Outcome


@dataclass(frozen=True, eq=False)
class CoinObservableAnalysis:
    o_matrix: np.ndarray
    o_max: float
    o_min: float
    v_max: CoinState
    v_min: CoinState
    omega: float
    omega_cap: Optional[float]

    @property
    def degenerate(self) -> bool:
        return self.omega_cap is None

    @property
    def normal(self) -> np.ndarray:
        """Bloch vector of v_max."""
        return qubit_vector(self.v_max).array

    @property
    def payoff_constant(self) -> float:
        """Payoff of the maximally mixed home, (o_max + o_min) / 2."""
        return 0.5 * (self.o_max + self.o_min)


@dataclass(frozen=True, eq=False)
class GameSpec:
    walk: Walk
    observable: Observable
    target_payoff: float

    def __post_init__(self):
        if not math.isfinite(self.target_payoff):
            raise ValueError("target payoff must be finite")

    def analyze(self) -> CoinObservableAnalysis:
        return analyze(self.observable, self.walk, self.target_payoff)

    def payoff(self, home: CoinLike) -> float:
        return payoff(self.observable, self.walk, home)


def payoff(o: Observable, walk: Walk, home: CoinLike) -> float:
    """Expectation of `o` in the walk's output for a pure or mixed home."""
    return expectation(o, run_mixed(walk, home))


def reduced_coin_operator(o: Observable, walk: Walk) -> np.ndarray:
    """
    The 2x2 operator o in the |0>, |1> basis.

    Args:
        o (Observable): Composite-space observable.
        walk (Walk): The walk.

    Returns:
        np.ndarray: [[<W|O|W>, <W|O|W'>], [<W'|O|W>, <W'|O|W'>]] with
                    W = walk|0;0> and W' = walk|1;0>, symmetrized to be exactly Hermitian.
    """
    images = (run(walk, CoinState(1, 0)), run(walk, CoinState(0, 1)))
    m = np.array([[matrix_element(o, a, b) for b in images] for a in images], dtype=complex)
    return 0.5 * (m + m.conj().T)


def canonical_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the first nonzero component is real and positive."""
    v = np.asarray(vector, dtype=complex)
    for x in v:
        if abs(x) > config.NORM_TOL:
            return v * (abs(x) / x)
    return v


def eigh_2x2(matrix: np.ndarray) -> tuple[float, float, CoinState, CoinState]:
    """
    Closed-form eigenpairs of a 2x2 Hermitian matrix.

    Returns:
        tuple: (o_max, o_min, v_max, v_min); eigenvectors phase-canonical.
               A degenerate matrix returns |0>, |1>.
    """
    a = float(matrix[0, 0].real)
    d = float(matrix[1, 1].real)
    b = complex(matrix[0, 1])
    mean = 0.5 * (a + d)
    radius = math.hypot(0.5 * (a - d), abs(b))
    o_max, o_min = mean + radius, mean - radius
    if 2 * radius <= config.DEGENERACY_TOL:
        return o_max, o_min, CoinState(1, 0), CoinState(0, 1)
    u1 = np.array([b, o_max - a], dtype=complex)
    u2 = np.array([o_max - d, b.conjugate()], dtype=complex)
    u = u1 if np.linalg.norm(u1) >= np.linalg.norm(u2) else u2
    v_max = CoinState.from_vector(canonical_phase(u / np.linalg.norm(u)))
    v_min = CoinState.from_vector(canonical_phase(perp(v_max).vector))
    return o_max, o_min, v_max, v_min


def omega_threshold(o_max: float, o_min: float, omega: float) -> Optional[float]:
    """(2 omega - (o_max + o_min)) / (o_max - o_min); None for a degenerate gap."""
    gap = o_max - o_min
    if abs(gap) <= config.DEGENERACY_TOL:
        return None
    return (2 * omega - (o_max + o_min)) / gap


def analyze(o: Observable, walk: Walk, omega: float) -> CoinObservableAnalysis:
    matrix = reduced_coin_operator(o, walk)
    o_max, o_min, v_max, v_min = eigh_2x2(matrix)
    cap = omega_threshold(o_max, o_min, omega)
    logger.debug("o_max=%.6f o_min=%.6f Omega=%s", o_max, o_min, cap)
    return CoinObservableAnalysis(matrix, o_max, o_min, v_max, v_min, float(omega), cap)


def payoff_analytic(a: CoinObservableAnalysis, home: CoinLike) -> float:
    """1/2 (o_max - o_min) S(v_max).S(rho) + 1/2 (o_max + o_min)."""
    t = float(a.normal @ qubit_vector(as_density(home)).array)
    return 0.5 * (a.o_max - a.o_min) * t + a.payoff_constant


def _decide(value: float, threshold: float, tie_tol: float) -> Outcome:
    if value > threshold + tie_tol:
        return Outcome.WIN
    if value < threshold - tie_tol:
        return Outcome.LOSE
    return Outcome.TIE


def classify(a: CoinObservableAnalysis, home: CoinLike, tie_tol: float = config.TIE_TOL) -> Outcome:
    """Win, Lose or Tie for the analysed walk against its target payoff."""
    if a.degenerate:
        return _decide(a.payoff_constant, a.omega, tie_tol)
    t = float(a.normal @ qubit_vector(as_density(home)).array)
    return _decide(t, a.omega_cap, tie_tol)


def classify_vectors(a: CoinObservableAnalysis, bloch: np.ndarray, tie_tol: float = config.TIE_TOL) -> np.ndarray:
    """
    Vectorized classification of many Bloch vectors.

    Args:
        bloch (np.ndarray): (..., 3) Bloch vectors.

    Returns:
        np.ndarray: Outcome values ('W', 'L', 'T') with shape bloch.shape[:-1].
    """
    if a.degenerate:
        label = _decide(a.payoff_constant, a.omega, tie_tol).value
        return np.full(bloch.shape[:-1], label, dtype="<U1")
    t = bloch @ a.normal
    return np.where(
        t > a.omega_cap + tie_tol, Outcome.WIN.value,
        np.where(t < a.omega_cap - tie_tol, Outcome.LOSE.value, Outcome.TIE.value),
    )
