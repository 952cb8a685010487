"""Coin-space states: pure states, mixed states, Bloch vectors and the named reference states."""
import logging
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

import config
from engine.errors import StateError, UnknownStateError

logger = logging.getLogger(__name__)

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_PI_RE = re.compile(r"^([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/(\d+(?:\.\d*)?))?$")


@dataclass(frozen=True)
class CoinState:
    """A normalized pure state s0|0> + s1|1> of the coin."""
    s0: complex
    s1: complex

    def __post_init__(self):
        s0, s1 = complex(self.s0), complex(self.s1)
        norm = math.sqrt(abs(s0) ** 2 + abs(s1) ** 2)
        if not math.isfinite(norm) or abs(norm - 1.0) > config.RENORM_TOL:
            raise StateError(f"Coin state ({s0}, {s1}) has norm {norm:.9g}, expected 1")
        if abs(norm - 1.0) > config.NORM_TOL:
            logger.warning("Renormalizing coin state with norm %.12g", norm)
            s0, s1 = s0 / norm, s1 / norm
        object.__setattr__(self, "s0", s0)
        object.__setattr__(self, "s1", s1)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.s0, self.s1], dtype=complex)

    @classmethod
    def from_vector(cls, vector: Sequence[complex]) -> "CoinState":
        return cls(complex(vector[0]), complex(vector[1]))


@dataclass(frozen=True)
class BlochAngles:
    theta: float
    phi: float

    def __post_init__(self):
        theta, phi = float(self.theta), float(self.phi)
        if not 0.0 <= theta <= math.pi:
            raise StateError(f"theta={theta} outside [0, pi]")
        if not 0.0 <= phi < 2 * math.pi:
            raise StateError(f"phi={phi} outside [0, 2pi)")
        if theta in (0.0, math.pi):
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)


@dataclass(frozen=True)
class CoinDensity:
    """
    The mixed state r|s><s| + (1-r)|s_perp><s_perp|.

    Pure states are carried as r=1. The basis state keeps its raw phase; only
    the ray matters for every derived quantity.
    """
    r: float
    basis: CoinState

    def __post_init__(self):
        r = float(self.r)
        if not 0.0 <= r <= 1.0:
            raise StateError(f"Mixing fraction r={r} outside [0, 1]")
        if not isinstance(self.basis, CoinState):
            raise StateError("CoinDensity basis must be a CoinState")
        object.__setattr__(self, "r", r)

    @property
    def is_pure(self) -> bool:
        return self.r in (0.0, 1.0)

    @property
    def matrix(self) -> np.ndarray:
        return density_matrix(self)


@dataclass(frozen=True)
class QubitVector:
    x: float
    y: float
    z: float

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.array))

    def dot(self, other: "QubitVector") -> float:
        return float(self.array @ other.array)


CoinLike = Union[CoinState, CoinDensity]


def perp(s: CoinState) -> CoinState:
    """Orthogonal partner (-conj(s1), conj(s0)); perp(perp(s)) == -s."""
    return CoinState(-s.s1.conjugate(), s.s0.conjugate())


def overlap(a: CoinState, b: CoinState) -> complex:
    """<a|b>."""
    return a.s0.conjugate() * b.s0 + a.s1.conjugate() * b.s1


def states_equal(a: CoinState, b: CoinState, up_to_phase: bool = True, tol: float = 1e-9) -> bool:
    if up_to_phase:
        return abs(abs(overlap(a, b)) - 1.0) <= tol
    return abs(a.s0 - b.s0) <= tol and abs(a.s1 - b.s1) <= tol


def as_density(x: CoinLike) -> CoinDensity:
    if isinstance(x, CoinDensity):
        return x
    return CoinDensity(1.0, x)


def density_matrix(rho: CoinLike) -> np.ndarray:
    """2x2 matrix view of a pure or mixed coin state."""
    rho = as_density(rho)
    s = rho.basis.vector
    t = perp(rho.basis).vector
    return rho.r * np.outer(s, s.conj()) + (1.0 - rho.r) * np.outer(t, t.conj())


def qubit_vector(rho: CoinLike) -> QubitVector:
    """
    Bloch vector (tr(rho sx), tr(rho sy), tr(rho sz)).

    Args:
        rho (CoinDensity | CoinState): Pure states are accepted directly.

    Returns:
        QubitVector: Unit length for pure states, length |2r-1| otherwise.
    """
    m = density_matrix(rho)
    return QubitVector(
        float(np.trace(m @ _PAULI_X).real),
        float(np.trace(m @ _PAULI_Y).real),
        float(np.trace(m @ _PAULI_Z).real),
    )


def from_bloch(angles: BlochAngles) -> CoinState:
    half = angles.theta / 2
    return CoinState(math.cos(half), complex(math.cos(angles.phi), math.sin(angles.phi)) * math.sin(half))


def bloch_angles(s: CoinState) -> BlochAngles:
    """Inverse of from_bloch up to global phase."""
    v = qubit_vector(s)
    theta = math.acos(max(-1.0, min(1.0, v.z)))
    if math.hypot(v.x, v.y) <= config.NORM_TOL:
        return BlochAngles(0.0 if v.z > 0 else math.pi, 0.0)
    phi = math.atan2(v.y, v.x) % (2 * math.pi)
    if phi >= 2 * math.pi:
        phi = 0.0
    return BlochAngles(theta, phi)


def density_from_bloch(vector: Union[QubitVector, Sequence[float]]) -> CoinDensity:
    """Build the density whose Bloch vector is `vector` (length at most 1)."""
    b = vector.array if isinstance(vector, QubitVector) else np.asarray(vector, dtype=float)
    length = float(np.linalg.norm(b))
    if length > 1.0 + config.NORM_TOL:
        raise StateError(f"Bloch vector length {length:.12g} exceeds 1")
    if length <= config.NORM_TOL:
        return CoinDensity(0.5, named_state("0"))
    length = min(length, 1.0)
    theta = math.acos(max(-1.0, min(1.0, b[2] / length)))
    phi = math.atan2(b[1], b[0]) % (2 * math.pi) if math.hypot(b[0], b[1]) > config.NORM_TOL else 0.0
    if phi >= 2 * math.pi:
        phi = 0.0
    return CoinDensity((1.0 + length) / 2, from_bloch(BlochAngles(theta, phi)))


def mixture(components: Iterable[tuple[float, CoinLike]]) -> CoinDensity:
    """
    Convex combination sum_i w_i rho_i of coin states.

    Args:
        components: (weight, state) pairs; weights must be non-negative and sum to 1.

    Returns:
        CoinDensity: Obtained from the averaged Bloch vector.
    """
    components = list(components)
    if not components:
        raise StateError("Mixture needs at least one component")
    weights = np.array([w for w, _ in components], dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > config.PROB_TOL:
        raise StateError(f"Mixture weights {weights.tolist()} must be non-negative and sum to 1")
    b = sum(w * qubit_vector(x).array for w, x in components)
    return density_from_bloch(b)


def latitude(s: CoinLike, axis: CoinState) -> float:
    """Angle between the Bloch vectors of s and axis."""
    dot = qubit_vector(s).array @ qubit_vector(axis).array
    norm = qubit_vector(s).norm
    if norm <= config.NORM_TOL:
        return math.pi / 2
    return math.acos(max(-1.0, min(1.0, dot / norm)))


def named_state(name: str) -> CoinState:
    try:
        s0, s1 = config.NAMED_STATES[name]
    except KeyError:
        raise UnknownStateError(f"Unknown coin state '{name}'; expected one of {sorted(config.NAMED_STATES)}") from None
    return CoinState(s0, s1)


# --- Text forms ---

def parse_real(token: str) -> float:
    """Parse a decimal or a multiple of pi such as '13pi/16' or '-pi/2'."""
    text = token.strip().replace(" ", "")
    try:
        return float(text)
    except ValueError:
        pass
    m = _PI_RE.match(text)
    if not m:
        raise StateError(f"Cannot parse number '{token}'")
    coef = m.group(1)
    k = 1.0 if coef in ("", "+") else -1.0 if coef == "-" else float(coef)
    j = float(m.group(2)) if m.group(2) else 1.0
    return k * math.pi / j


def parse_state(text: str) -> CoinState:
    """
    Parse a pure coin state.

    Accepted forms are a named token, `bloch:theta,phi` in radians, or four
    decimals `re0,im0,re1,im1`.
    """
    text = text.strip()
    if text.startswith("bloch:"):
        parts = text[len("bloch:"):].split(",")
        if len(parts) != 2:
            raise StateError(f"Expected 'bloch:theta,phi', got '{text}'")
        return from_bloch(BlochAngles(parse_real(parts[0]), parse_real(parts[1])))
    if "," in text:
        parts = text.split(",")
        if len(parts) != 4:
            raise StateError(f"Expected four numbers 're0,im0,re1,im1', got '{text}'")
        re0, im0, re1, im1 = (parse_real(p) for p in parts)
        return CoinState(complex(re0, im0), complex(re1, im1))
    return named_state(text)


def parse_home(text: str) -> CoinLike:
    """
    Parse a home state: any pure form, `mix:r,<state>` or
    `blend:w1@<state>|w2@<state>...`.
    """
    text = text.strip()
    if text.startswith("mix:"):
        body = text[len("mix:"):]
        r_text, sep, state_text = body.partition(",")
        if not sep:
            raise StateError(f"Expected 'mix:r,<state>', got '{text}'")
        return CoinDensity(parse_real(r_text), parse_state(state_text))
    if text.startswith("blend:"):
        components = []
        for part in text[len("blend:"):].split("|"):
            w_text, sep, state_text = part.partition("@")
            if not sep:
                raise StateError(f"Blend component '{part}' must look like 'w@<state>'")
            components.append((parse_real(w_text), parse_home(state_text)))
        return mixture(components)
    return parse_state(text)


def format_state(s: CoinState) -> str:
    for name, (s0, s1) in config.NAMED_STATES.items():
        if abs(s.s0 - s0) <= config.NORM_TOL and abs(s.s1 - s1) <= config.NORM_TOL:
            return name
    return ",".join(repr(float(x)) for x in (s.s0.real, s.s0.imag, s.s1.real, s.s1.imag))


def format_home(x: CoinLike) -> str:
    if isinstance(x, CoinDensity):
        if x.r == 1.0:
            return format_state(x.basis)
        return f"mix:{x.r!r},{format_state(x.basis)}"
    return format_state(x)
