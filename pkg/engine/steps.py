"""
Quantum steps and their algebra.

A general step T(p,q;c,s) sends |s;g> to |c;g+p> and |s_perp;g> to
|c_perp;g+q>. Conventional SU(2) steps and split steps are kept as their
own variants and act directly; both also reduce to general-step pipelines.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

import config
from engine.coin import CoinState, overlap, parse_state, perp, states_equal
from engine.composite import CompositeState, inner, localized
from engine.errors import ChainingError
from engine.models import ConventionalStep, GeneralStep, QuantumStep, SplitStep

logger = logging.getLogger(__name__)

_BASIS = (CoinState(1, 0), CoinState(0, 1))


@dataclass(frozen=True)
class ShiftOperator:
    """S(p,q;c): |c;g> -> |c;g+p>, |c_perp;g> -> |c_perp;g+q>."""
    p: int
    q: int
    coin: CoinState


def general_step(p: int, q: int, coin: Union[str, CoinState], shift: Union[str, CoinState]) -> GeneralStep:
    """Shorthand for T(p,q;coin,shift); states may be given in text form."""
    coin = parse_state(coin) if isinstance(coin, str) else coin
    shift = parse_state(shift) if isinstance(shift, str) else shift
    return GeneralStep(p=p, q=q, coin_out=coin, shift_in=shift)


def coin_matrix(step: ConventionalStep) -> np.ndarray:
    """The SU(2) coin toss c(alpha, beta, gamma)."""
    ea, eg = np.exp(1j * step.alpha), np.exp(1j * step.gamma)
    cb, sb = math.cos(step.beta), math.sin(step.beta)
    return np.array([[ea * cb, -np.conj(eg) * sb], [eg * sb, np.conj(ea) * cb]], dtype=complex)


def step_displacement(step: QuantumStep) -> int:
    """p + q for general steps; conventional and split steps contribute 0."""
    if isinstance(step, GeneralStep):
        return step.p + step.q
    return 0


# --- Action ---

def _branch_move(amps: np.ndarray, offset: int, p: int, q: int,
                 alpha: np.ndarray, beta: np.ndarray,
                 c: np.ndarray, c_perp: np.ndarray) -> CompositeState:
    """Place alpha*c at g+p and beta*c_perp at g+q for every site g of the block."""
    lo, hi = min(p, q), max(p, q)
    n = len(amps)
    out = np.zeros((n + hi - lo, 2), dtype=complex)
    out[p - lo:p - lo + n] += alpha[:, None] * c[None, :]
    out[q - lo:q - lo + n] += beta[:, None] * c_perp[None, :]
    return CompositeState(offset + lo, out)


def _apply_general(step: GeneralStep, state: CompositeState) -> CompositeState:
    s = step.shift_in.vector
    s_perp = perp(step.shift_in).vector
    amps = state.amplitudes
    return _branch_move(
        amps, state.offset, step.p, step.q,
        amps @ s.conj(), amps @ s_perp.conj(),
        step.coin_out.vector, perp(step.coin_out).vector,
    )


def _apply_conventional(step: ConventionalStep, state: CompositeState) -> CompositeState:
    tossed = state.amplitudes @ coin_matrix(step).T
    n = len(tossed)
    out = np.zeros((n + 2, 2), dtype=complex)
    out[0:n, 0] = tossed[:, 0]
    out[2:n + 2, 1] = tossed[:, 1]
    return CompositeState(state.offset - 1, out)


def _apply_split(step: SplitStep, state: CompositeState) -> CompositeState:
    amps = state.amplitudes
    n = len(amps)
    rest = math.sqrt(1.0 - step.delta_frac)
    move = math.sqrt(step.delta_frac)
    phase = np.exp(1j * step.delta_phase)
    c = step.coin.vector
    c_perp = perp(step.coin).vector
    x0, x1 = amps[:, 0], amps[:, 1]
    out = np.zeros((n + 2, 2), dtype=complex)
    # window index k+1 is the site itself
    out[1:n + 1] += rest * ((x0 * phase)[:, None] * c_perp[None, :] - (x1 * np.conj(phase))[:, None] * c[None, :])
    out[2:n + 2] += move * x0[:, None] * c[None, :]
    out[0:n] += move * x1[:, None] * c_perp[None, :]
    return CompositeState(state.offset - 1, out)


def apply_step(step: QuantumStep, state: CompositeState) -> CompositeState:
    """
    Apply one step to a composite state.

    Args:
        step (GeneralStep | ConventionalStep | SplitStep): The step.
        state (CompositeState): Normalized input.

    Returns:
        CompositeState: The image under the step's unitary.
    """
    if isinstance(step, GeneralStep):
        return _apply_general(step, state)
    if isinstance(step, ConventionalStep):
        return _apply_conventional(step, state)
    if isinstance(step, SplitStep):
        return _apply_split(step, state)
    raise TypeError(f"Not a quantum step: {type(step).__name__}")


# --- Factorization ---

def coin_toss(coin: CoinState, shift: CoinState) -> np.ndarray:
    """c(c;s) = |c><s| + |c_perp><s_perp|."""
    c, s = coin.vector, shift.vector
    cp, sp = perp(coin).vector, perp(shift).vector
    return np.outer(c, s.conj()) + np.outer(cp, sp.conj())


def factorize(step: GeneralStep) -> tuple[ShiftOperator, np.ndarray]:
    """Split T(p,q;c,s) into the shift S(p,q;c) and the coin toss c(c;s)."""
    return ShiftOperator(step.p, step.q, step.coin_out), coin_toss(step.coin_out, step.shift_in)


def apply_factorized(shift: ShiftOperator, toss: np.ndarray, state: CompositeState) -> CompositeState:
    """Coin toss on every site, then the coin-conditioned shift."""
    tossed = state.amplitudes @ toss.T
    c = shift.coin.vector
    c_perp = perp(shift.coin).vector
    return _branch_move(tossed, state.offset, shift.p, shift.q, tossed @ c.conj(), tossed @ c_perp.conj(), c, c_perp)


def conventional_pipeline(step: ConventionalStep) -> list[GeneralStep]:
    """The conventional step as coin toss T(0,0;c(a,b,g)|0>,0) followed by T(-1,1;0,0)."""
    column = coin_matrix(step)[:, 0]
    return [
        GeneralStep(p=0, q=0, coin_out=CoinState.from_vector(column), shift_in=_BASIS[0]),
        GeneralStep(p=-1, q=1, coin_out=_BASIS[0], shift_in=_BASIS[0]),
    ]


def split_step_decomposition(step: SplitStep) -> tuple[GeneralStep, GeneralStep]:
    """
    Realize T_Delta(delta;c) as T(1,0;c,b) after T(0,-1;0,0).

    Returns:
        tuple: (first, second) in application order, with
               b = sqrt(Delta)|0> - sqrt(1-Delta) e^{i delta}|1>.
    """
    b = CoinState(
        math.sqrt(step.delta_frac),
        -math.sqrt(1.0 - step.delta_frac) * np.exp(1j * step.delta_phase),
    )
    first = GeneralStep(p=0, q=-1, coin_out=_BASIS[0], shift_in=_BASIS[0])
    second = GeneralStep(p=1, q=0, coin_out=step.coin, shift_in=b)
    return first, second


def perp_equivalent(step: GeneralStep) -> GeneralStep:
    """T(q,p;c_perp,s_perp), which acts identically to T(p,q;c,s)."""
    return GeneralStep(p=step.q, q=step.p, coin_out=perp(step.coin_out), shift_in=perp(step.shift_in))


def compose_daisy_chain(steps: Sequence[GeneralStep]) -> GeneralStep:
    """
    Collapse daisy-chained steps into one.

    Consecutive steps must satisfy |<c_i|s_{i+1}>| = 1. The phases of these
    overlaps are folded into the returned shift state, so the result acts
    exactly like the sequence; for literal chaining it is
    T(sum p, sum q; c_last, s_first).

    Raises:
        ChainingError: naming the first pair that does not chain.
    """
    if not steps:
        raise ChainingError(0, "Cannot compose an empty step list")
    for i, step in enumerate(steps):
        if not isinstance(step, GeneralStep):
            raise ChainingError(i, f"Step {i + 1} is not a general step and cannot be daisy-chained")
    phase = 1 + 0j
    for i in range(len(steps) - 1):
        link = overlap(steps[i].coin_out, steps[i + 1].shift_in)
        if abs(abs(link) - 1.0) > config.CHAIN_TOL:
            raise ChainingError(
                i,
                f"Step {i + 1} coin output does not chain into step {i + 2} shift state (|<c|s>| = {abs(link):.6f})",
            )
        phase *= link / abs(link)
    first = steps[0].shift_in
    return GeneralStep(
        p=sum(s.p for s in steps),
        q=sum(s.q for s in steps),
        coin_out=steps[-1].coin_out,
        shift_in=CoinState(phase * first.s0, phase * first.s1),
    )


# --- Comparison ---

def action_distance(apply_a: Callable[[CompositeState], CompositeState],
                    apply_b: Callable[[CompositeState], CompositeState],
                    up_to_phase: bool = True) -> float:
    """
    Distance between two translation-invariant actions on |0;0> and |1;0>.

    With up_to_phase a single phase factor shared by both inputs is optimized
    away; otherwise the outputs are compared as they are.
    """
    total = 0j
    for s in _BASIS:
        home = localized(s, 0)
        total += inner(apply_a(home), apply_b(home))
    gap = 4.0 - 2.0 * (abs(total) if up_to_phase else total.real)
    return math.sqrt(max(0.0, gap))


def steps_equal(a: QuantumStep, b: QuantumStep, up_to_phase: bool = True, tol: float = 1e-6) -> bool:
    return action_distance(lambda x: apply_step(a, x), lambda x: apply_step(b, x), up_to_phase) <= tol


def step_equivalent(a: GeneralStep, b: GeneralStep) -> bool:
    """True iff the two steps act identically up to a global phase."""
    return steps_equal(a, b, up_to_phase=True)


# --- Power identities ---

def power_identity(step: GeneralStep, k: int) -> GeneralStep:
    """T(p,q;u,u)^k = T(kp,kq;u,u)."""
    if not states_equal(step.coin_out, step.shift_in):
        raise ValueError(f"{step} does not share its coin and shift states")
    return GeneralStep(p=k * step.p, q=k * step.q, coin_out=step.coin_out, shift_in=step.shift_in)


def perp_square_identity(step: GeneralStep, n: int = 2) -> GeneralStep:
    """
    T(p,q;u_perp,u)^n = (-1)^(n/2) T(k(p+q), k(p+q); u,u) with k = n/2, for even n.

    The returned step carries the sign in its shift state.
    """
    u = step.shift_in
    if not states_equal(step.coin_out, perp(u)):
        raise ValueError(f"{step} does not map its shift state onto the orthogonal coin state")
    if n <= 0 or n % 2:
        raise ValueError(f"Power must be a positive even integer (got n={n})")
    half = n // 2
    total = half * (step.p + step.q)
    sign = -1 if half % 2 else 1
    return GeneralStep(p=total, q=total, coin_out=u, shift_in=CoinState(sign * u.s0, sign * u.s1))
