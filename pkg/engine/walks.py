import logging
from typing import Iterator, Optional, Sequence, Union

from engine.coin import CoinLike, CoinState, as_density, perp, states_equal
from engine.composite import CompositeEnsemble, CompositeState, localized
from engine.models import GeneralStep, QuantumStep, Walk
from engine.steps import apply_step, step_displacement

logger = logging.getLogger(__name__)

WalkElement = Union[GeneralStep, QuantumStep, Walk]


def power(step: WalkElement, k: int) -> Walk:
    """step^k as a lazily repeated block."""
    return Walk(steps=[step], repeat=k)


def sequence(steps: Sequence[WalkElement], n: int = 1) -> Walk:
    """[T_m ... T_1]^n with T_1 applied first."""
    return Walk(steps=list(steps), repeat=n)


def iter_steps(walk: Walk) -> Iterator[QuantumStep]:
    """Yield the walk's steps in application order without flattening repeats."""
    for _ in range(walk.repeat):
        for element in walk.steps:
            if isinstance(element, Walk):
                yield from iter_steps(element)
            else:
                yield element


def step_count(walk: Walk) -> int:
    inner = sum(step_count(e) if isinstance(e, Walk) else 1 for e in walk.steps)
    return walk.repeat * inner


def displacement(walk: Walk) -> int:
    """
    Walk displacement d = sum over steps of (p + q).

    Returns:
        int: 0 for unbiased walks, > 0 forward-biased, < 0 backward-biased.
    """
    inner = sum(displacement(e) if isinstance(e, Walk) else step_displacement(e) for e in walk.steps)
    return walk.repeat * inner


def bias(walk: Walk) -> str:
    d = displacement(walk)
    if d == 0:
        return "unbiased"
    return "forward-biased" if d > 0 else "backward-biased"


def is_homogeneous(walk: Walk) -> bool:
    """True when every step of the walk is the same step."""
    first = None
    for step in iter_steps(walk):
        if first is None:
            first = step
        elif step != first:
            return False
    return True


def evolve(walk: Walk, state: CompositeState) -> CompositeState:
    for step in iter_steps(walk):
        state = apply_step(step, state)
    return state


def run(walk: Walk, home: CoinState) -> CompositeState:
    """Apply the walk to |home;0>."""
    return evolve(walk, localized(home, 0))


def run_mixed(walk: Walk, home: CoinLike) -> CompositeEnsemble:
    """
    Apply the walk to a home density r|s><s| + (1-r)|s_perp><s_perp|.

    Returns:
        CompositeEnsemble: {(r, W|s;0>), (1-r, W|s_perp;0>)}; branches of zero
        weight are dropped, so pure homes give a single branch.
    """
    rho = as_density(home)
    components = []
    if rho.r > 0.0:
        components.append((rho.r, run(walk, rho.basis)))
    if rho.r < 1.0:
        components.append((1.0 - rho.r, run(walk, perp(rho.basis))))
    return CompositeEnsemble(tuple(components))


def ensemble_histogram(walk: Walk, home: CoinLike) -> list[tuple[int, float]]:
    return run_mixed(walk, home).histogram()


def trace_flow(walk: Walk, home: CoinState) -> list[tuple[int, Optional[CoinState]]]:
    """
    Follow |home;0> step by step.

    Returns:
        list: (position, coin state) after each step while the state stays on a
              single site; the first spread-out step ends the trace with
              (position of the lowest site, None).
    """
    state = localized(home, 0)
    flow = [(0, home)]
    for step in iter_steps(walk):
        state = apply_step(step, state)
        lo, hi = state.support()
        if lo != hi:
            flow.append((lo, None))
            break
        flow.append((lo, CoinState.from_vector(state.amplitudes[0])))
    return flow


def flow_matches(flow: Sequence[tuple[int, Optional[CoinState]]], expected: Sequence[tuple[int, CoinState]]) -> bool:
    """Compare a traced flow against (position, state) pairs up to coin phase."""
    if len(flow) != len(expected):
        return False
    for (m, s), (m_exp, s_exp) in zip(flow, expected):
        if m != m_exp or s is None or not states_equal(s, s_exp):
            return False
    return True
