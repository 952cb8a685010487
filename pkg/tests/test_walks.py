import numpy as np
import pytest

from engine.coin import CoinDensity, named_state, states_equal
from engine.composite import inner
from engine.models import ConventionalStep, GeneralStep, Walk
from engine.observables import mu
from engine.oracle import random_density, random_state
from engine.payoff import payoff
from engine.steps import action_distance, apply_step, compose_daisy_chain, general_step, steps_equal
from engine.walks import (
    bias,
    displacement,
    ensemble_histogram,
    evolve,
    flow_matches,
    is_homogeneous,
    iter_steps,
    power,
    run,
    run_mixed,
    sequence,
    step_count,
    trace_flow,
)


def test_power_and_sequence_lengths(two_steps):
    assert step_count(power(two_steps[0], 6)) == 6
    walk = sequence(two_steps, 3)
    assert step_count(walk) == 6
    assert list(iter_steps(walk))[:2] == two_steps


def test_nested_walk_iterates_in_order():
    a, b = general_step(1, 1, "0", "0"), general_step(-1, -1, "0", "0")
    inner_block = Walk(steps=[b], repeat=2)
    walk = Walk(steps=[a, inner_block], repeat=2)
    assert list(iter_steps(walk)) == [a, b, b, a, b, b]
    assert step_count(walk) == 6
    assert displacement(walk) == 2 * (2 - 4)


def test_bias_labels():
    assert bias(power(general_step(1, -1, "h", "0"), 4)) == "unbiased"
    assert bias(power(general_step(2, 1, "h", "0"), 1)) == "forward-biased"
    assert bias(power(general_step(-2, 1, "h", "0"), 1)) == "backward-biased"
    assert displacement(power(ConventionalStep(alpha=0, beta=0.5, gamma=0), 3)) == 0


def test_homogeneous_walks(two_steps):
    assert is_homogeneous(power(two_steps[0], 4))
    assert not is_homogeneous(sequence(two_steps, 1))


def test_single_step_walk_histogram():
    walk = power(general_step(-1, -1, "v", "h"), 1)
    assert ensemble_histogram(walk, named_state("h")) == [(-1, pytest.approx(1.0))]


def test_run_preserves_norm(two_steps):
    out = run(sequence(two_steps, 4), named_state("a"))
    assert inner(out, out) == pytest.approx(1.0)


def test_run_mixed_drops_zero_weight_branch(two_steps):
    walk = sequence(two_steps, 1)
    assert len(run_mixed(walk, named_state("h")).components) == 1
    assert len(run_mixed(walk, CoinDensity(0.3, named_state("h"))).components) == 2


def test_flow_of_designed_two_step_walks(designed_two_steps):
    t1, t2 = designed_two_steps
    h = named_state("h")
    v = named_state("v")
    assert flow_matches(trace_flow(power(t1, 1), h), [(0, h), (-1, v)])
    assert flow_matches(trace_flow(power(t1, 2), h), [(0, h), (-1, v), (-2, h)])
    assert flow_matches(trace_flow(power(t2, 2), h), [(0, h), (-4, v), (-1, h)])
    assert flow_matches(trace_flow(sequence([t1, t2], 1), h), [(0, h), (-1, v), (2, h)])


def test_flow_of_designed_four_step_walks(designed_four_steps):
    zero, one = named_state("0"), named_state("1")
    endpoints = []
    for step in designed_four_steps:
        flow = trace_flow(power(step, 4), zero)
        endpoints.append(flow[-1][0])
        assert flow[-1][1] is not None
    flow = trace_flow(sequence(designed_four_steps, 1), zero)
    assert flow_matches(
        flow,
        [(0, zero), (-1, named_state("h")), (-2, named_state("d")), (-3, one), (1, zero)],
    )
    endpoints.append(flow[-1][0])
    assert endpoints == [-4, -4, -4, -2, 1]


def test_flow_stops_when_state_spreads(two_steps):
    flow = trace_flow(power(two_steps[0], 3), named_state("h"))
    assert flow[-1][1] is None
    assert len(flow) == 2


def test_flow_matches_is_phase_blind():
    h = named_state("h")
    minus_h = type(h)(-h.s0, -h.s1)
    assert states_equal(h, minus_h)
    assert flow_matches([(0, h), (2, minus_h)], [(0, h), (2, h)])
    assert not flow_matches([(0, h), (2, None)], [(0, h), (2, h)])


def test_backward_steps_lose_mean_position_for_every_home():
    rng = np.random.default_rng(21)
    for _ in range(40):
        p, q = (int(x) for x in rng.integers(-4, 0, size=2))
        step = GeneralStep(p=p, q=q, coin_out=random_state(rng), shift_in=random_state(rng))
        walk = power(step, int(rng.integers(1, 7)))
        home = random_density(rng)
        value = payoff(mu(), walk, home)
        assert value < 0
        assert value <= step_count(walk) * max(p, q) + 1e-9


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("design, target", [("designed_two_steps", "h"), ("designed_four_steps", "0")])
def test_designed_cycle_collapses_to_one_step(request, design, target, n):
    steps = request.getfixturevalue(design)
    w = named_state(target)
    collapsed = GeneralStep(p=n * sum(s.p for s in steps), q=n * sum(s.q for s in steps), coin_out=w, shift_in=w)
    walk = sequence(steps, n)
    distance = action_distance(lambda x: evolve(walk, x), lambda x: apply_step(collapsed, x))
    assert distance <= 1e-6
    assert steps_equal(compose_daisy_chain(list(steps) * n), collapsed)
