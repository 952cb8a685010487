import math
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest

from config import Outcome
from engine.coin import BlochAngles, CoinDensity, from_bloch, named_state
from engine.errors import ConfigError, DesignConstraintError
from engine.models import DesignSpec
from engine.observables import delta, mu, zero_projector
from engine.parrondo import (
    bloch_grid,
    bracket_boundary,
    build_family,
    commutator_diagnostic,
    design_daisy_chain,
    designed_payoffs,
    flags_over,
    label_vector,
    latitude_state,
    parrondo_cap,
    parrondo_caps,
    parrondo_test,
    persistence_scan,
    region_map,
    sample_parrondo_states,
    scan_latitude,
    zero_position_family,
    zero_position_walks,
)
from engine.payoff import payoff
from engine.steps import general_step

LLW = [Outcome.LOSE, Outcome.LOSE, Outcome.WIN]


def _random_state(rng):
    return from_bloch(BlochAngles(float(rng.uniform(0, math.pi)), float(rng.uniform(0, 2 * math.pi * 0.999))))


# --- Families ---

def test_build_family_shapes(two_step_family):
    assert two_step_family.m == 2
    assert len(two_step_family.walks) == 3
    assert two_step_family.walks[0].repeat == 6
    assert two_step_family.walks[2].repeat == 3


def test_build_family_errors(two_steps):
    with pytest.raises(ConfigError):
        build_family([], 1)
    with pytest.raises(ConfigError):
        build_family(two_steps, 0)


def test_single_step_family_has_two_walks():
    fam = build_family([general_step(1, 1, "0", "0")], 2)
    labels = label_vector(fam, mu(), 0.0, named_state("h"))
    assert labels == [Outcome.WIN, Outcome.WIN]
    assert not parrondo_test(fam, mu(), 0.0, named_state("h"))


# --- Label vectors ---

@pytest.mark.parametrize("home", ["psi1", "psi2", "rho12"])
@pytest.mark.parametrize("observable", [mu, delta])
def test_two_step_homes_are_parrondo(two_step_family, request, home, observable):
    state = request.getfixturevalue(home)
    assert label_vector(two_step_family, observable(), 0.0, state) == LLW
    assert parrondo_test(two_step_family, observable(), 0.0, state)


@pytest.mark.parametrize("observable", [mu, delta])
def test_three_step_home_is_parrondo(three_step_family, phi_home, observable):
    labels = label_vector(three_step_family, observable(), 0.0, phi_home)
    assert labels == [Outcome.LOSE] * 3 + [Outcome.WIN]


def test_high_target_loses_everywhere(two_step_family, psi1):
    assert label_vector(two_step_family, mu(), 10.0, psi1) == [Outcome.LOSE] * 3


# --- Region maps ---

def test_bloch_grid_poles_are_exact():
    thetas = np.linspace(0.0, math.pi, 5)
    phis = np.linspace(0.0, 2 * math.pi, 7)
    vectors = bloch_grid(thetas, phis)
    assert vectors.shape == (5, 7, 3)
    assert np.all(vectors[0] == (0.0, 0.0, 1.0))
    assert np.all(vectors[-1] == (0.0, 0.0, -1.0))
    assert np.linalg.norm(vectors, axis=-1) == pytest.approx(np.ones((5, 7)))


def test_region_map_marks_known_parrondo_nodes(two_step_family):
    region = region_map(two_step_family, mu(), 0.0, grid=(17, 33))
    assert region.shape == (17, 33)
    assert region.labels.shape == (17, 33, 3)
    assert region.parrondo[8, 13]
    assert region.parrondo[8, 14]
    assert region.nearest_node(math.pi / 2, 13 * math.pi / 16) == (8, 13)
    assert region.label_at(math.pi / 2, 7 * math.pi / 8) == "LLW"
    assert 0.0 < region.parrondo_fraction < 1.0


def test_region_map_matches_pointwise_test(two_step_family):
    region = region_map(two_step_family, delta(), 0.0, grid=(7, 9))
    for j, theta in enumerate(region.thetas):
        for k, phi in enumerate(region.phis[:-1]):
            home = from_bloch(BlochAngles(float(theta), float(phi)))
            assert region.parrondo[j, k] == parrondo_test(two_step_family, delta(), 0.0, home)


def test_region_labels_are_bounded(three_step_family):
    region = region_map(three_step_family, mu(), 0.0, grid=(13, 25))
    labels = region.distinct_labels()
    assert len(labels) <= 2 ** 4
    assert all(len(label) == 4 and set(label) <= {"W", "L", "T"} for label in labels)
    codes = region.codes()
    assert codes.shape == region.shape
    assert codes.max() < 2 ** 4


def test_region_frame_columns(two_step_family):
    frame = region_map(two_step_family, mu(), 0.0, grid=(3, 4)).to_frame()
    assert list(frame.columns) == ["theta", "phi", "label_w1", "label_w2", "label_w3", "parrondo"]
    assert len(frame) == 12


def test_region_map_rejects_tiny_grid(two_step_family):
    with pytest.raises(ConfigError):
        region_map(two_step_family, mu(), 0.0, grid=(1, 5))


def test_sampled_states_are_parrondo(two_step_family):
    region = region_map(two_step_family, mu(), 0.0, grid=(17, 33))
    states = sample_parrondo_states(region, np.random.default_rng(3), 5)
    assert len(states) == 5
    assert all(flags_over(two_step_family, mu(), 0.0, states))


def test_caps(two_step_family):
    caps = parrondo_caps(two_step_family, mu(), 0.0)
    assert [c.walk_index for c in caps] == [1, 2, 3]
    assert [c.sense for c in caps] == ["below", "below", "above"]
    assert all(c.omega == pytest.approx(0.0, abs=1e-9) for c in caps)
    assert np.linalg.norm(caps[0].normal) == pytest.approx(1.0)


def test_caps_of_degenerate_walks():
    fam = zero_position_family(2, 1, named_state("h"), named_state("0"), named_state("d"), named_state("f"))
    caps = parrondo_caps(fam, zero_projector(), 0.5)
    assert [c.sense for c in caps] == ["always", "always", "always"]


# --- Persistence ---

def test_persistence_of_two_step_family(two_steps, psi1):
    report = persistence_scan(two_steps, mu(), 0.0, psi1, (1, 19))
    assert list(report.table.columns) == ["n", "payoff_w1", "payoff_w2", "payoff_w3", "parrondo"]
    assert len(report.table) == 19
    assert report.first_parrondo == 3
    assert report.persistent
    assert not report.table["parrondo"].iloc[:2].any()


@pytest.mark.parametrize("home", ["psi1", "psi2", "rho12"])
@pytest.mark.parametrize("observable", [mu, delta])
def test_payoff_signs_persist(two_steps, request, home, observable):
    state = request.getfixturevalue(home)
    table = persistence_scan(two_steps, observable(), 0.0, state, range(3, 20)).table
    assert (table["payoff_w1"] < 0).all()
    assert (table["payoff_w2"] < 0).all()
    assert (table["payoff_w3"] > 0).all()
    assert table["parrondo"].all()


def test_persistence_rejects_bad_range(two_steps, psi1):
    with pytest.raises(ConfigError):
        persistence_scan(two_steps, mu(), 0.0, psi1, [])
    with pytest.raises(ConfigError):
        persistence_scan(two_steps, mu(), 0.0, psi1, (0, 3))


def test_persistence_range_forms(two_steps, psi1):
    pair = persistence_scan(two_steps, mu(), 0.0, psi1, (2, 4)).table
    explicit = persistence_scan(two_steps, mu(), 0.0, psi1, range(2, 5)).table
    assert pair["n"].tolist() == explicit["n"].tolist() == [2, 3, 4]
    with pytest.raises(ConfigError) as excinfo:
        persistence_scan(two_steps, mu(), 0.0, psi1, [2, 4])
    assert "inclusive (first, last) tuple" in str(excinfo.value)
    with pytest.raises(ConfigError):
        persistence_scan(two_steps, mu(), 0.0, psi1, (1, 2, 3))


def test_commutator_diagnostic(two_steps):
    frame = commutator_diagnostic(two_steps, mu(), (1, 3))
    assert list(frame.columns) == ["n", "n_next", "commutator_w1", "commutator_w2", "commutator_w3"]
    assert frame["n"].tolist() == [1, 2]
    assert (frame[["commutator_w1", "commutator_w2", "commutator_w3"]] >= 0).all().all()


# --- Daisy-chain designs ---

@pytest.mark.parametrize("n", [1, 2, 3])
def test_designed_two_step_payoffs(designed_two_steps, n):
    h = named_state("h")
    assert designed_payoffs(designed_two_steps, n, h) == pytest.approx([-2 * n, -n, 2 * n], abs=1e-9)
    nu = 1.0
    x = math.cos(nu / 2) ** 2
    home = latitude_state(h, nu)
    assert designed_payoffs(designed_two_steps, n, home)[2] == pytest.approx((7 * x - 5) * n, abs=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_designed_four_step_payoffs(designed_four_steps, n):
    zero = named_state("0")
    expected = [-4 * n, -4 * n, -4 * n, -2 * n, n]
    assert designed_payoffs(designed_four_steps, n, zero) == pytest.approx(expected, abs=1e-9)
    home = CoinDensity(0.95, zero)
    assert designed_payoffs(designed_four_steps, n, home)[4] == pytest.approx(n * (9 * 0.95 - 8), abs=1e-9)


def test_design_steps_chain(designed_two_steps):
    t1, t2 = designed_two_steps
    assert (t1.p, t1.q, t2.p, t2.q) == (-1, -1, 3, -4)
    assert str(t1) == "T(-1,-1;v,h)"


def test_parrondo_cap_thresholds(designed_two_steps, designed_four_steps):
    threshold, nu_max = parrondo_cap(designed_two_steps)
    assert threshold == Fraction(5, 7)
    assert nu_max == pytest.approx(math.acos(3 / 7))
    assert nu_max == pytest.approx(1.1279, abs=1e-4)
    assert parrondo_cap(designed_four_steps)[0] == Fraction(8, 9)


def test_parrondo_cap_rejects_invalid_steps():
    with pytest.raises(ConfigError):
        parrondo_cap([general_step(1, 1, "0", "0")])


@pytest.mark.parametrize("design, target, nu_max", [
    ("designed_two_steps", "h", math.acos(3 / 7)),
    ("designed_four_steps", "0", math.acos(7 / 9)),
])
def test_latitude_scan_brackets_cap(request, design, target, nu_max):
    steps = request.getfixturevalue(design)
    scan = scan_latitude(steps, named_state(target), n=1, step_deg=0.5)
    assert len(scan) == 361
    inside, outside = bracket_boundary(scan)
    assert inside < nu_max <= outside
    assert outside - inside == pytest.approx(math.radians(0.5))
    assert parrondo_cap(steps)[1] == pytest.approx(nu_max)


def test_bracket_boundary_needs_cap():
    with pytest.raises(ValueError):
        bracket_boundary(pd.DataFrame({"nu": [0.0, 0.1], "parrondo": [False, True]}))
    with pytest.raises(ValueError):
        bracket_boundary(pd.DataFrame({"nu": [0.0, 0.1], "parrondo": [True, True]}))


def test_design_rejects_odd_m():
    with pytest.raises(DesignConstraintError) as excinfo:
        design_daisy_chain(DesignSpec(m=3, target="h", intermediates=["d"], strides=[(-1, -1)] * 3))
    assert excinfo.value.violations == ["m must be even (got m=3)"]


def test_design_lists_every_violation():
    with pytest.raises(DesignConstraintError) as excinfo:
        design_daisy_chain(DesignSpec(m=2, target="h", strides=[(1, 1), (1, -4)]))
    violations = excinfo.value.violations
    assert any(v.startswith("p_i < 0") for v in violations)
    assert any(v.startswith("q_i < 0") for v in violations)
    assert len(violations) == 2


def test_design_boundary_stride_is_rejected():
    with pytest.raises(DesignConstraintError) as excinfo:
        design_daisy_chain(DesignSpec(m=2, target="h", strides=[(-1, -1), (1, -4)]))
    assert excinfo.value.violations == ["p_m > -sum(p_i): p_m = 1 <= 1"]


def test_design_checks_structure():
    with pytest.raises(DesignConstraintError) as excinfo:
        design_daisy_chain(DesignSpec(m=4, target="0", strides=[(-1, -1)] * 3))
    assert len(excinfo.value.violations) == 2


# --- Zero-position construction ---

def test_zero_position_payoffs():
    rng = np.random.default_rng(11)
    for m in range(1, 6):
        for n in range(1, 5):
            c1, s1, c2, s2 = (_random_state(rng) for _ in range(4))
            walks = zero_position_walks(m, n, c1, s1, c2, s2)
            for _ in range(5):
                home = CoinDensity(float(rng.uniform()), _random_state(rng))
                values = [payoff(zero_projector(), walks[key], home) for key in ("A", "B", "AB", "BA")]
                assert values == pytest.approx([0.0, 0.0, 1.0, 1.0], abs=1e-9)


def test_zero_position_sphere_is_parrondo():
    fam = zero_position_family(2, 3, named_state("h"), named_state("0"), named_state("d"), named_state("f"))
    region = region_map(fam, zero_projector(), 0.5, grid=(19, 37))
    assert region.parrondo.all()
    report = persistence_scan(list(fam.base_steps), zero_projector(), 0.5, named_state("a"), (1, 4))
    assert report.persistent and report.first_parrondo == 1


def test_zero_position_needs_stride():
    with pytest.raises(ConfigError):
        zero = named_state("0")
        zero_position_walks(0, 1, zero, zero, zero, zero)
