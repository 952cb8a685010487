import logging
import math

import numpy as np
import pytest

from engine.coin import (
    BlochAngles,
    CoinDensity,
    CoinState,
    bloch_angles,
    format_home,
    format_state,
    from_bloch,
    latitude,
    mixture,
    named_state,
    overlap,
    parse_home,
    parse_real,
    parse_state,
    perp,
    qubit_vector,
    states_equal,
)
from engine.errors import StateError, UnknownStateError


def test_perp_is_orthogonal_and_squares_to_minus():
    s = CoinState(0.6, 0.8j)
    assert abs(overlap(s, perp(s))) < 1e-15
    twice = perp(perp(s))
    assert twice.s0 == pytest.approx(-s.s0)
    assert twice.s1 == pytest.approx(-s.s1)


def test_named_states_are_related():
    assert states_equal(perp(named_state("h")), named_state("v"), up_to_phase=False)
    assert states_equal(perp(named_state("0")), named_state("1"))
    assert abs(overlap(named_state("d"), named_state("a"))) < 1e-15


def test_coin_state_renormalizes_small_drift(caplog):
    with caplog.at_level(logging.WARNING, logger="engine.coin"):
        s = CoinState(1 + 1e-8, 0)
    assert abs(s.s0) == pytest.approx(1.0, abs=1e-14)
    assert any(r.levelno == logging.WARNING and "Renormalizing" in r.getMessage() for r in caplog.records)


def test_coin_state_rejects_unnormalized():
    with pytest.raises(StateError) as excinfo:
        CoinState(2, 0)
    assert "norm" in str(excinfo.value)


def test_qubit_vectors_of_named_states():
    assert qubit_vector(named_state("0")).array == pytest.approx([0, 0, 1])
    assert qubit_vector(named_state("h")).array == pytest.approx([1, 0, 0])
    assert qubit_vector(named_state("d")).array == pytest.approx([0, 1, 0])
    assert qubit_vector(CoinDensity(0.5, named_state("h"))).norm == pytest.approx(0.0, abs=1e-15)


def test_bloch_angles_inverts_from_bloch():
    s = from_bloch(BlochAngles(1.1, 4.0))
    angles = bloch_angles(s)
    assert angles.theta == pytest.approx(1.1)
    assert angles.phi == pytest.approx(4.0)


def test_bloch_poles_canonicalize_phi():
    assert BlochAngles(0.0, 1.5).phi == 0.0
    assert bloch_angles(named_state("1")) == BlochAngles(math.pi, 0.0)


@pytest.mark.parametrize("theta, phi", [(-0.1, 0.0), (4.0, 0.0), (1.0, 2 * math.pi)])
def test_bloch_angles_out_of_range(theta, phi):
    with pytest.raises(StateError):
        BlochAngles(theta, phi)


def test_equal_mixture_of_equatorial_states(psi1, psi2):
    rho = mixture([(0.5, psi1), (0.5, psi2)])
    assert rho.r == pytest.approx(math.cos(math.pi / 64) ** 2)
    angles = bloch_angles(rho.basis)
    assert angles.theta == pytest.approx(math.pi / 2)
    assert angles.phi == pytest.approx(27 * math.pi / 32)


def test_mixture_rejects_bad_weights():
    with pytest.raises(StateError):
        mixture([(0.7, named_state("h")), (0.7, named_state("v"))])


def test_maximally_mixed_mixture():
    rho = mixture([(0.5, named_state("h")), (0.5, named_state("v"))])
    assert rho.r == pytest.approx(0.5)


def test_density_matrix_trace_and_purity():
    rho = CoinDensity(0.8, named_state("d"))
    m = rho.matrix
    assert np.trace(m).real == pytest.approx(1.0)
    assert np.allclose(m, m.conj().T)
    assert np.trace(m @ m).real == pytest.approx(0.8 ** 2 + 0.2 ** 2)


def test_latitude():
    h = named_state("h")
    assert latitude(h, h) == pytest.approx(0.0, abs=1e-7)
    assert latitude(named_state("v"), h) == pytest.approx(math.pi)
    assert latitude(named_state("0"), h) == pytest.approx(math.pi / 2)


def test_parse_real_pi_forms():
    assert parse_real("13pi/16") == pytest.approx(13 * math.pi / 16)
    assert parse_real("-pi/2") == pytest.approx(-math.pi / 2)
    assert parse_real("0.25") == 0.25
    with pytest.raises(StateError):
        parse_real("pie")


def test_parse_state_forms(psi1):
    assert parse_state("h") == named_state("h")
    assert states_equal(parse_state("bloch:pi/2,13pi/16"), psi1)
    s = parse_state("0.6,0,0,0.8")
    assert s.s1 == pytest.approx(0.8j)


def test_unknown_named_state():
    with pytest.raises(UnknownStateError) as excinfo:
        parse_state("q")
    assert isinstance(excinfo.value, KeyError)
    assert "Unknown coin state 'q'" in str(excinfo.value)


def test_parse_home_mixed_forms(rho12):
    rho = parse_home("mix:0.8,h")
    assert isinstance(rho, CoinDensity)
    assert rho.r == 0.8
    blended = parse_home("blend:0.5@bloch:pi/2,13pi/16|0.5@bloch:pi/2,7pi/8")
    assert blended.r == pytest.approx(rho12.r)
    assert qubit_vector(blended).array == pytest.approx(qubit_vector(rho12).array)


def test_format_state_uses_names():
    assert format_state(perp(named_state("0"))) == "1"
    assert format_home(CoinDensity(0.25, named_state("h"))) == "mix:0.25,h"
    raw = CoinState(0.6, 0.8)
    assert parse_state(format_state(raw)) == raw
