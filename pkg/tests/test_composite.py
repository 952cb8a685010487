import logging
import math

import numpy as np
import pytest

from engine.coin import named_state
from engine.composite import (
    CompositeEnsemble,
    CompositeState,
    from_mapping,
    from_terms,
    histogram,
    inner,
    is_translationally_invariant,
    localized,
    shift_by,
)
from engine.errors import StateError

R2 = 1 / math.sqrt(2)


def test_localized_state():
    a = localized(named_state("h"), 3)
    assert a.support() == (3, 3)
    assert a.amplitude_at(3) == pytest.approx([R2, R2])
    assert a.amplitude_at(4) == pytest.approx([0, 0])
    assert a.mean_position() == pytest.approx(3.0)


def test_edge_rows_are_trimmed():
    amps = np.array([[0, 0], [1, 0], [0, 0]], dtype=complex)
    a = CompositeState(-1, amps)
    assert a.support() == (0, 0)
    assert not a.amplitudes.flags.writeable


def test_rejects_unnormalized_block():
    with pytest.raises(StateError) as excinfo:
        CompositeState(0, np.array([[1, 1]], dtype=complex))
    assert "total probability" in str(excinfo.value)


def test_from_terms_and_inner():
    a = from_terms([(R2, named_state("0"), -1), (R2, named_state("1"), 2)])
    assert a.support() == (-1, 2)
    assert histogram(a) == [(-1, pytest.approx(0.5)), (2, pytest.approx(0.5))]
    assert inner(a, a) == pytest.approx(1.0)
    assert inner(a, localized(named_state("0"), -1)) == pytest.approx(R2)
    assert inner(a, localized(named_state("0"), 5)) == 0j


def test_shift_by_moves_support():
    a = from_mapping({0: (1, 0)})
    assert shift_by(a, -4).support() == (-4, -4)


def test_translational_invariance():
    assert is_translationally_invariant(localized(named_state("d"), 0))
    spread = from_terms([(R2, named_state("0"), 0), (R2, named_state("0"), 1)])
    assert not is_translationally_invariant(spread)
    orthogonal_sites = from_terms([(R2, named_state("0"), 0), (R2, named_state("1"), 1)])
    assert is_translationally_invariant(orthogonal_sites)


def test_translational_invariance_needs_positive_tol():
    with pytest.raises(ValueError):
        is_translationally_invariant(localized(named_state("0"), 0), tol=0.0)


def test_ensemble_histogram_is_weighted():
    ens = CompositeEnsemble((
        (0.25, localized(named_state("0"), -1)),
        (0.75, localized(named_state("1"), 2)),
    ))
    assert ens.histogram() == [(-1, pytest.approx(0.25)), (2, pytest.approx(0.75))]
    assert ens.mean_position() == pytest.approx(1.25)


def test_ensemble_rejects_bad_weights():
    with pytest.raises(StateError):
        CompositeEnsemble(((0.5, localized(named_state("0"), 0)),))


def test_trimming_rounding_residue_is_logged(caplog):
    with caplog.at_level(logging.DEBUG, logger="engine.composite"):
        state = CompositeState(offset=-1, amplitudes=np.array([[1e-13, 0], [1, 0], [0, 0]]))
    assert state.support() == (0, 0)
    assert any("Trimmed 2 edge sites" in r.getMessage() for r in caplog.records)
