import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cqft_tunnel.barrier import BarrierSpec, is_klein_regime, is_supercritical, potential
from cqft_tunnel.constants import COMPTON, MC2
from cqft_tunnel.grid import make_grid

LAM = COMPTON


def test_plateau_value():
    spec = BarrierSpec(MC2, 4 * LAM, 0.3 * LAM)
    assert potential(0.0, spec) / MC2 == pytest.approx(np.tanh(4 / 0.6), rel=1e-14)
    assert potential(0.0, spec) / MC2 == pytest.approx(0.9999967, abs=1e-7)


def test_edges_are_half_height():
    spec = BarrierSpec(2.0, 4 * LAM, 0.3 * LAM)
    for x in spec.edges:
        assert potential(x, spec) == pytest.approx(1.0 * np.tanh(4 / 0.3), rel=1e-14)


def test_vanishes_far_away():
    spec = BarrierSpec(9 * MC2, 16 * LAM, 0.3 * LAM)
    assert potential(np.array([-5.0, 5.0]), spec) == pytest.approx([0.0, 0.0], abs=1e-300)


def test_invalid_geometry():
    with pytest.raises(ValueError):
        BarrierSpec(1.0, 0.0, 0.1)
    with pytest.raises(ValueError):
        BarrierSpec(1.0, 0.1, -0.1)


def test_resolution_check():
    spec = BarrierSpec(MC2, 4 * LAM, 0.3 * LAM)
    spec.check_resolved(make_grid(1024, -0.512, 0.512))
    with pytest.raises(ValueError):
        spec.check_resolved(make_grid(256, -0.512, 0.512))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.1, 20), st.floats(1, 20), st.floats(0.05, 2))
def test_even_and_monotone(v0, length, eps):
    spec = BarrierSpec(v0 * MC2, length * LAM, eps * LAM)
    x = np.linspace(0, 3 * length * LAM, 2001)
    v = potential(x, spec)
    assert np.array_equal(v, potential(-x, spec))
    assert np.all(np.diff(v) <= 0)
    assert np.all(v >= 0) and np.all(v <= spec.V0)


def test_classification():
    assert not is_supercritical(BarrierSpec(1.77 * MC2, 1, 1))
    strong = BarrierSpec(9 * MC2, 1, 1)
    assert is_supercritical(strong)
    assert is_klein_regime(strong, 1.6 * MC2)
    assert not is_klein_regime(strong, 8.5 * MC2)
