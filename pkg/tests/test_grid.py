import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cqft_tunnel.grid import make_grid, norm2, to_momentum, to_position


def test_small_grid_layout():
    g = make_grid(8, -np.pi, np.pi)
    assert g.dx == pytest.approx(np.pi / 4)
    assert g.dp == pytest.approx(1.0)
    np.testing.assert_allclose(g.modes, np.arange(-4, 4))


def test_momentum_spacing_from_box():
    g = make_grid(1024, -2.0, 2.0)
    assert g.dp == pytest.approx(np.pi / 2)


@pytest.mark.parametrize("n", [8, 64, 1024])
def test_fourier_duality(n):
    g = make_grid(n, -1.3, 2.9)
    assert g.dx * g.dp * n == pytest.approx(2 * np.pi)


def test_modes_symmetric_up_to_nyquist():
    g = make_grid(16, 0.0, 1.0)
    assert g.modes[0] == pytest.approx(-g.p_max)
    np.testing.assert_allclose(g.modes[1:], -g.modes[1:][::-1])


@pytest.mark.parametrize("n", [0, 4, 7, 12, 1000])
def test_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        make_grid(n, 0.0, 1.0)


def test_rejects_degenerate_box():
    with pytest.raises(ValueError):
        make_grid(16, 1.0, 1.0)


def test_grid_arrays_are_read_only():
    g = make_grid(16, 0.0, 1.0)
    with pytest.raises(ValueError):
        g.x[0] = 5.0


def test_plane_wave_is_single_mode():
    g = make_grid(64, -1.0, 3.0)
    k = 5
    spec = to_momentum(np.exp(1j * g.modes[k] * g.x), g)
    assert np.argmax(np.abs(spec)) == k
    others = np.delete(np.abs(spec), k)
    assert np.max(others) < 1e-12 * np.abs(spec[k])
    # continuum normalization: amplitude sqrt(2 pi) / dp
    assert np.abs(spec[k]) == pytest.approx(np.sqrt(2 * np.pi) / g.dp)


def test_length_mismatch():
    g = make_grid(16, 0.0, 1.0)
    with pytest.raises(ValueError):
        to_momentum(np.zeros(15), g)
    with pytest.raises(ValueError):
        to_position(np.zeros((2, 17)), g)


def test_mode_index_roundtrip():
    g = make_grid(32, -1.0, 1.0)
    for k, p in enumerate(g.modes):
        assert g.mode_index(p) == k
    with pytest.raises(ValueError):
        g.mode_index(g.dp * 0.5)
    with pytest.raises(ValueError):
        g.mode_index(g.dp * 16)


fields = st.integers(min_value=3, max_value=10).flatmap(
    lambda e: st.tuples(st.just(2**e), st.integers(0, 2**32 - 1)))


@settings(max_examples=40, deadline=None)
@given(fields, st.floats(-5, 5), st.floats(0.1, 10))
def test_roundtrip_and_parseval(params, x_min, length):
    n, seed = params
    g = make_grid(n, x_min, x_min + length)
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    spec = to_momentum(f, g)
    back = to_position(spec, g)
    assert np.max(np.abs(back - f)) <= 1e-12 * np.max(np.abs(f))
    lhs = norm2(f, g)
    rhs = float(np.sum(np.abs(spec) ** 2) * g.dp)
    assert rhs == pytest.approx(lhs, rel=1e-12)
