import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cqft_tunnel.constants import C, COMPTON, MC2
from cqft_tunnel.dirac_basis import (
    ANTIPARTICLE,
    PARTICLE,
    ModeBasis,
    WavepacketCoefficients,
    WavepacketSpec,
    antiparticle_spinor,
    energy,
    free_mode,
    initial_wavepacket,
    mean_velocity,
    particle_spinor,
    project_coefficients,
    reconstruct,
)
from cqft_tunnel.grid import make_grid

SIGMA1 = np.array([[0, 1], [1, 0]])
SIGMA3 = np.array([[1, 0], [0, -1]])


def hamiltonian(p):
    return C * p * SIGMA1 + MC2 * SIGMA3


@pytest.fixture(scope="module")
def small():
    g = make_grid(64, -0.2, 0.2)
    return g, ModeBasis(g)


def test_rest_particle():
    assert np.allclose(particle_spinor(0.0), [1, 0])
    assert energy(0.0) == pytest.approx(MC2)


def test_rest_antiparticle_limit():
    assert np.allclose(antiparticle_spinor(0.0), [0, 1])
    # the limit is approached from both sides, up to the p -> -p sign flip
    for p in (1e-6, -1e-6):
        assert abs(antiparticle_spinor(p)[1]) == pytest.approx(1.0, abs=1e-12)


def test_p200_normalization():
    e = energy(200.0)
    assert e == pytest.approx(C * np.sqrt(200.0**2 + C**2))
    u = particle_spinor(200.0)
    assert u[0] == pytest.approx(np.sqrt((e + MC2) / (2 * e)))
    assert u @ u == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.floats(-5e4, 5e4))
def test_spinors_are_orthonormal_eigenvectors(p):
    u, w = particle_spinor(p), antiparticle_spinor(p)
    e = energy(p)
    assert e >= MC2
    assert u @ u == pytest.approx(1.0, abs=1e-13)
    assert w @ w == pytest.approx(1.0, abs=1e-13)
    assert abs(u @ w) < 1e-13
    h = hamiltonian(p)
    assert np.allclose(h @ u, e * u, atol=1e-10 * e)
    assert np.allclose(h @ w, -e * w, atol=1e-10 * e)
    assert u[0] > 0 and w[0] >= 0


def test_free_mode_requires_grid_momentum(small):
    g, _ = small
    with pytest.raises(ValueError):
        free_mode(0.3 * g.dp, PARTICLE, g)
    with pytest.raises(ValueError):
        free_mode(g.modes[3], "tachyon", g)
    m = free_mode(g.modes[3], ANTIPARTICLE, g)
    assert m.energy == pytest.approx(energy(g.modes[3]))
    vals = m.values(g.x)
    assert vals.shape == (2, g.n_points)


def test_free_modes_delta_normalized(small):
    g, _ = small
    k1, k2 = g.modes[10], g.modes[11]
    v1, v2 = free_mode(k1, PARTICLE, g).values(g.x), free_mode(k2, PARTICLE, g).values(g.x)
    w1 = free_mode(k1, ANTIPARTICLE, g).values(g.x)

    def inner(a, b):
        return np.sum(np.conj(a) * b) * g.dx

    assert inner(v1, v1) == pytest.approx(1 / g.dp)
    assert abs(inner(v1, v2)) < 1e-12
    assert abs(inner(v1, w1)) < 1e-12


def test_basis_overlap_is_identity_over_dp(small):
    g, basis = small
    gram = basis.overlap_matrix()
    np.testing.assert_allclose(gram * g.dp, np.eye(basis.dim), atol=1e-10)


def test_basis_synthesis_matches_free_mode(small):
    g, basis = small
    k = 17
    c = np.zeros(g.n_points)
    c[k] = 1.0
    direct = free_mode(g.modes[k], ANTIPARTICLE, g).values(g.x) * np.sqrt(g.dp)
    np.testing.assert_allclose(basis.synthesize(c_minus=c), direct, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_field_completeness(seed):
    g = make_grid(128, -0.3, 0.5)
    basis = ModeBasis(g)
    rng = np.random.default_rng(seed)
    f = rng.normal(size=(2, g.n_points)) + 1j * rng.normal(size=(2, g.n_points))
    back = basis.from_vector(basis.to_vector(f))
    assert np.max(np.abs(back - f)) <= 1e-10 * np.max(np.abs(f))


def test_pure_mode_projects_to_kronecker(small):
    g, basis = small
    k = 40
    field = free_mode(g.modes[k], PARTICLE, g).values(g.x)
    coeffs = project_coefficients(field, basis)
    expected = np.zeros(g.n_points)
    expected[k] = 1 / g.dp
    np.testing.assert_allclose(np.abs(coeffs.g_plus), expected, atol=1e-9 / g.dp)
    assert np.max(np.abs(coeffs.g_minus)) < 1e-9 / g.dp


FIG1 = WavepacketSpec(-120 * COMPTON, 100.0, 70 * COMPTON)
FIG2 = WavepacketSpec(-35 * COMPTON, 200.0, 16 * COMPTON)


def test_support():
    a, b = FIG1.support
    assert a == pytest.approx(-120 * COMPTON - 35 * np.pi * COMPTON)
    assert b == pytest.approx(-120 * COMPTON + 35 * np.pi * COMPTON)
    assert FIG1.right_edge == b


def test_fig1_packet_vanishes_outside_support():
    g = make_grid(4096, -4.0, 1.0)
    chi = initial_wavepacket(FIG1, g)
    a, b = FIG1.support
    outside = (g.x <= a) | (g.x >= b)
    assert np.all(chi[:, outside] == 0)
    assert np.all(chi[1] == 0)
    assert np.sum(np.abs(chi) ** 2) * g.dx == pytest.approx(1.0, abs=1e-14)


def test_packet_peak_and_phase():
    g = make_grid(2048, -1.0, 0.0)
    # put x0 on a grid point so the maximum is sampled
    x0 = g.x[g.index_of(FIG2.x0)]
    spec = WavepacketSpec(x0, FIG2.p0, FIG2.D)
    chi = initial_wavepacket(spec, g)
    i = int(np.argmax(np.abs(chi[0])))
    assert g.x[i] == pytest.approx(x0)
    assert np.angle(chi[0, i]) == pytest.approx(np.angle(np.exp(1j * spec.p0 * x0)), abs=1e-12)


def test_packet_too_wide_for_box():
    g = make_grid(256, -0.5, 0.5)
    with pytest.raises(ValueError):
        initial_wavepacket(FIG1, g)


def test_fig2_projection_norm_and_reconstruction():
    g = make_grid(2048, -1.2, 0.848)
    basis = ModeBasis(g)
    chi = initial_wavepacket(FIG2, g)
    coeffs = project_coefficients(chi, basis)
    assert coeffs.norm() == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(reconstruct(coeffs, basis) - chi)) <= 1e-10
    # a compactly supported packet necessarily has negative-energy content
    assert np.sum(np.abs(coeffs.g_minus) ** 2) * coeffs.dp > 1e-3


def test_mean_velocity_of_rest_mode():
    modes = np.array([-1.0, 0.0, 1.0])
    coeffs = WavepacketCoefficients(np.array([0, 1.0, 0]), np.zeros(3), 1.0)
    assert mean_velocity(coeffs, modes) == 0.0


def test_mean_velocity_zero_norm():
    with pytest.raises(ValueError):
        mean_velocity(WavepacketCoefficients(np.zeros(3), np.zeros(3), 1.0), np.zeros(3))


def test_mean_velocity_narrow_packet_and_bound():
    for p0 in (200.0, 2e4, 2e6):
        modes = np.array([p0])
        coeffs = WavepacketCoefficients(np.array([1.0]), np.array([0.0]), 1.0)
        v = mean_velocity(coeffs, modes)
        assert v == pytest.approx(p0 / np.sqrt(p0**2 + C**2))
        assert v < 1.0
    assert mean_velocity(WavepacketCoefficients(np.array([1.0]), np.array([0.0]), 1.0),
                         np.array([200.0])) == pytest.approx(0.825, abs=1e-3)


def test_mean_velocity_with_antiparticle_weight():
    modes = np.array([200.0])
    coeffs = WavepacketCoefficients(np.array([np.sqrt(0.75)]), np.array([0.5]), 1.0)
    v = 200.0 / np.sqrt(200.0**2 + C**2)
    assert mean_velocity(coeffs, modes, include_antiparticle=True) == pytest.approx(0.5 * v)
    assert mean_velocity(coeffs, modes) == pytest.approx(v)
