"""Second-quantized particle density and its decompositions.

With U the single-particle propagator, P+/P- the free positive/negative
energy projectors and chi+/chi- the two energy components of the initial
packet, four evolved auxiliary fields carry all wavepacket information::

    A+ = P+ U chi+    A- = P+ U chi-
    B+ = P- U chi+    B- = P- U chi-

and the density splits as

    rho1 = rho_vac_e + |A+|^2 - |A-|^2
    rho2 = rho_vac_p + |B-|^2 - |B+|^2
    rho3 = 2 Re(A+^dag B-) - 2 Re(A-^dag B+)

where |.|^2 and ^dag contract the spinor index.  Vacuum parts::

    rho_vac_e(x) = sum_q |(P+ U w_q)(x)|^2
    rho_vac_p(x) = sum_k |(P- U v_k)(x)|^2

Equivalently rho_total - rho_vac = |A+ + B-|^2 - |A- + B+|^2, and since
A+ + A- + B+ + B- = U chi, the wavepacket part vanishes wherever the evolved
packet does.  :mod:`cqft_tunnel.oracle` checks all of this against direct
Fock-space expectation values.

Densities are per unit length: ``sum(rho) * dx`` is a particle number.
"""

from dataclasses import dataclass

import numpy as np

from .grid import norm2

NUMERICAL_FLOOR = 1e-10


class NoTransmission(ValueError):
    """Region holds (numerically) no wavepacket density."""


def _abs2(field):
    return np.sum(np.abs(field) ** 2, axis=-2)


def _inner(a, b):
    return np.sum(np.conj(a) * b, axis=-2)


@dataclass
class DensityDecomposition:
    rho1: np.ndarray
    rho2: np.ndarray
    rho3: np.ndarray
    rho_vac_e: np.ndarray
    rho_vac_p: np.ndarray

    @property
    def rho_vac(self):
        return self.rho_vac_e + self.rho_vac_p

    @property
    def rho_total(self):
        return self.rho1 + self.rho2 + self.rho3

    @property
    def rho_wp(self):
        return self.rho_total - self.rho_vac


@dataclass
class ParticleCount:
    N_total: float
    N_vac: float
    rho3_integral: float

    @property
    def electrons_from_pairs(self):
        return self.N_vac / 2.0

    @property
    def wavepacket_number(self):
        return self.N_total - self.N_vac


def combine(a_plus, a_minus, b_plus, b_minus, vac_e, vac_p):
    """Assemble the decomposition from the four auxiliary spinor fields."""
    rho1 = vac_e + _abs2(a_plus) - _abs2(a_minus)
    rho2 = vac_p + _abs2(b_minus) - _abs2(b_plus)
    rho3 = 2.0 * np.real(_inner(a_plus, b_minus)) - 2.0 * np.real(_inner(a_minus, b_plus))
    return DensityDecomposition(rho1, rho2, rho3, np.asarray(vac_e), np.asarray(vac_p))


def vacuum_density_parts(prop, basis, chunk=256):
    """(rho_vac_e, rho_vac_p) from the off-diagonal propagator blocks."""
    n = basis.n
    vac_e = np.zeros(n)
    vac_p = np.zeros(n)
    vw, wv = prop.vw, prop.wv
    for start in range(0, n, chunk):
        cols = slice(start, min(start + chunk, n))
        vac_e += np.sum(_abs2(basis.synthesize(c_plus=vw[:, cols].T)), axis=0)
        vac_p += np.sum(_abs2(basis.synthesize(c_minus=wv[:, cols].T)), axis=0)
    return vac_e, vac_p


def vacuum_density(prop, basis):
    vac_e, vac_p = vacuum_density_parts(prop, basis)
    return vac_e + vac_p


def auxiliary_fields(evolved_plus, evolved_minus, basis):
    """A+, A-, B+, B- from the mode vectors of U chi+ and U chi-."""
    n = basis.n
    a_plus = basis.synthesize(c_plus=evolved_plus[:n])
    b_plus = basis.synthesize(c_minus=evolved_plus[n:])
    a_minus = basis.synthesize(c_plus=evolved_minus[:n])
    b_minus = basis.synthesize(c_minus=evolved_minus[n:])
    return a_plus, a_minus, b_plus, b_minus


def split_components(coeffs):
    """Mode vectors of chi+ and chi- (each of length 2n)."""
    c_plus, c_minus = coeffs.mode_vectors()
    zeros = np.zeros_like(c_plus)
    return np.concatenate([c_plus, zeros]), np.concatenate([zeros, c_minus])


def wavepacket_density(prop, coeffs, basis, vacuum_parts=None):
    """Full decomposition at time ``prop.t`` for the packet ``coeffs``."""
    if vacuum_parts is None:
        vacuum_parts = vacuum_density_parts(prop, basis)
    chi_plus, chi_minus = split_components(coeffs)
    fields = auxiliary_fields(prop.u @ chi_plus, prop.u @ chi_minus, basis)
    return combine(*fields, *vacuum_parts)


def vacuum_only(vacuum_parts):
    zero = np.zeros((2, len(vacuum_parts[0])))
    return combine(zero, zero, zero, zero, *vacuum_parts)


def particle_count(decomp, grid):
    dx = grid.dx
    return ParticleCount(
        N_total=float(np.sum(decomp.rho_total) * dx),
        N_vac=float(np.sum(decomp.rho_vac) * dx),
        rho3_integral=float(np.sum(decomp.rho3) * dx),
    )


def conditional_mean_position(decomp, grid, region, min_mass=1e-12):
    """<X> over ``region = (a, b)`` weighted by the vacuum-subtracted density."""
    a, b = region
    mask = (grid.x >= a) & (grid.x <= b)
    rho = decomp.rho_wp[mask]
    mass = float(np.sum(rho) * grid.dx)
    if mass < min_mass:
        raise NoTransmission(f"wavepacket mass {mass:.3e} in [{a}, {b}] below {min_mass:.0e}")
    return float(np.sum(grid.x[mask] * rho) * grid.dx / mass)


def region_mass(decomp, grid, region):
    a, b = region
    mask = (grid.x >= a) & (grid.x <= b)
    return float(np.sum(decomp.rho_wp[mask]) * grid.dx)


def first_quantized_density(field):
    return _abs2(field)


def field_norm(field, grid):
    return norm2(field, grid)
