"""Free Dirac plane-wave basis in 1D (alpha_x -> sigma_1, beta -> sigma_3).

Positive-energy modes ``v_p`` have energy ``+E_p``, negative-energy modes
``w_p`` have ``-E_p``; both carry ``exp(+i p x)`` so that they are genuine
eigenstates of ``c sigma_1 p + sigma_3 m c^2`` and together form an orthonormal,
complete basis on the grid.

Two coefficient normalizations are in use:

* continuum-style ``g(p)`` (what :class:`WavepacketCoefficients` stores), with
  ``<v_p|v_k> = delta_pk / dp`` and ``sum (|g+|^2 + |g-|^2) dp = 1``;
* orthonormal mode coefficients ``c = g * sqrt(dp)`` (what the propagator and
  density code use), a plain unit vector of length ``2 n``: ``[c+, c-]``.
"""

from dataclasses import dataclass

import numpy as np

from .constants import C, MC2
from .grid import to_momentum, to_position

PARTICLE = "particle"
ANTIPARTICLE = "antiparticle"


def energy(p):
    return C * np.sqrt(np.asarray(p, dtype=float) ** 2 + C**2)


def particle_spinor(p):
    """Unit spinor ~ (1, cp/(mc^2+E)), shape ``p.shape + (2,)``."""
    p = np.asarray(p, dtype=float)
    e = energy(p)
    norm = np.sqrt((e + MC2) / (2.0 * e))
    return np.stack([norm, norm * C * p / (MC2 + e)], axis=-1)


def antiparticle_spinor(p):
    """Unit spinor ~ (1, cp/(mc^2-E)), first component real and >= 0.

    At p = 0 the formula divides by zero; the normalized p -> 0 limit is taken
    as (0, 1).
    """
    p = np.asarray(p, dtype=float)
    e = energy(p)
    # E - mc^2 written without cancellation
    e_minus = C**2 * p**2 / (e + MC2)
    upper = np.sqrt(e_minus / (2.0 * e))
    sign = np.where(p > 0, -1.0, 1.0)
    lower = sign * np.sqrt((e + MC2) / (2.0 * e))
    return np.stack([upper, lower], axis=-1)


@dataclass(frozen=True)
class FreeMode:
    p: float
    energy: float
    kind: str
    spinor: np.ndarray

    @property
    def amplitude(self):
        """Plane-wave prefactor 1/sqrt(2 pi) giving <mode_p|mode_k> = delta/dp."""
        return 1.0 / np.sqrt(2.0 * np.pi)

    def values(self, x):
        x = np.asarray(x, dtype=float)
        wave = self.amplitude * np.exp(1j * self.p * x)
        return self.spinor[:, None] * wave[None, :]


def free_mode(p, kind, grid):
    grid.mode_index(p)
    if kind == PARTICLE:
        spinor = particle_spinor(p)
    elif kind == ANTIPARTICLE:
        spinor = antiparticle_spinor(p)
    else:
        raise ValueError(f"unknown mode kind {kind!r}")
    return FreeMode(float(p), float(energy(p)), kind, spinor)


class ModeBasis:
    """All 2n free modes of a grid, with projection and synthesis.

    Projection maps a spinor field of shape ``(..., 2, n)`` to orthonormal
    mode coefficients ``(c_plus, c_minus)``, each of shape ``(..., n)``;
    synthesis is the exact inverse.
    """

    def __init__(self, grid):
        self.grid = grid
        self.modes = grid.modes
        self.energies = energy(grid.modes)
        self.u_plus = particle_spinor(grid.modes)        # (n, 2)
        self.u_minus = antiparticle_spinor(grid.modes)   # (n, 2)
        self._scale = np.sqrt(grid.dp)

    @property
    def n(self):
        return self.grid.n_points

    @property
    def dim(self):
        return 2 * self.grid.n_points

    def project(self, field):
        spec = to_momentum(field, self.grid)
        c_plus = np.einsum("ks,...sk->...k", self.u_plus, spec) * self._scale
        c_minus = np.einsum("ks,...sk->...k", self.u_minus, spec) * self._scale
        return c_plus, c_minus

    def synthesize(self, c_plus=None, c_minus=None):
        """Spinor field from orthonormal coefficients; either part may be omitted."""
        spec = 0.0
        if c_plus is not None:
            spec = spec + np.einsum("ks,...k->...sk", self.u_plus, np.asarray(c_plus))
        if c_minus is not None:
            spec = spec + np.einsum("ks,...k->...sk", self.u_minus, np.asarray(c_minus))
        return to_position(spec / self._scale, self.grid)

    def to_vector(self, field):
        c_plus, c_minus = self.project(field)
        return np.concatenate([c_plus, c_minus], axis=-1)

    def from_vector(self, vec):
        vec = np.asarray(vec)
        return self.synthesize(vec[..., : self.n], vec[..., self.n:])

    def overlap_matrix(self, max_modes=None):
        """Gram matrix of the basis vectors in the grid inner product (sum dx).

        Built from the synthesized position-space functions, so it is an
        independent check of the projection algebra.  Continuum normalization:
        identity / dp.
        """
        n = self.n
        eye = np.eye(n)
        funcs_plus = self.synthesize(c_plus=eye) / self._scale
        funcs_minus = self.synthesize(c_minus=eye) / self._scale
        funcs = np.concatenate([funcs_plus, funcs_minus], axis=0)   # (2n, 2, n)
        if max_modes is not None:
            funcs = funcs[:max_modes]
        flat = funcs.reshape(funcs.shape[0], -1)
        return flat.conj() @ flat.T * self.grid.dx


@dataclass(frozen=True)
class WavepacketSpec:
    x0: float
    p0: float
    D: float

    @property
    def support(self):
        half = self.D * np.pi / 2.0
        return self.x0 - half, self.x0 + half

    @property
    def right_edge(self):
        return self.support[1]


def initial_wavepacket(spec, grid):
    """Upper component cos^8((x-x0)/D) e^{i p0 x} on the support, zero elsewhere."""
    a, b = spec.support
    if not grid.contains(a, b):
        raise ValueError(f"packet support [{a:.4g}, {b:.4g}] exceeds the box")
    x = grid.x
    inside = (x > a) & (x < b)
    upper = np.zeros(grid.n_points, dtype=complex)
    upper[inside] = np.cos((x[inside] - spec.x0) / spec.D) ** 8 * np.exp(1j * spec.p0 * x[inside])
    upper /= np.sqrt(np.sum(np.abs(upper) ** 2) * grid.dx)
    return np.stack([upper, np.zeros_like(upper)])


@dataclass
class WavepacketCoefficients:
    g_plus: np.ndarray
    g_minus: np.ndarray
    dp: float

    def norm(self):
        return float(np.sum(np.abs(self.g_plus) ** 2 + np.abs(self.g_minus) ** 2) * self.dp)

    def mode_vectors(self):
        """Orthonormal coefficients (c_plus, c_minus)."""
        s = np.sqrt(self.dp)
        return self.g_plus * s, self.g_minus * s

    @classmethod
    def from_mode_vectors(cls, c_plus, c_minus, dp):
        s = np.sqrt(dp)
        return cls(np.asarray(c_plus) / s, np.asarray(c_minus) / s, dp)


def project_coefficients(field, basis):
    c_plus, c_minus = basis.project(field)
    return WavepacketCoefficients.from_mode_vectors(c_plus, c_minus, basis.grid.dp)


def reconstruct(coeffs, basis):
    return basis.synthesize(*coeffs.mode_vectors())


def mean_velocity(coeffs, modes, include_antiparticle=False):
    """Mean group velocity in units of c.

    By default the average of c^2 p / E_p over the positive-energy (electron)
    weight |g+(p)|^2.  With ``include_antiparticle`` the negative-energy
    weight enters with group velocity -c^2 p / E_p and the result is
    normalized by the full state norm.
    """
    w_plus = np.abs(coeffs.g_plus) ** 2
    w_minus = np.abs(coeffs.g_minus) ** 2
    v = C * modes / np.sqrt(modes**2 + C**2)
    if include_antiparticle:
        total = np.sum(w_plus + w_minus)
        numerator = np.sum((w_plus - w_minus) * v)
    else:
        total = np.sum(w_plus)
        numerator = np.sum(w_plus * v)
    if total <= 0:
        raise ValueError("zero-norm coefficients")
    return float(numerator / total) / C
