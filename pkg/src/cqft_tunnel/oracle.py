"""Brute-force fermionic Fock space for a handful of modes.

Test support: builds annihilation operators for the 2n modes [b_0..b_{n-1},
d_0..d_{n-1}] by a Jordan-Wigner construction (Fock dimension 4**n), forms
the evolved field operator from the exact single-particle unitary and takes
expectation values directly.  Nothing here goes through Wick's theorem, so
agreement with :func:`cqft_tunnel.fock_density.combine` is a genuine check.

The evolved field, per spinor component, is::

    Phi(t, x) = sum_k  (P+ U v_k)(x) b_k + conj(P- U v_k)(x) b_k^dag
                     + (P- U w_k)(x) d_k + conj(P+ U w_k)(x) d_k^dag

and the density operator is Phi^dag Phi summed over components.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .dirac_basis import antiparticle_spinor, energy, particle_spinor
from .fock_density import combine

MAX_MODES = 4


@dataclass
class ToyModel:
    """Single-particle data for an n-mode toy.

    ``x`` and ``weight`` are a quadrature grid on which ``mode_values``
    (shape (2n, 2, len(x)), v modes first) are orthonormal.  ``coupling`` is
    the Hermitian potential block added to diag(E, -E).  ``g_plus`` and
    ``g_minus`` are orthonormal-mode coefficients of the initial packet.
    """

    energies: np.ndarray
    coupling: np.ndarray
    g_plus: np.ndarray
    g_minus: np.ndarray
    x: np.ndarray
    weight: float
    mode_values: np.ndarray

    def __post_init__(self):
        n = len(self.energies)
        if n > MAX_MODES:
            raise ValueError(f"at most {MAX_MODES} modes (Fock dimension 4**n), got {n}")
        if self.coupling.shape != (2 * n, 2 * n):
            raise ValueError("coupling must be (2n, 2n)")
        if self.mode_values.shape[:2] != (2 * n, 2):
            raise ValueError("mode_values must have shape (2n, 2, samples)")

    @property
    def n_modes(self):
        return len(self.energies)

    @property
    def hamiltonian(self):
        return np.diag(np.concatenate([self.energies, -self.energies])).astype(complex) + self.coupling

    def propagator(self, t):
        return expm(-1j * self.hamiltonian * t)

    @property
    def coefficients(self):
        return np.concatenate([self.g_plus, self.g_minus])

    def packet(self):
        """chi(x) on the quadrature grid."""
        return np.einsum("j,jsx->sx", self.coefficients, self.mode_values)

    def gram(self):
        flat = self.mode_values.reshape(2 * self.n_modes, -1)
        return flat.conj() @ flat.T * self.weight


def _random_coupling(rng, dim, scale):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2.0


def _random_unit(rng, size):
    z = rng.normal(size=size) + 1j * rng.normal(size=size)
    return z / np.linalg.norm(z)


def random_toy(n_modes, rng, coupling_scale=None, samples=64):
    """Plane-wave modes u(p) exp(ipx)/sqrt(Lt) on a box of length 2 pi / c."""
    from .constants import C, MC2

    if n_modes > MAX_MODES:
        raise ValueError(f"at most {MAX_MODES} modes (Fock dimension 4**n), got {n_modes}")
    length = 2.0 * np.pi / C
    k = np.arange(n_modes) - n_modes // 2
    p = k * (2.0 * np.pi / length)
    x = np.arange(samples) * (length / samples)
    wave = np.exp(1j * p[:, None] * x[None, :]) / np.sqrt(length)
    v = particle_spinor(p)[:, :, None] * wave[:, None, :]
    w = antiparticle_spinor(p)[:, :, None] * wave[:, None, :]
    scale = MC2 if coupling_scale is None else coupling_scale
    coeffs = _random_unit(rng, 2 * n_modes)
    return ToyModel(
        energies=energy(p),
        coupling=_random_coupling(rng, 2 * n_modes, scale),
        g_plus=coeffs[:n_modes],
        g_minus=coeffs[n_modes:],
        x=x,
        weight=length / samples,
        mode_values=np.concatenate([v, w]),
    )


def split_toy(n_modes, rng, samples=64):
    """Toy whose dynamics never connects the left and right halves of the box.

    Modes with even index in each kind live on [0, 1), odd ones on [1, 2);
    the coupling only links modes of the same half and the packet sits in the
    left half.  Fields at a probe in the right half then anticommute with
    every left-half field at all times, which is exactly what a space-like
    separation provides.
    """
    if n_modes > MAX_MODES or n_modes < 2:
        raise ValueError(f"split toy needs 2..{MAX_MODES} modes")
    dim = 2 * n_modes
    x = (np.arange(samples) + 0.5) * (2.0 / samples)
    weight = 2.0 / samples
    half = np.arange(dim) % n_modes % 2           # 0: left, 1: right
    left = x < 1.0
    mode_values = np.zeros((dim, 2, samples), dtype=complex)
    for side, mask in ((0, left), (1, ~left)):
        members = np.flatnonzero(half == side)
        raw = rng.normal(size=(2 * mask.sum(), len(members))) + 1j * rng.normal(size=(2 * mask.sum(), len(members)))
        q, _ = np.linalg.qr(raw)
        q = q / np.sqrt(weight)
        for col, j in enumerate(members):
            mode_values[j][:, mask] = q[:, col].reshape(2, -1)
    same_side = half[:, None] == half[None, :]
    coupling = _random_coupling(rng, dim, 1.0) * same_side
    coeffs = _random_unit(rng, dim) * (half == 0)
    coeffs /= np.linalg.norm(coeffs)
    return ToyModel(
        energies=1.0 + rng.random(n_modes),
        coupling=coupling,
        g_plus=coeffs[:n_modes],
        g_minus=coeffs[n_modes:],
        x=x,
        weight=weight,
        mode_values=mode_values,
    ), half


@lru_cache(maxsize=None)
def annihilators(n_fermions):
    """Jordan-Wigner annihilation operators as dense real matrices."""
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])
    z = np.diag([1.0, -1.0])
    ops = []
    for j in range(n_fermions):
        op = np.ones((1, 1))
        for i in range(n_fermions):
            op = np.kron(op, z if i < j else lower if i == j else np.eye(2))
        ops.append(op)
    return tuple(ops)


def anticommutator_residual(n_fermions):
    """max over i, j of |{a_i, a_j^dag} - delta_ij| and |{a_i, a_j}|."""
    ops = annihilators(n_fermions)
    eye = np.eye(ops[0].shape[0])
    worst = 0.0
    for i, a in enumerate(ops):
        for j, b in enumerate(ops):
            mixed = a @ b.T + b.T @ a - (eye if i == j else 0.0)
            same = a @ b + b @ a
            worst = max(worst, np.max(np.abs(mixed)), np.max(np.abs(same)))
    return float(worst)


def _vacuum(dim):
    vac = np.zeros(dim, dtype=complex)
    vac[0] = 1.0
    return vac


def packet_state(model):
    ops = annihilators(2 * model.n_modes)
    vac = _vacuum(ops[0].shape[0])
    return sum(c * (a.T @ vac) for c, a in zip(model.coefficients, ops))


def _field_coefficients(model, u, sample_index):
    """(alpha, beta) of shape (2n, 2): Phi_s = sum_j alpha_js a_j + beta_js a_j^dag."""
    n = model.n_modes
    phi = model.mode_values[:, :, sample_index]         # (2n, 2)
    plus_part = u[:n].T @ phi[:n]                          # row j: (P+ U phi_j)(x)
    minus_part = u[n:].T @ phi[n:]                         # row j: (P- U phi_j)(x)
    alpha = np.concatenate([plus_part[:n], minus_part[n:]])
    beta = np.conj(np.concatenate([minus_part[:n], plus_part[n:]]))
    return alpha, beta


def density_operator(model, u, sample_index):
    ops = annihilators(2 * model.n_modes)
    alpha, beta = _field_coefficients(model, u, sample_index)
    rho = 0.0
    for s in range(2):
        phi = sum(alpha[j, s] * a + beta[j, s] * a.T for j, a in enumerate(ops))
        rho = rho + phi.conj().T @ phi
    return rho


def field_operator_at_zero(model, sample_index):
    """Components of Phi(0, x) = sum_j phi_j(x) a_j, as a list of 2 matrices."""
    ops = annihilators(2 * model.n_modes)
    phi = model.mode_values[:, :, sample_index]
    return [sum(phi[j, s] * a for j, a in enumerate(ops)) for s in range(2)]


def exact_density(model, t, sample_indices=None):
    """<chi| rho(t, x) |chi> at quadrature samples, straight from the operators."""
    if sample_indices is None:
        sample_indices = range(len(model.x))
    u = model.propagator(t)
    state = packet_state(model)
    return np.array([np.real(state.conj() @ density_operator(model, u, i) @ state)
                     for i in sample_indices])


def exact_vacuum_density(model, t, sample_indices=None):
    if sample_indices is None:
        sample_indices = range(len(model.x))
    u = model.propagator(t)
    vac = _vacuum(4 ** model.n_modes)
    return np.array([np.real(vac.conj() @ density_operator(model, u, i) @ vac)
                     for i in sample_indices])


def decomposition(model, t):
    """The Wick-reduced decomposition evaluated on the same toy."""
    n = model.n_modes
    u = model.propagator(t)
    phi = model.mode_values
    chi_plus = np.concatenate([model.g_plus, np.zeros(n)])
    chi_minus = np.concatenate([np.zeros(n), model.g_minus])

    def plus(vec):
        return np.einsum("p,psx->sx", vec[:n], phi[:n])

    def minus(vec):
        return np.einsum("p,psx->sx", vec[n:], phi[n:])

    ev_plus, ev_minus = u @ chi_plus, u @ chi_minus
    vac_e = sum(np.sum(np.abs(plus(u[:, q])) ** 2, axis=0) for q in range(n, 2 * n))
    vac_p = sum(np.sum(np.abs(minus(u[:, k])) ** 2, axis=0) for k in range(n))
    return combine(plus(ev_plus), plus(ev_minus), minus(ev_plus), minus(ev_minus), vac_e, vac_p)


def intervention_matrix(model, f_values):
    """O_jk = integral phi_j^dag f phi_k over the quadrature grid."""
    phi = model.mode_values
    return np.einsum("jsx,x,ksx->jk", phi.conj(), f_values, phi) * model.weight


@dataclass
class CausalityIdentity:
    expectation_residual: float     # <chi|O|chi> - integral f |chi|^2
    field_action_residual: float    # Phi(0,x)|chi> - chi(x)|0>
    reordered_residual: float       # <chi| int f Phi^dag O' Phi |chi> vs <0|O'|0> int f |chi|^2
    lhs: complex                    # <chi| O' O |chi>
    rhs: float                      # <0|O'|0> <chi|O|chi>

    @property
    def full_residual(self):
        return abs(self.lhs - self.rhs)

    @property
    def algebraic_residual(self):
        return max(self.expectation_residual, self.field_action_residual, self.reordered_residual)


def exact_causality_identity(model, f_values, probe):
    """Both sides of the beyond-cone identity for O = int Phi^dag f Phi and
    O' = rho(t', x'), with ``probe = (t', sample_index)``."""
    t_probe, probe_index = probe
    ops = annihilators(2 * model.n_modes)
    dim = ops[0].shape[0]
    vac = _vacuum(dim)
    state = packet_state(model)
    o_mat = intervention_matrix(model, f_values)
    big_o = sum(o_mat[j, k] * ops[j].T @ ops[k]
                for j in range(len(ops)) for k in range(len(ops)))
    probe_op = density_operator(model, model.propagator(t_probe), probe_index)

    chi = model.packet()
    weighted = float(np.sum(f_values * np.sum(np.abs(chi) ** 2, axis=0)) * model.weight)
    expectation = np.real(state.conj() @ big_o @ state)

    field_res = 0.0
    for i in range(len(model.x)):
        for s, phi_op in enumerate(field_operator_at_zero(model, i)):
            field_res = max(field_res, np.max(np.abs(phi_op @ state - chi[s, i] * vac)))

    vac_probe = np.real(vac.conj() @ probe_op @ vac)
    reordered = 0.0
    for j in range(len(ops)):
        for k in range(len(ops)):
            if o_mat[j, k] != 0:
                reordered += o_mat[j, k] * (state.conj() @ ops[j].T @ probe_op @ ops[k] @ state)
    return CausalityIdentity(
        expectation_residual=abs(expectation - weighted),
        field_action_residual=float(field_res),
        reordered_residual=abs(reordered - vac_probe * weighted),
        lhs=complex(state.conj() @ probe_op @ big_o @ state),
        rhs=float(vac_probe * expectation),
    )
