"""Strang split-operator propagation and the single-particle propagator matrix.

One step is half a kinetic step in momentum space, a full potential phase in
position space, and another half kinetic step.  The kinetic factor is the
exact 2x2 exponential per mode,

    exp(-i h_p t) = cos(E_p t) I - i sin(E_p t) / E_p * h_p,
    h_p = c p sigma_1 + m c^2 sigma_3,

so with V = 0 each free mode only picks up its phase.
"""

import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constants import C, MC2
from .grid import to_momentum, to_position


class EdgeDensityError(RuntimeError):
    """Density reached the periodic box edges: the box is too small."""


@dataclass
class EdgeMonitor:
    width: int = 16
    threshold: float = 1e-8
    strict: bool = True
    maximum: float = 0.0

    def check(self, field):
        dens = np.sum(np.abs(field) ** 2, axis=-2)
        edge = max(float(np.max(dens[..., : self.width])), float(np.max(dens[..., -self.width:])))
        self.maximum = max(self.maximum, edge)
        if self.strict and edge > self.threshold:
            raise EdgeDensityError(f"edge density {edge:.3e} exceeds {self.threshold:.1e}")

    @property
    def breached(self):
        return self.maximum > self.threshold


def _kinetic_factors(modes, tau):
    e = C * np.sqrt(modes**2 + C**2)
    a = np.cos(e * tau)
    b = -1j * np.sin(e * tau) / e
    return a + b * MC2, b * C * modes, a - b * MC2


class SplitStepper:
    def __init__(self, grid, potential_values, dt):
        potential_values = np.asarray(potential_values, dtype=float)
        if potential_values.shape != (grid.n_points,):
            raise ValueError("potential must be sampled on the grid")
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.grid = grid
        self.dt = float(dt)
        self.potential = potential_values
        self.potential_phase = np.exp(-1j * potential_values * dt)
        self._half = _kinetic_factors(grid.modes, dt / 2.0)
        self._full = _kinetic_factors(grid.modes, dt)

    @property
    def kinetic_table(self):
        """Full-step 2x2 kinetic propagators, shape (n, 2, 2)."""
        k00, k01, k11 = self._full
        return np.stack([np.stack([k00, k01], -1), np.stack([k01, k11], -1)], -2)

    @staticmethod
    def _apply(factors, spec):
        k00, k01, k11 = factors
        up, down = spec[..., 0, :], spec[..., 1, :]
        return np.stack([k00 * up + k01 * down, k01 * up + k11 * down], axis=-2)

    def check_field(self, field):
        if np.shape(field)[-2:] != (2, self.grid.n_points):
            raise ValueError(f"field shape {np.shape(field)} does not match the grid")


def step(field, stepper):
    stepper.check_field(field)
    g = stepper.grid
    spec = SplitStepper._apply(stepper._half, to_momentum(field, g))
    psi = to_position(spec, g) * stepper.potential_phase
    spec = SplitStepper._apply(stepper._half, to_momentum(psi, g))
    return to_position(spec, g)


def evolve_series(field, stepper, snapshots, monitor=None):
    """Evolve and return the field after each step count in ``snapshots``.

    Consecutive half kinetic steps are merged, so each step costs one forward
    and one inverse transform.
    """
    stepper.check_field(field)
    snapshots = sorted(int(s) for s in snapshots)
    if snapshots and snapshots[0] < 0:
        raise ValueError("negative step count")
    g = stepper.grid
    out = {}
    field = np.asarray(field, dtype=complex)
    for s in snapshots:
        if s == 0:
            out[0] = field.copy()
    n_total = snapshots[-1] if snapshots else 0
    if n_total == 0:
        return [out[s] for s in snapshots]
    wanted = set(snapshots)
    spec = SplitStepper._apply(stepper._half, to_momentum(field, g))
    for i in range(1, n_total + 1):
        psi = to_position(spec, g) * stepper.potential_phase
        if monitor is not None:
            monitor.check(psi)
        spec = to_momentum(psi, g)
        if i in wanted:
            out[i] = to_position(SplitStepper._apply(stepper._half, spec), g)
        if i < n_total:
            spec = SplitStepper._apply(stepper._full, spec)
    return [out[s] for s in snapshots]


def evolve_field(field, stepper, n_steps, monitor=None):
    return evolve_series(field, stepper, [n_steps], monitor)[0]


@dataclass
class PropagatorMatrix:
    """Orthonormal-basis matrix elements <basis_p| U(t) |basis_k>.

    ``u`` is the full (2n, 2n) matrix in the ordering [v modes, w modes]; rows
    index the target mode p, columns the source mode k.  The continuum
    amplitudes with delta(p - k) normalization are ``block / dp``.
    """

    t: float
    u: np.ndarray

    @property
    def n(self):
        return self.u.shape[0] // 2

    @property
    def vv(self):
        return self.u[: self.n, : self.n]

    @property
    def vw(self):
        return self.u[: self.n, self.n:]

    @property
    def wv(self):
        return self.u[self.n:, : self.n]

    @property
    def ww(self):
        return self.u[self.n:, self.n:]


def one_step_matrix(stepper, basis, chunk=256, threads=1):
    dim = basis.dim
    s = np.empty((dim, dim), dtype=complex)

    def work(start):
        stop = min(start + chunk, dim)
        eye = np.zeros((stop - start, dim), dtype=complex)
        eye[np.arange(stop - start), np.arange(start, stop)] = 1.0
        evolved = step(basis.from_vector(eye), stepper)
        s[:, start:stop] = basis.to_vector(evolved).T

    starts = range(0, dim, chunk)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            list(pool.map(work, starts))
    else:
        for start in starts:
            work(start)
    return s


def _is_power_of_two(n):
    return n > 0 and not n & (n - 1)


def _iter_powers(matrix, counts):
    """Yield (c, matrix**c) for the sorted distinct ``counts`` (c >= 0).

    Yielded arrays are reused or dropped afterwards; copy them to keep them.
    """
    dim = matrix.shape[0]
    counts = sorted(set(int(c) for c in counts))
    if counts and counts[0] < 0:
        raise ValueError("negative step count")
    if 0 in counts:
        yield 0, np.eye(dim, dtype=complex)
    positive = [c for c in counts if c > 0]
    if not positive:
        return
    if all(_is_power_of_two(c) for c in positive):
        # repeated squaring with snapshots; at most two full matrices alive
        current, power, top = matrix, 1, max(positive)
        del matrix
        while True:
            if power in positive:
                yield power, current
            if power >= top:
                return
            current = current @ current
            power *= 2
    base = int(np.gcd.reduce(positive))
    current = np.linalg.matrix_power(matrix, base)
    done, acc = 0, np.eye(dim, dtype=complex)
    for m in [c // base for c in positive]:
        acc = acc @ np.linalg.matrix_power(current, m - done)
        done = m
        yield m * base, acc


def iter_propagator_series(stepper, basis, n_steps_list, threads=1):
    """Stream PropagatorMatrix objects for increasing step counts.

    Only a couple of full matrices are alive at any time, which matters for
    large grids; the yielded matrix is invalidated by the next iteration.
    """
    if basis.grid is not stepper.grid and basis.grid != stepper.grid:
        raise ValueError("basis and stepper live on different grids")
    powers = _iter_powers(one_step_matrix(stepper, basis, threads=threads), n_steps_list)
    for n, u in powers:
        yield PropagatorMatrix(n * stepper.dt, u)


def build_propagator_series(stepper, basis, n_steps_list, threads=1):
    return [PropagatorMatrix(p.t, p.u.copy())
            for p in iter_propagator_series(stepper, basis, n_steps_list, threads)]


def build_propagator_matrix(stepper, basis, t, threads=1):
    n_steps = int(round(t / stepper.dt))
    if not np.isclose(n_steps * stepper.dt, t, rtol=1e-9, atol=1e-15):
        raise ValueError(f"t = {t} is not a multiple of dt = {stepper.dt}")
    return build_propagator_series(stepper, basis, [n_steps], threads)[0]


def free_propagator_matrix(basis, t):
    """Exact V = 0 propagator: w modes carry energy -E_p."""
    phases = np.concatenate([np.exp(-1j * basis.energies * t), np.exp(1j * basis.energies * t)])
    return PropagatorMatrix(t, np.diag(phases))


def unitarity_defect(prop, chunk=512):
    """max |U^dag U - I|, computed in column blocks to bound memory."""
    u = prop.u
    worst = 0.0
    for start in range(0, u.shape[1], chunk):
        block = u[:, start:start + chunk].conj().T @ u
        block[np.arange(block.shape[0]), start + np.arange(block.shape[0])] -= 1.0
        worst = max(worst, float(np.max(np.abs(block))))
    return worst


_MAGIC = b"CQFTPROP"


def save_checkpoint(prop, path):
    """Binary layout, little-endian throughout::

        8 bytes  magic "CQFTPROP"
        uint32   format version (1)
        uint64   n (modes per kind)
        float64  t
        4 blocks vv, vw, wv, ww; each n*n complex values, row-major,
                 stored as (real, imag) float64 pairs
    """
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IQd", 1, prop.n, prop.t))
        for block in (prop.vv, prop.vw, prop.wv, prop.ww):
            fh.write(np.ascontiguousarray(block, dtype="<c16").tobytes())


def load_checkpoint(path):
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise ValueError(f"{path} is not a propagator checkpoint")
        version, n, t = struct.unpack("<IQd", fh.read(20))
        if version != 1:
            raise ValueError(f"unsupported checkpoint version {version}")
        blocks = [np.frombuffer(fh.read(16 * n * n), dtype="<c16").reshape(n, n) for _ in range(4)]
    u = np.block([[blocks[0], blocks[1]], [blocks[2], blocks[3]]]).astype(complex)
    return PropagatorMatrix(t, u)
