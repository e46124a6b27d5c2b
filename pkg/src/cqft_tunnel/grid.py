"""Periodic position grid and its momentum lattice.

Transform convention (used everywhere in the package)::

    f~(p_k) = dx / sqrt(2 pi) * sum_j f(x_j) exp(-i p_k x_j)
    f(x_j)  = dp / sqrt(2 pi) * sum_k f~(p_k) exp(+i p_k x_j)

so that ``sum |f|^2 dx == sum |f~|^2 dp`` (Parseval).  Momenta are stored in
ascending order ``p_k = k dp`` for ``k = -n/2 .. n/2 - 1``; the single
unpaired Nyquist mode sits at index 0.  Transforms act on the last axis, so
spinor fields of shape ``(..., 2, n)`` go through unchanged.
"""

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class GridPair:
    n_points: int
    x_min: float
    x_max: float
    x: np.ndarray = field(repr=False, compare=False)
    modes: np.ndarray = field(repr=False, compare=False)

    @property
    def length(self):
        return self.x_max - self.x_min

    @property
    def dx(self):
        return self.length / self.n_points

    @property
    def dp(self):
        return 2.0 * np.pi / self.length

    @property
    def p_max(self):
        return np.pi / self.dx

    def index_of(self, position):
        """Nearest grid index to ``position``."""
        return int(np.clip(np.rint((position - self.x_min) / self.dx), 0, self.n_points - 1))

    def mode_index(self, p):
        k = np.rint(p / self.dp)
        if not np.isclose(k * self.dp, p, rtol=0, atol=1e-9 * max(1.0, abs(p))):
            raise ValueError(f"momentum {p} is not a grid mode")
        k = int(k)
        if not -self.n_points // 2 <= k < self.n_points // 2:
            raise ValueError(f"momentum {p} outside the grid's mode range")
        return k + self.n_points // 2

    def contains(self, a, b):
        return self.x_min <= a and b <= self.x_max


def make_grid(n_points, x_min, x_max):
    n_points = int(n_points)
    if n_points < 8 or n_points & (n_points - 1):
        raise ValueError(f"n_points must be a power of two >= 8, got {n_points}")
    if not x_max > x_min:
        raise ValueError("degenerate box: need x_max > x_min")
    length = x_max - x_min
    x = x_min + np.arange(n_points) * (length / n_points)
    modes = (np.arange(n_points) - n_points // 2) * (2.0 * np.pi / length)
    x.flags.writeable = False
    modes.flags.writeable = False
    return GridPair(n_points, float(x_min), float(x_max), x, modes)


def _phase(grid):
    # exp(-i p_k x_min): moves the FFT origin from index 0 to x_min
    return np.exp(-1j * grid.modes * grid.x_min)


def _check(values, grid):
    values = np.asarray(values)
    if values.shape[-1] != grid.n_points:
        raise ValueError(f"last axis has length {values.shape[-1]}, grid has {grid.n_points}")
    return values


def to_momentum(values, grid):
    values = _check(values, grid)
    spectrum = np.fft.fftshift(np.fft.fft(values, axis=-1), axes=-1)
    return spectrum * (_phase(grid) * grid.dx / np.sqrt(2.0 * np.pi))


def to_position(spectrum, grid):
    spectrum = _check(spectrum, grid)
    shifted = np.fft.ifftshift(spectrum * np.conj(_phase(grid)), axes=-1)
    return np.fft.ifft(shifted, axis=-1) * (grid.n_points * grid.dp / np.sqrt(2.0 * np.pi))


def norm2(field, grid):
    """sum |field|^2 dx over every leading axis except batch axes of a spinor."""
    return float(np.sum(np.abs(field) ** 2) * grid.dx)
