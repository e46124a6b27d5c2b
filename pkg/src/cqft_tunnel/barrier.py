from dataclasses import dataclass

import numpy as np

from .constants import MC2


@dataclass(frozen=True)
class BarrierSpec:
    """Smoothed rectangular barrier centred at x = 0.

    ``V0`` is an energy in atomic units (use ``V0=k * MC2`` for k mc^2).
    """

    V0: float
    L: float
    eps: float

    def __post_init__(self):
        if self.L <= 0 or self.eps <= 0:
            raise ValueError("barrier width and smoothness must be positive")

    @property
    def edges(self):
        return -self.L / 2.0, self.L / 2.0

    def check_resolved(self, grid):
        if self.eps < 2.0 * grid.dx:
            raise ValueError(f"smoothness {self.eps:.3g} not resolved by dx = {grid.dx:.3g}")


def potential(x, spec):
    x = np.asarray(x, dtype=float)
    # symmetric form keeps V(x) == V(-x) bit for bit
    a = np.tanh((x + spec.L / 2.0) / spec.eps)
    b = np.tanh((spec.L / 2.0 - x) / spec.eps)
    return 0.5 * spec.V0 * (a + b)


def is_supercritical(spec):
    return spec.V0 > 2.0 * MC2


def is_klein_regime(spec, packet_energy):
    """Supercritical barrier and (E - V0)^2 > m^2 c^4 for the packet energy."""
    return is_supercritical(spec) and (packet_energy - spec.V0) ** 2 > MC2**2
