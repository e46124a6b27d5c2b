"""Light-cone bookkeeping and beyond-cone comparisons of densities.

An intervention reshapes the initial packet inside its support by a positive
profile f and renormalizes it.  Densities at points outside the light cone
of the support must not notice the change; on a periodic spectral grid they
do so only up to a small leakage floor, which is measured on a free run of
the same packet and folded into the pass threshold.
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import C

RELATIVE_TOLERANCE = 1e-6
FLOOR_FACTOR = 3.0
DEFAULT_MARGINS = (2, 5, 10)


@dataclass(frozen=True)
class InterventionProfile:
    name: str
    values: np.ndarray = field(repr=False, compare=False)

    def __post_init__(self):
        if np.any(np.asarray(self.values) < 0):
            raise ValueError(f"intervention {self.name!r} is negative somewhere")


def identity_profile(grid):
    return InterventionProfile("identity", np.ones(grid.n_points))


def right_half_profile(grid, x0):
    """sqrt(2) on x > x0, zero to the left: keeps the front half of the packet."""
    return InterventionProfile("right_half", np.sqrt(2.0) * (grid.x > x0))


def gaussian_bump_profile(grid, center, width, height=1.0):
    values = 1.0 + height * np.exp(-0.5 * ((grid.x - center) / width) ** 2)
    return InterventionProfile("gaussian_bump", values)


def standard_profiles(grid, packet):
    """The three profiles every scenario is tested with."""
    return [
        identity_profile(grid),
        right_half_profile(grid, packet.x0),
        gaussian_bump_profile(grid, packet.x0 + packet.D / 2.0, packet.D / 4.0),
    ]


def apply_intervention(field, profile, grid, support=None):
    """f * field, renormalized to unit norm.

    Only values on ``support`` are reshaped (identity outside), so the result
    stays inside the original packet support.
    """
    f = np.asarray(profile.values, dtype=float)
    if f.shape != (grid.n_points,):
        raise ValueError("profile must be tabulated on the grid")
    if support is not None:
        a, b = support
        inside = (grid.x >= a) & (grid.x <= b)
        f = np.where(inside, f, 1.0)
    out = np.asarray(field) * f
    norm = np.sqrt(np.sum(np.abs(out) ** 2) * grid.dx)
    if norm == 0:
        raise ValueError(f"intervention {profile.name!r} removes the whole packet")
    return out / norm


@dataclass(frozen=True)
class LightCone:
    x_edge: float

    @classmethod
    def from_packet(cls, packet):
        return cls(packet.right_edge)

    def front(self, t):
        return self.x_edge + C * np.asarray(t, dtype=float)

    def beyond(self, x, t, margin=0.0):
        return np.asarray(x) > self.front(t) + margin


def front_overlay(cone, t):
    return float(cone.front(t))


def check_probe(cone, t, x):
    if not x > cone.front(t):
        raise ValueError(f"probe x = {x:.6g} at t = {t:.3g} is inside the light cone "
                         f"(front {cone.front(t):.6g})")


def beyond_cone_max(values, grid, cone, t, margin_points):
    """max |values| strictly beyond front(t) + margin_points * dx (0 if empty)."""
    mask = cone.beyond(grid.x, t, margin_points * grid.dx)
    if not np.any(mask):
        return 0.0
    return float(np.max(np.abs(values[mask])))


def spectral_floor(free_density, grid, cone, t, margin_points=5):
    """Beyond-cone leakage of a freely evolved packet, relative to its peak."""
    peak = float(np.max(np.abs(free_density)))
    return beyond_cone_max(free_density, grid, cone, t, margin_points) / peak


def pass_threshold(floor):
    return max(RELATIVE_TOLERANCE, FLOOR_FACTOR * floor)


@dataclass
class CausalityReport:
    t: float
    front: float
    scale: float
    floor: float
    # margin (in dx) -> max |rho_a - rho_b| over intervention pairs, relative
    pairwise: dict
    # margin -> max |rho - rho_vac| over interventions, relative
    vacuum: dict

    @property
    def threshold(self):
        return pass_threshold(self.floor)

    def worst(self, min_margin=5):
        vals = [v for m, v in self.pairwise.items() if m >= min_margin]
        vals += [v for m, v in self.vacuum.items() if m >= min_margin]
        return max(vals) if vals else 0.0

    def passed(self, min_margin=5):
        return self.worst(min_margin) <= self.threshold

    def items(self):
        out = {"t": self.t, "front": self.front, "floor": self.floor,
               "threshold": self.threshold}
        for m in sorted(self.pairwise):
            out[f"pairwise_{m}dx"] = self.pairwise[m]
            out[f"vacuum_{m}dx"] = self.vacuum[m]
        return out


def causality_defect(wavepacket_densities, grid, cone, t, floor, scale=None,
                     margins=DEFAULT_MARGINS):
    """Compare vacuum-subtracted densities of several interventions beyond the cone.

    ``wavepacket_densities`` maps intervention name -> rho_wp = rho - rho_vac
    at time ``t``; the no-packet run has rho_wp = 0 identically, so
    max |rho_wp| is the deviation from the vacuum density.  Differences are
    divided by ``scale`` (default: the largest |rho_wp| anywhere).
    """
    dens = list(wavepacket_densities.values())
    if not dens:
        raise ValueError("no densities to compare")
    if scale is None:
        scale = max(float(np.max(np.abs(d))) for d in dens)
    pairwise, vacuum = {}, {}
    for m in margins:
        worst_pair = 0.0
        for i in range(len(dens)):
            for j in range(i + 1, len(dens)):
                worst_pair = max(worst_pair, beyond_cone_max(dens[i] - dens[j], grid, cone, t, m))
        pairwise[m] = worst_pair / scale
        vacuum[m] = max(beyond_cone_max(d, grid, cone, t, m) for d in dens) / scale
    return CausalityReport(float(t), front_overlay(cone, t), float(scale), float(floor),
                           pairwise, vacuum)

