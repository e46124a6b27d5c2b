"""Scenario files, presets and the batch runner.

A run uses two grids with the same spacing:

* the *scene* grid, large enough to hold the light cone of the packet
  support over the whole run, on which the packet's two energy components
  (and each intervention variant) are evolved by split steps;
* a smaller *vacuum* grid centred on the barrier, on which the full
  propagator matrix is built and the vacuum density computed.  The result is
  embedded into the scene grid (zero outside the vacuum box).

Everything that depends on the packet (rho_wp, particle counts, conditional
positions, light-cone checks) comes from the scene grid alone.
"""

import configparser
import csv
import logging
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import causality as cz
from .barrier import BarrierSpec, potential
from .constants import C, COMPTON, MC2
from .dirac_basis import ModeBasis, WavepacketSpec, initial_wavepacket, mean_velocity, project_coefficients
from .fock_density import (
    NoTransmission,
    auxiliary_fields,
    combine,
    conditional_mean_position,
    particle_count,
    region_mass,
    vacuum_density_parts,
)
from .grid import make_grid, to_momentum
from .propagator import (
    EdgeMonitor,
    SplitStepper,
    evolve_series,
    iter_propagator_series,
    load_checkpoint,
    save_checkpoint,
    unitarity_defect,
)

log = logging.getLogger(__name__)

PRESETS = ("fig1", "fig2", "fig3", "desk-fig1", "desk-fig2", "desk-fig3", "free-fig1")
DENSITY_COLUMNS = ("x", "rho_total", "rho_vac", "rho_wp", "rho1", "rho2", "rho3")
INTERVENTIONS = ("identity", "right_half", "gaussian_bump")
EDGE_POINTS = 16


@dataclass(frozen=True)
class Scenario:
    name: str
    packet: WavepacketSpec
    barrier: BarrierSpec
    n_points: int
    x_min: float
    dx: float
    vacuum_points: int
    t_final: float
    n_steps: int
    output_times: tuple
    margins: tuple = cz.DEFAULT_MARGINS
    interventions: tuple = INTERVENTIONS

    @property
    def dt(self):
        return self.t_final / self.n_steps

    @property
    def x_max(self):
        return self.x_min + self.n_points * self.dx

    @property
    def output_steps(self):
        steps = []
        for t in self.output_times:
            n = int(round(t / self.dt))
            if not math.isclose(n * self.dt, t, rel_tol=1e-9, abs_tol=1e-15):
                raise ValueError(f"output time {t} is not a multiple of dt = {self.dt:.6g}")
            steps.append(n)
        return steps

    @property
    def vacuum_offset(self):
        """Index of the vacuum grid's first point inside the scene grid."""
        start = -self.vacuum_points * self.dx / 2.0
        k = (start - self.x_min) / self.dx
        if abs(k - round(k)) > 1e-6:
            raise ValueError("vacuum grid points do not coincide with scene grid points")
        return int(round(k))

    def scene_grid(self):
        return make_grid(self.n_points, self.x_min, self.x_max)

    def vacuum_grid(self):
        half = self.vacuum_points * self.dx / 2.0
        return make_grid(self.vacuum_points, -half, half)

    @property
    def cone(self):
        return cz.LightCone.from_packet(self.packet)

    @property
    def vacuum_covers_cone(self):
        """True when the vacuum box holds the barrier's light cone at t_final."""
        return self.vacuum_points * self.dx / 2.0 >= self.barrier.L / 2.0 + C * self.t_final

    def validate(self):
        if self.n_steps <= 0 or self.t_final <= 0:
            raise ValueError("need positive t_final and n_steps")
        if not self.output_times:
            raise ValueError("no output times")
        if max(self.output_times) > self.t_final * (1 + 1e-12):
            raise ValueError("output time beyond t_final")
        self.output_steps
        grid = self.scene_grid()
        if self.barrier.V0 != 0:
            self.barrier.check_resolved(grid)
        a, b = self.packet.support
        if not b < self.barrier.edges[0]:
            raise ValueError("packet support must lie strictly left of the barrier")
        if a - C * self.t_final < self.x_min or self.cone.front(self.t_final) > self.x_max:
            raise ValueError("scene box does not contain the light cone of the packet support")
        if self.vacuum_offset < 0 or self.vacuum_offset + self.vacuum_points > self.n_points:
            raise ValueError("vacuum box must lie inside the scene box")
        if self.vacuum_points & (self.vacuum_points - 1):
            raise ValueError("vacuum_points must be a power of two")
        unknown = set(self.interventions) - set(INTERVENTIONS)
        if unknown:
            raise ValueError(f"unknown interventions {sorted(unknown)}")
        spread = momentum_spread(self, grid)
        if grid.p_max < abs(self.packet.p0) + 6.0 * spread:
            raise ValueError(f"p_max = {grid.p_max:.4g} below p0 + 6 sigma_p")
        return self


def momentum_spread(scenario, grid):
    field = initial_wavepacket(scenario.packet, grid)
    weight = np.sum(np.abs(to_momentum(field, grid)) ** 2, axis=0)
    weight = weight / weight.sum()
    mean = np.sum(weight * grid.modes)
    return float(np.sqrt(np.sum(weight * (grid.modes - mean) ** 2)))


def _floats(text):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _ints(text):
    return tuple(int(v) for v in text.replace(",", " ").split())


def scenario_from_config(cfg):
    """Build a Scenario from a ConfigParser (see the files in ``presets/``)."""
    pk, br, gr, tm = cfg["packet"], cfg["barrier"], cfg["grid"], cfg["time"]
    cs = cfg["causality"] if cfg.has_section("causality") else {}
    t_final = float(tm["t_final"])
    outputs = _floats(tm.get("output_times", str(t_final)))
    return Scenario(
        name=cfg.get("scenario", "name", fallback="custom"),
        packet=WavepacketSpec(
            x0=float(pk["x0_compton"]) * COMPTON,
            p0=float(pk["p0"]),
            D=float(pk["D_compton"]) * COMPTON,
        ),
        barrier=BarrierSpec(
            V0=float(br["V0_mc2"]) * MC2,
            L=float(br["L_compton"]) * COMPTON,
            eps=float(br["eps_compton"]) * COMPTON,
        ),
        n_points=int(gr["n_points"]),
        x_min=float(gr["x_min"]),
        dx=float(gr["dx"]),
        vacuum_points=int(cfg.get("vacuum", "n_points", fallback=gr["n_points"])),
        t_final=t_final,
        n_steps=int(tm["n_steps"]),
        output_times=outputs,
        margins=_ints(cs.get("margins", "2 5 10")),
        interventions=tuple(v.strip() for v in cs.get("interventions", ", ".join(INTERVENTIONS)).split(",") if v.strip()),
    )


def load_scenario(path):
    cfg = configparser.ConfigParser()
    with open(path) as fh:
        cfg.read_file(fh)
    return scenario_from_config(cfg).validate()


def load_preset(name):
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    text = resources.files("cqft_tunnel").joinpath("presets", f"{name}.ini").read_text()
    cfg = configparser.ConfigParser()
    cfg.read_string(text)
    return scenario_from_config(cfg).validate()


def scenario_config(scn):
    """Resolved configuration, loadable again by :func:`scenario_from_config`."""
    cfg = configparser.ConfigParser()
    cfg["scenario"] = {"name": scn.name}
    cfg["packet"] = {
        "x0_compton": repr(scn.packet.x0 / COMPTON),
        "p0": repr(scn.packet.p0),
        "D_compton": repr(scn.packet.D / COMPTON),
    }
    cfg["barrier"] = {
        "V0_mc2": repr(scn.barrier.V0 / MC2),
        "L_compton": repr(scn.barrier.L / COMPTON),
        "eps_compton": repr(scn.barrier.eps / COMPTON),
    }
    cfg["grid"] = {"n_points": str(scn.n_points), "x_min": repr(scn.x_min), "dx": repr(scn.dx)}
    cfg["vacuum"] = {"n_points": str(scn.vacuum_points)}
    cfg["time"] = {
        "t_final": repr(scn.t_final),
        "n_steps": str(scn.n_steps),
        "output_times": ", ".join(repr(t) for t in scn.output_times),
    }
    cfg["causality"] = {
        "margins": ", ".join(str(m) for m in scn.margins),
        "interventions": ", ".join(scn.interventions),
    }
    return cfg


class _PairSumMonitor:
    """Edge checks on chi+ + chi- for every stacked (chi+, chi-) pair.

    The two energy components each have slowly decaying tails; only their
    sum is compactly supported and bounded by the light cone.  The first pair
    (the unmodified packet) goes to ``strict``; all pairs feed ``report``,
    since the stepped intervention profile leaks spectrally by construction.
    """

    def __init__(self, strict, report):
        self.strict = strict
        self.report = report

    def check(self, stacked):
        sums = stacked[0::2] + stacked[1::2]
        self.strict.check(sums[:1])
        self.report.check(sums)


@dataclass
class OutputState:
    t: float
    steps: int
    decomposition: object
    counts: object
    charge: float
    front: float
    x_tr: float
    x_free: float
    transmitted_peak: float
    transmitted_mass: float
    reflected_peak: float
    reflected_mass: float
    left_mass: float
    floor: float
    wavepacket_densities: dict = field(repr=False)
    free_density: np.ndarray = field(repr=False)
    unitarity_defect: float = float("nan")
    vacuum_edge: float = float("nan")
    causality: object = None
    no_transmission: str = ""

    @property
    def contained(self):
        return not self.transmitted_peak >= self.front


@dataclass
class RunResult:
    scenario: Scenario
    grid: object
    mean_velocity: float
    outputs: list
    edge_maximum: float
    with_vacuum: bool
    variants_edge_maximum: float = float("nan")

    def output_at(self, t):
        for out in self.outputs:
            if math.isclose(out.t, t, rel_tol=1e-9):
                return out
        raise KeyError(t)


def _profiles(scenario, grid):
    table = {p.name: p for p in cz.standard_profiles(grid, scenario.packet)}
    return [table[name] for name in scenario.interventions]


def _energy_split(field, basis):
    c_plus, c_minus = basis.project(field)
    return basis.synthesize(c_plus=c_plus), basis.synthesize(c_minus=c_minus)


def _checkpoint_path(base, steps):
    base = Path(base)
    return base.with_name(f"{base.stem}.step{steps}{base.suffix or '.bin'}")


def _vacuum_series(scenario, threads=1, checkpoint=None):
    """Yield (steps, vac_e, vac_p, unitarity defect) on the vacuum grid."""
    grid = scenario.vacuum_grid()
    basis = ModeBasis(grid)
    steps = scenario.output_steps
    paths = [_checkpoint_path(checkpoint, n) for n in steps] if checkpoint else None
    if paths and all(p.exists() for p in paths):
        for n, path in zip(steps, paths):
            prop = load_checkpoint(path)
            if prop.n != grid.n_points or not math.isclose(prop.t, n * scenario.dt, rel_tol=1e-9, abs_tol=1e-15):
                raise ValueError(f"checkpoint {path} does not match the scenario")
            log.info("loaded propagator checkpoint %s", path)
            yield (n, *vacuum_density_parts(prop, basis), unitarity_defect(prop))
        return
    stepper = SplitStepper(grid, potential(grid.x, scenario.barrier), scenario.dt)
    for prop in iter_propagator_series(stepper, basis, steps, threads=threads):
        n = int(round(prop.t / scenario.dt))
        log.info("vacuum propagator ready at t = %.4g", prop.t)
        if paths:
            save_checkpoint(prop, paths[steps.index(n)])
        yield (n, *vacuum_density_parts(prop, basis), unitarity_defect(prop))


def _embed(values, offset, n_scene):
    out = np.zeros(n_scene)
    out[offset:offset + len(values)] = values
    return out


def run(scenario, threads=1, checkpoint=None, with_vacuum=True, with_interventions=True,
        strict_edges=True):
    """Full pipeline; see the module docstring for the two-grid layout."""
    scenario.validate()
    grid = scenario.scene_grid()
    basis = ModeBasis(grid)
    cone = scenario.cone
    chi = initial_wavepacket(scenario.packet, grid)
    coeffs = project_coefficients(chi, basis)
    velocity = mean_velocity(coeffs, grid.modes)

    profiles = _profiles(scenario, grid) if with_interventions else [cz.identity_profile(grid)]
    if profiles[0].name != "identity":
        profiles.insert(0, cz.identity_profile(grid))
    stack = []
    for prof in profiles:
        shaped = cz.apply_intervention(chi, prof, grid, scenario.packet.support)
        stack.extend(_energy_split(shaped, basis))
    stack = np.array(stack)

    monitor = EdgeMonitor(width=EDGE_POINTS, strict=strict_edges)
    variants_monitor = EdgeMonitor(width=EDGE_POINTS, strict=False)
    stepper = SplitStepper(grid, potential(grid.x, scenario.barrier), scenario.dt)
    steps = scenario.output_steps
    log.info("%s: evolving %d fields for %d steps on %d points",
             scenario.name, len(stack), max(steps), grid.n_points)
    evolved = evolve_series(stack, stepper, steps, _PairSumMonitor(monitor, variants_monitor))

    zero_vac = np.zeros(grid.n_points)
    vac = {}
    if with_vacuum:
        offset = scenario.vacuum_offset
        for n, vac_e, vac_p, defect in _vacuum_series(scenario, threads, checkpoint):
            edge = float(max(np.max((vac_e + vac_p)[:EDGE_POINTS]), np.max((vac_e + vac_p)[-EDGE_POINTS:])))
            vac[n] = (_embed(vac_e, offset, grid.n_points), _embed(vac_p, offset, grid.n_points), defect, edge)

    outputs = []
    half = scenario.barrier.L / 2.0
    for n, fields in zip(steps, evolved):
        t = n * scenario.dt
        vac_e, vac_p, defect, vac_edge = vac.get(n, (zero_vac, zero_vac, float("nan"), float("nan")))
        wp = {}
        decomp = None
        for k, prof in enumerate(profiles):
            aux = auxiliary_fields(basis.to_vector(fields[2 * k]), basis.to_vector(fields[2 * k + 1]), basis)
            if k == 0:
                decomp = combine(*aux, vac_e, vac_p)
                wp[prof.name] = decomp.rho_wp
            else:
                wp[prof.name] = combine(*aux, zero_vac, zero_vac).rho_total

        phase = np.exp(-1j * basis.energies * t)
        free_densities = []
        for k in range(len(profiles)):
            cp, _ = basis.project(stack[2 * k])
            _, cm = basis.project(stack[2 * k + 1])
            free = basis.synthesize(c_plus=cp * phase, c_minus=cm * np.conj(phase))
            free_densities.append(np.sum(np.abs(free) ** 2, axis=0))
        free_density = free_densities[0]
        x_free = float(np.sum(grid.x * free_density) * grid.dx)
        note = ""
        try:
            x_tr = conditional_mean_position(decomp, grid, (half, grid.x_max))
        except NoTransmission as exc:
            x_tr, note = float("nan"), str(exc)
        right = grid.x > half
        left = grid.x < -half
        # the negative-energy part of the packet streams left on its own;
        # what the barrier sends back is the excess over the free run
        scattered_back = decomp.rho_wp[left] - free_density[left]
        # leakage of the free evolution of every tested packet, worst case
        floor = max(cz.spectral_floor(d, grid, cone, t) for d in free_densities) if t > 0 else 0.0
        counts = particle_count(decomp, grid)
        out = OutputState(
            t=t,
            steps=n,
            decomposition=decomp,
            counts=counts,
            charge=float(np.sum(decomp.rho1 - decomp.rho2) * grid.dx),
            front=cz.front_overlay(cone, t),
            x_tr=x_tr,
            x_free=x_free,
            transmitted_peak=float(grid.x[right][np.argmax(decomp.rho_wp[right])]),
            transmitted_mass=region_mass(decomp, grid, (half, grid.x_max)),
            reflected_peak=float(grid.x[left][np.argmax(scattered_back)]),
            reflected_mass=float(np.sum(scattered_back) * grid.dx),
            left_mass=region_mass(decomp, grid, (grid.x_min, -half)),
            floor=floor,
            wavepacket_densities=wp,
            free_density=free_density,
            unitarity_defect=defect,
            vacuum_edge=vac_edge,
            no_transmission=note,
        )
        out.causality = cz.causality_defect(wp, grid, cone, t, floor, margins=scenario.margins)
        outputs.append(out)
    return RunResult(scenario, grid, velocity, outputs, monitor.maximum, with_vacuum,
                     variants_monitor.maximum)


def compare_free(scenario):
    """[(t, <X_tr>, <X_free>)] from paired barrier / free runs."""
    result = run(scenario, with_vacuum=False, with_interventions=False)
    return [(o.t, o.x_tr, o.x_free) for o in result.outputs]


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def summary_config(result):
    """Structured key = value summary with fixed key names."""
    scn, grid = result.scenario, result.grid
    cfg = configparser.ConfigParser()
    cfg["run"] = {k: _fmt(v) for k, v in {
        "scenario": scn.name,
        "n_points": grid.n_points,
        "x_min": grid.x_min,
        "x_max": grid.x_max,
        "dx": grid.dx,
        "p_max": grid.p_max,
        "dt": scn.dt,
        "n_steps": scn.n_steps,
        "vacuum_points": scn.vacuum_points if result.with_vacuum else 0,
        "vacuum_covers_cone": scn.vacuum_covers_cone,
        "mean_velocity_c": result.mean_velocity,
        "edge_density_max": result.edge_maximum,
        "edge_density_threshold": 1e-8,
        "intervention_edge_density_max": result.variants_edge_maximum,
        "x_edge": scn.cone.x_edge,
    }.items()}
    for i, o in enumerate(result.outputs):
        rep = o.causality
        entries = {
            "t": o.t,
            "steps": o.steps,
            "N_total": o.counts.N_total,
            "N_vac": o.counts.N_vac,
            "electrons_from_pairs": o.counts.electrons_from_pairs,
            "wavepacket_number": o.counts.wavepacket_number,
            "rho3_integral": o.counts.rho3_integral,
            "charge": o.charge,
            "X_tr": o.x_tr,
            "X_free": o.x_free,
            "front": o.front,
            "transmitted_peak": o.transmitted_peak,
            "transmitted_mass": o.transmitted_mass,
            "reflected_peak": o.reflected_peak,
            "reflected_mass": o.reflected_mass,
            "left_mass": o.left_mass,
            "peak_inside_cone": o.contained,
            "unitarity_defect": o.unitarity_defect,
            "vacuum_edge_density": o.vacuum_edge,
            "spectral_floor": o.floor,
            "causality_threshold": rep.threshold,
            "causality_passed": rep.passed(),
            "no_transmission": o.no_transmission or "none",
        }
        for m in sorted(rep.pairwise):
            entries[f"causality_pairwise_{m}dx"] = rep.pairwise[m]
            entries[f"causality_vacuum_{m}dx"] = rep.vacuum[m]
        cfg[f"output.{i}"] = {k: _fmt(v) for k, v in entries.items()}
    return cfg


def density_rows(result, index):
    out = result.outputs[index]
    d = out.decomposition
    return np.column_stack([result.grid.x, d.rho_total, d.rho_vac, d.rho_wp, d.rho1, d.rho2, d.rho3])


def write_outputs(result, out_dir):
    """density_<i>.csv per output time, causality.csv, summary.ini, scenario.ini."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for i in range(len(result.outputs)):
        path = out_dir / f"density_{i}.csv"
        np.savetxt(path, density_rows(result, i), delimiter=",", fmt="%.12e",
                   header=",".join(DENSITY_COLUMNS), comments="")
        written.append(path)
    path = out_dir / "causality.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "front", "margin_dx", "pairwise", "vacuum", "floor", "threshold"])
        for o in result.outputs:
            rep = o.causality
            for m in sorted(rep.pairwise):
                writer.writerow([_fmt(rep.t), _fmt(rep.front), m, _fmt(rep.pairwise[m]),
                                 _fmt(rep.vacuum[m]), _fmt(rep.floor), _fmt(rep.threshold)])
    written.append(path)
    for name, cfg in (("summary.ini", summary_config(result)), ("scenario.ini", scenario_config(result.scenario))):
        path = out_dir / name
        with open(path, "w") as fh:
            cfg.write(fh)
        written.append(path)
    return written
