"""Second-quantized Dirac wavepacket tunneling in one dimension.

Split-operator propagation of the single-particle Dirac equation, Fock-space
particle densities built from the propagator, pair production by a smoothed
barrier, and light-cone checks of the result.
"""

from .barrier import BarrierSpec, is_klein_regime, is_supercritical, potential
from .causality import (
    InterventionProfile,
    LightCone,
    apply_intervention,
    causality_defect,
    front_overlay,
    standard_profiles,
)
from .constants import C, COMPTON, MASS, MC2
from .dirac_basis import (
    FreeMode,
    ModeBasis,
    WavepacketCoefficients,
    WavepacketSpec,
    free_mode,
    initial_wavepacket,
    mean_velocity,
    project_coefficients,
    reconstruct,
)
from .fock_density import (
    DensityDecomposition,
    NoTransmission,
    ParticleCount,
    conditional_mean_position,
    particle_count,
    vacuum_density,
    wavepacket_density,
)
from .grid import GridPair, make_grid, to_momentum, to_position
from .propagator import (
    EdgeDensityError,
    EdgeMonitor,
    PropagatorMatrix,
    SplitStepper,
    build_propagator_matrix,
    evolve_field,
    load_checkpoint,
    save_checkpoint,
    step,
    unitarity_defect,
)
from .scenarios import Scenario, compare_free, load_preset, load_scenario, run, write_outputs

__version__ = "0.1.0"
