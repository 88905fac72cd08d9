"""Resonantly kicked linear molecules: Anderson wall and Bloch oscillations."""
from ._kernels import BACKEND as KERNEL_BACKEND
from .dynamics import (
    Evolution,
    EvolutionRecord,
    ThermalEnsembleSpec,
    alignment_expectation,
    evolve_pure,
    evolve_thermal,
    rotational_energy,
    sample_alignment_trace,
)
from .floquet import (
    FloquetSpectrum,
    WallEstimate,
    anderson_wall,
    classify_states,
    floquet_spectrum,
    one_cycle_operator,
    tightbinding_site_energy,
)
from .molecules import MoleculeDatabase, MoleculeParams, PulseTrainSpec, get_molecule
from .rotor import (
    Cos2Matrix,
    RotorBlockState,
    apply_kick,
    cos2_matrix,
    energy_level,
    free_propagator_phases,
    kick_operator,
)
from .semiclassical import (
    SemiclassicalTrajectory,
    bloch_potential,
    compare_quantum_semiclassical,
    integrate_bloch,
    turning_point,
)

__version__ = "0.1.0"
