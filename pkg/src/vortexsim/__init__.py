"""Optical OAM superposition preparation and condensate vortex transfer.

The pipeline has two halves. A two-path interferometer network turns a
single Laguerre-Gaussian input charge |ell> into the counter-rotating
superposition t|ell> + r|-ell> (optics_network, with the mode functions in
oam_modes). A swept two-photon Raman drive then writes that superposition
onto an initially non-rotating condensate, modeled by three coupled
complex amplitude equations (bec_dynamics), whose coefficients can be
recomputed from the underlying mode overlaps (mode_projection). The cli
module wraps preset scenarios, sweeps and grid rendering.
"""

__version__ = "0.1.0"

from .bec_dynamics import (
    CondensateAmplitudes,
    DetuningSchedule,
    GROUND_STATE,
    IntegrationError,
    PhysicalParams,
    Trajectory,
    TrapSpec,
    integrate,
    integrate_fixed_step,
    kappa_from_trap,
    rhs,
    run_figure3,
    steady_state_ratio,
    transfer_function,
)
from .mode_projection import (
    CondensateModeSpec,
    CoefficientReport,
    QuadratureError,
    RabiProfileSpec,
    projected_coefficients,
    psi_g,
    psi_v,
    rabi_profile,
)
from .oam_modes import (
    CylindricalPoint,
    FieldGrid,
    LgModeSpec,
    assoc_laguerre,
    lg_amplitude,
    sample_mode_grid,
)
from .optics_network import (
    OamSuperposition,
    PathOamState,
    SplitterSpec,
    apply_beam_splitter,
    apply_dove_prism,
    apply_phase,
    mach_zehnder,
    renormalize_port,
)
