"""Design and benchmark open-loop control pulses for finite-dimensional quantum systems.

Three design strategies over one simulation core:

* geometric, frequency-selective resonant pi-pulse sequences;
* iterative optimization with interleaved forward/backward sweeps and a
  monotone objective;
* single-pass feedback design from a quadratic descent potential, realized
  as an open-loop pulse.

Two ready-made case studies (``bell``, ``qd5``) and a CLI (``pulsebench``)
that runs designs, replays fields, renders figures and compares strategies.
"""

__version__ = "0.1.0"

from .operators import (
    ControlSystem,
    Operator,
    PauliBasis,
    adjoint_representation,
    build_pauli_basis,
    dynamical_lie_algebra_dim,
    matrix_exponential,
)
from .states import (
    BlochVector,
    DensityMatrix,
    PureState,
    bloch_to_density,
    density_to_bloch,
    density_to_pure,
    observable_expectation,
    phase_invariant_pure_distance,
    pure_to_density,
    state_distance,
)
from .dynamics import (
    ControlField,
    TimeGrid,
    Trajectory,
    evolution_operator,
    propagate,
    propagate_unitary,
    to_rotating_frame,
)
from .pulses import PulseSpec, fluence, sample_pulse, spectral_second_moment, spectrum
from .geometric import (
    GeometricPlan,
    calibrate_pi_amplitude,
    design_bitflip_sequence,
    offresonance_report,
)
from .iterative import (
    ConvergenceLog,
    Objective,
    OptimConfig,
    gradient_kernel,
    objective_value,
    optimize,
)
from .lyapunov import (
    KickSpec,
    LyapunovConfig,
    control_law,
    detect_plateaus,
    lyapunov_potential,
    run_lyapunov,
    scan_kappa,
    target_trajectory,
)
from .scenarios import (
    BellScenario,
    QuantumDotScenario,
    bell_report_quantities,
    build_bell_scenario,
    build_qd_scenario,
    get_scenario,
)
