"""Null-result monitoring of two-dot transfer through a Lorentzian reservoir.

Four computation paths for the conditional dot occupations are provided and
cross-checked against each other:

* :mod:`~zenotransfer.analytic` closed forms for aligned dots, including the
  scaling formula in ``x = bandwidth * tau``;
* :mod:`~zenotransfer.engine` stepwise protocol on the exact pseudomode reduction;
* :mod:`~zenotransfer.oracle` brute-force discretized reservoir;
* :mod:`~zenotransfer.perturbative` short-time expansion.
"""

from .analytic import (
    RootPair,
    TransferMatrix2,
    a_bar_scaling,
    a_of_t,
    measured_amplitudes_analytic,
    measured_trace_analytic,
    p1_conditional,
    roots,
    scaling_trace,
    u_of_t,
)
from .engine import (
    PseudomodeGenerator,
    PseudomodeState,
    build_pseudomode,
    evolve_interval,
    lorentzian_self_energy,
    project_null,
    run_protocol,
    run_unmeasured,
)
from .errors import ConfigError, NumericBreakdown, ParameterError
from .model import (
    DotAmplitudes,
    MeasurementProtocol,
    MixingAngle,
    PhysParams,
    asymptotic_conditional_occupation,
    dark_state_residual,
    mixing_angle,
    validate_params,
)
from .oracle import (
    DiscretizedReservoir,
    FullState,
    discretize,
    evolve_full,
    project_null_full,
    run_protocol_oracle,
    run_unmeasured_oracle,
)
from .perturbative import (
    ZenoCoefficient,
    c_divergence_scan,
    compute_c,
    perturbative_trace,
    psi_n_perturbative,
)
from .trace import ConditionalTrace

__version__ = "0.1.0"
