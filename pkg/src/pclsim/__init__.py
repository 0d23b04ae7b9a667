"""Simulator for personalized collaborative learning over multi-agent
stochastic linear fixed-point systems.

Agents share stochastic observations of linear systems A(s) x = b_i(s) with
heterogeneous environments and objectives. The library implements the
personalized collaborative update with bias and importance corrections,
server-side central learners (decision and objective estimation), baselines,
density-ratio machinery, heterogeneity metrics, a TD(0) application, and a
deterministic experiment harness with a CLI (``pclsim``).
"""

from .algorithms import (
    ALGORITHMS,
    CDL_VARIANTS,
    DRE_MODES,
    AlgorithmId,
    HeterogeneousEnvironmentError,
    LearnerState,
    MissingDensityRatioError,
    RoundBatch,
    affpcl_full_round,
    affpcl_known_step,
    cdl_step,
    coe_step,
    dre_coupled_step,
    estimated_ratio,
    fedavg_step,
    independent_step,
    init_state,
)
from .environments import (
    Observation,
    UnsupportedFamilyError,
    coupled_sample,
    density_ratio,
    density_ratio_matrix,
    observe,
    sample_state,
    sample_states,
    tv_distance,
)
from .harness import (
    ConfigFormatError,
    PersistenceError,
    RunConfig,
    RunResult,
    SweepConfig,
    load_config,
    persist,
    run_experiment,
    simulate,
    sweep,
)
from .metrics import (
    HeterogeneityReport,
    MetricsRecord,
    center_agent,
    effective_heterogeneity,
    estimate_nu,
    heterogeneity_report,
)
from .model import (
    CENTRAL,
    GenerationFailedError,
    Instance,
    InstanceConfig,
    InvalidConfigError,
    generate_instance,
    reference_solution,
)
from .numerics import NotSymmetricError, SingularMatrixError
from .schedules import StepSchedule, step_size, tail_average
from .tdapp import MrpConfig, MrpInstance, generate_mrp, td_reference

__version__ = "0.1.0"
