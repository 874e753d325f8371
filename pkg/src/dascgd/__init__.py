"""Decentralized stochastic compositional gradient descent with gradient
tracking, hybrid variance reduction, and optional communication compression,
plus a seeded multi-agent policy-evaluation benchmark."""

from ._kernels import BACKEND
from .algorithms import (
    NetworkState,
    StepSizes,
    cdascgd_step,
    centralized_step,
    comm,
    dascgd_step,
    init_states,
    run,
)
from .compressors import (
    IdentityCompressor,
    LBitQuantizer,
    TopTSparsifier,
    contract_estimate,
    parse_compressor,
    quantize_lbit,
    top_t,
)
from .errors import (
    ConfigurationError,
    DascgdError,
    DimensionError,
    DivergenceError,
    NumericalError,
    TopologyError,
)
from .harness import RunConfig, RunRecord, bits_for_round, metrics, run_experiment
from .network import (
    MixingMatrix,
    exponential_weights,
    ring_weights,
    spectral_gap,
    validate_doubly_stochastic,
)
from .problem import (
    ProblemInstance,
    RLInstance,
    generate_instance,
    pool_problem,
    solve_optimal,
)

__version__ = "0.1.0"
