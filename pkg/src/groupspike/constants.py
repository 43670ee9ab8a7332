"""Constants used throughout groupspike."""

from __future__ import annotations

from typing import Final

# Sampler defaults
DEFAULT_SEED: Final[int] = 20130401
DEFAULT_N_ITER: Final[int] = 10000
DEFAULT_N_BURN: Final[int] = 5000
DEFAULT_EM_ROUNDS: Final[int] = 20
DEFAULT_EM_INNER_ITERS: Final[int] = 1000
DEFAULT_LAMBDA_INIT: Final[float] = 1.0
DEFAULT_T_INIT: Final[float] = 1.0

# MC-EM convergence monitor
EM_RTOL: Final[float] = 0.05
EM_WINDOW: Final[int] = 3

# Near-zero guard for inverse-Gaussian means
NORM_GUARD: Final[float] = 1e-12

# Credible interval level
CREDIBLE_LEVEL: Final[float] = 0.95

# Frequentist solvers
SOLVER_TOL: Final[float] = 1e-8
KKT_TOL: Final[float] = 1e-6
HARD_ZERO_TOL: Final[float] = 1e-10
MAX_SWEEPS: Final[int] = 100000
GRID_SIZE: Final[int] = 50
GRID_MIN_RATIO: Final[float] = 1e-3
SGL_RATIOS: Final[tuple[float, ...]] = (0.25, 0.5, 0.75)
DEFAULT_FOLDS: Final[int] = 5

# Benchmark defaults
DEFAULT_REPS: Final[int] = 50
DEFAULT_BOOT_REPS: Final[int] = 1000
MIN_BOOT_REPS: Final[int] = 100
SENSITIVITY_PI0: Final[tuple[float, ...]] = (0.2, 0.5, 0.8)
SENSITIVITY_BETA_A: Final[tuple[float, ...]] = (0.5, 1.0, 1.5)

# Method names
METHOD_BGL_SS: Final[str] = "bgl-ss"
METHOD_BGL: Final[str] = "bgl"
METHOD_BSGL: Final[str] = "bsgl"
METHOD_BSGS_SS: Final[str] = "bsgs-ss"
METHOD_GL: Final[str] = "gl"
METHOD_SGL: Final[str] = "sgl"
METHOD_OLS: Final[str] = "ols"
METHODS: Final[tuple[str, ...]] = (
    METHOD_BGL_SS,
    METHOD_BGL,
    METHOD_BSGL,
    METHOD_BSGS_SS,
    METHOD_GL,
    METHOD_SGL,
    METHOD_OLS,
)
SPIKE_SLAB_METHODS: Final[tuple[str, ...]] = (METHOD_BGL_SS, METHOD_BSGS_SS)

# Selection levels
LEVEL_GROUP: Final[str] = "group"
LEVEL_COEF: Final[str] = "coef"

# Exit codes
EXIT_OK: Final[int] = 0
EXIT_INPUT_ERROR: Final[int] = 2
EXIT_NUMERICAL_ERROR: Final[int] = 3

# File paths
DEFAULT_CONFIG_FILE: Final[str] = "groupspike.toml"
DEFAULT_RC_FILE: Final[str] = ".groupspikerc"

# Report schema
REPORT_SCHEMA_VERSION: Final[str] = "1.0"
