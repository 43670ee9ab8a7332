"""groupspike - Bayesian group and bi-level variable selection with spike-and-slab priors."""

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "api",
    "baselines",
    "bgl_ss",
    "bsgl",
    "bsgs_ss",
    "config",
    "constants",
    "core",
    "exceptions",
    "export",
    "geweke",
    "logger",
    "parallel",
    "posterior",
    "rand",
    "simulate",
    "thresholding",
    "validators",
]
