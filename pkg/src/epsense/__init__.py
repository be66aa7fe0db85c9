"""Exceptional-point sensing in two coupled, parametrically driven optomechanical cavities."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AmbiguousBranch,
    ConfigError,
    EPSenseError,
    InvalidParams,
    NoConvergence,
    NoEPInBracket,
    NonPositiveMass,
    NonPositiveRate,
    PoleHit,
    SqueezeDiverges,
    ZeroPerturbation,
)
from .params import DerivedParams, Perturbation, SystemParams, derive, squeeze_moments  # noqa: E402
from .steady_state import SteadyState, solve_ideal, solve_self_consistent  # noqa: E402
from .eigenmodes import (  # noqa: E402
    EffectiveHamiltonian,
    EigenPair,
    EPResult,
    build_heff,
    delta_lambda_analytic,
    delta_lambda_numeric,
    effective_hamiltonian,
    eigenvalues,
    enhancement_factor,
    locate_ep,
    mass_equivalent,
)
from .scattering import ScatteringMatrix, SpectrumGrid, output_spectrum, smatrix, transmission_spectrum  # noqa: E402
