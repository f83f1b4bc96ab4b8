"""Random Motzkin paths: exact combinatorics, uniform sampling, analytic
oracles for the semicircle law, and Monte Carlo verification of the
fluctuation limit laws of the step-counting processes."""

from .errors import (
    BadSum,
    CrossingPartition,
    DomainError,
    InternalMismatch,
    NonzeroEndpoint,
    OddSupport,
    PrefixNegative,
    QuadratureFailure,
    SingularDenominator,
)
from .excursion import (
    excursion_fdd_density,
    excursion_marginal_cdf,
    excursion_marginal_density,
    excursion_moment,
)
from .fbm import fbm_density, fbm_joint_moment, fbm_joint_moment_quadrature, fbm_transition
from .fluctuations import (
    FluctuationVector,
    MCReport,
    chi_square_twosample,
    chi_square_uniformity,
    ks_distance,
    limit_moments,
    mc_experiment,
    nonlevel_decomposition_check,
    scaled_fluctuations,
)
from .genfun import (
    joint_pgf,
    level_pgf,
    semicircle_stieltjes,
    sulanke_coeffs,
    sulanke_poly,
)
from .grid import TimeGrid
from .laplace import (
    laplace_joint,
    laplace_level_fluctuations,
    laplace_level_increments,
    limit_laplace,
)
from .paths import (
    CountingTriple,
    MotzkinPath,
    PairPartition,
    Step,
    catalan,
    counting_processes,
    enumerate_nc2,
    enumerate_paths,
    is_noncrossing,
    meander_table,
    motzkin_number,
    partition_to_path,
    path_to_partition,
    validate,
)
from .quadrature import SemicircleQuadrature, build_quadrature, semicircle_moment
from .sampling import RandomSource, SamplerConfig, sample_paths, sample_uniform

__version__ = "0.1.0"

__all__ = [
    "BadSum",
    "CountingTriple",
    "CrossingPartition",
    "DomainError",
    "FluctuationVector",
    "InternalMismatch",
    "MCReport",
    "MotzkinPath",
    "NonzeroEndpoint",
    "OddSupport",
    "PairPartition",
    "PrefixNegative",
    "QuadratureFailure",
    "RandomSource",
    "SamplerConfig",
    "SemicircleQuadrature",
    "SingularDenominator",
    "Step",
    "TimeGrid",
    "build_quadrature",
    "catalan",
    "chi_square_twosample",
    "chi_square_uniformity",
    "counting_processes",
    "enumerate_nc2",
    "enumerate_paths",
    "excursion_fdd_density",
    "excursion_marginal_cdf",
    "excursion_marginal_density",
    "excursion_moment",
    "fbm_density",
    "fbm_joint_moment",
    "fbm_joint_moment_quadrature",
    "fbm_transition",
    "is_noncrossing",
    "joint_pgf",
    "ks_distance",
    "laplace_joint",
    "laplace_level_fluctuations",
    "laplace_level_increments",
    "level_pgf",
    "limit_laplace",
    "limit_moments",
    "mc_experiment",
    "meander_table",
    "motzkin_number",
    "nonlevel_decomposition_check",
    "partition_to_path",
    "path_to_partition",
    "sample_paths",
    "sample_uniform",
    "scaled_fluctuations",
    "semicircle_moment",
    "semicircle_stieltjes",
    "sulanke_coeffs",
    "sulanke_poly",
    "validate",
]
