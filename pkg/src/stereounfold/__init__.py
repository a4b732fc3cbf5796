"""Stereological unfolding: recover the size distribution of a population
of similar convex particles from the observed distribution of plane-section
areas or line-chord lengths.

The primary solver divides Mellin transforms and inverts the quotient along
a vertical contour; classical Abel-type derivative inverses and a Monte
Carlo sectioning simulator provide independent cross-checks.
"""
from ._accel import HAVE_NUMBA, USE_NUMBA
from .classical import (abel_solve_plane, derivative_solve_line,
                        generalized_abel_solve, radius_profile_from_area,
                        wicksell_solve)
from .densities import (Histogram, SupportedDensity, beta_power_density,
                        custom_density, density_from_histogram,
                        piecewise_poly_density, quadratic_density,
                        read_histogram, read_histogram_csv,
                        read_histogram_json, triangle_density,
                        uniform_density, write_histogram_csv,
                        write_histogram_json)
from .errors import (ContourOutsideStrip, EmptyHistogram,
                     InvalidShapeParameters, NegativeCount,
                     NonIntegrableQuotient, NonNormalizableH, NonSmoothInput,
                     NotIntegrableOnLine, PreconditionFailed,
                     QuadratureFailure, StereoUnfoldError, StripViolation,
                     SupportExceedsKernel, WeightingDiverges,
                     ZeroMellinImage)
from .kernels import (BodyConstants, SectionKernel, custom_kernel,
                      nearly_sphere_plane_kernel, scale_kernel,
                      sphere_line_kernel, sphere_plane_kernel)
from .mellin import (DecayDiagnostic, MellinImage, Strip, decay_check,
                     estimate_strip, inverse_mellin_line, mellin_transform)
from .registry import (named_density, named_distribution, parse_kernel,
                       sex1_distribution, sex2_distribution)
from .simulate import (SimConfig, draw_sections, ks_statistic,
                       simulate_sections)
from .unfold import (PreconditionRecord, SizeDistribution, SolveReport,
                     model_solution_line, model_solution_plane, solve_line,
                     solve_plane, to_length_distribution,
                     to_sigma_distribution)
from .verify import (CorrectnessReport, MomentCheck, ResidualReport,
                     correctness_conditions, forward_line, forward_plane,
                     moment_identities, residual)

__version__ = "0.1.0"

__all__ = [
    "BodyConstants", "ContourOutsideStrip", "CorrectnessReport",
    "DecayDiagnostic", "EmptyHistogram", "HAVE_NUMBA", "Histogram",
    "InvalidShapeParameters", "MellinImage", "MomentCheck", "NegativeCount",
    "NonIntegrableQuotient", "NonNormalizableH", "NonSmoothInput",
    "NotIntegrableOnLine", "PreconditionFailed", "PreconditionRecord",
    "QuadratureFailure", "ResidualReport", "SectionKernel", "SimConfig",
    "SizeDistribution", "SolveReport", "StereoUnfoldError", "Strip",
    "StripViolation", "SupportExceedsKernel", "SupportedDensity",
    "USE_NUMBA", "WeightingDiverges", "ZeroMellinImage", "abel_solve_plane",
    "beta_power_density", "correctness_conditions", "custom_density",
    "custom_kernel", "decay_check", "density_from_histogram",
    "derivative_solve_line", "draw_sections", "estimate_strip",
    "forward_line", "forward_plane", "generalized_abel_solve",
    "inverse_mellin_line", "ks_statistic", "mellin_transform",
    "model_solution_line", "model_solution_plane", "moment_identities",
    "named_density", "named_distribution", "nearly_sphere_plane_kernel",
    "parse_kernel", "piecewise_poly_density", "quadratic_density",
    "radius_profile_from_area", "read_histogram", "read_histogram_csv",
    "read_histogram_json", "residual", "scale_kernel", "sex1_distribution",
    "sex2_distribution", "simulate_sections", "solve_line", "solve_plane",
    "sphere_line_kernel", "sphere_plane_kernel", "to_length_distribution",
    "to_sigma_distribution", "triangle_density", "uniform_density",
    "wicksell_solve", "write_histogram_csv", "write_histogram_json",
]
