"""Numerical toolkit for pinched-sphere metrics of revolution: warping
profile construction, curvature verification, the Dirac spectrum bottom
via radial mode reduction, and the associated eigenvalue bounds."""

from .bounds import (BoundsReport, CutoffChain, bounds_report, class_constant,
                     conjecture_bound, cutoff_chain, extrinsic_bound,
                     friedrich_bound, radius_for_excess)
from .geometry import (CurvatureSample, SurfaceGeometry, curvature_report,
                       measure, principal_curvatures, rescale, scal_and_mean,
                       sphere_volume_factor)
from .profile import (ConstructionError, FeasibilityError, FeasibilityReport,
                      Violation, WarpProfile, build_profile, feasibility,
                      validate_profile)
from .spectral import (CertificateError, ModeProblem, RadialEigenspinor,
                       SpectrumResult, dirac_lambda1, eigenspinor_profile,
                       mode_lambda1, mode_set, shooting_ground_lambda)

__all__ = [
    "BoundsReport", "CutoffChain", "bounds_report", "class_constant",
    "conjecture_bound", "cutoff_chain", "extrinsic_bound", "friedrich_bound",
    "radius_for_excess", "CurvatureSample", "SurfaceGeometry",
    "curvature_report", "measure", "principal_curvatures", "rescale",
    "scal_and_mean", "sphere_volume_factor", "ConstructionError",
    "FeasibilityError", "FeasibilityReport", "Violation", "WarpProfile",
    "build_profile", "feasibility", "validate_profile", "CertificateError",
    "ModeProblem", "RadialEigenspinor", "SpectrumResult", "dirac_lambda1",
    "eigenspinor_profile", "mode_lambda1", "mode_set",
    "shooting_ground_lambda",
]

__version__ = "0.1.0"
