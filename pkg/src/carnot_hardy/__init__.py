"""Numerical verification of Hardy, Rellich and uncertainty inequalities on Carnot groups."""

from .calculus import (DegenerateGradient, fundamental_solution, horizontal_gradient,
                       infinity_sub_laplacian, norm_gradient_sq, p_fundamental_solution,
                       p_sub_laplacian, radial_laplacian, sub_laplacian)
from .fields import (ScalarField, TestFunctionSpec, make_annular_bump, make_gaussian_in_norm,
                     make_hardy_extremizer, make_rellich_extremizer, random_bump_specs,
                     sweep_schedule)
from .groups import (GroupError, GroupSpec, Point, abelian, dilate, heisenberg,
                     homogeneous_norm, htype, identity, inverse, multiply, quaternionic_triple,
                     symplectic_J)
from .inequalities import (QuotientReport, SweepResult, ckn_report, gradient_remainder_report,
                           hardy_report, improved_hardy_report, interpolation_report,
                           rellich_report, rellich_sobolev_report, sharpness_sweep,
                           uncertainty_report)
from .quadrature import (IntegralEstimate, IntegrationConfig, integrate,
                         muckenhoupt_a2_estimate, unit_ball_volume)

__version__ = "0.1.0"
