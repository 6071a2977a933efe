"""Euler calculus on piecewise-linear constructible functions, intrinsic volumes,
and Monte Carlo checks of kinematic formulas in R^n and on S^3."""
from .cf import (PolytopeCombination, SimplicialComplex, StratifiedCF, build_complex,
                 canonicalize, euler_integral, evaluate, indicator, zero_cf)
from .commands import Report, RunConfig, run, write_report
from .core import (cf_equal, combine, common_refinement, from_polytopes, pointwise_product,
                   polytope_indicator, to_polytope_combination)
from .errors import *  # noqa: F401,F403
from .ops import (AffineMap, AffineSubspace, compose, convolve, exterior_product, pullback,
                  pushforward, rigid_motion_apply, slice_cf)
from .polytope import ConvexPolytope, minkowski_sum
from .scenes import Scene, parse_scene, write_scene
from .sphere3 import (BallCF, GeodesicBall, SO4Element, UnitQuaternion, act, convolve_balls,
                      crofton_valuation, euler_integral_on_subsphere, f_closed,
                      mc_kinematic_s3, recover_d, sample_so4, sample_subsphere, verify_m_table)
from .valuations import (KinematicTensor, ball_intrinsic_volumes, evaluate_valuation,
                         external_angle, flat_kinematic_tensor, haar_rotation,
                         intrinsic_volumes, rotation_average_convolution, solve_template)

__version__ = "0.1.0"
