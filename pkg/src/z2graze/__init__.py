"""Grazing figure-eight analysis for planar Z2-symmetric Filippov systems.

The boundary is the line ``y = 0``; the lower field is the symmetric
partner ``Z-(x, y) = -Z+(-x, -y)`` of the upper one. The package covers
field evaluation, a hybrid (Filippov) integrator, intrinsic quantities of a
grazing cycle, periodic-orbit detection near the figure-eight loop, and
the two-parameter boundary curves with their region inventories.
"""

__version__ = "0.1.0"

from .atlas import (BifurcationDiagram, BoundaryCurve, Unfolding, beta_to_alpha, build_diagram,
                    fit_quadratic, predicted_coefficients, to_beta_form, trace_boundary)
from .boundary import (BoundaryClass, PseudoEquilibrium, TangencyRecord, classify_point,
                       find_tangencies, pseudo_equilibria, sliding_field, sliding_segments,
                       sliding_velocity)
from .cycles import (BetaSystem, CycleObject, PortraitInventory, boundary_functions,
                     certify_object, classify_portrait, crossing_cycles, cycle_offset,
                     displacement, fold_offset, offsets, transition_map)
from .errors import *  # noqa: F401,F403
from .fields import FilippovSystem, SmoothField, eval_side, lie_derivatives, symmetrize
from .hybrid import HybridTrajectory, Section, flow, poincare_map
from .models import BUILTINS, circle_system, find_theta, parabola_system, thompson_hunt
from .options import DEFAULT, PRECISE, IntegratorOptions
from .quantities import (GrazingCycleData, IntrinsicQuantities, beta_jacobian, floquet,
                         grazing_cycle, intrinsic_quantities, melnikov_kappas)
