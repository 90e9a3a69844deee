"""Symmetry-respecting equilibrium computation and certification."""

from .deviation import (DeviationReport, action_values, deviation_report, nash_function,
                        profile_distance)
from .fixed_point import solve_fixed_point
from .polytope import (OrbitProfile, SymmetryPolytope, build_symmetry_polytope,
                       orbit_to_profile, profile_to_orbit, project_to_polytope)
from .support import support_enumeration_details, support_enumeration_orbits
from .team import (KktCertificate, kkt_certificate, team_gradient, team_orbit_gradient,
                   team_orbit_value)
from .zero_sum import ZeroSumSolution, minimax_exact, zero_sum_symmetric

__all__ = [
    "DeviationReport", "action_values", "deviation_report", "nash_function", "profile_distance",
    "solve_fixed_point", "OrbitProfile", "SymmetryPolytope", "build_symmetry_polytope",
    "orbit_to_profile", "profile_to_orbit", "project_to_polytope",
    "support_enumeration_details", "support_enumeration_orbits", "KktCertificate",
    "kkt_certificate", "team_gradient", "team_orbit_gradient", "team_orbit_value",
    "ZeroSumSolution", "minimax_exact", "zero_sum_symmetric",
]
