"""How boundary curvature bends the small-radius asymptotics.

Three expansions drive every certificate in the package; this script
puts each one next to exact quadrature and fits the remainder order.

  cap area    ~ (pi eps^2/2) (1 - 2 H eps / (3 pi))
  inside arc  ~ pi eps (1 - H eps / pi)
  quotient    ~ c_half (1 - 2 H eps / (3 pi))

On the unit disk H = 1 and everything is available in closed form, so
the fits can be judged against exact targets.
"""

import numpy as np

from bvsharp import (
    DomainSpec,
    boundary_arc_expansion,
    boundary_arc_inside,
    build_domain,
    cap_measure,
    cap_measure_expansion,
    domain_quotient_expansion,
    fit_linear_coefficient,
    fit_remainder_order,
    half_space_constant,
    two_valued_quotient_exact,
)

domain = build_domain(DomainSpec.disk(1.0), 1.0 / 256)
point = (1.0, 0.0)
c_half = half_space_constant(2)

print("eps     cap (quadrature)  cap (expansion)   arc (quadr.)   arc (exp.)")
radii = [0.02, 0.04, 0.08, 0.16]
cap_diffs, arc_diffs = [], []
for eps in radii:
    cap = cap_measure(domain, point, eps)
    cap_x = cap_measure_expansion(1.0, eps, 2)
    arc = boundary_arc_inside(domain, point, eps)
    arc_x = boundary_arc_expansion(1.0, eps, 2)
    cap_diffs.append(abs(cap - cap_x))
    arc_diffs.append(abs(arc - arc_x))
    print(f"{eps:<7.2f} {cap:<17.10f} {cap_x:<17.10f} {arc:<14.10f} {arc_x:<.10f}")

print(f"\ncap remainder order : {fit_remainder_order(radii, cap_diffs):.2f}  (>= 3 expected)")
print(f"arc remainder order : {fit_remainder_order(radii, arc_diffs):.2f}  (>= 3 expected)")

radii = [0.05, 0.1, 0.2]
values = [two_valued_quotient_exact(domain, point, eps, 1.0).value for eps in radii]
fitted = fit_linear_coefficient(radii, values, c_half)
target = -c_half * 2.0 / (3.0 * np.pi)
print(f"\nquotient slope in eps: fitted {fitted:.4f}, curvature prediction {target:.4f}")
for eps, value in zip(radii, values):
    print(f"  eps {eps:<5} exact {value:.6f}  expansion {domain_quotient_expansion(1.0, eps, 2):.6f}")
