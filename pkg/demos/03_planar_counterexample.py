"""
Why dimension three is the threshold
====================================

The planar map f(x, y) = (x^2 - y^2, 2xy) satisfies every pointwise
hypothesis (homogeneous of order 2, Jacobian determinant 4(x^2 + y^2)
never zero away from the origin), yet it is two-to-one: it is the
square function on complex numbers, f(z) = z^2 with z = x + iy.
Global injectivity genuinely needs n >= 3 on top of the pointwise
conditions, and this script watches the failure happen numerically.
"""

from pathlib import Path

import numpy as np

from hominv import (
    check_hypotheses,
    count_preimages,
    eval_map,
    injectivity_probe,
    invert,
    mapping_degree,
    parse_map,
)

MAPS = Path(__file__).parent / "maps"

m = parse_map((MAPS / "complex_square.map").read_text())
report = check_hypotheses(m, count=4000)
print("planar square status:", report.status, " reasons:", report.reasons)
print()

# ---------------------------------------------------------------
# 1. The target (1, 0) is 1 as a complex number; its square roots
#    are +1 and -1.  The preimage search finds exactly those two
#    points, both with positive orientation.
# ---------------------------------------------------------------

eta = np.array([1.0, 0.0])
roots = count_preimages(m, eta, report=report)
print("preimages of (1, 0):")
for xi, sign in roots:
    print("  xi =", np.round(xi, 12), "  sign(det Df) =", sign)

# A plain inversion still works here (dimension 2 only downgrades
# the verdict, it does not block the solver), but it can only hand
# back one of the two sheets.
res = invert(m, eta, report=report, force=True)
print("single solve lands on:", np.round(res.xi, 12))
print()

# ---------------------------------------------------------------
# 2. The mapping degree counts preimages with orientation.  Both
#    roots carry +1 here, so the degree is 2: the definitive sign
#    that this map cannot be a bijection, for which the degree
#    would have to be +1 or -1.
# ---------------------------------------------------------------

deg = mapping_degree(m, eta, report=report)
print("degree at (1, 0):", deg.degree,
      "  from", len(deg.preimages), "preimages")

# ---------------------------------------------------------------
# 3. The failure is not special to one target.  Probing random
#    targets at random magnitudes finds two preimages every time
#    (as z^2 must: every nonzero complex number has two square
#    roots).
# ---------------------------------------------------------------

probe = injectivity_probe(m, trials=10, report=report)
print("probe counts over 10 random targets:", probe["counts"])
print("probe verdict:", probe["verdict"])
print()

# ---------------------------------------------------------------
# 4. Contrast with three dimensions: the radial cube |x|^2 x has
#    the same flavor (order 3, nonvanishing Jacobian determinant)
#    but lives in R^3, where the hypotheses do guarantee a global
#    bijection.  Every probe target has exactly one preimage and
#    the degree is +1.
# ---------------------------------------------------------------

cube = parse_map((MAPS / "radial_cube3.map").read_text())
cube_report = check_hypotheses(cube, count=4000)
print("radial cube status:", cube_report.status)

probe3 = injectivity_probe(cube, trials=10, report=cube_report)
print("probe counts over 10 random targets:", probe3["counts"])
print("probe verdict:", probe3["verdict"])

deg3 = mapping_degree(cube, np.array([0.3, -1.1, 0.7]), report=cube_report)
print("degree:", deg3.degree)

# Sanity: push one found root of the planar map back through f.
xi0 = roots[0][0]
print()
print("check: f(", np.round(xi0, 6), ") =", np.round(eval_map(m, xi0), 12))
