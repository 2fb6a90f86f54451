"""
Mapping degree from counted preimages
=====================================

The degree of a homogeneous map at a regular value is the number of
preimages counted with the sign of the Jacobian determinant.  It is
the same integer at every regular value, it is +-1 exactly when the
map is orientation-preserving (or reversing) and injective, and any
other value certifies non-injectivity.  This script computes it for
maps with known answers and shows the safeguards around the search.
"""

from pathlib import Path

import numpy as np

from hominv import (
    check_hypotheses,
    count_preimages,
    identity_map,
    mapping_degree,
    parse_map,
    random_admissible_map,
    reflection_map,
)

MAPS = Path(__file__).parent / "maps"

# ---------------------------------------------------------------
# 1. Known answers.  Identity has degree +1; a reflection reverses
#    orientation, degree -1; the planar square wraps twice, degree
#    +2.  The diagonal map is a linear bijection, degree +1.
# ---------------------------------------------------------------

eta3 = np.array([0.4, -0.2, 0.9])

cases = [
    ("identity", identity_map(3), eta3),
    ("reflection", reflection_map(3), eta3),
    ("diag(1,2,3)", parse_map((MAPS / "diag123.map").read_text()), eta3),
    ("planar square", parse_map((MAPS / "complex_square.map").read_text()),
     np.array([1.0, 0.0])),
]

for name, m, eta in cases:
    report = check_hypotheses(m, count=2000)
    deg = mapping_degree(m, eta, report=report)
    print("%-14s degree %+d   preimages %d   injective evidence %s"
          % (name, deg.degree, len(deg.preimages), deg.injective_evidence))
print()

# ---------------------------------------------------------------
# 2. Signs at the roots.  For the planar square both roots carry
#    +1; for the reflection the single root carries -1.  The signed
#    count is what makes the degree stable under perturbation, where
#    a raw root count is not.
# ---------------------------------------------------------------

m = parse_map((MAPS / "complex_square.map").read_text())
report = check_hypotheses(m, count=2000)
for xi, sign in count_preimages(m, np.array([1.0, 0.0]), report=report):
    print("planar square root", np.round(xi, 12), " sign", sign)

refl = reflection_map(3)
refl_report = check_hypotheses(refl, count=2000)
for xi, sign in count_preimages(refl, eta3, report=refl_report):
    print("reflection root   ", np.round(xi, 12), " sign", sign)
print()

# ---------------------------------------------------------------
# 3. A map nobody wrote down by hand: a random perturbation of the
#    radial cube in R^4, built to keep the hypotheses satisfied.
#    The continuation argument says such a map is a bijection, so
#    its degree must come out +1 or -1.
# ---------------------------------------------------------------

m4 = random_admissible_map(n=4, seed=7)
report4 = check_hypotheses(m4, count=4000)
print("random 4d map status:", report4.status,
      " c0 =", round(report4.c0_empirical, 6))

eta4 = np.array([0.5, -0.3, 0.8, 0.1])
deg4 = mapping_degree(m4, eta4, report=report4)
print("degree:", deg4.degree, " preimages:", len(deg4.preimages))
print()

# ---------------------------------------------------------------
# 4. Safeguards.  The search reruns with four times the start count
#    and flags missed_roots_suspected if the hedge finds more roots
#    than the first pass; more starts may only confirm the count.
# ---------------------------------------------------------------

deg_few = mapping_degree(m, np.array([1.0, 0.0]), starts=32, report=report)
deg_many = mapping_degree(m, np.array([1.0, 0.0]), starts=512, report=report)
print("planar square, 32 starts:  degree", deg_few.degree,
      " missed roots suspected:", deg_few.missed_roots_suspected)
print("planar square, 512 starts: degree", deg_many.degree,
      " missed roots suspected:", deg_many.missed_roots_suspected)
