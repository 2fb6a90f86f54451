"""Empirical verification of the global-invertibility hypotheses.

For a positively homogeneous map of order ``kappa`` on ``R^n \\ {0}``, global
bijectivity (with a homogeneous inverse of order ``1/kappa``) is guaranteed
when the map is continuously differentiable off the origin, its Jacobian
determinant never vanishes there, and ``n >= 3``.  Everything can be decided
on the unit sphere: writing ``c0 = min_{|w|=1} |f(w)|`` and
``C = max_{|w|=1} |f(w)|``, homogeneity gives the coercivity estimate
``c0 |xi|**kappa <= |f(xi)| <= C |xi|**kappa``, so any preimage of a target
``eta`` satisfies ``(|eta|/C)**(1/kappa) <= |xi| <= (|eta|/c0)**(1/kappa)``.

This module samples the sphere, estimates ``c0``, ``C``, and
``min |det Df|`` with local refinement, measures the homogeneity residual,
and aggregates the verdicts into a :class:`HypothesisReport`.  In dimension 2
the checks can all pass while injectivity still fails (the planar squaring
map is the canonical example), so ``n >= 3`` is reported as its own gate.

All estimates are empirical: sampled quantities refined by projected
gradient, not certified bounds.  The one exception is
:func:`certify_c0_lower`, which combines the empirical minimum with a
Lipschitz bound and the sample's covering-radius estimate; it is labelled
heuristically certified because the covering radius itself is estimated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    InvalidInputError,
    InvalidParameterError,
    NoBracketError,
)
from .mapcore import (
    MapSpec,
    PolyMap,
    eval_jacobian,
    eval_jacobian_batch,
    eval_map,
    homogeneity_residual,
)

__all__ = [
    "SphereSample",
    "ExtremaEstimate",
    "JacobianCheck",
    "HypothesisReport",
    "sample_sphere",
    "estimate_extrema",
    "poly_lipschitz_bound",
    "certify_c0_lower",
    "check_jacobian_nonvanishing",
    "check_hypotheses",
    "coercivity_bracket",
    "DEFAULT_SAMPLES_PER_DIM",
    "HOMOGENEITY_TOL",
    "DET_TOL",
]

_SALT_SPHERE = 131

#: default sphere-sample budget: 10**4 points per dimension (pragmatic; there
#: is no principled modulus of continuity to size the sample from)
DEFAULT_SAMPLES_PER_DIM = 10_000

#: verdict threshold for the sampled homogeneity residual; exactly
#: homogeneous maps measure ~1e-15, declared-order mismatches measure >= 1e-3
HOMOGENEITY_TOL = 1e-8

#: verdict threshold for min |det Df| on the sphere
DET_TOL = 1e-12

_REFINE_MAX_ITER = 200
_REFINE_STEP_TOL = 1e-10
_STATUS_WARN = "hypotheses-met-but-n<3"


@dataclass(frozen=True)
class SphereSample:
    """A seeded quasi-uniform sample of the unit sphere ``S^{n-1}``.

    ``covering_radius_estimate`` is the largest nearest-neighbour distance
    within the sample: a mesh-fineness heuristic, not a certified covering
    radius.  For ``n = 1`` the sphere has only two points, so ``count`` may
    saturate below the requested size.
    """

    points: np.ndarray
    count: int
    covering_radius_estimate: float
    n: int
    seed: int


def sample_sphere(n: int, count: int, seed: int = 0) -> SphereSample:
    """Draw ``count`` deduplicated unit vectors from a seeded generator.

    Normalized standard-Gaussian rows; for a fixed seed the samples are
    nested: the first ``k`` points of a larger draw coincide with a smaller
    draw's points, which makes sampled extrema monotone in ``count``.
    """
    if n < 1:
        raise InvalidParameterError("dimension n must be >= 1")
    if count < 1:
        raise InvalidParameterError("count must be >= 1")
    rng = np.random.default_rng([int(seed), _SALT_SPHERE])
    block = rng.standard_normal((count, n))
    norms = np.linalg.norm(block, axis=1)
    if np.all(norms > 1e-12):
        pts = block / norms[:, None]
        if len(np.unique(pts, axis=0)) == count:
            return SphereSample(pts, count, _covering_radius(pts), n, int(seed))
    # rare path: duplicates or degenerate rows; rebuild point by point
    seen: dict[bytes, None] = {}
    rows: list[np.ndarray] = []

    def _push(row: np.ndarray) -> None:
        nrm = float(np.linalg.norm(row))
        if nrm <= 1e-12 or not np.isfinite(nrm):
            return
        u = row / nrm
        key = u.tobytes()
        if key not in seen:
            seen[key] = None
            rows.append(u)

    for row in block:
        _push(row)
    attempts = 0
    while len(rows) < count and attempts < 64:
        for row in rng.standard_normal((count - len(rows), n)):
            _push(row)
        attempts += 1
    pts = np.asarray(rows)
    return SphereSample(pts, len(rows), _covering_radius(pts), n, int(seed))


def _covering_radius(points: np.ndarray) -> float:
    if len(points) < 2:
        return 2.0  # sphere diameter: the conservative fallback
    dists, _ = cKDTree(points).query(points, k=2)
    return float(dists[:, 1].max())


def _fd_tangent_gradient(value_fn, w: np.ndarray, delta: float = 1e-6) -> np.ndarray:
    g = np.empty_like(w)
    for j in range(len(w)):
        step = np.zeros_like(w)
        step[j] = delta
        up = (w + step) / np.linalg.norm(w + step)
        dn = (w - step) / np.linalg.norm(w - step)
        g[j] = (value_fn(up) - value_fn(dn)) / (2.0 * delta)
    return g


def _retract(w: np.ndarray, step: float, g: np.ndarray):
    cand = w + step * g
    nrm = float(np.linalg.norm(cand))
    return cand / nrm if nrm > 0.0 else None


def _refine_on_sphere(value_fn, w0: np.ndarray, mode: str, grad_fn=None,
                      max_iter: int = _REFINE_MAX_ITER, step_tol: float = _REFINE_STEP_TOL):
    """Projected-gradient extremum refinement constrained to the unit sphere.

    ``value_fn`` maps a unit vector to a scalar.  The iteration takes steps
    along the (ascending or descending) tangent gradient with a doubling /
    halving line search that only accepts improvements, renormalizes after
    each step, and stops when the accepted tangent step drops below
    ``step_tol`` or ``max_iter`` is exhausted.  Returns ``(point, value)``.
    """
    w = np.array(w0, dtype=float)
    w /= np.linalg.norm(w)
    best = float(value_fn(w))
    sgn = 1.0 if mode == "max" else -1.0
    t = 1.0
    for _ in range(max_iter):
        g = grad_fn(w) if grad_fn is not None else _fd_tangent_gradient(value_fn, w)
        g = g - np.dot(g, w) * w
        gn = float(np.linalg.norm(g))
        if gn == 0.0 or not np.isfinite(gn):
            break
        t = min(t * 4.0, 1e8)
        moved = False
        while t * gn >= step_tol:
            cand = _retract(w, sgn * t, g)
            val = None if cand is None else float(value_fn(cand))
            if val is not None and sgn * (val - best) > 0.0:
                # largest improving step found; now shrink it while shrinking
                # keeps helping, so the accepted point sits near the ray's
                # one-dimensional optimum instead of zigzagging across it
                while t * gn >= step_tol:
                    cand2 = _retract(w, sgn * t * 0.5, g)
                    val2 = None if cand2 is None else float(value_fn(cand2))
                    if val2 is not None and sgn * (val2 - val) > 0.0:
                        t, cand, val = t * 0.5, cand2, val2
                    else:
                        break
                w, best = cand, val
                moved = True
                break
            t *= 0.5
        if not moved:
            break
    return w, best


@dataclass(frozen=True)
class ExtremaEstimate:
    """Sphere extrema of ``|f|``: refined values plus the raw sampled ones.

    ``c0`` / ``c_max`` come from projected-gradient descent/ascent of
    ``|f(w)|**2`` started at the sampled arg-extrema; refinement can only
    widen the sampled estimate (``c0 <= c0_sampled``, ``c_max >=
    c_max_sampled``).
    """

    c0: float
    c_max: float
    argmin: np.ndarray
    argmax: np.ndarray
    c0_sampled: float
    c_max_sampled: float


def estimate_extrema(m: MapSpec, sample: SphereSample, images: np.ndarray | None = None) -> ExtremaEstimate:
    """Estimate ``min`` and ``max`` of ``|f|`` over the unit sphere.

    Evaluates ``f`` on the sample (or reuses precomputed ``images``), then
    refines both arg-extrema with projected gradient on ``|f(w)|**2`` using
    the exact gradient ``2 Df(w)^T f(w)``.
    """
    if sample.n != m.n:
        raise InvalidInputError("sample dimension disagrees with the map")
    F = eval_map(m, sample.points) if images is None else images
    mags = np.linalg.norm(F, axis=1)
    i0 = int(np.argmin(mags))
    i1 = int(np.argmax(mags))

    def sq(w):
        v = eval_map(m, w)
        return float(v @ v)

    def grad(w):
        J = eval_jacobian(m, w).entries
        return 2.0 * (J.T @ eval_map(m, w))

    w_min, v_min = _refine_on_sphere(sq, sample.points[i0], "min", grad_fn=grad)
    w_max, v_max = _refine_on_sphere(sq, sample.points[i1], "max", grad_fn=grad)
    c0 = min(float(np.sqrt(max(v_min, 0.0))), float(mags[i0]))
    c_max = max(float(np.sqrt(max(v_max, 0.0))), float(mags[i1]))
    return ExtremaEstimate(
        c0=c0,
        c_max=c_max,
        argmin=w_min,
        argmax=w_max,
        c0_sampled=float(mags[i0]),
        c_max_sampled=float(mags[i1]),
    )


def poly_lipschitz_bound(m: MapSpec) -> float:
    """Conservative Lipschitz bound for ``|f|`` along the unit sphere.

    For a polynomial body this is ``sum_i sum_terms |coeff| * d``: each
    degree-``d`` monomial's gradient norm is at most ``d`` times its
    coefficient magnitude on the closed unit ball, and the radial weight is
    constant on the sphere.  Deliberately crude; it only needs to be valid.
    """
    if not isinstance(m.body, PolyMap):
        raise InvalidParameterError("a Lipschitz bound can only be derived for polynomial bodies")
    total = 0.0
    for terms in m.body.components:
        for coeff, _ in terms:
            total += abs(coeff) * m.body.degree
    return float(total)


def certify_c0_lower(m: MapSpec, sample: SphereSample, lipschitz_bound: float | None = None) -> float:
    """Heuristically certified lower bound for ``min_{|w|=1} |f(w)|``.

    Uses ``max(0, c0_empirical - L * covering_radius_estimate)``: between any
    sphere point and its nearest sample point, ``|f|`` can drop by at most
    ``L`` times the distance.  ``lipschitz_bound`` defaults to
    :func:`poly_lipschitz_bound` for polynomial bodies and must be supplied
    (positive) for black-box bodies.
    """
    L = poly_lipschitz_bound(m) if lipschitz_bound is None else float(lipschitz_bound)
    if L <= 0.0 or not np.isfinite(L):
        raise InvalidParameterError("the Lipschitz bound must be a positive finite real")
    ext = estimate_extrema(m, sample)
    return float(max(0.0, ext.c0 - L * sample.covering_radius_estimate))


@dataclass(frozen=True)
class JacobianCheck:
    """Minimum of ``|det Df|`` over the sphere sample, after refinement."""

    min_abs_det: float
    argmin: np.ndarray
    verdict: str  # "pass" | "fail"


def check_jacobian_nonvanishing(m: MapSpec, sample: SphereSample) -> JacobianCheck:
    """Search the sphere for a vanishing Jacobian determinant.

    Evaluates ``det Df`` on every sample point, then drives the smallest
    ``|det|`` further down with projected-gradient minimization of
    ``|det(Df(w))|`` (finite-difference tangent gradient).  The absolute
    value, not its square, is minimized: where the determinant vanishes to
    order ``p`` along the sphere, ``|det|`` is conditioned like ``t**p``
    instead of ``t**(2p)``, and the descent actually reaches the zero set.
    The verdict is ``"pass"`` iff the refined minimum stays above
    ``DET_TOL``; by homogeneity of ``Df`` this settles the sign question on
    every sphere ``|xi| = r`` at once.
    """
    if sample.n != m.n:
        raise InvalidInputError("sample dimension disagrees with the map")
    J = eval_jacobian_batch(m, sample.points)
    dets = np.abs(np.linalg.det(J))
    i0 = int(np.argmin(dets))

    def abs_det(w):
        return float(abs(np.linalg.det(eval_jacobian(m, w).entries)))

    w_min, v = _refine_on_sphere(abs_det, sample.points[i0], "min")
    min_det = min(float(max(v, 0.0)), float(dets[i0]))
    verdict = "pass" if min_det > DET_TOL else "fail"
    return JacobianCheck(min_abs_det=min_det, argmin=w_min, verdict=verdict)


@dataclass(frozen=True, eq=False)
class HypothesisReport:
    """Aggregated verdicts for one map.

    ``overall`` is ``"pass"`` iff every sub-check passes, *including* the
    dimension gate ``n >= 3``.  ``status`` distinguishes the interesting
    middle ground: ``"hypotheses-met-but-n<3"`` means every analytic check
    passed but the dimension gate did not, in which case global injectivity
    is NOT implied (the planar squaring map passes all analytic checks and
    is two-to-one).  ``reasons`` lists the failed checks.

    The originating sphere sample and the image values are attached (not
    serialized) so that downstream consumers can reuse them.
    """

    n: int
    kappa: float
    sample_count: int
    seed: int
    c0_empirical: float
    c_empirical: float
    c0_lower: Optional[float]
    min_abs_det_j: float
    homogeneity_residual: float
    n_verdict: str
    overall: str
    status: str
    reasons: tuple
    notes: tuple
    argmin_f: np.ndarray
    argmax_f: np.ndarray
    argmin_det: np.ndarray
    sample: SphereSample = field(repr=False)
    images: np.ndarray = field(repr=False)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "kappa": self.kappa,
            "sample_count": self.sample_count,
            "seed": self.seed,
            "c0_empirical": self.c0_empirical,
            "c_empirical": self.c_empirical,
            "c0_lower": self.c0_lower,
            "min_abs_det_j": self.min_abs_det_j,
            "homogeneity_residual": self.homogeneity_residual,
            "n_verdict": self.n_verdict,
            "overall": self.overall,
            "status": self.status,
            "reasons": list(self.reasons),
            "notes": list(self.notes),
            "argmin_f": [float(v) for v in self.argmin_f],
            "argmax_f": [float(v) for v in self.argmax_f],
            "argmin_det": [float(v) for v in self.argmin_det],
        }


def check_hypotheses(m: MapSpec, count: int | None = None, seed: int = 0) -> HypothesisReport:
    """Run every hypothesis check on one map and aggregate the verdicts.

    Parameters
    ----------
    m : MapSpec
    count : int, optional
        Sphere-sample size; defaults to ``DEFAULT_SAMPLES_PER_DIM * n``.
    seed : int
        Root seed; the whole report is a deterministic function of
        ``(m, count, seed)``.

    Checks performed: finite image values, positive minimum of ``|f|`` on the
    sphere (rejects the zero map), sampled homogeneity residual against
    ``HOMOGENEITY_TOL``, and nonvanishing Jacobian determinant against
    ``DET_TOL``; plus the dimension gate ``n >= 3``, reported separately.
    """
    defaulted = count is None
    n_points = DEFAULT_SAMPLES_PER_DIM * m.n if count is None else int(count)
    sample = sample_sphere(m.n, n_points, seed)
    images = eval_map(m, sample.points)
    finite_ok = bool(np.all(np.isfinite(images)))
    if finite_ok:
        ext = estimate_extrema(m, sample, images=images)
        jac = check_jacobian_nonvanishing(m, sample)
        resid = homogeneity_residual(m, count=100, seed=seed)
    else:
        mags = np.linalg.norm(np.nan_to_num(images), axis=1)
        ext = ExtremaEstimate(0.0, float(np.max(mags)), sample.points[0],
                              sample.points[0], 0.0, float(np.max(mags)))
        jac = JacobianCheck(0.0, sample.points[0], "fail")
        resid = float("inf")

    notes = []
    c0_lower = None
    if isinstance(m.body, PolyMap):
        L = poly_lipschitz_bound(m)
        if L > 0.0:
            c0_lower = float(max(0.0, ext.c0 - L * sample.covering_radius_estimate))
            notes.append(
                "c0_lower is heuristically certified: empirical minimum minus "
                "Lipschitz bound times the estimated covering radius"
            )
    if defaulted:
        notes.append(
            f"sample size defaulted to {DEFAULT_SAMPLES_PER_DIM} * n = {n_points} (pragmatic choice)"
        )

    reasons = []
    if not finite_ok:
        reasons.append("non-finite-values")
    if ext.c0 <= 0.0:
        reasons.append("vanishes-on-sphere")
    if resid > HOMOGENEITY_TOL:
        reasons.append("homogeneity-residual")
    if jac.verdict != "pass":
        reasons.append("jacobian-vanishes")
    core_ok = not reasons
    n_ok = m.n >= 3
    if not n_ok:
        reasons.append("dimension-below-3")
    overall = "pass" if (core_ok and n_ok) else "fail"
    status = "pass" if overall == "pass" else (_STATUS_WARN if core_ok else "fail")

    return HypothesisReport(
        n=m.n,
        kappa=float(m.kappa),
        sample_count=sample.count,
        seed=int(seed),
        c0_empirical=ext.c0,
        c_empirical=ext.c_max,
        c0_lower=c0_lower,
        min_abs_det_j=jac.min_abs_det,
        homogeneity_residual=resid,
        n_verdict="pass" if n_ok else "fail",
        overall=overall,
        status=status,
        reasons=tuple(reasons),
        notes=tuple(notes),
        argmin_f=ext.argmin,
        argmax_f=ext.argmax,
        argmin_det=jac.argmin,
        sample=sample,
        images=images,
    )


def coercivity_bracket(report: HypothesisReport, eta, kappa: float) -> tuple[float, float]:
    """Radial bracket ``(r_lo, r_hi)`` containing every preimage of ``eta``.

    From ``c0 |xi|**kappa <= |f(xi)| <= C |xi|**kappa``::

        r_lo = (|eta| / C)**(1/kappa),   r_hi = (|eta| / c0)**(1/kappa)

    Uses the report's empirical extrema, so containment holds up to their
    estimation error (tests allow ``1e-9 * r_hi`` of slack).

    Raises
    ------
    NoBracketError
        When ``c0_empirical`` is zero (e.g. the zero map).
    InvalidInputError
        For ``eta = 0`` or malformed input.
    """
    e = np.asarray(eta, dtype=float)
    if e.ndim != 1 or e.shape[0] != report.n:
        raise InvalidInputError(f"eta must be a vector of length {report.n}")
    if not np.all(np.isfinite(e)):
        raise InvalidInputError("eta contains non-finite components")
    mag = float(np.linalg.norm(e))
    if mag == 0.0:
        raise InvalidInputError("eta must be nonzero (the origin's preimage is the origin)")
    if report.c0_empirical <= 0.0:
        raise NoBracketError(
            "no coercivity bracket: the empirical minimum of |f| on the sphere is zero"
        )
    inv_k = 1.0 / float(kappa)
    r_lo = (mag / report.c_empirical) ** inv_k
    r_hi = (mag / report.c0_empirical) ** inv_k
    return float(r_lo), float(r_hi)
