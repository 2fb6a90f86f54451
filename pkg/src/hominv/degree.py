"""Preimage counting and mapping degree via multistart Newton.

For a map that is homogeneous of order ``kappa`` with nonvanishing Jacobian
off the origin, every preimage of a nonzero value ``eta`` lies in the closed
annulus given by the coercivity bracket.  A multistart Newton search seeded
on a widened annulus (low-discrepancy directions crossed with geometric
radii) therefore finds all preimages with high probability; a second run at
four times the start count flags searches that look unsaturated.

The degree at a regular value is the sum of Jacobian determinant signs over
the preimages.  An admissible map in dimension ``n >= 3`` is bijective, so a
count above one at any value is direct evidence against admissibility; the
planar counterexample (the complex square) shows count two and degree two.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from ._newton import newton_batch
from .errors import InvalidInputError, InvalidParameterError, PreconditionError
from .hypotheses import HypothesisReport, coercivity_bracket
from .inverter import ContinuationConfig, _polish, _require_report
from .mapcore import MapSpec, eval_jacobian_batch, eval_map

__all__ = [
    "DegreeReport",
    "count_preimages",
    "mapping_degree",
    "injectivity_probe",
]

# widen the coercivity annulus so estimation error in the sphere extrema
# cannot push a true preimage outside the searched region
_ANNULUS_SLACK = 0.1
_DEDUP_RATIO = 1e-6
_SALT_DIRECTIONS = 149
_SALT_PROBE = 157


@dataclass(frozen=True)
class DegreeReport:
    """Preimages of one value together with the degree evidence.

    ``degree`` sums the determinant signs over ``preimages``;
    ``injective_evidence`` is true when exactly one preimage was found;
    ``missed_roots_suspected`` is set when a rerun at four times the start
    count found preimages the first pass missed.
    """

    value: np.ndarray
    preimages: tuple
    degree: int
    injective_evidence: bool
    missed_roots_suspected: bool
    notes: tuple = ()

    def to_json_dict(self) -> dict:
        return {
            "value": [float(v) for v in self.value],
            "preimages": [
                {"xi": [float(v) for v in xi], "sign": sign}
                for xi, sign in self.preimages
            ],
            "degree": self.degree,
            "injective_evidence": self.injective_evidence,
            "missed_roots_suspected": self.missed_roots_suspected,
            "notes": list(self.notes),
        }


def _sobol_directions(n: int, count: int, seed: int) -> np.ndarray:
    """``count`` well-spread unit directions in R^n (scrambled Sobol points
    mapped through the normal quantile and normalized)."""
    if n == 1:
        signs = np.ones(count)
        signs[1::2] = -1.0
        return signs[:, None]
    eng = qmc.Sobol(d=n, scramble=True, seed=np.random.default_rng([seed, _SALT_DIRECTIONS]))
    m_bits = max(1, int(np.ceil(np.log2(max(count, 2)))))
    u = eng.random_base2(m_bits)[:count]
    z = ndtri(np.clip(u, 1e-12, 1.0 - 1e-12))
    norms = np.linalg.norm(z, axis=1)
    degenerate = norms < 1e-12
    if np.any(degenerate):
        z[degenerate] = 0.0
        z[degenerate, 0] = 1.0
        norms[degenerate] = 1.0
    return z / norms[:, None]


def _search_roots(m: MapSpec, eta: np.ndarray, bracket: tuple[float, float],
                  starts: int, tol: float, seed: int) -> list[np.ndarray]:
    """All distinct Newton limits x with |f(x) - eta| <= tol*max(1,|eta|)."""
    r_lo, r_hi = bracket
    lo = (1.0 - _ANNULUS_SLACK) * r_lo
    hi = (1.0 + _ANNULUS_SLACK) * r_hi
    if lo <= 0.0:
        lo = min(1e-3 * hi, hi)
    n_radii = max(1, int(round(starts ** (1.0 / 3.0))))
    n_dirs = int(np.ceil(starts / n_radii))
    radii = np.geomspace(lo, hi, n_radii)
    dirs = _sobol_directions(m.n, n_dirs, seed)
    X0 = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, m.n)
    roots, ok = newton_batch(m, X0, eta, tol, max_iter=60, radius_cap=100.0 * hi)
    found = [ _polish(m, x, eta) for x in roots[ok] ]
    rel = tol * max(1.0, float(np.linalg.norm(eta)))
    found = [x for x in found if float(np.linalg.norm(eval_map(m, x) - eta)) <= rel]
    if not found:
        return []
    # lexicographic order makes the greedy dedup deterministic
    arr = np.array(found)
    order = np.lexsort(arr.T[::-1])
    arr = arr[order]
    dedup_radius = _DEDUP_RATIO * max(r_hi, 1e-300)
    kept: list[np.ndarray] = []
    for x in arr:
        if all(float(np.linalg.norm(x - y)) > dedup_radius for y in kept):
            kept.append(x)
    return kept


def count_preimages(m: MapSpec, eta, starts: Optional[int] = None,
                    cfg: ContinuationConfig | None = None,
                    report: HypothesisReport | None = None, *,
                    force: bool = False, seed: int = 0) -> list[tuple[np.ndarray, int]]:
    """Find all preimages of a nonzero value inside the coercivity annulus.

    Returns ``(xi, sign)`` pairs in lexicographic order of ``xi``, where
    ``sign`` is the sign of ``det Df(xi)``.  Requires a hypothesis report;
    a failing one needs ``force=True`` (the degree of an inadmissible map is
    exactly what the planar counterexample demonstrates), while the
    low-dimension warning status is accepted as is.
    """
    if cfg is None:
        cfg = ContinuationConfig()
    e = np.asarray(eta, dtype=float)
    if e.ndim != 1 or e.shape[0] != m.n:
        raise InvalidInputError(f"eta must be a vector of length {m.n}")
    if not np.all(np.isfinite(e)) or float(np.linalg.norm(e)) == 0.0:
        raise InvalidInputError("eta must be finite and nonzero")
    report = _require_report(m, report, force, allow_warn=True)
    if starts is None:
        starts = 64 * m.n
    if starts < 1:
        raise InvalidParameterError("starts must be >= 1")
    bracket = coercivity_bracket(report, e, m.kappa)
    kept = _search_roots(m, e, bracket, starts, cfg.tol, seed)
    if not kept:
        return []
    dets = np.linalg.det(eval_jacobian_batch(m, np.array(kept)))
    return [(x, 1 if d > 0 else -1) for x, d in zip(kept, dets)]


def mapping_degree(m: MapSpec, eta, starts: Optional[int] = None,
                   cfg: ContinuationConfig | None = None,
                   report: HypothesisReport | None = None, *,
                   force: bool = False, seed: int = 0) -> DegreeReport:
    """Mapping degree at a regular value: the determinant-sign sum over the
    preimages found by :func:`count_preimages`, hedged by a rerun at four
    times the start count.  A bijection has degree +1 or -1; the planar
    complex square has degree 2."""
    report = _require_report(m, report, force, allow_warn=True)
    pre = count_preimages(m, eta, starts, cfg, report, force=force, seed=seed)
    if starts is None:
        starts = 64 * m.n
    pre_hedged = count_preimages(m, eta, 4 * starts, cfg, report, force=force,
                                 seed=seed + 1)
    missed = len(pre_hedged) > len(pre)
    final = pre_hedged if missed else pre
    notes = []
    if missed:
        notes.append(
            f"rerun at {4 * starts} starts found {len(pre_hedged)} preimages "
            f"where {starts} starts found {len(pre)}; the larger set is reported"
        )
    degree = int(sum(s for _, s in final))
    return DegreeReport(
        value=np.asarray(eta, dtype=float),
        preimages=tuple(final),
        degree=degree,
        injective_evidence=(len(final) == 1),
        missed_roots_suspected=missed,
        notes=tuple(notes),
    )


def injectivity_probe(m: MapSpec, trials: int = 20,
                      starts: Optional[int] = None,
                      cfg: ContinuationConfig | None = None,
                      report: HypothesisReport | None = None, *,
                      force: bool = False) -> dict:
    """Count preimages at ``trials`` random targets with magnitudes spread
    log-uniformly over [1e-2, 1e2].

    Returns a dict with the per-target counts and a verdict:
    ``"consistent-with-injective"`` when every count is one, otherwise
    ``"not-injective"``.  Target draws are seeded from the report so repeat
    runs probe identical values.
    """
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    report = _require_report(m, report, force, allow_warn=True)
    rng = np.random.default_rng([report.seed, _SALT_PROBE])
    counts = []
    targets = []
    for k in range(trials):
        direction = rng.standard_normal(m.n)
        nrm = float(np.linalg.norm(direction))
        while nrm < 1e-12:
            direction = rng.standard_normal(m.n)
            nrm = float(np.linalg.norm(direction))
        magnitude = 10.0 ** rng.uniform(-2.0, 2.0)
        eta = magnitude * direction / nrm
        pre = count_preimages(m, eta, starts, cfg, report, force=force, seed=k)
        targets.append(eta)
        counts.append(len(pre))
    verdict = "consistent-with-injective" if all(c == 1 for c in counts) else "not-injective"
    return {
        "counts": counts,
        "targets": targets,
        "verdict": verdict,
        "max_count": max(counts),
    }
