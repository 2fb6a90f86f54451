"""Guarded linear solves and Newton iterations shared by the inverter and the
preimage counter."""

from __future__ import annotations

import numpy as np

from .errors import SingularJacobianError
from .mapcore import MapSpec, eval_jacobian_batch, eval_map

# |det J| below this multiple of the row-norm product (which bounds the
# determinant from above) counts as numerically singular; the ratio is a
# scale-free conditioning proxy
SINGULAR_RATIO = 1e-12

_DIVERGE_NORM = 1e12


def det_threshold(J: np.ndarray) -> float:
    rows = np.linalg.norm(J, axis=-1)
    return SINGULAR_RATIO * float(np.prod(rows, axis=-1))


def solve_guarded(J: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``J x = rhs``; raise when J is numerically singular."""
    det = float(np.linalg.det(J))
    if not np.isfinite(det) or abs(det) <= det_threshold(J):
        raise SingularJacobianError(
            f"|det J| = {abs(det):.3e} is below the singularity threshold"
        )
    return np.linalg.solve(J, rhs)


def newton_correct(m: MapSpec, x0: np.ndarray, target: np.ndarray, tol: float, max_iter: int):
    """Newton iteration for ``f(x) = target`` from ``x0``.

    Returns ``(x, ok, iters, mode)`` with ``mode`` one of ``"converged"``,
    ``"singular"``, ``"diverged"``, ``"no-convergence"``.  Convergence is
    ``|f(x) - target| <= tol * max(1, |target|)``.
    """
    x = np.array(x0, dtype=float)
    scale = tol * max(1.0, float(np.linalg.norm(target)))
    for it in range(max_iter + 1):
        r = eval_map(m, x) - target
        if float(np.linalg.norm(r)) <= scale:
            return x, True, it, "converged"
        if it == max_iter:
            break
        J = eval_jacobian_batch(m, x[None, :])[0]
        try:
            dx = solve_guarded(J, r)
        except SingularJacobianError:
            return x, False, it, "singular"
        x = x - dx
        if not np.all(np.isfinite(x)) or float(np.linalg.norm(x)) > _DIVERGE_NORM:
            return x, False, it, "diverged"
    return x, False, max_iter, "no-convergence"


def newton_batch(m: MapSpec, starts: np.ndarray, target: np.ndarray, tol: float,
                 max_iter: int = 60, radius_cap: float | None = None):
    """Run Newton simultaneously from every row of ``starts``.

    Rows whose Jacobian goes numerically singular, that leave the ball of
    radius ``radius_cap`` (when given), or that fail to converge within
    ``max_iter`` are dropped.  Returns ``(roots, converged_mask)`` where
    ``roots`` is ``starts``-shaped with the final iterates.
    """
    X = np.array(starts, dtype=float)
    B, n = X.shape
    active = np.ones(B, dtype=bool)
    converged = np.zeros(B, dtype=bool)
    scale = tol * max(1.0, float(np.linalg.norm(target)))
    cap = _DIVERGE_NORM if radius_cap is None else float(radius_cap)
    for _ in range(max_iter + 1):
        idx = np.where(active)[0]
        if idx.size == 0:
            break
        Xa = X[idx]
        R = eval_map(m, Xa) - target[None, :]
        res = np.linalg.norm(R, axis=1)
        done = res <= scale
        converged[idx[done]] = True
        active[idx[done]] = False
        idx = idx[~done]
        if idx.size == 0:
            continue
        Xa = X[idx]
        R = R[~done]
        # rows at the origin have no Jacobian; drop them before differentiating
        alive = np.linalg.norm(Xa, axis=1) > 0.0
        active[idx[~alive]] = False
        idx = idx[alive]
        if idx.size == 0:
            continue
        Xa, R = Xa[alive], R[alive]
        J = eval_jacobian_batch(m, Xa)
        dets = np.abs(np.linalg.det(J))
        thresh = SINGULAR_RATIO * np.prod(np.linalg.norm(J, axis=2), axis=1)
        good = np.isfinite(dets) & (dets > thresh)
        active[idx[~good]] = False
        idx = idx[good]
        if idx.size == 0:
            continue
        step = np.linalg.solve(J[good], R[good][:, :, None])[:, :, 0]
        Xn = Xa[good] - step
        ok = np.all(np.isfinite(Xn), axis=1) & (np.linalg.norm(Xn, axis=1) <= cap)
        X[idx[ok]] = Xn[ok]
        active[idx[~ok]] = False
    return X, converged
