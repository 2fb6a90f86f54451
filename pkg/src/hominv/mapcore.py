"""Representation and evaluation of positively homogeneous maps.

A map ``f`` on ``R^n \\ {0}`` is positively homogeneous of order ``kappa``
when ``f(tau * xi) == tau**kappa * f(xi)`` for every ``tau > 0``.  Such a map
is determined by its restriction to the unit sphere, and extending it by
``f(0) = 0`` is continuous because ``|f(xi)| <= C * |xi|**kappa`` with
``C = max_{|w|=1} |f(w)|``.

Two concrete bodies are supported:

* :class:`PolyMap` -- a vector of polynomials with a common total degree
  ``d``, optionally multiplied by the radial weight ``|xi|**(kappa - d)`` so
  that non-integer orders are representable.
* :class:`BlackBox` -- an opaque evaluator with a declared order and an
  optional Jacobian callback; central finite differences are used when the
  callback is absent.

Everything here is immutable after construction and free of side effects, so
maps can be shared between threads and evaluated concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    InvalidInputError,
    InvalidParameterError,
    UndefinedAtOriginError,
)

__all__ = [
    "PolyMap",
    "BlackBox",
    "MapSpec",
    "JacobianMatrix",
    "eval_map",
    "eval_jacobian",
    "eval_jacobian_batch",
    "extend_at_origin",
    "homogeneity_residual",
]

_EPS = float(np.finfo(float).eps)
# balances truncation against rounding for central differences
_FD_STEP = _EPS ** (1.0 / 3.0)
_SALT_HOMOGENEITY = 101

Term = Tuple[float, Tuple[int, ...]]


def _as_matrix(points, n: int, name: str = "xi"):
    """Validate a point or batch of points; return ((B, n) array, was_single)."""
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
        single = True
    elif x.ndim == 2:
        single = False
    else:
        raise InvalidInputError(f"{name} must be a vector or a matrix of row vectors")
    if x.shape[1] != n:
        raise InvalidInputError(f"{name} must have {n} components, got {x.shape[1]}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} contains non-finite components")
    return x, single


class PolyMap:
    """A vector of multivariate polynomials in canonical form.

    Parameters
    ----------
    n : int
        Number of variables (and of components; the map is square).
    components : sequence of sequences of ``(coeff, exponents)``
        One term list per component.  ``exponents`` is a length-``n`` tuple of
        nonnegative integers.  Terms are canonicalized on construction:
        duplicate exponent tuples are merged, exact-zero coefficients dropped,
        and monomials sorted in descending graded-lexicographic order.

    Notes
    -----
    The uniform-degree invariant (every monomial shares one total degree) is
    *not* enforced here; :func:`hominv.polyparser.check_homogeneity_symbolic`
    verifies it and :func:`hominv.polyparser.parse_map` rejects violations.
    ``degree`` is the largest total degree present, or 1 for the zero map so
    that a default order is always well defined.
    """

    __slots__ = ("n", "components", "degree", "_coeffs", "_exps", "_partials")

    def __init__(self, n: int, components: Sequence[Sequence[Term]]):
        n = int(n)
        if n < 1:
            raise InvalidParameterError("dimension n must be >= 1")
        if len(components) != n:
            raise InvalidParameterError(
                f"expected {n} components for a square map, got {len(components)}"
            )
        canon = []
        for comp in components:
            acc: dict[Tuple[int, ...], float] = {}
            for coeff, exponents in comp:
                e = tuple(int(v) for v in exponents)
                if len(e) != n:
                    raise InvalidParameterError(
                        f"exponent tuple {e} does not have length n={n}"
                    )
                if any(v < 0 for v in e):
                    raise InvalidParameterError("exponents must be nonnegative")
                acc[e] = acc.get(e, 0.0) + float(coeff)
            terms = tuple(
                (c, e)
                for e, c in sorted(
                    acc.items(), key=lambda item: (sum(item[0]), item[0]), reverse=True
                )
                if c != 0.0
            )
            canon.append(terms)
        self.n = n
        self.components = tuple(canon)
        degrees = [sum(e) for terms in canon for _, e in terms]
        self.degree = max(degrees) if degrees else 1
        self._coeffs = [np.array([c for c, _ in terms], dtype=float) for terms in canon]
        self._exps = [
            np.array([e for _, e in terms], dtype=np.int64).reshape(len(terms), n)
            for terms in canon
        ]
        self._partials = None

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate the polynomial part at a ``(B, n)`` batch; returns ``(B, n)``."""
        X = np.asarray(points, dtype=float)
        out = np.zeros((X.shape[0], self.n))
        for i, (coeffs, exps) in enumerate(zip(self._coeffs, self._exps)):
            if coeffs.size:
                out[:, i] = np.power(X[:, None, :], exps[None, :, :]).prod(axis=2) @ coeffs
        return out

    def _partial_arrays(self):
        if self._partials is None:
            parts = []
            for coeffs, exps in zip(self._coeffs, self._exps):
                row = []
                for j in range(self.n):
                    mask = exps[:, j] > 0
                    c = coeffs[mask] * exps[mask, j]
                    e = exps[mask].copy()
                    if e.size:
                        e[:, j] -= 1
                    row.append((c, e.reshape(len(c), self.n)))
                parts.append(row)
            self._partials = parts
        return self._partials

    def jacobian(self, points: np.ndarray) -> np.ndarray:
        """Exact derivative of the polynomial part at a ``(B, n)`` batch.

        Returns ``(B, n, n)`` with entry ``[b, i, j] = dP_i/dx_j`` obtained by
        term-wise differentiation.
        """
        X = np.asarray(points, dtype=float)
        J = np.zeros((X.shape[0], self.n, self.n))
        for i, row in enumerate(self._partial_arrays()):
            for j, (coeffs, exps) in enumerate(row):
                if coeffs.size:
                    J[:, i, j] = (
                        np.power(X[:, None, :], exps[None, :, :]).prod(axis=2) @ coeffs
                    )
        return J

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.n == other.n and self.components == other.components

    def __repr__(self):
        return f"PolyMap(n={self.n}, degree={self.degree}, components={self.components!r})"


@dataclass(frozen=True)
class BlackBox:
    """Opaque evaluator for a map assumed positively homogeneous.

    ``eval`` must accept a length-``n`` float array and return one, and must
    be defined for every nonzero point.  ``jacobian``, when provided, returns
    the exact ``n x n`` derivative; otherwise central finite differences with
    step ``eps**(1/3) * max(1, |xi|)`` are used.  ``declared_kappa`` is the
    claimed homogeneity order; it is *trusted* for evaluation and *measured*
    by :func:`hominv.hypotheses.check_hypotheses`.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    declared_kappa: float
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None


class MapSpec:
    """A positively homogeneous map: dimension, order, and a body.

    For :class:`PolyMap` bodies the value is ``|xi|**(kappa - d) * P(xi)``
    where ``d`` is the polynomial degree; ``kappa`` defaults to ``d``, in
    which case the radial weight disappears and the map is plain polynomial.
    ``radial_exponent`` records ``kappa - d`` (always ``0.0`` for black-box
    bodies, whose scaling behaviour is their own business).

    Parameters
    ----------
    body : PolyMap or BlackBox
    kappa : float, optional
        Homogeneity order; must be positive.  Defaults to the polynomial
        degree (PolyMap) or the declared order (BlackBox).
    n : int, optional
        Dimension; required for black-box bodies, inferred for polynomials.
    """

    __slots__ = ("body", "n", "kappa", "radial_exponent")

    def __init__(self, body: Union[PolyMap, BlackBox], kappa: float | None = None, *, n: int | None = None):
        if isinstance(body, PolyMap):
            if n is not None and int(n) != body.n:
                raise InvalidParameterError("n disagrees with the polynomial body")
            self.n = body.n
            k = float(body.degree) if kappa is None else float(kappa)
            self.radial_exponent = k - float(body.degree)
        elif isinstance(body, BlackBox):
            if n is None:
                raise InvalidParameterError("n is required for black-box bodies")
            self.n = int(n)
            if self.n < 1:
                raise InvalidParameterError("dimension n must be >= 1")
            k = float(body.declared_kappa) if kappa is None else float(kappa)
            if kappa is not None and k != float(body.declared_kappa):
                raise InvalidParameterError("kappa disagrees with declared_kappa")
            self.radial_exponent = 0.0
        else:
            raise InvalidParameterError("body must be a PolyMap or a BlackBox")
        if not np.isfinite(k) or k <= 0.0:
            raise InvalidParameterError("kappa must be a positive finite real")
        self.kappa = k
        self.body = body

    @property
    def is_poly(self) -> bool:
        return isinstance(self.body, PolyMap)

    def __repr__(self):
        kind = "poly" if self.is_poly else "blackbox"
        return f"MapSpec(n={self.n}, kappa={self.kappa}, body={kind})"


@dataclass(frozen=True)
class JacobianMatrix:
    """An ``n x n`` derivative together with the point it was taken at."""

    entries: np.ndarray
    point: np.ndarray

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.entries))


def eval_map(m: MapSpec, xi) -> np.ndarray:
    """Evaluate ``f`` at a point or at a ``(B, n)`` batch of points.

    The origin maps to the zero vector (the continuous extension).  Weighted
    polynomial bodies are evaluated as ``|xi|**kappa * P(xi/|xi|)``, which
    keeps relative accuracy uniform across many orders of magnitude in
    ``|xi|``.

    Raises
    ------
    InvalidInputError
        If ``xi`` has the wrong shape or non-finite entries.
    """
    X, single = _as_matrix(xi, m.n)
    out = _eval_batch(m, X)
    return out[0] if single else out


def _eval_batch(m: MapSpec, X: np.ndarray) -> np.ndarray:
    body = m.body
    if isinstance(body, PolyMap):
        if m.radial_exponent == 0.0:
            # plain polynomial: exact at the origin too (degree >= 1)
            return body.evaluate(X)
        r = np.linalg.norm(X, axis=1)
        out = np.zeros((X.shape[0], m.n))
        pos = r > 0.0
        if np.any(pos):
            U = X[pos] / r[pos, None]
            out[pos] = (r[pos] ** m.kappa)[:, None] * body.evaluate(U)
        return out
    out = np.zeros((X.shape[0], m.n))
    for k, row in enumerate(X):
        if np.any(row != 0.0):
            val = np.asarray(body.eval(row), dtype=float)
            if val.shape != (m.n,):
                raise InvalidInputError(
                    f"black-box evaluator returned shape {val.shape}, expected ({m.n},)"
                )
            out[k] = val
    return out


def _fd_jacobian(fn: Callable[[np.ndarray], np.ndarray], x: np.ndarray, n: int) -> np.ndarray:
    h = _FD_STEP * max(1.0, float(np.linalg.norm(x)))
    J = np.empty((n, n))
    for j in range(n):
        step = np.zeros(n)
        step[j] = h
        J[:, j] = (np.asarray(fn(x + step), float) - np.asarray(fn(x - step), float)) / (2.0 * h)
    return J


def eval_jacobian_batch(m: MapSpec, points) -> np.ndarray:
    """Jacobian of ``f`` at a ``(B, n)`` batch of nonzero points; ``(B, n, n)``.

    Polynomial bodies are differentiated exactly; the radial weight
    contributes the rank-one product-rule correction
    ``Df = r**(kappa-1) * (DP(u) + alpha * P(u) u^T)`` with ``u = xi/r`` and
    ``alpha = kappa - d``.  Black-box bodies use the Jacobian callback or
    central differences row by row.
    """
    X, _ = _as_matrix(points, m.n)
    if np.any(np.all(X == 0.0, axis=1)):
        raise UndefinedAtOriginError("the Jacobian is undefined at the origin")
    body = m.body
    if isinstance(body, PolyMap):
        if m.radial_exponent == 0.0:
            return body.jacobian(X)
        r = np.linalg.norm(X, axis=1)
        U = X / r[:, None]
        J = body.jacobian(U) + m.radial_exponent * (
            body.evaluate(U)[:, :, None] * U[:, None, :]
        )
        return (r ** (m.kappa - 1.0))[:, None, None] * J
    out = np.empty((X.shape[0], m.n, m.n))
    for k, row in enumerate(X):
        if body.jacobian is not None:
            Jk = np.asarray(body.jacobian(row), dtype=float)
            if Jk.shape != (m.n, m.n):
                raise InvalidInputError(
                    f"black-box jacobian returned shape {Jk.shape}, expected ({m.n}, {m.n})"
                )
            out[k] = Jk
        else:
            out[k] = _fd_jacobian(body.eval, row, m.n)
    return out


def eval_jacobian(m: MapSpec, xi) -> JacobianMatrix:
    """Jacobian of ``f`` at a single nonzero point.

    Raises
    ------
    UndefinedAtOriginError
        At ``xi = 0``.
    InvalidInputError
        For malformed or non-finite input.
    """
    x = np.asarray(xi, dtype=float)
    if x.ndim != 1:
        raise InvalidInputError("eval_jacobian expects a single point")
    entries = eval_jacobian_batch(m, x[None, :])[0]
    return JacobianMatrix(entries=entries, point=x.copy())


def extend_at_origin(m: MapSpec) -> np.ndarray:
    """The value assigned to the origin by the continuous extension: zero.

    Since ``|f(xi)| <= C |xi|**kappa`` with ``C`` the maximum of ``|f|`` on
    the unit sphere and ``kappa > 0``, the zero vector is the unique
    continuous choice.
    """
    return np.zeros(m.n)


def homogeneity_residual(m: MapSpec, count: int = 100, seed: int = 0, taus=None) -> float:
    """Largest sampled relative deviation from order-``kappa`` scaling.

    Draws ``count`` unit directions with log-uniform scale factors
    ``tau in [1e-3, 1e3]``, plus a fixed decade ladder
    ``{1e-3, 1e-2, 1e-1, 1e1, 1e2, 1e3}`` applied to the first direction
    (``taus`` overrides the ladder), and returns::

        max |f(tau xi) - tau**kappa f(xi)| / (tau**kappa * max(1, |f(xi)|))

    Exactly homogeneous maps sit at rounding level (~1e-15); a residual above
    ~1e-8 is a reliable sign that the declared order is wrong for the body.
    """
    if count < 1:
        raise InvalidParameterError("count must be >= 1")
    rng = np.random.default_rng([int(seed), _SALT_HOMOGENEITY])
    dirs = rng.standard_normal((count, m.n))
    norms = np.linalg.norm(dirs, axis=1)
    while np.any(norms < 1e-12):  # essentially never; keeps the math airtight
        bad = norms < 1e-12
        dirs[bad] = rng.standard_normal((int(bad.sum()), m.n))
        norms = np.linalg.norm(dirs, axis=1)
    dirs /= norms[:, None]
    t_rand = 10.0 ** rng.uniform(-3.0, 3.0, size=count)
    ladder = (1e-3, 1e-2, 1e-1, 1e1, 1e2, 1e3) if taus is None else tuple(float(v) for v in taus)
    X = np.vstack([dirs, np.repeat(dirs[:1], len(ladder), axis=0)])
    T = np.concatenate([t_rand, np.asarray(ladder, dtype=float)])
    F1 = _eval_batch(m, X)
    F2 = _eval_batch(m, T[:, None] * X)
    scale = T ** m.kappa
    dev = np.linalg.norm(F2 - scale[:, None] * F1, axis=1)
    denom = scale * np.maximum(1.0, np.linalg.norm(F1, axis=1))
    return float(np.max(dev / denom))
