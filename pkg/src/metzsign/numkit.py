"""Numerical kernels: strict-feasibility LP, Hurwitz tests, inverses, spectral abscissa."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._simplex import phase_one
from .errors import (
    CapExceededError,
    InconsistencyError,
    NotMetzlerError,
    PreconditionError,
    ShapeError,
    SingularMatrixError,
)
from .qualcore import is_metzler, is_nonneg


@dataclass(frozen=True)
class Tolerances:
    pivot: float = 1e-12
    inverse_sign: float = 1e-12
    agreement: float = 1e-7
    residual: float = 1e-8


TOL = Tolerances()


@dataclass(frozen=True)
class LpCertificate:
    """A point of a homogeneous strict-feasibility system.

    ``margin`` is the smallest slack over the strict rows and the positivity
    constraints of non-free variables.
    """

    point: np.ndarray
    margin: float


def _as_matrix(G: Optional[np.ndarray], n: Optional[int]) -> np.ndarray:
    if G is None:
        return np.zeros((0, n or 0))
    G = np.asarray(G, dtype=float)
    if G.ndim != 2:
        raise ShapeError("constraint matrix must be two-dimensional")
    if not np.isfinite(G).all():
        raise ValueError("constraint matrix has non-finite entries")
    return G


def lp_strict_feasible(
    G: np.ndarray,
    strict: Optional[Sequence[bool]] = None,
    G_eq: Optional[np.ndarray] = None,
    free: Optional[Sequence[bool]] = None,
) -> Optional[LpCertificate]:
    """Find ``x`` with ``G x < 0`` on strict rows, ``G x <= 0`` elsewhere,
    ``G_eq x = 0`` and ``x > 0`` on the non-free coordinates.

    Every system passed here is positively homogeneous in ``x``, so the
    strict inequalities are normalized to margin one: ``x >= 1`` and
    ``G x <= -1``. Returns None when infeasible.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim != 2:
        raise ShapeError("constraint matrix must be two-dimensional")
    n = G.shape[1]
    G_eq = _as_matrix(G_eq, n)
    G = _as_matrix(G, n)
    if G_eq.shape[1] != n:
        raise ShapeError("equality block has the wrong number of columns")
    strict_mask = np.ones(G.shape[0], dtype=bool) if strict is None else np.asarray(strict, dtype=bool)
    free_mask = np.zeros(n, dtype=bool) if free is None else np.asarray(free, dtype=bool)
    if strict_mask.shape != (G.shape[0],) or free_mask.shape != (n,):
        raise ShapeError("strict/free masks do not match the constraint matrix")

    # x = E z + offset, with z >= 0: bounded coordinates x_i = 1 + y_i,
    # free coordinates x_i = p_i - q_i.
    bounded = np.nonzero(~free_mask)[0]
    loose = np.nonzero(free_mask)[0]
    nz = len(bounded) + 2 * len(loose)
    E = np.zeros((n, nz))
    E[bounded, np.arange(len(bounded))] = 1.0
    E[loose, len(bounded) + np.arange(len(loose))] = 1.0
    E[loose, len(bounded) + len(loose) + np.arange(len(loose))] = -1.0
    offset = (~free_mask).astype(float)

    rhs = np.where(strict_mask, -1.0, 0.0) - G @ offset
    z = phase_one(G @ E, rhs, G_eq @ E, -(G_eq @ offset))
    if z is None:
        return None
    x = E @ z + offset
    return LpCertificate(point=x, margin=_margin(G, strict_mask, free_mask, x))


def _margin(G: np.ndarray, strict: np.ndarray, free: np.ndarray, x: np.ndarray) -> float:
    slacks = [-(G[strict] @ x), x[~free]]
    vals = np.concatenate(slacks)
    return float(vals.min()) if vals.size else 1.0


def validate_lp_point(
    G: np.ndarray,
    x: np.ndarray,
    strict: Optional[Sequence[bool]] = None,
    G_eq: Optional[np.ndarray] = None,
    free: Optional[Sequence[bool]] = None,
    tol: float = 1e-9,
) -> bool:
    """Substitution check: strict rows negative, non-strict rows and equalities within ``tol``."""
    G = np.asarray(G, dtype=float)
    x = np.asarray(x, dtype=float)
    strict_mask = np.ones(G.shape[0], dtype=bool) if strict is None else np.asarray(strict, dtype=bool)
    free_mask = np.zeros(x.size, dtype=bool) if free is None else np.asarray(free, dtype=bool)
    scale = tol * (1.0 + np.abs(G).sum(axis=1) * np.abs(x).max(initial=0.0))
    r = G @ x
    if (r[strict_mask] >= 0).any() or (r[~strict_mask] > scale[~strict_mask]).any():
        return False
    if (x[~free_mask] <= 0).any():
        return False
    if G_eq is not None and np.asarray(G_eq).size:
        G_eq = np.asarray(G_eq, dtype=float)
        s_eq = tol * (1.0 + np.abs(G_eq).sum(axis=1) * np.abs(x).max(initial=0.0))
        if (np.abs(G_eq @ x) > s_eq).any():
            return False
    return True


def inf_norm(A: np.ndarray) -> float:
    A = np.asarray(A, dtype=float)
    return float(np.abs(A).sum(axis=1).max(initial=0.0)) if A.size else 0.0


def real_inverse(A: np.ndarray, pivot_tol: float = TOL.pivot) -> np.ndarray:
    """Gauss-Jordan elimination with partial pivoting.

    Raises :class:`SingularMatrixError` if a pivot falls below
    ``pivot_tol * ||A||_inf``.
    """
    A = np.array(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"expected a square matrix, got {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError("matrix has non-finite entries")
    n = A.shape[0]
    threshold = pivot_tol * inf_norm(A)
    W = np.hstack([A, np.eye(n)])
    for k in range(n):
        p = k + int(np.argmax(np.abs(W[k:, k])))
        if abs(W[p, k]) <= threshold or W[p, k] == 0.0:
            raise SingularMatrixError(f"pivot {k} is numerically zero")
        if p != k:
            W[[k, p]] = W[[p, k]]
        W[k] /= W[k, k]
        col = W[:, k].copy()
        col[k] = 0.0
        W -= np.outer(col, W[k])
    return W[:, n:]


def inverse_residual(A: np.ndarray, Ainv: np.ndarray) -> float:
    A = np.asarray(A, dtype=float)
    return inf_norm(A @ Ainv - np.eye(A.shape[0]))


def _check_metzler(A: np.ndarray, what: str = "matrix") -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"{what} must be square, got {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError(f"{what} has non-finite entries")
    if not is_metzler(A):
        raise NotMetzlerError(what)
    return A


def _mmatrix_test(A: np.ndarray, t: np.ndarray) -> np.ndarray:
    """For a batch of Metzler ``A`` (k, n, n) decide ``t > abscissa(A)``.

    ``tI - A`` is a Z-matrix; it is a nonsingular M-matrix exactly when
    Gaussian elimination without pivoting produces only positive pivots.
    """
    k, n, _ = A.shape
    W = t[:, None, None] * np.eye(n)[None] - A
    ok = np.ones(k, dtype=bool)
    for j in range(n):
        piv = W[:, j, j]
        ok &= piv > 0
        safe = np.where(piv > 0, piv, 1.0)
        if j + 1 < n:
            f = W[:, j + 1:, j] / safe[:, None]
            W[:, j + 1:, j + 1:] -= f[:, :, None] * W[:, None, j, j + 1:]
    return ok


def spectral_abscissa_metzler(A: np.ndarray, rel_tol: float = 1e-13, max_n: int = 200) -> float | np.ndarray:
    """Spectral abscissa (Perron-Frobenius eigenvalue) of a Metzler matrix.

    Bisection on the M-matrix test: ``t`` exceeds the abscissa iff
    ``tI - A`` is a nonsingular M-matrix. Accepts a single matrix or a batch
    of shape ``(k, n, n)``. The bracket is ``[max diag, max row sum]``.
    """
    arr = np.asarray(A, dtype=float)
    single = arr.ndim == 2
    batch = arr[None] if single else arr
    if batch.ndim != 3 or batch.shape[1] != batch.shape[2]:
        raise ShapeError(f"expected square matrices, got {arr.shape}")
    n = batch.shape[1]
    if n > max_n:
        raise CapExceededError("n", n, max_n)
    if not np.isfinite(batch).all():
        raise ValueError("matrix has non-finite entries")
    off = ~np.eye(n, dtype=bool)
    if (batch[:, off] < 0).any():
        raise NotMetzlerError()
    lo = np.diagonal(batch, axis1=1, axis2=2).max(axis=1)
    hi = batch.sum(axis=2).max(axis=1)
    hi = np.maximum(hi, lo)
    width = rel_tol * (1.0 + np.abs(batch).sum(axis=2).max(axis=1))
    # The abscissa lies in [lo, hi]; stop when every bracket is narrow.
    for _ in range(200):
        active = hi - lo > width
        if not active.any():
            break
        mid = 0.5 * (lo + hi)
        above = _mmatrix_test(batch, mid)
        hi = np.where(active & above, mid, hi)
        lo = np.where(active & ~above, mid, lo)
    out = 0.5 * (lo + hi)
    return float(out[0]) if single else out


@dataclass(frozen=True)
class PowerIterationResult:
    estimate: float
    lower: float
    upper: float
    iterations: int
    perturbation_bound: float


def spectral_abscissa_power(A: np.ndarray, max_steps: int = 100_000, max_n: int = 200) -> PowerIterationResult:
    """Power iteration on ``A + cI + eta J`` with Collatz-Wielandt bounds.

    Accurate for irreducible or well-conditioned matrices; for strongly
    non-normal reducible matrices the rank-one perturbation can move the
    Perron root by much more than ``eta * n``, which is why
    :func:`spectral_abscissa_metzler` uses bisection instead.
    """
    A = _check_metzler(A)
    n = A.shape[0]
    if n > max_n:
        raise CapExceededError("n", n, max_n)
    norm = inf_norm(A)
    eta = 1e-12 * (1.0 + norm)
    c = 1.0 + np.abs(np.diag(A)).max()
    P = A + c * np.eye(n) + eta * np.ones((n, n))
    x = np.ones(n) / n
    prev = np.inf
    still = 0
    lower = upper = est = 0.0
    step = 0
    for step in range(1, max_steps + 1):
        y = P @ x
        ratios = y / x
        lower, upper = ratios.min(), ratios.max()
        est = float(x @ y / (x @ x))
        x = y / y.sum()
        if abs(est - prev) < 1e-12 * (1.0 + abs(est)):
            still += 1
            if still >= 10:
                break
        else:
            still = 0
        prev = est
    return PowerIterationResult(est - c, lower - c, upper - c, step, eta * n)


@dataclass(frozen=True)
class HurwitzReport:
    verdict: bool
    lp_certificate: Optional[LpCertificate]
    inverse: Optional[np.ndarray]
    abscissa_estimate: float
    paths: dict = field(default_factory=dict)


def hurwitz_metzler(A: np.ndarray, inverse_tol: float = TOL.inverse_sign) -> HurwitzReport:
    """Hurwitz test for a real Metzler matrix by two independent routes.

    Route one looks for ``v > 0`` with ``v^T A < 0``; route two inverts
    ``A`` and checks ``A^{-1} <= 0`` up to ``inverse_tol * ||A^{-1}||_inf``.
    A disagreement raises :class:`InconsistencyError`.
    """
    A = _check_metzler(A)
    cert = lp_strict_feasible(A.T)
    lp_ok = cert is not None
    try:
        Ainv = real_inverse(A)
    except SingularMatrixError:
        Ainv = None
    inv_ok = Ainv is not None and bool((Ainv <= inverse_tol * inf_norm(Ainv)).all())
    abscissa = spectral_abscissa_metzler(A)
    if lp_ok != inv_ok:
        raise InconsistencyError(
            "linear-program and inverse-sign Hurwitz tests disagree",
            {"lp": lp_ok, "inverse": inv_ok, "abscissa": abscissa},
        )
    return HurwitzReport(lp_ok, cert, Ainv, abscissa, {"lp": lp_ok, "inverse": inv_ok})


def is_hurwitz_metzler(A: np.ndarray) -> bool:
    return hurwitz_metzler(A).verdict


def schur_split_hurwitz(M: np.ndarray, n1: int, pivot: str = "first") -> bool:
    """Hurwitz test of a Metzler matrix through a Schur complement.

    With ``pivot="first"`` the leading ``n1`` block is eliminated and the
    result is ``M11 Hurwitz and M22 - M21 M11^{-1} M12 Hurwitz``; with
    ``pivot="second"`` the trailing block is eliminated instead. A pivot
    block that is not Hurwitz makes ``M`` non-Hurwitz, so False is returned.
    """
    M = _check_metzler(M)
    n = M.shape[0]
    if not 0 < n1 < n:
        raise PreconditionError(f"split index {n1} must lie strictly between 0 and {n}")
    M11, M12 = M[:n1, :n1], M[:n1, n1:]
    M21, M22 = M[n1:, :n1], M[n1:, n1:]
    if not (is_nonneg(M12) and is_nonneg(M21)):
        raise PreconditionError("off-diagonal blocks must be nonnegative")
    if pivot == "first":
        P, Q, R, S = M11, M12, M21, M22
    elif pivot == "second":
        P, Q, R, S = M22, M21, M12, M11
    else:
        raise ValueError("pivot must be 'first' or 'second'")
    if not hurwitz_metzler(P).verdict:
        return False
    comp = S - R @ real_inverse(P) @ Q
    # The complement of a Metzler matrix at a Hurwitz pivot is Metzler; clip roundoff.
    off = ~np.eye(comp.shape[0], dtype=bool)
    comp[off & (comp < 0)] = np.where(comp[off & (comp < 0)] > -1e-12 * (1 + inf_norm(comp)), 0.0,
                                      comp[off & (comp < 0)])
    return hurwitz_metzler(comp).verdict
