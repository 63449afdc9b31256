"""Convex hulls of Metzler sign-matrices and common Lyapunov functions."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .errors import CapExceededError, InconsistencyError, PreconditionError, ShapeError
from .qualcore import NEG, QualMatrix, qual_sum
from .signstab import SignStabilityVerdict, sign_stable
from .graphkit import digraph_of, topo_permutation
from .errors import CycleError

BETA_CAP = 16


def _check_family(F: Sequence[QualMatrix]) -> None:
    if not F:
        raise ShapeError("family must be nonempty")
    shape = F[0].shape
    for k, A in enumerate(F):
        if A.shape != shape or not A.is_square():
            raise ShapeError(f"member {k} has shape {A.shape}, expected square {shape}")
        if not A.is_definite() or not A.is_metzler():
            raise PreconditionError(f"member {k} must be a definite Metzler sign-matrix")


def sign_summable(F: Sequence[QualMatrix]) -> tuple[bool, Optional[int]]:
    """True iff the nonzero diagonal entries at each position share one sign.

    The second value is the first (0-based) conflicting diagonal position.
    """
    _check_family(F)
    D = np.array([np.diag(A.codes) for A in F])
    for j in range(D.shape[1]):
        nz = set(D[:, j][D[:, j] != 0].tolist())
        if len(nz) > 1:
            return False, j
    return True, None


@dataclass
class HullVerdict:
    verdict: bool
    summable: bool
    conflict: Optional[int] = None
    sum_verdict: Optional[SignStabilityVerdict] = None
    statements: dict[str, bool] = field(default_factory=dict)
    failing_beta: Optional[tuple[int, ...]] = None


def beta_enumeration(F: Sequence[QualMatrix], cap: int = BETA_CAP) -> tuple[bool, Optional[tuple[int, ...]]]:
    """Sign-stability of every ``sum_{beta_i = 1} A_i`` over nonzero ``beta`` in {0,1}^N."""
    N = len(F)
    if N > cap:
        raise CapExceededError("N", N, cap)
    for beta in product((0, 1), repeat=N):
        if not any(beta):
            continue
        S = qual_sum([A for A, b in zip(F, beta) if b])
        if not sign_stable(S, witness=False).verdict:
            return False, beta
    return True, None


def hull_sign_stable(F: Sequence[QualMatrix], full_check: bool = False, cap: int = BETA_CAP) -> HullVerdict:
    """Every matrix in the convex hull of Q(A_1), ..., Q(A_N) is Hurwitz.

    Decided as: every member has an all-⊖ diagonal and the sum is
    sign-stable. ``full_check`` also enumerates all subset sums.
    """
    summable, conflict = sign_summable(F)
    if not summable:
        return HullVerdict(False, False, conflict)
    diag_ok = all((np.diag(A.codes) == NEG).all() for A in F)
    S = qual_sum(list(F))
    sv = sign_stable(S, witness=False)
    verdict = diag_ok and sv.verdict
    statements = {"sum": verdict}
    beta = None
    if full_check:
        enum_ok, beta = beta_enumeration(F, cap)
        statements["subsets"] = enum_ok
        if enum_ok != verdict:
            raise InconsistencyError("subset enumeration and summed-pattern test disagree", statements)
    return HullVerdict(verdict, True, None, sv, statements, beta)


def common_permutation(samples: Sequence[np.ndarray]) -> np.ndarray:
    """Permutation making every sample upper triangular at once."""
    if not samples:
        raise ShapeError("need at least one sample")
    mask = np.zeros_like(np.asarray(samples[0]), dtype=bool)
    for M in samples:
        M = np.asarray(M, dtype=float)
        if M.shape != mask.shape or M.shape[0] != M.shape[1]:
            raise ShapeError("samples must be square and of equal shape")
        mask |= M != 0
    try:
        return topo_permutation(digraph_of(mask))
    except CycleError as exc:
        raise PreconditionError(f"samples are not simultaneously triangularizable: cycle {exc.cycle}") from None


def _triangular_samples(samples: Sequence[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
    perm = common_permutation(samples)
    T = np.array([np.asarray(M, float)[np.ix_(perm, perm)] for M in samples])
    if (np.diagonal(T, axis1=1, axis2=2) >= 0).any():
        raise PreconditionError("every sample needs a negative diagonal")
    return perm, T


def common_linear_lyapunov(samples: Sequence[np.ndarray]) -> np.ndarray:
    """``v > 0`` with ``v^T A < 0`` for every sample (hence for their convex hull).

    Forward recursion in the common triangular basis:
    ``v_j = max(1, 2 * max_A (sum_{i<j} v_i a_ij) / (-a_jj))``.
    """
    perm, T = _triangular_samples(samples)
    n = T.shape[1]
    w = np.zeros(n)
    for j in range(n):
        push = (T[:, :j, j] @ w[:j]) / -T[:, j, j]
        w[j] = max(1.0, 2.0 * float(push.max()))
    v = np.empty(n)
    v[perm] = w
    return v


@dataclass
class QuadraticCertificate:
    q: np.ndarray
    min_eigenvalues: np.ndarray


def _neg_def(M: np.ndarray) -> bool:
    try:
        np.linalg.cholesky(-(M + M.T) / 2)
        return True
    except np.linalg.LinAlgError:
        return False


def common_quadratic_lyapunov(samples: Sequence[np.ndarray], max_halvings: int = 100) -> QuadraticCertificate:
    """Diagonal ``Q > 0`` with ``A^T Q + Q A`` negative definite for every sample.

    Backward recursion in the common triangular basis: ``q_n = 1``; for
    ``k = n-1, ..., 1`` the weight ``q_k`` starts at ``q_{k+1}`` and is halved
    until the trailing block from ``k`` on is negative definite for every
    sample (a small weight on the new leading coordinate dominates the
    coupling to the already-certified trailing block).
    """
    perm, T = _triangular_samples(samples)
    n = T.shape[1]
    w = np.ones(n)
    for k in range(n - 2, -1, -1):
        qk = w[k + 1]
        for _ in range(max_halvings + 1):
            w[k] = qk
            Qd = w[k:]
            sub = T[:, k:, k:]
            if all(_neg_def(S.T * Qd[None, :] + Qd[:, None] * S) for S in sub):
                break
            qk /= 2
        else:
            raise CapExceededError("halvings", max_halvings + 1, max_halvings)
    q = np.empty(n)
    q[perm] = w
    q = q / q.max()
    return QuadraticCertificate(q, quadratic_margins(samples, q))


def quadratic_margins(samples: Sequence[np.ndarray], q: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of ``A^T Q + Q A`` for each sample (negative means valid)."""
    out = []
    for M in samples:
        M = np.asarray(M, float)
        S = M.T * q[None, :] + q[:, None] * M
        out.append(np.linalg.eigvalsh((S + S.T) / 2).max())
    return np.array(out)


def validate_linear(v: np.ndarray, M: np.ndarray) -> bool:
    return bool((v > 0).all() and (v @ np.asarray(M, float) < 0).all())


def validate_quadratic(q: np.ndarray, M: np.ndarray) -> bool:
    M = np.asarray(M, float)
    return bool((q > 0).all()) and _neg_def(M.T * q[None, :] + q[:, None] * M)
