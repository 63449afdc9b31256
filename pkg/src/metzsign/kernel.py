"""Sign inverses, indefinite-pattern expansion, L+ patterns and kernel-constrained stability.

A pattern ``R`` (rows ``l``, columns ``n``) is L+ when every member ``R'``
admits ``w > 0`` with ``R' w = 0``; this holds iff for every nonzero signed
diagonal ``D`` some column of ``D sgn(R)`` is nonzero and nonnegative.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .errors import CapExceededError, InconsistencyError, PreconditionError, ShapeError
from .graphkit import digraph_of, reachability
from .numkit import lp_strict_feasible, real_inverse, inf_norm
from .qualcore import INDEF, NEG, POS, ZERO, QualMatrix, Status, derived_seed, sample_qual, unit_sign
from .signstab import sign_stable

CAP_SQ = 12
CAP_LPLUS = 16


def sign_inverse(A: QualMatrix) -> QualMatrix:
    """Sign pattern shared by the inverses of all members of a sign-stable ``A``.

    ``[A^{-1}]_ii = ⊖`` and ``[A^{-1}]_ij = ⊖`` exactly when the graph of
    ``A`` has a path from ``j`` to ``i``; all other entries are 0.
    """
    if not sign_stable(A, witness=False).verdict:
        raise PreconditionError("sign-matrix is not sign-stable")
    R = reachability(digraph_of(A))
    codes = np.where(R.T, NEG, ZERO).astype(np.int8)
    np.fill_diagonal(codes, NEG)
    return QualMatrix(codes)


def sq_expand(A: QualMatrix, cap: int = CAP_SQ) -> list[QualMatrix]:
    """All definite patterns obtained by replacing each ⊙ with ⊖, 0 or ⊕."""
    slots = A.indef_positions()
    if len(slots) > cap:
        raise CapExceededError("indefinite entries", len(slots), cap)
    if not slots:
        return [A]
    rows, cols = zip(*slots)
    out = []
    for choice in product((NEG, ZERO, POS), repeat=len(slots)):
        codes = A.codes.copy()
        codes[list(rows), list(cols)] = choice
        out.append(QualMatrix(codes))
    return out


def _scalings(ell: int, chunk: int = 4096):
    """Yield blocks of nonzero vectors in {-1, 0, 1}^ell, in lexicographic order."""
    total = 3 ** ell
    powers = 3 ** np.arange(ell - 1, -1, -1)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        digits = (idx[:, None] // powers[None, :]) % 3 - 1
        keep = (digits != 0).any(axis=1)
        if keep.any():
            yield digits[keep]


def is_lplus(R: QualMatrix, cap: int = CAP_LPLUS) -> tuple[bool, Optional[np.ndarray]]:
    """Decide the L+ property; on failure return a signed diagonal ``D`` (as a vector)
    for which no column of ``D sgn(R)`` is nonzero and nonnegative.

    A zero row makes ``R`` fail immediately; the returned ``D`` then selects that row.
    """
    if not R.is_definite():
        raise PreconditionError("L+ test needs a definite pattern")
    ell = R.rows
    if ell > cap:
        raise CapExceededError("rows", ell, cap)
    U = unit_sign(R)
    zero_rows = np.nonzero(~U.any(axis=1))[0]
    if zero_rows.size:
        d = np.zeros(ell, dtype=np.int64)
        d[zero_rows[0]] = 1
        return False, d
    for D in _scalings(ell):
        P = D[:, :, None] * U[None, :, :]  # (batch, ell, n)
        good = ((P >= 0).all(axis=1) & (P != 0).any(axis=1)).any(axis=1)
        if not good.all():
            return False, D[int(np.argmin(good))].astype(np.int64)
    return True, None


def dual_cone_witness(R: QualMatrix, d: np.ndarray, seed=0, boost: float = 1e3) -> tuple[np.ndarray, np.ndarray]:
    """Member ``R'`` of Q(R) and ``y != 0`` with ``y^T R' >= 0``, built from a failing scaling ``d``.

    Every column of ``-diag(d) sgn(R)`` is zero or has a positive entry;
    those positive entries are scaled up until each column of ``y^T R'`` with
    ``y = -d`` is nonnegative. Then no ``v > 0`` satisfies ``R' v = 0``
    unless ``y^T R' = 0``.
    """
    d = np.asarray(d, dtype=np.int64)
    if not d.any() or d.shape != (R.rows,):
        raise ShapeError("d must be a nonzero vector with one entry per row")
    y = -d.astype(float)
    S = y[:, None] * unit_sign(R)
    if ((S < 0).any(axis=0) & ~(S > 0).any(axis=0)).any():
        raise PreconditionError("d is not a failing scaling for this pattern")
    Rp = sample_qual(R, seed)
    up = S > 0
    while ((y @ Rp) < 0).any():
        col_bad = (y @ Rp) < 0
        Rp = np.where(up & col_bad[None, :], Rp * boost, Rp)
    return Rp, y


def signs_of_real_times_signinv(B: np.ndarray, Ainv: QualMatrix) -> QualMatrix:
    """Sign pattern of ``B^T A^{-T}`` from contribution signs.

    Entry ``(i, j)`` collects ``sgn(B_ki) * [A^{-1}]_jk`` over ``k``: all
    positive gives ⊕, all negative ⊖, no contribution 0, mixed ⊙.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != Ainv.rows or not Ainv.is_square():
        raise ShapeError(f"B has shape {B.shape}, sign inverse {Ainv.shape}")
    if not Ainv.is_definite():
        raise PreconditionError("sign inverse must be definite")
    sB = np.sign(B).astype(np.int64)  # (n, ell)
    S = unit_sign(Ainv)  # (n, n)
    # contrib[i, j, k] = sgn(B_ki) * S_jk
    contrib = sB.T[:, None, :] * S[None, :, :]
    has_pos = (contrib > 0).any(axis=2)
    has_neg = (contrib < 0).any(axis=2)
    codes = np.where(has_pos & has_neg, INDEF, np.where(has_pos, POS, np.where(has_neg, NEG, ZERO)))
    return QualMatrix(codes.astype(np.int8))


def column_rank(B: np.ndarray, rel_tol: float = 1e-10) -> int:
    """Rank by Gaussian elimination with complete pivoting, threshold ``rel_tol * ||B||_inf``."""
    W = np.array(B, dtype=float)
    if W.size == 0:
        return 0
    thr = rel_tol * inf_norm(W)
    rank = 0
    rows, cols = W.shape
    for k in range(min(rows, cols)):
        sub = np.abs(W[k:, k:])
        p, q = np.unravel_index(int(np.argmax(sub)), sub.shape)
        if sub[p, q] <= thr or sub[p, q] == 0:
            break
        p += k
        q += k
        W[[k, p]] = W[[p, k]]
        W[:, [k, q]] = W[:, [q, k]]
        W[k + 1:] -= np.outer(W[k + 1:, k] / W[k, k], W[k])
        rank += 1
    return rank


def lplus_complexity_estimate(ell: int, indefinite: int) -> int:
    """Number of (pattern, scaling) pairs examined: ``(3^ell - 1) * 3^indefinite``."""
    if ell <= 0:
        return 0
    return (3 ** ell - 1) * 3 ** indefinite


@dataclass
class KerBVerdict:
    status: Status
    checked_count: int
    member_results: list[tuple[QualMatrix, bool, Optional[np.ndarray]]] = field(default_factory=list)
    pattern: Optional[QualMatrix] = None
    sample_certificates: list[tuple[np.ndarray, float]] = field(default_factory=list)
    indefinite_positions: list[tuple[int, int]] = field(default_factory=list)
    notes: dict[str, object] = field(default_factory=dict)


def kernel_certificate(Ap: np.ndarray, B: np.ndarray) -> Optional[np.ndarray]:
    """For a Hurwitz Metzler ``Ap``, find ``v > 0`` with ``v^T Ap < 0`` and ``v^T B = 0``.

    Searches ``w >= 1`` with ``w^T B' = 0`` where ``B' = Ap^{-1} B`` transposed
    appropriately, then sets ``v = -Ap^{-T} w``.
    """
    Ainv = real_inverse(Ap)
    # v^T = -w^T Ap^{-1}  =>  v^T B = -w^T Ap^{-1} B must vanish.
    K = (Ainv @ B).T
    cert = lp_strict_feasible(np.zeros((0, Ap.shape[0])), G_eq=K)
    if cert is None:
        return None
    return -(cert.point @ Ainv)


def validate_kernel_vector(v: np.ndarray, Ap: np.ndarray, B: np.ndarray, tol: float = 1e-8) -> bool:
    v = np.asarray(v, float)
    if not (v > 0).all() or not (v @ Ap < 0).all():
        return False
    bound = tol * np.abs(v).max() * max(inf_norm(B), 1e-300)
    return bool(np.abs(v @ B).max(initial=0.0) <= bound)


def ker_b_sign_stable(
    A: QualMatrix,
    B: np.ndarray,
    cap_sq: int = CAP_SQ,
    cap_lplus: int = CAP_LPLUS,
    samples: int = 0,
    seed: int = 0,
) -> KerBVerdict:
    """Sufficient test that every member ``A'`` of Q(A) admits ``v > 0`` with
    ``v^T A' < 0`` and ``v^T B = 0``.

    Holds when every definite completion of the pattern of ``B^T A^{-T}`` is
    L+; otherwise Unknown, never a refutation. With ``samples > 0`` the
    property is re-validated on that many members of Q(A).
    """
    B = np.asarray(B, dtype=float)
    if B.ndim == 1:
        B = B[:, None]
    if B.shape[0] != A.rows:
        raise ShapeError(f"B has {B.shape[0]} rows, A has {A.rows}")
    ell = B.shape[1]
    if ell == 0:
        sv = sign_stable(A)
        return KerBVerdict(Status.HOLDS if sv.verdict else Status.FAILS, 0, notes={"reduced": "sign_stable"})
    sv = sign_stable(A, witness=False)
    if not sv.verdict:
        raise PreconditionError("sign-matrix is not sign-stable")
    if ell >= A.rows or column_rank(B) < ell:
        raise PreconditionError("B must have full column rank and fewer columns than rows")
    pattern = signs_of_real_times_signinv(B, sign_inverse(A))
    members = sq_expand(pattern, cap_sq)
    results = []
    all_ok = True
    for R in members:
        ok, D = is_lplus(R, cap_lplus)
        results.append((R, ok, D))
        if not ok:
            all_ok = False
            break
    status = Status.HOLDS if all_ok else Status.UNKNOWN
    verdict = KerBVerdict(status, len(members), results, pattern,
                          indefinite_positions=pattern.indef_positions())
    if all_ok and samples:
        for k in range(samples):
            Ap = sample_qual(A, derived_seed(seed, k))
            v = kernel_certificate(Ap, B)
            if v is None or not validate_kernel_vector(v, Ap, B):
                raise InconsistencyError(f"sample {k} violates the kernel property", {"sample": k})
            verdict.sample_certificates.append((v, float(-(v @ Ap).max())))
    return verdict
