"""Block Metzler matrices with factored couplings and their multiplier LPs.

A block system has Metzler diagonal blocks ``A_i`` and, for some ordered
pairs ``i != j``, a coupling ``B_ij C_ij`` placed at block position ``(i, j)``
with ``B_ij >= 0`` of size ``n_i x n_ij`` and ``C_ij >= 0`` of size
``n_ij x n_j``. Absent pairs are zero blocks.

The multiplier LP searches ``v_i > 0`` and free ``l_ij`` with

    v_i^T A_i + sum_j l_ji^T C_ji < 0        (one row per column of A_i)
    v_i^T B_ij - l_ij^T <= 0  (or < 0)        (one row per column of B_ij)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import InconsistencyError, PreconditionError, ShapeError
from .numkit import hurwitz_metzler, lp_strict_feasible
from .qualcore import QualMatrix, Status, is_metzler, is_nonneg, qual_mul, unit_sign
from .signstab import sign_stable

Block = Union[np.ndarray, QualMatrix]
Key = tuple[int, int]


@dataclass
class BlockSystem:
    diag: list[Block]
    couplings: dict[Key, tuple[Block, Block]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.diag:
            raise ShapeError("a block system needs at least one diagonal block")
        sizes = self.sizes
        for k, A in enumerate(self.diag):
            if _shape(A)[0] != _shape(A)[1]:
                raise ShapeError(f"diagonal block {k} is not square")
        for (i, j), (B, C) in self.couplings.items():
            if i == j or not (0 <= i < len(sizes) and 0 <= j < len(sizes)):
                raise ShapeError(f"invalid coupling index {(i, j)}")
            bs, cs = _shape(B), _shape(C)
            if bs[0] != sizes[i] or cs[1] != sizes[j] or bs[1] != cs[0]:
                raise ShapeError(f"coupling {(i, j)} has shapes {bs} and {cs}, block sizes {sizes[i]}, {sizes[j]}")

    @property
    def sizes(self) -> list[int]:
        return [_shape(A)[0] for A in self.diag]

    @property
    def is_sign(self) -> bool:
        return isinstance(self.diag[0], QualMatrix)

    def offsets(self) -> list[int]:
        return list(np.concatenate([[0], np.cumsum(self.sizes)]).astype(int))


def _shape(X: Block) -> tuple[int, int]:
    return X.shape if isinstance(X, QualMatrix) else np.asarray(X).shape  # type: ignore[return-value]


def _check_real(sys: BlockSystem) -> None:
    for k, A in enumerate(sys.diag):
        if isinstance(A, QualMatrix) or not is_metzler(A):
            raise PreconditionError(f"diagonal block {k} must be a real Metzler matrix")
    for key, (B, C) in sys.couplings.items():
        if isinstance(B, QualMatrix) or not (is_nonneg(B) and is_nonneg(C)):
            raise PreconditionError(f"coupling {key} must have real nonnegative factors")


def _check_sign(sys: BlockSystem) -> None:
    for k, A in enumerate(sys.diag):
        if not isinstance(A, QualMatrix) or not A.is_definite() or not A.is_metzler():
            raise PreconditionError(f"diagonal block {k} must be a definite Metzler sign-matrix")
    for key, (B, C) in sys.couplings.items():
        for X in (B, C):
            if not isinstance(X, QualMatrix) or not X.is_definite() or not X.is_nonneg():
                raise PreconditionError(f"coupling {key} must have definite nonnegative sign factors")


def assemble(sys: BlockSystem) -> Block:
    """The full block matrix with ``A_i`` on the diagonal and ``B_ij C_ij`` off it."""
    off = sys.offsets()
    n = off[-1]
    if sys.is_sign:
        codes = np.zeros((n, n), dtype=np.int8)
        for k, A in enumerate(sys.diag):
            codes[off[k]:off[k + 1], off[k]:off[k + 1]] = A.codes
        for (i, j), (B, C) in sys.couplings.items():
            codes[off[i]:off[i + 1], off[j]:off[j + 1]] = qual_mul(B, C).codes
        return QualMatrix(codes)
    M = np.zeros((n, n))
    for k, A in enumerate(sys.diag):
        M[off[k]:off[k + 1], off[k]:off[k + 1]] = A
    for (i, j), (B, C) in sys.couplings.items():
        M[off[i]:off[i + 1], off[j]:off[j + 1]] = np.asarray(B, float) @ np.asarray(C, float)
    return M


@dataclass
class MultiplierCertificate:
    v: list[np.ndarray]
    ell: dict[Key, np.ndarray]
    margin: float
    strict_b_rows: bool
    form: str = "real"


def _lp_rows(diag: list[np.ndarray], coup: dict[Key, tuple[np.ndarray, np.ndarray]], strict_b: bool):
    sizes = [A.shape[0] for A in diag]
    keys = sorted(coup)
    voff = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    ldims = [coup[k][1].shape[0] for k in keys]
    loff = voff[-1] + np.concatenate([[0], np.cumsum(ldims)]).astype(int)
    nvar = int(loff[-1])
    rows, strict = [], []
    for i, A in enumerate(diag):
        R = np.zeros((sizes[i], nvar))
        R[:, voff[i]:voff[i + 1]] = A.T
        for idx, (a, b) in enumerate(keys):
            if b == i:
                R[:, loff[idx]:loff[idx + 1]] += coup[(a, b)][1].T
        rows.append(R)
        strict += [True] * sizes[i]
    for idx, (i, j) in enumerate(keys):
        B = coup[(i, j)][0]
        R = np.zeros((B.shape[1], nvar))
        R[:, voff[i]:voff[i + 1]] = B.T
        R[:, loff[idx]:loff[idx + 1]] -= np.eye(B.shape[1])
        rows.append(R)
        strict += [strict_b] * B.shape[1]
    G = np.vstack(rows) if rows else np.zeros((0, nvar))
    free = np.zeros(nvar, dtype=bool)
    free[voff[-1]:] = True
    return G, np.array(strict), free, keys, voff, loff


def solve_multiplier_lp(
    diag: list[np.ndarray],
    coup: dict[Key, tuple[np.ndarray, np.ndarray]],
    strict_b: bool = False,
    form: str = "real",
) -> Optional[MultiplierCertificate]:
    diag = [np.asarray(A, dtype=float) for A in diag]
    coup = {k: (np.asarray(B, float), np.asarray(C, float)) for k, (B, C) in coup.items()}
    G, strict, free, keys, voff, loff = _lp_rows(diag, coup, strict_b)
    cert = lp_strict_feasible(G, strict=strict, free=free)
    if cert is None:
        return None
    x = cert.point
    v = [x[voff[i]:voff[i + 1]] for i in range(len(diag))]
    ell = {k: x[loff[t]:loff[t + 1]] for t, k in enumerate(keys)}
    return MultiplierCertificate(v, ell, _cert_margin(diag, coup, v, ell, strict_b), strict_b, form)


def multiplier_residuals(
    diag: list[np.ndarray],
    coup: dict[Key, tuple[np.ndarray, np.ndarray]],
    v: list[np.ndarray],
    ell: dict[Key, np.ndarray],
) -> tuple[np.ndarray, np.ndarray]:
    """Left-hand sides of the two row families, concatenated per family."""
    first = []
    for i, A in enumerate(diag):
        r = np.asarray(v[i], float) @ np.asarray(A, float)
        for (a, b), (B, C) in coup.items():
            if b == i:
                r = r + np.asarray(ell[(a, b)], float) @ np.asarray(C, float)
        first.append(r)
    second = [np.asarray(v[i], float) @ np.asarray(B, float) - np.asarray(ell[(i, j)], float)
              for (i, j), (B, C) in sorted(coup.items())]
    cat = lambda xs: np.concatenate(xs) if xs else np.zeros(0)  # noqa: E731
    return cat(first), cat(second)


def _cert_margin(diag, coup, v, ell, strict_b) -> float:
    first, second = multiplier_residuals(diag, coup, v, ell)
    vals = [-first, np.concatenate(v)]
    if strict_b:
        vals.append(-second)
    return float(np.concatenate(vals).min())


def validate_multipliers(
    diag: list[np.ndarray],
    coup: dict[Key, tuple[np.ndarray, np.ndarray]],
    v: list[np.ndarray],
    ell: dict[Key, np.ndarray],
    strict_b: bool,
    tol: float = 1e-9,
) -> bool:
    """Substitution check of a multiplier certificate."""
    if any((np.asarray(x) <= 0).any() for x in v):
        return False
    first, second = multiplier_residuals(diag, coup, v, ell)
    if (first >= 0).any():
        return False
    return bool((second < 0).all()) if strict_b else bool((second <= tol).all())


def block_hurwitz(sys: BlockSystem, cross_check: bool = False) -> Optional[MultiplierCertificate]:
    """Multiplier LP for a real block system; feasible iff the assembled matrix is Hurwitz."""
    _check_real(sys)
    cert = solve_multiplier_lp(list(sys.diag), dict(sys.couplings), strict_b=False)
    if cross_check:
        full = hurwitz_metzler(assemble(sys)).verdict
        if full != (cert is not None):
            raise InconsistencyError("multiplier LP and full Hurwitz test disagree",
                                     {"multiplier": cert is not None, "assembled": full})
    return cert


def _nonneg_sign(B: QualMatrix, C: QualMatrix) -> None:
    if not (B.is_definite() and C.is_definite() and B.is_nonneg() and C.is_nonneg()):
        raise PreconditionError("factors must be definite nonnegative sign-matrices")
    if B.cols != C.rows:
        raise ShapeError(f"inner dimensions differ: {B.shape} and {C.shape}")


def qc_product_equality(B: QualMatrix, C: QualMatrix) -> Status:
    """Sufficient test for Q(B)Q(C) = Q(BC).

    Holds when every column of ``B`` and every row of ``C`` has at most one
    nonzero (each product term then feeds exactly one entry), or when one
    factor has at most one nonzero in total. Otherwise the answer is Unknown.
    """
    _nonneg_sign(B, C)
    nb, nc = B.nonzero_mask(), C.nonzero_mask()
    if nb.sum() <= 1 or nc.sum() <= 1:
        return Status.HOLDS
    if (nb.sum(axis=0) <= 1).all() and (nc.sum(axis=1) <= 1).all():
        return Status.HOLDS
    return Status.UNKNOWN


def sgn_product_equality(B: QualMatrix, C: QualMatrix) -> bool:
    """True iff sgn(B) sgn(C) has no entry above one, i.e. equals sgn(BC)."""
    _nonneg_sign(B, C)
    return bool(((unit_sign(B) @ unit_sign(C)) <= 1).all())


@dataclass
class BlockVerdict:
    status: Status
    certificate: Optional[MultiplierCertificate]
    hypotheses: dict[Key, dict[str, object]]
    hypotheses_hold: bool
    statements: dict[str, bool] = field(default_factory=dict)


def _sign_lp_data(sys: BlockSystem, variant: str):
    diag = [unit_sign(A).astype(float) for A in sys.diag]
    coup = {}
    for (i, j), (B, C) in sys.couplings.items():
        if variant == "product":
            coup[(i, j)] = (unit_sign(qual_mul(B, C)).astype(float), np.eye(sys.sizes[j]))
        else:
            coup[(i, j)] = (unit_sign(B).astype(float), unit_sign(C).astype(float))
    return diag, coup


def block_sign_stable(sys: BlockSystem, variant: str = "factored", cross_check: bool = True) -> BlockVerdict:
    """Sign-stability of a block sign-matrix through a multiplier LP.

    ``variant="product"`` uses the couplings ``sgn(B_ij C_ij)`` with identity
    right factors and requires Q(B_ij C_ij) = Q(B_ij) Q(C_ij); ``"factored"``
    keeps ``sgn(B_ij)`` and ``sgn(C_ij)`` and additionally requires
    ``sgn(B_ij C_ij) = sgn(B_ij) sgn(C_ij)``. Both use strict rows. When the
    hypotheses are verified the answer is exact; otherwise a feasible LP is
    still a sufficient certificate and an infeasible one yields Unknown.
    """
    if variant not in ("product", "factored"):
        raise ValueError("variant must be 'product' or 'factored'")
    _check_sign(sys)
    hyp: dict[Key, dict[str, object]] = {}
    ok = True
    for key, (B, C) in sorted(sys.couplings.items()):
        qc = qc_product_equality(B, C)
        entry: dict[str, object] = {"qc": qc.value}
        ok &= qc is Status.HOLDS
        if variant == "factored":
            sg = sgn_product_equality(B, C)
            entry["sgn"] = sg
            ok &= sg
        hyp[key] = entry
    diag, coup = _sign_lp_data(sys, variant)
    cert = solve_multiplier_lp(diag, coup, strict_b=True, form=variant)
    statements = {"multiplier_lp": cert is not None}
    if cert is not None:
        status = Status.HOLDS
    else:
        status = Status.FAILS if ok else Status.UNKNOWN
    if ok and cross_check:
        statements["assembled"] = sign_stable(assemble(sys), witness=False).verdict
        if statements["assembled"] != statements["multiplier_lp"]:
            raise InconsistencyError("multiplier LP and assembled sign-stability disagree", statements)
    return BlockVerdict(status, cert, hyp, ok, statements)
