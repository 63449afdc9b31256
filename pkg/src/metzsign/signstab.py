"""Sign-stability of Metzler sign-matrices and Schur-type sign-stability of nonnegative ones."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CycleError, IndefiniteError, InconsistencyError, NotMetzlerError, PreconditionError, ShapeError
from .graphkit import digraph_of, find_cycle, is_strongly_connected, topo_permutation
from .numkit import LpCertificate, hurwitz_metzler, lp_strict_feasible, spectral_abscissa_metzler
from .qualcore import NEG, POS, ZERO, QualMatrix, unit_sign


@dataclass
class SignStabilityVerdict:
    """Outcome of a sign-stability decision with the evidence of each route.

    ``statements`` maps route names (``graph``, ``permutation``, ``lp``,
    ``unit_hurwitz``) to their individual verdicts; only computed routes appear.
    """

    verdict: bool
    statements: dict[str, bool] = field(default_factory=dict)
    lyapunov: Optional[LpCertificate] = None
    permutation: Optional[np.ndarray] = None
    bad_diagonal: Optional[int] = None
    cycle: Optional[list[int]] = None
    counterexample: Optional[np.ndarray] = None

    def __bool__(self) -> bool:
        return self.verdict


def _check_input(A: QualMatrix) -> None:
    if not A.is_square():
        raise ShapeError(f"expected a square sign-matrix, got {A.shape}")
    if not A.is_definite():
        raise IndefiniteError(f"indefinite entries at {A.indef_positions()}")
    if not A.is_metzler():
        raise NotMetzlerError("sign-matrix")


def _first_diag(A: QualMatrix, allowed: int) -> Optional[int]:
    bad = np.nonzero(np.diag(A.codes) != allowed)[0]
    return int(bad[0]) if bad.size else None


def _agree(statements: dict[str, bool]) -> bool:
    values = set(statements.values())
    if len(values) != 1:
        raise InconsistencyError("equivalent sign-stability statements disagree", statements)
    return values.pop()


def sign_stable(A: QualMatrix, full_check: bool = False, witness: bool = True) -> SignStabilityVerdict:
    """Decide whether every matrix with the sign pattern ``A`` is Hurwitz.

    The graph route (negative diagonal and acyclic graph) and the permutation
    route always run. With ``full_check`` the Lyapunov-vector LP on
    ``v^T sgn(A) < 0`` and the inverse test on ``sgn(A)`` run as well. All
    computed routes must agree.
    """
    _check_input(A)
    G = digraph_of(A)
    bad = _first_diag(A, NEG)
    cycle = find_cycle(G)
    statements = {"graph": bad is None and cycle is None}
    perm = None
    try:
        perm = topo_permutation(G)
    except CycleError:
        pass
    statements["permutation"] = bad is None and perm is not None
    U = unit_sign(A).astype(float)
    cert = None
    if full_check:
        cert = lp_strict_feasible(U.T)
        statements["lp"] = cert is not None
        statements["unit_hurwitz"] = hurwitz_metzler(U).verdict
    verdict = _agree(statements)
    result = SignStabilityVerdict(verdict, statements, cert, perm if verdict else None, bad, cycle)
    if verdict and cert is None:
        result.lyapunov = triangular_lyapunov(U, perm)
    if not verdict and witness:
        result.counterexample = instability_witness(A)
    return result


def triangular_lyapunov(U: np.ndarray, perm: np.ndarray) -> LpCertificate:
    """Lyapunov vector ``v > 0`` with ``v^T U < 0`` for a permutable-to-triangular Hurwitz ``U``."""
    T = U[np.ix_(perm, perm)]
    n = T.shape[0]
    w = np.zeros(n)
    for j in range(n):
        push = float(w[:j] @ T[:j, j]) if j else 0.0
        w[j] = max(1.0, 2.0 * push / -T[j, j])
    v = np.empty(n)
    v[perm] = w
    return LpCertificate(v, float(min((-(v @ U)).min(), v.min())))


def potentially_sign_stable(A: QualMatrix) -> tuple[bool, Optional[np.ndarray]]:
    """True iff some member of Q(A) is Hurwitz, which happens iff every diagonal entry is ⊖.

    The witness has ``-1`` on the diagonal and ``eps`` on the ⊕ slots, with
    ``eps`` halved from 1 until the Hurwitz test passes.
    """
    _check_input(A)
    if _first_diag(A, NEG) is not None:
        return False, None
    pos = (A.codes == POS).astype(float)
    eps = 1.0
    for _ in range(200):
        M = pos * eps - np.eye(A.rows)
        if hurwitz_metzler(M).verdict:
            return True, M
        eps /= 2
    raise RuntimeError("no stable member found; continuity argument violated numerically")


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: tuple


def necessary_violations(A: QualMatrix) -> list[Violation]:
    """Necessary conditions for sign-stability that ``A`` violates.

    Kinds: ``diagonal`` (a diagonal entry is not ⊖), ``pair`` (both
    ``a_ij`` and ``a_ji`` are ⊕), ``cycle`` (the graph has a cycle) and
    ``irreducible`` (the graph is strongly connected, ``n >= 2``).
    """
    _check_input(A)
    out: list[Violation] = []
    for i in np.nonzero(np.diag(A.codes) != NEG)[0]:
        out.append(Violation("diagonal", (int(i),)))
    pos = A.codes == POS
    both = np.triu(pos & pos.T, k=1)
    for i, j in zip(*np.nonzero(both)):
        out.append(Violation("pair", (int(i), int(j))))
    G = digraph_of(A)
    cycle = find_cycle(G)
    if cycle is not None:
        out.append(Violation("cycle", tuple(cycle)))
    if A.rows >= 2 and is_strongly_connected(G):
        out.append(Violation("irreducible", ()))
    return out


def schur_sign_stable(A: QualMatrix, full_check: bool = False) -> SignStabilityVerdict:
    """Decide whether every member of Q(A) has spectral radius below one.

    For nonnegative ``A`` this holds iff the diagonal is zero and the graph is
    acyclic, in which case every member is in fact nilpotent. With
    ``full_check`` the LP on ``v^T (sgn(A) - I) < 0`` and a nilpotency test of
    ``sgn(A)`` also run.
    """
    if not A.is_square():
        raise ShapeError(f"expected a square sign-matrix, got {A.shape}")
    if not A.is_definite():
        raise IndefiniteError(f"indefinite entries at {A.indef_positions()}")
    if not A.is_nonneg():
        raise PreconditionError("sign-matrix has a negative entry")
    G = digraph_of(A)
    bad = _first_diag(A, ZERO)
    cycle = find_cycle(G)
    statements = {"graph": bad is None and cycle is None}
    perm = None
    try:
        perm = topo_permutation(G)
    except CycleError:
        pass
    statements["permutation"] = bad is None and perm is not None
    U = unit_sign(A).astype(float)
    n = A.rows
    cert = None
    if full_check:
        cert = lp_strict_feasible((U - np.eye(n)).T)
        statements["lp"] = cert is not None
        statements["nilpotent"] = is_nilpotent(U)
    verdict = _agree(statements)
    result = SignStabilityVerdict(verdict, statements, cert, perm if verdict else None, bad, cycle)
    if verdict and cert is None:
        result.lyapunov = triangular_lyapunov(U - np.eye(n), perm)
    return result


def is_nilpotent(U: np.ndarray) -> bool:
    """Exact nilpotency test for a nonnegative matrix via its zero pattern."""
    P = (np.asarray(U) != 0).astype(np.int64)
    n = P.shape[0]
    Q = P.copy()
    for _ in range(n):
        if not Q.any():
            return True
        Q = np.minimum(Q @ P, 1)
    return not Q.any()


def instability_witness(A: QualMatrix, background: float = 1e-3, target: float = 1e-6) -> np.ndarray:
    """A member of Q(A) that is not Hurwitz.

    A nonnegative diagonal entry set to ``+1`` gives abscissa at least one.
    Otherwise a cycle exists: the diagonal is ``-1``, ⊕ slots off the cycle
    get ``background`` and the first cycle edge gets a gain doubled from 1
    until the abscissa reaches ``target``. A pattern whose only defect is a
    zero diagonal entry (acyclic graph) has abscissa exactly 0 for every
    member, so the witness there has abscissa 0.
    """
    _check_input(A)
    codes = A.codes
    M = np.where(codes == POS, background, 0.0)
    M = M + np.diag(np.where(np.diag(codes) == NEG, -1.0, 0.0))
    pos_diag = np.nonzero(np.diag(codes) == POS)[0]
    if pos_diag.size:
        M[pos_diag, pos_diag] = 1.0
        return M
    cycle = find_cycle(digraph_of(A))
    if cycle is None:
        if _first_diag(A, NEG) is None:
            raise PreconditionError("sign-matrix is sign-stable; no instability witness exists")
        return M
    for a, b in zip(cycle, cycle[1:]):
        M[b, a] = 1.0
    v0, v1 = cycle[0], cycle[1]
    t = 1.0
    for _ in range(200):
        M[v1, v0] = t
        if spectral_abscissa_metzler(M) >= target:
            return M
        t *= 2
    raise RuntimeError("cycle gain search did not cross the stability boundary")
