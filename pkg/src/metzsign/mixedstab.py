"""Sign-stability of mixed matrices ``[[A_s, C], [B, A_p]]``.

``A_s`` is a Metzler sign-matrix, ``A_p`` a real Metzler matrix and the
couplings ``B`` (``n_p x n_s``) and ``C`` (``n_s x n_p``) are real and
nonnegative. The mixed matrix is sign-stable when every choice of
``M`` in Q(A_s) makes the assembled real matrix Hurwitz.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InconsistencyError, NotMetzlerError, PreconditionError, ShapeError
from .graphkit import bipartite_cycle_free, digraph_of, reachability
from .kernel import sign_inverse
from .numkit import hurwitz_metzler, inf_norm, lp_strict_feasible, real_inverse, spectral_abscissa_metzler
from .qualcore import MixedMatrix, QualMatrix, derived_seed, is_metzler, is_nonneg, sample_qual, unit_sign
from .signstab import instability_witness, schur_sign_stable, sign_stable

PATTERN_TOL = 1e-10


@dataclass(frozen=True)
class MixedSystem:
    A_sigma: QualMatrix
    A_phi: np.ndarray
    B_phi: np.ndarray
    C_phi: np.ndarray

    def __post_init__(self) -> None:
        ns, npp = self.A_sigma.rows, np.asarray(self.A_phi).shape[0]
        A_phi = np.asarray(self.A_phi, dtype=float)
        B, C = np.asarray(self.B_phi, dtype=float), np.asarray(self.C_phi, dtype=float)
        if not self.A_sigma.is_square() or A_phi.shape != (npp, npp):
            raise ShapeError("diagonal blocks must be square")
        if B.shape != (npp, ns) or C.shape != (ns, npp):
            raise ShapeError(f"coupling shapes {B.shape}, {C.shape} do not fit blocks {ns} and {npp}")
        if not self.A_sigma.is_definite() or not self.A_sigma.is_metzler():
            raise PreconditionError("sign block must be a definite Metzler sign-matrix")
        if not is_metzler(A_phi):
            raise NotMetzlerError("real block")
        if not (is_nonneg(B) and is_nonneg(C)):
            raise PreconditionError("coupling blocks must be nonnegative")
        for name, X in (("A_phi", A_phi), ("B_phi", B), ("C_phi", C)):
            if not np.isfinite(X).all():
                raise ValueError(f"{name} has non-finite entries")
        object.__setattr__(self, "A_phi", A_phi)
        object.__setattr__(self, "B_phi", B)
        object.__setattr__(self, "C_phi", C)

    @property
    def n_sigma(self) -> int:
        return self.A_sigma.rows

    @property
    def n_phi(self) -> int:
        return self.A_phi.shape[0]

    def realize(self, M: np.ndarray) -> np.ndarray:
        """Assembled real matrix for a member ``M`` of Q(A_s)."""
        return np.block([[M, self.C_phi], [self.B_phi, self.A_phi]])

    def to_mixed(self) -> MixedMatrix:
        ns = self.n_sigma
        rows = []
        for i in range(ns):
            rows.append([self.A_sigma[i, j] for j in range(ns)] + [float(x) for x in self.C_phi[i]])
        for i in range(self.n_phi):
            rows.append([float(x) for x in self.B_phi[i]] + [float(x) for x in self.A_phi[i]])
        return MixedMatrix.of(rows)

    @classmethod
    def from_mixed(cls, X: MixedMatrix, n_sigma: int) -> "MixedSystem":
        n = X.shape[0]
        if X.shape[1] != n or not 0 < n_sigma < n:
            raise ShapeError(f"cannot split a {X.shape} matrix at {n_sigma}")
        s, p = slice(0, n_sigma), slice(n_sigma, n)
        return cls(X.block(s, s).to_qual(), X.block(p, p).to_real(), X.block(p, s).to_real(), X.block(s, p).to_real())


def m_phi(sys: MixedSystem) -> np.ndarray:
    """``C A_p^{-1} B``; nonpositive whenever ``A_p`` is Hurwitz."""
    if not hurwitz_metzler(sys.A_phi).verdict:
        raise PreconditionError("real block is not Hurwitz")
    return sys.C_phi @ real_inverse(sys.A_phi) @ sys.B_phi


def m_sigma(sys: MixedSystem) -> np.ndarray:
    """``sgn(A_s^{-1})`` as an integer matrix."""
    return unit_sign(sign_inverse(sys.A_sigma))


def _pattern(M: np.ndarray, scale: float) -> np.ndarray:
    return np.abs(M) > PATTERN_TOL * scale


@dataclass
class MixedVerdict:
    verdict: bool
    sigma_stable: bool
    phi_hurwitz: bool
    statements: dict[str, bool] = field(default_factory=dict)
    m_phi: Optional[np.ndarray] = None
    m_sigma: Optional[np.ndarray] = None
    product_pattern: Optional[np.ndarray] = None
    spectral_radius: Optional[float] = None
    cycle: Optional[list[int]] = None
    lp_point: Optional[np.ndarray] = None


def _agree(statements: dict[str, bool]) -> bool:
    if len(set(statements.values())) != 1:
        raise InconsistencyError("equivalent mixed sign-stability statements disagree", statements)
    return next(iter(statements.values()))


def mixed_sign_stable(sys: MixedSystem, full_check: bool = True) -> MixedVerdict:
    """Decide sign-stability of the mixed matrix.

    Primary route: ``A_s`` sign-stable, ``A_p`` Hurwitz and the pattern of
    ``M_s M_p`` nilpotent. With ``full_check`` the bipartite-cycle route, the
    mixed-cycle route on the assembled graph and the joint LP also run and
    must agree.
    """
    s_ok = sign_stable(sys.A_sigma, witness=False).verdict
    p_ok = hurwitz_metzler(sys.A_phi).verdict
    out = MixedVerdict(False, s_ok, p_ok)
    if not (s_ok and p_ok):
        out.statements = {"product": False}
        return out
    Mp = m_phi(sys)
    Ms = m_sigma(sys)
    Pp = _pattern(Mp, inf_norm(Mp))
    Ps = Ms != 0
    prod = (Ps.astype(np.int64) @ Pp.astype(np.int64)) > 0
    out.m_phi, out.m_sigma, out.product_pattern = Mp, Ms, prod
    out.spectral_radius = float(np.abs(np.linalg.eigvals(Ms @ Mp)).max())
    stmts = {"product": schur_sign_stable(QualMatrix(prod.astype(np.int8))).verdict}
    if full_check:
        free, cycle = bipartite_cycle_free(QualMatrix(Ps.astype(np.int8)), QualMatrix(Pp.astype(np.int8)))
        stmts["bipartite"] = free
        out.cycle = cycle
        stmts["mixed_cycle"] = not _has_mixed_cycle(sys)
        point = _joint_lp(sys, Pp, Ps)
        stmts["lp"] = point is not None
        out.lp_point = point
    out.verdict = _agree(stmts)
    out.statements = stmts
    return out


def _has_mixed_cycle(sys: MixedSystem) -> bool:
    """Some cycle of the assembled graph visits both a sign node and a real node."""
    X = np.zeros((sys.n_sigma + sys.n_phi,) * 2, dtype=bool)
    ns = sys.n_sigma
    X[:ns, :ns] = sys.A_sigma.nonzero_mask()
    X[:ns, ns:] = sys.C_phi != 0
    X[ns:, :ns] = sys.B_phi != 0
    X[ns:, ns:] = sys.A_phi != 0
    R = reachability(digraph_of(X))
    return bool((R[:ns, ns:] & R[ns:, :ns].T).any())


def _joint_lp(sys: MixedSystem, Pp: np.ndarray, Ps: np.ndarray) -> Optional[np.ndarray]:
    """Find ``v, z > 0`` and ``w > 0`` with ``v^T sgn(A_s) < 0``, ``w^T A_p < 0``
    and ``z^T (sgn(M_s M_p) - I) < 0``; returns the stacked point ``(v, w, z)``."""
    ns, npp = sys.n_sigma, sys.n_phi
    S = unit_sign(sys.A_sigma).astype(float)
    P2 = ((Ps.astype(np.int64) @ Pp.astype(np.int64)) > 0).astype(float) - np.eye(ns)
    n = 2 * ns + npp
    G = np.zeros((n, n))
    G[:ns, :ns] = S.T
    G[ns:ns + npp, ns:ns + npp] = sys.A_phi.T
    G[ns + npp:, ns + npp:] = P2.T
    cert = lp_strict_feasible(G)
    return None if cert is None else cert.point


def mixed_instability_witness(sys: MixedSystem, seed: int = 0, target: float = 1e-9) -> np.ndarray:
    """A member ``M`` of Q(A_s) for which the assembled matrix has abscissa ``>= target``.

    The default target is positive: shrinking a stable ``M`` alone drives the
    abscissa towards zero from below, so a positive target separates genuine
    instability from that effect.
    """
    verdict = mixed_sign_stable(sys, full_check=False)
    if verdict.verdict:
        raise PreconditionError("mixed matrix is sign-stable; no witness exists")
    if not verdict.sigma_stable:
        return instability_witness(sys.A_sigma)
    M = sample_qual(sys.A_sigma, derived_seed(seed, 0))
    if not verdict.phi_hurwitz:
        return M
    # Shrinking M lets -M_phi dominate M - M_phi, whose pattern has a cycle.
    alpha = 1.0
    for _ in range(400):
        if spectral_abscissa_metzler(sys.realize(alpha * M)) >= target:
            return alpha * M
        alpha /= 2
    raise RuntimeError("no unstable realization found by shrinking")
