"""Structural stability tests for positive systems built on the core deciders.

Each wrapper checks its preconditions, delegates to one decider and labels
the result. With ``samples > 0`` the defining inequality of each positive
verdict is re-validated on random realizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import IndefiniteError, InconsistencyError, PreconditionError, ShapeError
from .hull import (
    HullVerdict,
    QuadraticCertificate,
    common_linear_lyapunov,
    common_quadratic_lyapunov,
    hull_sign_stable,
    sign_summable,
)
from .kernel import KerBVerdict, ker_b_sign_stable
from .numkit import LpCertificate, lp_strict_feasible, validate_lp_point
from .qualcore import QualMatrix, Status, derived_seed, qual_sum, sample_qual
from .signstab import schur_sign_stable, sign_stable


@dataclass
class AppVerdict:
    status: Status
    detail: object = None
    certificates: dict[str, object] = field(default_factory=dict)
    notes: dict[str, object] = field(default_factory=dict)


def _same_shape(mats: Sequence[QualMatrix]) -> None:
    shapes = {M.shape for M in mats}
    if len(shapes) > 1:
        raise ShapeError(f"matrices have different shapes: {sorted(shapes)}")
    for M in mats:
        if not M.is_square():
            raise ShapeError("matrices must be square")
        if not M.is_definite():
            raise IndefiniteError("definite sign-matrices required")


def _status(flag: bool) -> Status:
    return Status.HOLDS if flag else Status.FAILS


def delay_ct_structural(M0: QualMatrix, delayed: Sequence[QualMatrix]) -> AppVerdict:
    """Delay-independent structural stability of ``x' = M0 x + sum_i M_i x(t - h_i)``.

    Holds iff the family is sign-summable and ``sum_i M_i`` is sign-stable.
    """
    mats = [M0, *delayed]
    _same_shape(mats)
    if not M0.is_metzler():
        raise PreconditionError("M0 must be Metzler")
    if not all(M.is_nonneg() for M in delayed):
        raise PreconditionError("delayed matrices must be nonnegative")
    ok, conflict = sign_summable(mats)
    if not ok:
        return AppVerdict(Status.FAILS, notes={"conflict": conflict})
    sv = sign_stable(qual_sum(mats))
    certs = {"lyapunov": sv.lyapunov.point} if sv.verdict and sv.lyapunov else {}
    return AppVerdict(_status(sv.verdict), sv, certs)


def delay_dt_structural(mats: Sequence[QualMatrix]) -> AppVerdict:
    """Structural stability of ``x(k+1) = sum_i M_i x(k - h_i)``: Schur sign-stability of the sum."""
    if not mats:
        raise ShapeError("need at least one matrix")
    _same_shape(mats)
    if not all(M.is_nonneg() for M in mats):
        raise PreconditionError("matrices must be nonnegative")
    sv = schur_sign_stable(qual_sum(list(mats)))
    certs = {"lyapunov": sv.lyapunov.point} if sv.verdict and sv.lyapunov else {}
    return AppVerdict(_status(sv.verdict), sv, certs)


def switched_structural(mats: Sequence[QualMatrix], samples: int = 0, seed: int = 0) -> AppVerdict:
    """Stability under arbitrary switching for every realization tuple.

    On Holds and ``samples > 0``, each sampled tuple receives a common linear
    vector ``v`` and a common diagonal ``Q``.
    """
    _same_shape(mats)
    hv: HullVerdict = hull_sign_stable(mats)
    out = AppVerdict(_status(hv.verdict), hv)
    if hv.verdict and samples:
        tuples = []
        for k in range(samples):
            rng = derived_seed(seed, k)
            tup = [sample_qual(M, rng) for M in mats]
            v = common_linear_lyapunov(tup)
            q: QuadraticCertificate = common_quadratic_lyapunov(tup)
            tuples.append({"v": v, "q": q.q, "max_eig": q.min_eigenvalues})
        out.certificates["tuples"] = tuples
    return out


def impulsive_structural(MA: QualMatrix, MJ: QualMatrix, samples: int = 0, seed: int = 0) -> AppVerdict:
    """Structural stability of ``x' = A x`` with resets ``x(t_k^+) = J x(t_k)``.

    Holds iff ``MA`` has an all-⊖ diagonal, ``MJ`` an all-zero diagonal and
    ``MA + MJ`` is sign-stable. Sampling validates one ``lam > 0`` with
    ``lam^T A < 0`` and ``lam^T (J - I) < 0`` per realization pair.
    """
    _same_shape([MA, MJ])
    if not MA.is_metzler():
        raise PreconditionError("MA must be Metzler")
    if not MJ.is_nonneg():
        raise PreconditionError("MJ must be nonnegative")
    diag_a = bool((np.diag(MA.codes) == -1).all())
    diag_j = bool((np.diag(MJ.codes) == 0).all())
    notes = {"MA_negative_diagonal": diag_a, "MJ_zero_diagonal": diag_j}
    if not (diag_a and diag_j):
        return AppVerdict(Status.FAILS, notes=notes)
    sv = sign_stable(qual_sum([MA, MJ]))
    out = AppVerdict(_status(sv.verdict), sv, notes=notes)
    if sv.verdict and samples:
        n = MA.rows
        lams = []
        for k in range(samples):
            rng = derived_seed(seed, k)
            A = sample_qual(MA, rng)
            J = sample_qual(MJ, rng)
            G = np.vstack([A.T, (J - np.eye(n)).T])
            cert: Optional[LpCertificate] = lp_strict_feasible(G)
            if cert is None or not validate_lp_point(G, cert.point):
                raise InconsistencyError(f"sample pair {k} admits no common vector", {"sample": k})
            lams.append(cert.point)
        out.certificates["lambda"] = lams
    return out


def nonlinear_invariance_structural(M: QualMatrix, B: np.ndarray, samples: int = 0, seed: int = 0,
                                    **caps) -> KerBVerdict:
    """Forward invariance and attractivity of a bounded set for a positive nonlinear system
    ``x' = M x + B f(x)``; delegates to the kernel-constrained test."""
    if not M.is_definite() or not M.is_metzler():
        raise PreconditionError("M must be a definite Metzler sign-matrix")
    verdict = ker_b_sign_stable(M, np.asarray(B, dtype=float), samples=samples, seed=seed, **caps)
    if verdict.sample_certificates:
        verdict.notes["epsilon"] = [float(margin / v.max()) for v, margin in verdict.sample_certificates]
    return verdict


@dataclass
class ReactionNetworkSigns:
    Z: QualMatrix
    S_b: np.ndarray
    irreducible_declared: bool = False

    def __post_init__(self) -> None:
        S_b = np.asarray(self.S_b)
        if S_b.ndim == 1:
            S_b = S_b[:, None]
        if not self.Z.is_square() or S_b.shape[0] != self.Z.rows:
            raise ShapeError(f"Z {self.Z.shape} and S_b {S_b.shape} are incompatible")
        object.__setattr__(self, "S_b", S_b)


def ergodicity_structural(net: ReactionNetworkSigns, samples: int = 0, seed: int = 0, **caps) -> KerBVerdict:
    """Structural exponential ergodicity of a stochastic reaction network.

    Holds (sufficient) when ``Z`` is sign-stable and every completion of the
    pattern of ``(Z^{-1} S_b)^T`` is L+. Indefinite entries in that pattern
    are reported; the answer is then Unknown, never Fails.
    """
    if not net.Z.is_definite() or not net.Z.is_metzler():
        raise PreconditionError("Z must be a definite Metzler sign-matrix")
    verdict = ker_b_sign_stable(net.Z, np.asarray(net.S_b, dtype=float), samples=samples, seed=seed, **caps)
    if verdict.indefinite_positions:
        verdict.status = Status.UNKNOWN
        verdict.notes["indefinite"] = verdict.indefinite_positions
    verdict.notes["irreducible_declared"] = net.irreducible_declared
    return verdict
