from __future__ import annotations

import numpy as np
import pytest

from helpers import random_metzler_pattern, random_nonneg_pattern, random_stable_pattern
from metzsign.errors import IndefiniteError, NotMetzlerError, PreconditionError
from metzsign.numkit import hurwitz_metzler, spectral_abscissa_metzler
from metzsign.qualcore import QualMatrix, in_qualitative_class, sample_qual
from metzsign.signstab import (
    instability_witness,
    is_nilpotent,
    necessary_violations,
    potentially_sign_stable,
    schur_sign_stable,
    sign_stable,
)

CYC = QualMatrix.parse("- + ; + -")
NON_METZLER = QualMatrix.parse("- - ; + -")


def test_sign_stable_examples():
    res = sign_stable(CYC, full_check=True)
    assert not res and res.cycle == [0, 1, 0]
    tri = sign_stable(QualMatrix.parse("- + ; 0 -"), full_check=True)
    assert tri and tri.permutation.tolist() == [0, 1]
    assert (tri.lyapunov.point @ np.array([[-1.0, 1.0], [0.0, -1.0]]) < 0).all()
    assert sign_stable(QualMatrix(-np.eye(5, dtype=np.int8)))
    with pytest.raises(NotMetzlerError):
        sign_stable(NON_METZLER)
    with pytest.raises(IndefiniteError):
        sign_stable(QualMatrix.parse("- ? ; 0 -"))


def test_sign_stable_reports_bad_diagonal():
    res = sign_stable(QualMatrix.parse("0 + ; 0 -"))
    assert not res and res.bad_diagonal == 0 and res.cycle is None


def test_potentially_sign_stable_examples():
    ok, M = potentially_sign_stable(CYC)
    assert ok and in_qualitative_class(M, CYC) and hurwitz_metzler(M).verdict
    assert potentially_sign_stable(QualMatrix.parse("- + ; 0 0")) == (False, None)
    rng = np.random.default_rng(4)
    for _ in range(50):
        A = random_stable_pattern(rng, int(rng.integers(1, 7)))
        assert potentially_sign_stable(A)[0]


def test_necessary_violations_examples():
    kinds = {v.kind for v in necessary_violations(CYC)}
    assert kinds == {"pair", "cycle", "irreducible"}
    assert necessary_violations(QualMatrix.parse("- + ; 0 -")) == []
    assert "diagonal" in {v.kind for v in necessary_violations(QualMatrix.parse("0 + ; 0 -"))}


def test_necessary_violations_empty_iff_sign_stable():
    rng = np.random.default_rng(17)
    for _ in range(300):
        A = random_metzler_pattern(rng, int(rng.integers(1, 7)))
        assert (not necessary_violations(A)) == bool(sign_stable(A, witness=False))


def test_schur_sign_stable_examples():
    assert schur_sign_stable(QualMatrix.parse("0 + ; 0 0"), full_check=True)
    res = schur_sign_stable(QualMatrix.parse("+ 0 ; 0 0"), full_check=True)
    assert not res and res.bad_diagonal == 0
    res = schur_sign_stable(QualMatrix.parse("0 + ; + 0"), full_check=True)
    assert not res and res.cycle == [0, 1, 0]
    with pytest.raises(PreconditionError):
        schur_sign_stable(QualMatrix.parse("- 0 ; 0 0"))


def test_schur_routes_agree_and_are_sound():
    rng = np.random.default_rng(31)
    for _ in range(300):
        n = int(rng.integers(1, 7))
        A = random_nonneg_pattern(rng, (n, n), rng.uniform(0.05, 0.4))
        if rng.random() < 0.6:
            codes = np.triu(A.codes, k=1)
            perm = rng.permutation(n)
            A = QualMatrix(codes[np.ix_(perm, perm)])
        res = schur_sign_stable(A, full_check=True)
        M = sample_qual(A, int(rng.integers(2**32)))
        rho = float(np.abs(np.linalg.eigvals(M)).max())
        if res:
            assert is_nilpotent(M) and rho < 1
        else:
            # Scaling up a non-nilpotent nonnegative matrix reaches radius >= 1.
            assert not is_nilpotent(M)


def test_instability_witness_examples():
    W = instability_witness(CYC)
    assert np.array_equal(W, np.array([[-1.0, 1.0], [2.0, -1.0]]))
    assert spectral_abscissa_metzler(W) == pytest.approx(np.sqrt(2) - 1, abs=1e-9)
    Z = QualMatrix.parse("0 + ; 0 -")
    W = instability_witness(Z)
    assert in_qualitative_class(W, Z)
    assert float(np.linalg.eigvals(W).real.max()) >= -1e-12
    with pytest.raises(PreconditionError):
        instability_witness(QualMatrix.parse("- + ; 0 -"))


def test_sign_stable_routes_agree_and_witnesses_valid():
    rng = np.random.default_rng(2718)
    for _ in range(400):
        A = random_metzler_pattern(rng, int(rng.integers(1, 9)))
        res = sign_stable(A, full_check=True)
        assert len(set(res.statements.values())) == 1
        if res:
            assert hurwitz_metzler(sample_qual(A, int(rng.integers(2**32)))).verdict
        else:
            W = res.counterexample
            assert in_qualitative_class(W, A)
            assert spectral_abscissa_metzler(W) >= -1e-9
