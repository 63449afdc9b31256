from __future__ import annotations

import numpy as np
import pytest

from helpers import random_mixed_system
from metzsign.errors import NotMetzlerError, PreconditionError, ShapeError
from metzsign.mixedstab import MixedSystem, m_phi, m_sigma, mixed_instability_witness, mixed_sign_stable
from metzsign.numkit import spectral_abscissa_metzler
from metzsign.qualcore import QualMatrix, in_qualitative_class, sample_qual

Q = QualMatrix.parse
A_SIGMA = Q("- + ; 0 -")
A_PHI = np.array([[-1.0, 2.0], [1.0, -5.0]])
C_PHI = np.array([[1.0, 0.0], [0.0, 0.0]])


def example(variant: int) -> MixedSystem:
    B = np.array([[0.0, 0.0], [0.0, 1.0]]) if variant == 1 else np.array([[0.0, 0.0], [1.0, 0.0]])
    return MixedSystem(A_SIGMA, A_PHI, B, C_PHI)


def test_variant_one_values():
    sys = example(1)
    assert np.allclose(m_phi(sys), -(2 / 3) * np.array([[0.0, 1.0], [0.0, 0.0]]), atol=1e-14)
    assert np.array_equal(m_sigma(sys), -np.array([[1, 1], [0, 1]]))
    res = mixed_sign_stable(sys)
    assert res.verdict and set(res.statements.values()) == {True}
    assert np.allclose(m_sigma(sys) @ m_phi(sys), (2 / 3) * np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert res.spectral_radius == pytest.approx(0.0, abs=1e-12)


def test_variant_two_not_sign_stable():
    sys = example(2)
    assert np.allclose(m_phi(sys), -(2 / 3) * np.array([[1.0, 0.0], [0.0, 0.0]]), atol=1e-14)
    res = mixed_sign_stable(sys)
    assert not res.verdict and set(res.statements.values()) == {False}
    assert res.spectral_radius == pytest.approx(2 / 3, abs=1e-12)
    W = mixed_instability_witness(sys, target=1e-6)
    assert in_qualitative_class(W, A_SIGMA)
    assert spectral_abscissa_metzler(sys.realize(W)) >= 1e-6


def test_decoupled_blocks():
    sys = MixedSystem(A_SIGMA, A_PHI, np.zeros((2, 2)), np.zeros((2, 2)))
    assert np.array_equal(m_phi(sys), np.zeros((2, 2)))
    assert mixed_sign_stable(sys).verdict
    bad = MixedSystem(Q("- + ; + -"), A_PHI, np.zeros((2, 2)), np.zeros((2, 2)))
    res = mixed_sign_stable(bad)
    assert not res.verdict and not res.sigma_stable
    unstable_phi = MixedSystem(A_SIGMA, np.array([[-1.0, 2.0], [1.0, -1.0]]), np.zeros((2, 2)), np.zeros((2, 2)))
    assert not mixed_sign_stable(unstable_phi).phi_hurwitz


def test_m_sigma_examples():
    diag = MixedSystem(Q("- 0 ; 0 -"), A_PHI, np.zeros((2, 2)), np.zeros((2, 2)))
    assert np.array_equal(m_sigma(diag), -np.eye(2, dtype=int))
    with pytest.raises(PreconditionError):
        m_sigma(MixedSystem(Q("- + ; + -"), A_PHI, np.zeros((2, 2)), np.zeros((2, 2))))


def test_input_validation():
    with pytest.raises(ShapeError):
        MixedSystem(A_SIGMA, A_PHI, np.zeros((2, 3)), C_PHI)
    with pytest.raises(NotMetzlerError):
        MixedSystem(A_SIGMA, -A_PHI, np.zeros((2, 2)), C_PHI)
    with pytest.raises(PreconditionError):
        MixedSystem(A_SIGMA, A_PHI, -np.ones((2, 2)), C_PHI)


def test_round_trip_through_mixed_matrix():
    sys = example(1)
    X = sys.to_mixed()
    assert X.block(slice(0, 2), slice(0, 2)).to_qual() == A_SIGMA
    back = MixedSystem.from_mixed(X, 2)
    assert back.A_sigma == A_SIGMA and np.array_equal(back.B_phi, sys.B_phi)


def test_random_mixed_statements_agree_and_are_sound():
    rng = np.random.default_rng(606)
    stable = unstable = 0
    for _ in range(200):
        sys = random_mixed_system(rng)
        res = mixed_sign_stable(sys)
        if res.verdict:
            stable += 1
            for k in range(20):
                M = sample_qual(sys.A_sigma, int(rng.integers(2**32)))
                R = sys.realize(M)
                assert spectral_abscissa_metzler(R) < 1e-9 * (1 + np.abs(R).max())
        elif res.sigma_stable and res.phi_hurwitz:
            unstable += 1
            W = mixed_instability_witness(sys, target=1e-6)
            assert spectral_abscissa_metzler(sys.realize(W)) >= 1e-6
    assert stable > 10 and unstable > 10
