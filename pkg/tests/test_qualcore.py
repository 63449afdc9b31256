from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metzsign.errors import IndefiniteError, ShapeError
from metzsign.qualcore import (
    MixedMatrix,
    QualMatrix,
    Sign,
    in_qualitative_class,
    qual_add,
    qual_mul,
    sample_qual,
    sign_add,
    sign_mul,
    unit_sign,
)

ALL = list(Sign)
N, Z, P, I = Sign.NEG, Sign.ZERO, Sign.POS, Sign.INDEF


def test_sign_add_examples():
    assert P + P is P
    assert P + N is I
    assert Z + Z is Z


def test_sign_mul_examples():
    assert P * P is P
    assert Z * P is Z
    assert N * N is P


def test_sign_tables_exhaustive():
    for a, b in itertools.product(ALL, ALL):
        assert sign_add(a, b) is sign_add(b, a)
        assert sign_mul(a, b) is sign_mul(b, a)
    for a in ALL:
        assert sign_add(Z, a) is a
        assert sign_mul(Z, a) is Z
        assert sign_add(I, a) is I
    assert sign_mul(I, N) is I and sign_mul(I, I) is I
    assert sign_mul(N, P) is N


def test_sign_order_and_parse():
    assert N < Z < P
    with pytest.raises(TypeError):
        _ = I < P
    assert Sign.parse("⊕") is P and Sign.parse("⊖") is N and Sign.parse("⊙") is I
    with pytest.raises(ValueError):
        Sign.parse("x")


def test_qual_add_examples():
    assert qual_add(QualMatrix.parse("-"), QualMatrix.parse("-")) == QualMatrix.parse("-")
    assert qual_add(QualMatrix.parse("+"), QualMatrix.parse("-")) == QualMatrix.parse("?")
    A = QualMatrix.parse("- + ; ? 0")
    assert QualMatrix.zeros(2, 2) + A == A
    with pytest.raises(ShapeError):
        qual_add(A, QualMatrix.zeros(1, 2))


def test_qual_mul_examples():
    col = QualMatrix.parse("+ ; +")
    assert qual_mul(col, QualMatrix.parse("+ +")) == QualMatrix.parse("+ + ; + +")
    assert qual_mul(col, QualMatrix.parse("+ 0")) == QualMatrix.parse("+ 0 ; + 0")
    A = QualMatrix.parse("- + 0 ; ? 0 - ; + + +")
    assert QualMatrix.identity(3) @ A == A
    assert QualMatrix.parse("+ -") @ QualMatrix.parse("+ ; +") == QualMatrix.parse("?")
    with pytest.raises(ShapeError):
        qual_mul(col, col)


def test_unit_sign_examples():
    assert unit_sign(QualMatrix.parse("- + ; + -")).tolist() == [[-1, 1], [1, -1]]
    assert unit_sign(QualMatrix.zeros(2, 3)).tolist() == [[0, 0, 0], [0, 0, 0]]
    A = QualMatrix.parse("- + + ; - - - ; 0 + -")
    assert unit_sign(A).tolist() == [[-1, 1, 1], [-1, -1, -1], [0, 1, -1]]
    with pytest.raises(IndefiniteError):
        unit_sign(QualMatrix.parse("?"))


def test_in_qualitative_class_examples():
    A = QualMatrix.parse("- + ; 0 -")
    assert in_qualitative_class(np.array([[-2, 0.5], [0, -1]]), A)
    assert not in_qualitative_class(np.array([[-2, 0], [0, -1]]), A)
    Zm = QualMatrix.zeros(2, 2)
    assert in_qualitative_class(np.zeros((2, 2)), Zm)
    assert not in_qualitative_class(np.array([[0, 1e-300], [0, 0]]), Zm)
    with pytest.raises(ShapeError):
        in_qualitative_class(np.zeros((3, 3)), A)


def test_predicates():
    A = QualMatrix.parse("- + ; 0 -")
    assert A.is_definite() and A.is_metzler() and not A.is_nonneg()
    assert not QualMatrix.parse("- - ; + -").is_metzler()
    assert not QualMatrix.parse("- + 0").is_metzler()
    assert QualMatrix.parse("0 + ; + 0").is_nonneg()
    assert not QualMatrix.parse("? 0").is_definite()


def test_sample_simple_and_deterministic():
    A = QualMatrix.parse("-")
    M = sample_qual(A, 5)
    assert M.shape == (1, 1) and M[0, 0] < 0
    B = QualMatrix.parse("- + 0 ; + - + ; 0 0 -")
    assert np.array_equal(sample_qual(B, 11, 3.0), sample_qual(B, 11, 3.0))
    with pytest.raises(IndefiniteError):
        sample_qual(QualMatrix.parse("?"), 0)


def test_sample_magnitude_range():
    A = QualMatrix(np.ones((20, 20), dtype=np.int8))
    for scale in (1.0, 10.0, 0.01):
        M = sample_qual(A, 3, scale)
        lo, hi = sorted((0.1 / scale, 10 * scale))
        assert M.min() >= lo and M.max() <= hi


sign_codes = st.sampled_from([-1, 0, 1])


@st.composite
def definite(draw, rows=None, cols=None, nonneg=False):
    r = draw(st.integers(1, 5)) if rows is None else rows
    c = draw(st.integers(1, 5)) if cols is None else cols
    vals = st.sampled_from([0, 1]) if nonneg else sign_codes
    codes = draw(st.lists(st.lists(vals, min_size=c, max_size=c), min_size=r, max_size=r))
    return QualMatrix(np.array(codes, dtype=np.int8))


@settings(max_examples=1000, deadline=None)
@given(definite(), st.integers(0, 2**63 - 1))
def test_sample_lies_in_class(A, seed):
    assert in_qualitative_class(sample_qual(A, seed), A)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_product_containment(data):
    r, k, c = (data.draw(st.integers(1, 4)) for _ in range(3))
    A = data.draw(definite(r, k, nonneg=True))
    B = data.draw(definite(k, c, nonneg=True))
    seed = data.draw(st.integers(0, 2**32))
    MA, MB = sample_qual(A, seed), sample_qual(B, seed + 1)
    assert in_qualitative_class(MA @ MB, qual_mul(A, B))


@settings(max_examples=200, deadline=None)
@given(definite(), st.floats(1e-6, 1e6))
def test_unit_sign_in_class_and_scaling(A, alpha):
    U = unit_sign(A).astype(float)
    assert in_qualitative_class(U, A)
    assert in_qualitative_class(alpha * sample_qual(A, 1), A)


def test_mixed_matrix_conversions():
    X = MixedMatrix.of([[N, P, 1.0], [Z, N, 0.0], [2.0, 0.0, -1.5]])
    assert X.shape == (3, 3)
    assert X.block(slice(0, 2), slice(0, 2)).to_qual() == QualMatrix.parse("- + ; 0 -")
    assert X.block(slice(2, 3), slice(0, 3)).to_real().tolist() == [[2.0, 0.0, -1.5]]
    assert X.nonzero_mask().tolist() == [[True, True, True], [False, True, False], [True, False, True]]
    with pytest.raises(ValueError):
        X.to_real()
    with pytest.raises(ShapeError):
        MixedMatrix.of([[1.0], [1.0, 2.0]])
