"""Sign algebra, sign-matrix containers and qualitative classes.

Sign-matrices are stored as small integer code arrays (``-1, 0, 1`` for the
definite signs, ``2`` for the indefinite sign) wrapped in an immutable
:class:`QualMatrix`. Real matrices are plain ``numpy`` float arrays and
integer matrices plain ``numpy`` int arrays.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import IndefiniteError, ShapeError

NEG, ZERO, POS, INDEF = -1, 0, 1, 2


class Sign(enum.Enum):
    NEG = NEG
    ZERO = ZERO
    POS = POS
    INDEF = INDEF

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self.value]

    @property
    def is_definite(self) -> bool:
        return self is not Sign.INDEF

    @classmethod
    def parse(cls, token: str) -> "Sign":
        try:
            return cls(_TOKENS[token])
        except KeyError:
            raise ValueError(f"not a sign token: {token!r}") from None

    def _key(self, other: object) -> tuple[int, int]:
        if not isinstance(other, Sign):
            return NotImplemented  # type: ignore[return-value]
        if Sign.INDEF in (self, other):
            raise TypeError("the indefinite sign is unordered")
        return self.value, other.value

    def __lt__(self, other: object) -> bool:
        a, b = self._key(other)
        return a < b

    def __le__(self, other: object) -> bool:
        a, b = self._key(other)
        return a <= b

    def __gt__(self, other: object) -> bool:
        a, b = self._key(other)
        return a > b

    def __ge__(self, other: object) -> bool:
        a, b = self._key(other)
        return a >= b

    def __add__(self, other: "Sign") -> "Sign":
        return sign_add(self, other)

    def __mul__(self, other: "Sign") -> "Sign":
        return sign_mul(self, other)

    def __str__(self) -> str:
        return self.symbol


_SYMBOLS = {NEG: "-", ZERO: "0", POS: "+", INDEF: "?"}
_TOKENS = {
    "-": NEG, "0": ZERO, "+": POS, "?": INDEF,
    "⊖": NEG, "⊕": POS, "⊙": INDEF,  # ⊖ ⊕ ⊙
}


class Status(enum.Enum):
    """Tri-state outcome of a decision procedure."""

    HOLDS = "holds"
    FAILS = "fails"
    UNKNOWN = "unknown"

    def __bool__(self) -> bool:
        return self is Status.HOLDS


# Tables are indexed by ``code & 3`` so that NEG (-1) lands on slot 3.
_ADD = np.zeros((4, 4), dtype=np.int8)
_MUL = np.zeros((4, 4), dtype=np.int8)


def _fill_tables() -> None:
    codes = (NEG, ZERO, POS, INDEF)
    for a in codes:
        for b in codes:
            if a == ZERO:
                s = b
            elif b == ZERO:
                s = a
            elif a == b:
                s = a
            else:
                s = INDEF
            if ZERO in (a, b):
                m = ZERO
            elif INDEF in (a, b):
                m = INDEF
            else:
                m = a * b
            _ADD[a & 3, b & 3] = s
            _MUL[a & 3, b & 3] = m


_fill_tables()
_ADD.setflags(write=False)
_MUL.setflags(write=False)


def sign_add(a: Sign, b: Sign) -> Sign:
    return Sign(int(_ADD[a.value & 3, b.value & 3]))


def sign_mul(a: Sign, b: Sign) -> Sign:
    return Sign(int(_MUL[a.value & 3, b.value & 3]))


SignLike = Union[Sign, str, int]


def _code_of(x: SignLike) -> int:
    if isinstance(x, Sign):
        return x.value
    if isinstance(x, str):
        return Sign.parse(x).value
    if isinstance(x, (int, np.integer)) and int(x) in _SYMBOLS:
        return int(x)
    raise ValueError(f"cannot interpret {x!r} as a sign")


class QualMatrix:
    """Immutable matrix over {⊖, 0, ⊕, ⊙}.

    Build from nested sequences of :class:`Sign`, sign tokens or integer codes,
    or from a compact string with ``;`` separating rows::

        QualMatrix.parse("- + ; 0 -")
    """

    __slots__ = ("_codes",)

    def __init__(self, entries: Iterable[Iterable[SignLike]] | np.ndarray) -> None:
        if isinstance(entries, np.ndarray) and entries.dtype.kind in "iu":
            codes = np.array(entries, dtype=np.int8)
            if codes.ndim != 2 or not np.isin(codes, (NEG, ZERO, POS, INDEF)).all():
                raise ValueError("invalid sign code array")
        else:
            rows = [[_code_of(x) for x in row] for row in entries]
            if not rows or len({len(r) for r in rows}) != 1 or not rows[0]:
                raise ShapeError("sign-matrix rows must be nonempty and of equal length")
            codes = np.array(rows, dtype=np.int8)
        codes.setflags(write=False)
        self._codes = codes

    @classmethod
    def parse(cls, text: str) -> "QualMatrix":
        return cls([row.split() for row in text.split(";")])

    @classmethod
    def from_real(cls, M: np.ndarray, tol: float = 0.0) -> "QualMatrix":
        """Sign pattern of a real matrix; entries with ``|x| <= tol`` map to 0."""
        M = np.asarray(M, dtype=float)
        codes = np.where(np.abs(M) <= tol, 0, np.sign(M)).astype(np.int8)
        return cls(codes)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QualMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int8))

    @classmethod
    def identity(cls, n: int) -> "QualMatrix":
        """Sign identity: ⊕ on the diagonal."""
        return cls(np.eye(n, dtype=np.int8))

    @property
    def codes(self) -> np.ndarray:
        return self._codes

    @property
    def shape(self) -> tuple[int, int]:
        return self._codes.shape  # type: ignore[return-value]

    @property
    def rows(self) -> int:
        return self._codes.shape[0]

    @property
    def cols(self) -> int:
        return self._codes.shape[1]

    def __getitem__(self, ij: tuple[int, int]) -> Sign:
        return Sign(int(self._codes[ij]))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QualMatrix):
            return NotImplemented
        return self.shape == other.shape and bool((self._codes == other._codes).all())

    def __hash__(self) -> int:
        return hash((self.shape, self._codes.tobytes()))

    def __repr__(self) -> str:
        return f"QualMatrix.parse({self.to_string()!r})"

    def to_string(self) -> str:
        return " ; ".join(" ".join(_SYMBOLS[int(c)] for c in row) for row in self._codes)

    def to_rows(self) -> list[list[str]]:
        return [[_SYMBOLS[int(c)] for c in row] for row in self._codes]

    def __add__(self, other: "QualMatrix") -> "QualMatrix":
        return qual_add(self, other)

    def __matmul__(self, other: "QualMatrix") -> "QualMatrix":
        return qual_mul(self, other)

    @property
    def T(self) -> "QualMatrix":
        return QualMatrix(self._codes.T.copy())

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_definite(self) -> bool:
        return not (self._codes == INDEF).any()

    def is_nonneg(self) -> bool:
        return bool(np.isin(self._codes, (ZERO, POS)).all())

    def is_metzler(self) -> bool:
        if not self.is_square():
            return False
        off = ~np.eye(self.rows, dtype=bool)
        return bool(np.isin(self._codes[off], (ZERO, POS)).all())

    def diagonal(self) -> list[Sign]:
        return [Sign(int(c)) for c in np.diag(self._codes)]

    def indef_positions(self) -> list[tuple[int, int]]:
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self._codes == INDEF))]

    def nonzero_mask(self) -> np.ndarray:
        return self._codes != ZERO

    def replace_diagonal(self, sign: Sign) -> "QualMatrix":
        codes = self._codes.copy()
        np.fill_diagonal(codes, sign.value)
        return QualMatrix(codes)


def is_metzler(M: np.ndarray) -> bool:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    off = ~np.eye(M.shape[0], dtype=bool)
    return bool((M[off] >= 0).all())


def is_nonneg(M: np.ndarray) -> bool:
    return bool((np.asarray(M) >= 0).all())


def _check_same_shape(A: QualMatrix, B: QualMatrix) -> None:
    if A.shape != B.shape:
        raise ShapeError(f"shape mismatch: {A.shape} vs {B.shape}")


def qual_add(A: QualMatrix, B: QualMatrix) -> QualMatrix:
    _check_same_shape(A, B)
    return QualMatrix(_ADD[A.codes & 3, B.codes & 3])


def qual_mul(A: QualMatrix, B: QualMatrix) -> QualMatrix:
    """Matrix product over (sign_add, sign_mul); may produce ⊙ entries."""
    if A.cols != B.rows:
        raise ShapeError(f"inner dimensions differ: {A.shape} @ {B.shape}")
    a, b = A.codes & 3, B.codes & 3
    out = np.zeros((A.rows, B.cols), dtype=np.int8)
    for k in range(A.cols):
        term = _MUL[a[:, k][:, None], b[k, :][None, :]]
        out = _ADD[out & 3, term & 3]
    return QualMatrix(out)


def qual_sum(mats: Sequence[QualMatrix]) -> QualMatrix:
    if not mats:
        raise ValueError("empty sum")
    total = mats[0]
    for M in mats[1:]:
        total = qual_add(total, M)
    return total


def _require_definite(A: QualMatrix) -> None:
    if not A.is_definite():
        raise IndefiniteError(f"indefinite entries at {A.indef_positions()}")


def unit_sign(A: QualMatrix) -> np.ndarray:
    """The {-1, 0, 1} representative sgn(A) of a definite sign-matrix."""
    _require_definite(A)
    return A.codes.astype(np.int64)


def in_qualitative_class(M: np.ndarray, A: QualMatrix) -> bool:
    M = np.asarray(M, dtype=float)
    if M.shape != A.shape:
        raise ShapeError(f"shape mismatch: {M.shape} vs {A.shape}")
    _require_definite(A)
    if not np.isfinite(M).all():
        return False
    return bool((np.sign(M).astype(np.int8) == A.codes).all())


def magnitude_range(scale: float) -> tuple[float, float]:
    lo, hi = 0.1 / scale, 10.0 * scale
    return (lo, hi) if lo <= hi else (hi, lo)


def sample_qual(A: QualMatrix, seed: int | np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Draw a member of Q(A) with log-uniform magnitudes.

    Magnitudes lie in ``[0.1/scale, 10*scale]`` (endpoints swapped when
    ``scale < 1``).
    """
    _require_definite(A)
    if not scale > 0:
        raise ValueError("scale must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    lo, hi = magnitude_range(scale)
    mags = np.exp(rng.uniform(np.log(lo), np.log(hi), size=A.shape))
    return A.codes.astype(float) * mags


def sample_many(A: QualMatrix, count: int, seed: int, scale: float = 1.0) -> np.ndarray:
    """``count`` draws stacked as ``(count, rows, cols)``; one generator per call."""
    _require_definite(A)
    rng = np.random.default_rng(seed)
    lo, hi = magnitude_range(scale)
    mags = np.exp(rng.uniform(np.log(lo), np.log(hi), size=(count,) + A.shape))
    return A.codes.astype(float)[None] * mags


def derived_seed(seed: int, index: int) -> np.random.Generator:
    """Per-item generator that does not depend on evaluation order."""
    return np.random.default_rng(np.random.SeedSequence([seed & (2**64 - 1), index]))


@dataclass(frozen=True)
class MixedMatrix:
    """Square or rectangular grid whose entries are either a :class:`Sign` or a float."""

    entries: tuple[tuple[Union[Sign, float], ...], ...]

    def __post_init__(self) -> None:
        if not self.entries or len({len(r) for r in self.entries}) != 1 or not self.entries[0]:
            raise ShapeError("mixed matrix rows must be nonempty and of equal length")

    @classmethod
    def of(cls, rows: Iterable[Iterable[Union[Sign, float]]]) -> "MixedMatrix":
        return cls(tuple(tuple(r) for r in rows))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    def sign_mask(self) -> np.ndarray:
        return np.array([[isinstance(x, Sign) for x in row] for row in self.entries])

    def is_all_sign(self) -> bool:
        return bool(self.sign_mask().all())

    def is_all_real(self) -> bool:
        """True when every entry is a real, treating the Zero sign as the real 0."""
        return all(not isinstance(x, Sign) or x is Sign.ZERO for row in self.entries for x in row)

    def nonzero_mask(self) -> np.ndarray:
        return np.array([[(x is not Sign.ZERO) if isinstance(x, Sign) else x != 0
                          for x in row] for row in self.entries])

    def to_qual(self) -> QualMatrix:
        """Sign pattern; reals map to their sign."""
        return QualMatrix([[x if isinstance(x, Sign) else int(np.sign(x)) for x in row]
                           for row in self.entries])

    def to_real(self) -> np.ndarray:
        out = np.zeros(self.shape)
        for i, row in enumerate(self.entries):
            for j, x in enumerate(row):
                if isinstance(x, Sign):
                    if x is not Sign.ZERO:
                        raise ValueError(f"entry ({i},{j}) is the sign {x.symbol}, not a real")
                else:
                    out[i, j] = x
        return out

    def block(self, rows: slice, cols: slice) -> "MixedMatrix":
        return MixedMatrix(tuple(tuple(r[cols]) for r in self.entries[rows]))
