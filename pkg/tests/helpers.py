"""Random instance generators shared by the test modules."""

from __future__ import annotations

import numpy as np

from metzsign.mixedstab import MixedSystem
from metzsign.qualcore import QualMatrix


def random_metzler_pattern(rng: np.random.Generator, n: int, density: float | None = None) -> QualMatrix:
    """Random definite Metzler pattern; roughly half are permuted triangular with ⊖ diagonal."""
    density = rng.uniform(0.1, 0.6) if density is None else density
    codes = np.zeros((n, n), dtype=np.int8)
    if rng.random() < 0.5:
        upper = np.triu(rng.random((n, n)) < density, k=1)
        codes[upper] = 1
        perm = rng.permutation(n)
        codes = codes[np.ix_(perm, perm)]
        np.fill_diagonal(codes, -1)
        if rng.random() < 0.2:
            i = rng.integers(n)
            codes[i, i] = rng.choice([0, 1])
        if n > 1 and rng.random() < 0.3:
            i, j = rng.choice(n, size=2, replace=False)
            codes[i, j] = 1
        return QualMatrix(codes)
    off = rng.random((n, n)) < density
    codes[off] = 1
    np.fill_diagonal(codes, rng.choice([-1, 0, 1], size=n, p=[0.85, 0.1, 0.05]))
    return QualMatrix(codes)


def random_stable_pattern(rng: np.random.Generator, n: int, density: float | None = None) -> QualMatrix:
    density = rng.uniform(0.1, 0.7) if density is None else density
    codes = np.zeros((n, n), dtype=np.int8)
    codes[np.triu(rng.random((n, n)) < density, k=1)] = 1
    perm = rng.permutation(n)
    codes = codes[np.ix_(perm, perm)]
    np.fill_diagonal(codes, -1)
    return QualMatrix(codes)


def random_nonneg_pattern(rng: np.random.Generator, shape: tuple[int, int], density: float = 0.4) -> QualMatrix:
    return QualMatrix((rng.random(shape) < density).astype(np.int8))


def random_metzler_real(rng: np.random.Generator, n: int) -> np.ndarray:
    """Random real Metzler matrix, roughly half of them Hurwitz."""
    M = rng.random((n, n)) * (rng.random((n, n)) < 0.6)
    np.fill_diagonal(M, 0.0)
    shift = M.sum(axis=1).max() * rng.uniform(0.3, 1.6) + 0.05
    return M - shift * np.eye(n) + np.diag(rng.uniform(-0.3, 0.3, n))


def holds_family(rng: np.random.Generator, n: int, N: int) -> list[QualMatrix]:
    """Family whose members are sub-patterns of one sign-stable pattern."""
    S = random_stable_pattern(rng, n)
    out = []
    for _ in range(N):
        codes = S.codes.copy()
        codes[(rng.random((n, n)) < 0.4) & (codes == 1)] = 0
        out.append(QualMatrix(codes))
    return out


def random_mixed_system(rng: np.random.Generator, max_n: int = 4) -> MixedSystem:
    ns, npp = int(rng.integers(1, max_n + 1)), int(rng.integers(1, max_n + 1))
    A_s = random_stable_pattern(rng, ns) if rng.random() < 0.8 else random_metzler_pattern(rng, ns)
    P = rng.random((npp, npp)) * (rng.random((npp, npp)) < 0.5)
    np.fill_diagonal(P, 0.0)
    A_p = P - (P.sum(axis=1).max() * rng.uniform(0.5, 1.5) + 0.2) * np.eye(npp)
    density = rng.uniform(0.1, 0.6)
    B = rng.random((npp, ns)) * (rng.random((npp, ns)) < density)
    C = rng.random((ns, npp)) * (rng.random((ns, npp)) < density)
    return MixedSystem(A_s, A_p, B, C)
