"""Dense phase-1 simplex with Bland's rule.

Only feasibility is needed by the package, so there is no phase 2.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-11


def phase_one(A_ub: np.ndarray, b_ub: np.ndarray, A_eq: np.ndarray, b_eq: np.ndarray) -> Optional[np.ndarray]:
    """Return ``z >= 0`` with ``A_ub z <= b_ub`` and ``A_eq z = b_eq``, or None.

    Rows are equilibrated before solving (an exact transformation), slacks
    are appended to the inequality rows and one artificial variable is used
    per row.
    """
    n = A_ub.shape[1] if A_ub.size else A_eq.shape[1]
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq
    if m == 0:
        return np.zeros(n)
    A = np.zeros((m, n + m_ub))
    A[:m_ub, :n] = A_ub
    A[:m_ub, n:] = np.eye(m_ub)
    A[m_ub:, :n] = A_eq
    b = np.concatenate([b_ub, b_eq]).astype(float)

    scale = np.maximum(np.abs(A).max(axis=1), np.abs(b))
    scale[scale == 0] = 1.0
    A /= scale[:, None]
    b /= scale
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    nz = A.shape[1]
    # Tableau columns: structural + slack (nz), artificials (m), rhs.
    T = np.zeros((m + 1, nz + m + 1))
    T[:m, :nz] = A
    T[:m, nz:nz + m] = np.eye(m)
    T[:m, -1] = b
    T[m, :nz] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    basis = list(range(nz, nz + m))

    max_iter = 50 * (m + nz + 10) ** 2
    for _ in range(max_iter):
        cost = T[m, :-1]
        candidates = np.nonzero(cost < -FEAS_TOL)[0]
        if candidates.size == 0:
            break
        col = int(candidates[0])
        column = T[:m, col]
        rows = np.nonzero(column > PIVOT_TOL)[0]
        if rows.size == 0:
            # Unbounded direction in phase 1 cannot happen (objective bounded below);
            # treat a numerically vanishing column as non-improving.
            T[m, col] = 0.0
            continue
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        row = int(min(tied, key=lambda r: basis[r]))
        T[row] /= T[row, col]
        others = np.arange(m + 1) != row
        T[others] -= np.outer(T[others, col], T[row])
        basis[row] = col
    else:
        raise RuntimeError("simplex iteration limit reached")

    if -T[m, -1] > FEAS_TOL * max(1.0, m):
        return None
    z = np.zeros(nz + m)
    for r, j in enumerate(basis):
        z[j] = max(T[r, -1], 0.0)
    return z[:n]
