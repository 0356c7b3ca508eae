"""Small dense symmetric eigenproblems (cyclic Jacobi) and PSD square roots."""

from __future__ import annotations

import numpy as np


def jacobi_eigh(matrix, tol: float = 1e-14, max_sweeps: int = 50):
    """Eigendecomposition of a small symmetric matrix by cyclic Jacobi rotations.

    Args:
        matrix: Square symmetric array.
        tol: Sweeps stop once the off-diagonal Frobenius norm falls below
            ``tol`` times the Frobenius norm of the input.
        max_sweeps: Hard cap on the number of full sweeps.

    Returns:
        ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and the
        eigenvectors stored as columns, so ``P @ diag(d) @ P.T == matrix``.
    """
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n)
    scale = np.linalg.norm(a)
    if scale == 0.0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2) * 2.0)
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(diff) > 1e150 * abs(apq):
                    t = apq / diff  # theta would overflow; t -> 1 / (2 theta)
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 if theta == 0.0 else np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                a[p, q] = a[q, p] = 0.0
                v = v @ rot
    order = np.argsort(np.diag(a))
    return np.diag(a)[order].copy(), v[:, order]


def sqrtm_psd(matrix, clamp: float = 1e-12) -> np.ndarray:
    """Symmetric square root of a positive semi-definite matrix.

    Eigenvalues above ``-clamp * trace`` but below zero are treated as round-off
    and set to zero; anything more negative is rejected.
    """
    d, p = jacobi_eigh(matrix)
    trace = abs(float(np.trace(np.asarray(matrix, dtype=float))))
    if np.any(d < -clamp * max(trace, np.finfo(float).tiny)):
        raise ValueError(f"matrix is not positive semi-definite (eigenvalues {d})")
    d = np.clip(d, 0.0, None)
    return (p * np.sqrt(d)) @ p.T
