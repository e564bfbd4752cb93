"""Cyclic Jacobi eigensolver for small dense Hermitian matrices.

The algebra blocks this operates on are tiny (a handful of rows), so the
sweep runs on plain Python complex numbers; numpy call overhead dominates
at that size.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import InvariantError

MAX_SWEEPS = 100


def _off_mass(a: list[list[complex]], n: int) -> float:
    s = 0.0
    for i in range(n):
        row = a[i]
        for j in range(n):
            if i != j:
                z = row[j]
                s += z.real * z.real + z.imag * z.imag
    return math.sqrt(s)


def jacobi_eigh(h, tol: float = 1e-13, max_sweeps: int = MAX_SWEEPS):
    """Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot ``a[p, q]`` with a
    diagonal unitary, then zeroes it with a real plane rotation.

    Parameters
    ----------
    h : array_like
        Square Hermitian matrix. Only the Hermitian part is used.
    tol : float
        Convergence when the off-diagonal Frobenius mass is at most
        ``tol * ||h||_F``.

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in descending order.
    vectors : ndarray
        Unitary whose columns are the matching eigenvectors, so that
        ``h ~= vectors @ diag(eigenvalues) @ vectors.conj().T``.
    """
    h = np.asarray(h, dtype=complex)
    n = h.shape[0]
    herm = 0.5 * (h + h.conj().T)
    if n == 1:
        return np.array([herm[0, 0].real]), np.eye(1, dtype=complex)

    a = [[complex(z) for z in row] for row in herm.tolist()]
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]
    target = tol * float(np.linalg.norm(herm))

    for _ in range(max_sweeps):
        if _off_mass(a, n) <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                beta = abs(apq)
                if beta == 0.0:
                    continue
                phase = apq / beta
                theta = (a[q][q].real - a[p][p].real) / (2.0 * beta)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # a <- G^H a G with G = [[c, s], [-s/phase, c/phase]] on (p, q)
                sp = s / phase
                cp = c / phase
                for row in a:
                    x, y = row[p], row[q]
                    row[p] = c * x - sp * y
                    row[q] = s * x + cp * y
                rp, rq = a[p], a[q]
                sph = s * phase
                cph = c * phase
                for j in range(n):
                    x, y = rp[j], rq[j]
                    rp[j] = c * x - sph * y
                    rq[j] = s * x + cph * y
                rp[q] = rq[p] = 0j
                for row in v:
                    x, y = row[p], row[q]
                    row[p] = c * x - sp * y
                    row[q] = s * x + cp * y
    else:
        if _off_mass(a, n) > target:
            raise InvariantError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.array([a[i][i].real for i in range(n)])
    order = np.argsort(-w, kind="stable")
    return w[order], np.array(v, dtype=complex)[:, order]
