"""General-n numeric evaluation of exp(-itC).

Two independent routes are provided and share no code:

* ``tridiag_eigen`` / ``expm_spectral``: implicit-shift QL on the symmetric
  tridiagonal C, then W diag(exp(-it lambda)) W^T.
* ``expm_series``: scaling-and-squaring of a truncated Taylor series on a
  dense complex matrix. Used as the oracle for everything else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .errors import ConvergenceFailure
from .ladder import SymmetricTridiagonal, coupling_matrix

MAX_SWEEPS = 30
SERIES_SCALE_TARGET = 0.5
SERIES_RTOL = 1e-18
SERIES_MAX_TERMS = 60
CLUSTER_RTOL = 1e-10


@jit
def _tql_kernel(d, e, z, max_sweeps):
    """In-place implicit QL on (d, e); rotations accumulated into z.

    ``e`` has length n with e[i] coupling rows i and i+1 (last entry unused).
    Returns -1 on success or the index of the eigenvalue that failed.
    """
    n = d.shape[0]
    eps = 2.220446049250313e-16
    anorm = 0.0
    for i in range(n):
        row = abs(d[i]) + abs(e[i])
        if i > 0:
            row += abs(e[i - 1])
        if row > anorm:
            anorm = row
    # off-diagonals below eps * ||T|| are dropped: backward-stable, and the only
    # way a zero diagonal ever splits
    floor = eps * anorm
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd or abs(e[m]) <= floor:
                    break
                m += 1
            if m == l:
                break
            if it == max_sweeps:
                return l
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    f = z[k, i + 1]
                    z[k, i + 1] = s * z[k, i] + c * f
                    z[k, i] = c * z[k, i] - s * f
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return -1


@jit
def _norm1(a):
    n = a.shape[0]
    best = 0.0
    for j in range(n):
        col = 0.0
        for i in range(n):
            col += abs(a[i, j])
        if col > best:
            best = col
    return best


@jit
def _expm_series_kernel(m, t, scale_target, rtol, max_terms):
    n = m.shape[0]
    a = (-1j * t) * m
    norm = _norm1(a)
    s = 0
    while norm > scale_target:
        norm *= 0.5
        s += 1
    a = a * (0.5 ** s)
    total = np.eye(n, dtype=np.complex128)
    term = np.eye(n, dtype=np.complex128)
    for k in range(1, max_terms + 1):
        term = (term @ a) / k
        total = total + term
        if _norm1(term) <= rtol * _norm1(total):
            break
    for _ in range(s):
        total = total @ total
    return total


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (descending) and orthogonal eigenvector columns W."""

    eigenvalues: np.ndarray
    W: np.ndarray

    def expm(self, t: float) -> np.ndarray:
        phase = np.exp(-1j * t * self.eigenvalues)
        return (self.W * phase) @ self.W.T


def _fix_signs(W):
    scale = np.max(np.abs(W), axis=0)
    for j in range(W.shape[1]):
        col = W[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * scale[j])
        if nz.size and col[nz[0]] < 0:
            W[:, j] = -col
    return W


def _reorthonormalize_clusters(vals, W):
    tol = CLUSTER_RTOL * max(1.0, float(np.max(np.abs(vals))))
    n = len(vals)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and vals[stop - 1] - vals[stop] <= tol:
            stop += 1
        if stop - start > 1:
            q, _ = np.linalg.qr(W[:, start:stop])
            W[:, start:stop] = q
        start = stop
    return W


def tridiag_eigen(C: SymmetricTridiagonal) -> SpectralDecomposition:
    """Eigendecomposition of a symmetric tridiagonal matrix by implicit QL.

    Eigenvalues come back in descending order; each eigenvector's first
    non-negligible entry is positive. Eigenvectors inside a numerically
    degenerate cluster are re-orthonormalized (they are not unique there).
    """
    n = C.dim
    d = np.array(C.diagonal, dtype=np.float64)
    e = np.zeros(n, dtype=np.float64)
    e[: n - 1] = C.off_diagonal
    z = np.eye(n, dtype=np.float64)
    # power-of-two scaling to O(1) is exact and keeps the sweep clear of
    # underflow/overflow for extreme inputs
    peak = max(float(np.max(np.abs(d))), float(np.max(np.abs(e))))
    scale = 2.0 ** -math.frexp(peak)[1] if peak > 0 else 1.0
    d *= scale
    e *= scale
    failed = _tql_kernel(d, e, z, MAX_SWEEPS)
    if failed >= 0:
        raise ConvergenceFailure(
            f"QL iteration did not converge for eigenvalue {failed} within {MAX_SWEEPS} sweeps"
        )
    d /= scale
    order = np.argsort(-d, kind="stable")
    vals = d[order]
    W = np.ascontiguousarray(z[:, order])
    W = _reorthonormalize_clusters(vals, W)
    W = _fix_signs(W)
    vals.setflags(write=False)
    W.setflags(write=False)
    return SpectralDecomposition(vals, W)


def expm_spectral(C, t: float) -> np.ndarray:
    """exp(-itC) from the numeric eigendecomposition of C.

    ``C`` may be a SymmetricTridiagonal or a coupling sequence.
    """
    if not isinstance(C, SymmetricTridiagonal):
        C = coupling_matrix(C)
    return tridiag_eigen(C).expm(t)


def expm_series(M, t: float) -> np.ndarray:
    """exp(-itM) for a dense square matrix by scaled Taylor series and squaring."""
    if isinstance(M, SymmetricTridiagonal):
        M = M.dense()
    M = np.ascontiguousarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expm_series needs a square matrix")
    if not np.all(np.isfinite(M)) or not math.isfinite(t):
        raise ValueError("expm_series needs finite input")
    return _expm_series_kernel(M, float(t), SERIES_SCALE_TARGET, SERIES_RTOL, SERIES_MAX_TERMS)
