"""Analytic exp(-itC) for ladders of 2, 3, 4 and 5 levels.

The 4- and 5-level matrices are assembled entry by entry from the two-frequency
component tables (upper triangle, mirrored). Eigenvalues and eigenvectors use
the Ferrari-type closed forms with lambda the largest root.

Differences such as lambda^2 - g1^2 are evaluated in rearranged, algebraically
identical forms free of cancellation, and the normalizers X, Y are taken as the
inverse norms of the unnormalized eigenvectors. Both agree with the textbook
radicand expressions exactly in real arithmetic; the rearrangement only keeps
the rounding error from blowing up when a radicand is small.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AllZeroCouplings, DegenerateSpectrum
from .ladder import as_couplings

EPS_DEG = 1e-8
EPS_CLAMP = 1e-12


def _coupling_tuple(g, size):
    g = as_couplings(g)
    if len(g) != size:
        raise ValueError(f"expected {size} couplings, got {len(g)}")
    return g.g


def _mirror(a):
    return a + np.triu(a, 1).T


def expc2(g1: float, t: float) -> np.ndarray:
    c, s = math.cos(g1 * t), math.sin(g1 * t)
    return np.array([[c, -1j * s], [-1j * s, c]])


def expc3(g1: float, g2: float, t: float) -> np.ndarray:
    omega2 = g1 * g1 + g2 * g2
    if omega2 == 0.0:
        return np.eye(3, dtype=complex)
    omega = math.sqrt(omega2)
    c, s = math.cos(omega * t), math.sin(omega * t)
    a = np.zeros((3, 3), dtype=complex)
    a[0, 0] = (g1 * g1 * c + g2 * g2) / omega2
    a[0, 1] = -1j * g1 * s / omega
    a[0, 2] = g1 * g2 * (c - 1.0) / omega2
    a[1, 1] = c
    a[1, 2] = -1j * g2 * s / omega
    a[2, 2] = (g2 * g2 * c + g1 * g1) / omega2
    return _mirror(a)


# --- four levels ----------------------------------------------------------


@dataclass(frozen=True)
class QuarticSpectrum4:
    """Closed-form eigen-data of the 4x4 coupling matrix.

    Spectrum is (lam, lam2, -lam2, -lam) with lam * lam2 = g1 * g3.
    ``p = lam^2 - g1^2`` and ``q = g3^2 - lam^2`` are stored because every
    eigenvector component is built from them.
    """

    g: tuple[float, float, float]
    lam: float
    lam2: float
    A: float
    B: float
    X: float
    Y: float
    p: float
    q: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([self.lam, self.lam2, -self.lam2, -self.lam])


def spectrum4(g) -> QuarticSpectrum4:
    g1, g2, g3 = _coupling_tuple(g, 3)
    A = g2 * g2 + (g1 + g3) ** 2
    B = g2 * g2 + (g1 - g3) ** 2
    if A == 0.0:
        raise AllZeroCouplings("all couplings are zero")
    sA, sB = math.sqrt(A), math.sqrt(B)
    if sB <= EPS_DEG * sA:
        raise DegenerateSpectrum(f"sqrt(B)/sqrt(A) = {sB / sA:.3e}: inner eigenvalues coincide")
    lam = 0.5 * (sA + sB)
    lam2 = g1 * g3 / lam
    root_ab = sA * sB
    u = g2 * g2 + g3 * g3 - g1 * g1
    p = 0.5 * (u + root_ab) if u >= 0 else 2.0 * g1 * g1 * g2 * g2 / (root_ab - u)
    w = g3 * g3 - g1 * g1 - g2 * g2
    q = 0.5 * (w - root_ab) if w <= 0 else -2.0 * g2 * g2 * g3 * g3 / (w + root_ab)
    rad_x = (g1 * g2) ** 2 + (lam * g2) ** 2 + p * p + (g3 * p / lam) ** 2
    rad_y = (lam * g2) ** 2 + (g2 * g3) ** 2 + (g1 * q / lam) ** 2 + q * q
    floor = EPS_DEG * A * A
    if rad_x <= floor or rad_y <= floor:
        raise DegenerateSpectrum(
            f"normalizer radicand too small (X: {rad_x / (A * A):.3e}, Y: {rad_y / (A * A):.3e} of A^2)"
        )
    return QuarticSpectrum4((g1, g2, g3), lam, lam2, A, B,
                            1.0 / math.sqrt(rad_x), 1.0 / math.sqrt(rad_y), p, q)


def eigenvectors4(sp: QuarticSpectrum4) -> np.ndarray:
    """Columns |lam_1>..|lam_4>, matching ``sp.eigenvalues``."""
    g1, g2, g3 = sp.g
    lam, p, q = sp.lam, sp.p, sp.q
    v1 = sp.X * np.array([g1 * g2, lam * g2, p, g3 * p / lam])
    v2 = sp.Y * np.array([lam * g2, g2 * g3, g1 * q / lam, q])
    return np.column_stack([v1, v2, v2 * [-1, 1, -1, 1], v1 * [1, -1, 1, -1]])


def expc4(g, t: float) -> np.ndarray:
    sp = g if isinstance(g, QuarticSpectrum4) else spectrum4(g)
    g1, g2, g3 = sp.g
    lam, p, q = sp.lam, sp.p, sp.q
    x2, y2 = sp.X * sp.X, sp.Y * sp.Y
    mu = sp.lam2
    c1, s1 = math.cos(lam * t), math.sin(lam * t)
    c2, s2 = math.cos(mu * t), math.sin(mu * t)

    a = np.zeros((4, 4), dtype=complex)
    a[0, 0] = 2 * g2 * g2 * (g1 * g1 * x2 * c1 + lam * lam * y2 * c2)
    a[0, 1] = -2j * lam * g2 * g2 * (g1 * x2 * s1 + g3 * y2 * s2)
    a[0, 2] = 2 * g1 * g2 * (p * x2 * c1 + q * y2 * c2)
    a[0, 3] = -2j * g2 * (g1 * g3 * p / lam * x2 * s1 + lam * q * y2 * s2)
    a[1, 1] = 2 * g2 * g2 * (lam * lam * x2 * c1 + g3 * g3 * y2 * c2)
    a[1, 2] = -2j * g2 * (lam * p * x2 * s1 + g1 * g3 * q / lam * y2 * s2)
    a[1, 3] = 2 * g2 * g3 * (p * x2 * c1 + q * y2 * c2)
    a[2, 2] = 2 * (p * p * x2 * c1 + g1 * g1 * q * q / (lam * lam) * y2 * c2)
    a[2, 3] = -2j / lam * (g3 * p * p * x2 * s1 + g1 * q * q * y2 * s2)
    a[3, 3] = 2 * (g3 * g3 * p * p / (lam * lam) * x2 * c1 + q * q * y2 * c2)
    return _mirror(a)


# --- five levels ----------------------------------------------------------


@dataclass(frozen=True)
class QuinticSpectrum5:
    """Closed-form eigen-data of the 5x5 coupling matrix.

    Spectrum is (lam, lam2, 0, -lam2, -lam) with lam * lam2 = sqrt(B).
    Stored differences: ``p1 = lam^2 - g1^2``, ``p = lam^2 - g1^2 - g2^2``,
    ``q1 = B/lam^2 - g1^2`` and ``q = B/lam^2 - g1^2 - g2^2``.
    """

    g: tuple[float, float, float, float]
    lam: float
    lam2: float
    A: float
    B: float
    X: float
    Y: float
    p1: float
    p: float
    q1: float
    q: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.array([self.lam, self.lam2, 0.0, -self.lam2, -self.lam])


def spectrum5(g) -> QuinticSpectrum5:
    g1, g2, g3, g4 = _coupling_tuple(g, 4)
    s11, s22, s33, s44 = g1 * g1, g2 * g2, g3 * g3, g4 * g4
    A = s11 + s22 + s33 + s44
    B = s11 * s33 + s11 * s44 + s22 * s44
    if A == 0.0:
        raise AllZeroCouplings("all couplings are zero")
    if B <= EPS_DEG * A * A:
        raise DegenerateSpectrum(f"B/A^2 = {B / (A * A):.3e}: zero eigenvalue is degenerate")
    sB = math.sqrt(B)
    # A^2 - 4B as a sum of squares
    s = s11 + s22 - s33 - s44
    D = s * s + 4.0 * s22 * s33
    sD = math.sqrt(D)
    outer = A + 2.0 * sB
    gap = D / outer
    if gap <= EPS_CLAMP * A:
        gap = 0.0
    if gap <= EPS_DEG * A:
        raise DegenerateSpectrum(f"(A - 2 sqrt(B))/A = {gap / A:.3e}: lam and lam2 coincide")
    lam = 0.5 * (math.sqrt(outer) + math.sqrt(gap))
    lam2 = sB / lam
    p = 0.5 * (sD - s) if s <= 0 else 2.0 * s22 * s33 / (sD + s)
    p1 = p + s22
    q = -0.5 * (s + sD) if s >= 0 else -2.0 * s22 * s33 / (sD - s)
    u = A - 2.0 * s11
    q1 = 0.5 * (u - sD) if u <= 0 else 2.0 * s22 * (g4 - g1) * (g4 + g1) / (u + sD)
    rad_x = ((g1 * g2 * g3) ** 2 + (lam * g2 * g3) ** 2 + (p1 * g3) ** 2
             + (lam * p) ** 2 + (p * g4) ** 2)
    rad_y = ((lam * g1 * g2 * g3) ** 2 + (sB * g2 * g3) ** 2 + (lam * g3 * q1) ** 2
             + (sB * q) ** 2 + (lam * g4 * q) ** 2)
    if rad_x <= EPS_DEG * A ** 3 or rad_y <= EPS_DEG * A ** 4:
        raise DegenerateSpectrum(
            f"normalizer radicand too small (X: {rad_x / A ** 3:.3e} of A^3, Y: {rad_y / A ** 4:.3e} of A^4)"
        )
    return QuinticSpectrum5((g1, g2, g3, g4), lam, lam2, A, B,
                            1.0 / math.sqrt(rad_x), 1.0 / math.sqrt(rad_y), p1, p, q1, q)


def eigenvectors5(sp: QuinticSpectrum5) -> np.ndarray:
    """Columns |lam_1>..|lam_5>, matching ``sp.eigenvalues``."""
    g1, g2, g3, g4 = sp.g
    lam, sB = sp.lam, math.sqrt(sp.B)
    v1 = sp.X * np.array([g1 * g2 * g3, lam * g2 * g3, sp.p1 * g3, lam * sp.p, sp.p * g4])
    v2 = sp.Y * np.array([lam * g1 * g2 * g3, sB * g2 * g3, lam * g3 * sp.q1, sB * sp.q, lam * g4 * sp.q])
    v3 = np.array([g2 * g4, 0.0, -g1 * g4, 0.0, g1 * g3]) / sB
    return np.column_stack([v1, v2, v3, v2 * [-1, 1, -1, 1, -1], v1 * [1, -1, 1, -1, 1]])


def expc5(g, t: float) -> np.ndarray:
    sp = g if isinstance(g, QuinticSpectrum5) else spectrum5(g)
    g1, g2, g3, g4 = sp.g
    lam, B = sp.lam, sp.B
    sB = math.sqrt(B)
    p1, p, q1, q = sp.p1, sp.p, sp.q1, sp.q
    lam_sq = lam * lam
    x2, y2 = sp.X * sp.X, sp.Y * sp.Y
    mu = sp.lam2
    c1, s1 = math.cos(lam * t), math.sin(lam * t)
    c2, s2 = math.cos(mu * t), math.sin(mu * t)

    a = np.zeros((5, 5), dtype=complex)
    a[0, 0] = (g2 * g4) ** 2 / B + 2 * (g1 * g2 * g3) ** 2 * (x2 * c1 + lam_sq * y2 * c2)
    a[0, 1] = -2j * lam * g1 * (g2 * g3) ** 2 * (x2 * s1 + sB * y2 * s2)
    a[0, 2] = (-g1 * g2 * g4 * g4 / B
               + 2 * g1 * g2 * g3 * g3 * (p1 * x2 * c1 + lam_sq * q1 * y2 * c2))
    a[0, 3] = -2j * lam * g1 * g2 * g3 * (p * x2 * s1 + sB * q * y2 * s2)
    a[0, 4] = g1 * g2 * g3 * g4 * (1.0 / B + 2 * p * x2 * c1 + 2 * lam_sq * q * y2 * c2)
    a[1, 1] = 2 * (g2 * g3) ** 2 * (lam_sq * x2 * c1 + B * y2 * c2)
    a[1, 2] = -2j * lam * g2 * g3 * g3 * (p1 * x2 * s1 + sB * q1 * y2 * s2)
    a[1, 3] = 2 * g2 * g3 * (lam_sq * p * x2 * c1 + B * q * y2 * c2)
    a[1, 4] = -2j * lam * g2 * g3 * g4 * (p * x2 * s1 + sB * q * y2 * s2)
    a[2, 2] = (g1 * g4) ** 2 / B + 2 * g3 * g3 * (p1 * p1 * x2 * c1 + lam_sq * q1 * q1 * y2 * c2)
    a[2, 3] = -2j * lam * g3 * (p1 * p * x2 * s1 + sB * q1 * q * y2 * s2)
    a[2, 4] = (-g1 * g1 * g3 * g4 / B
               + 2 * g3 * g4 * (p1 * p * x2 * c1 + lam_sq * q1 * q * y2 * c2))
    a[3, 3] = 2 * lam_sq * p * p * x2 * c1 + 2 * B * q * q * y2 * c2
    a[3, 4] = -2j * lam * g4 * (p * p * x2 * s1 + sB * q * q * y2 * s2)
    a[4, 4] = (g1 * g3) ** 2 / B + 2 * g4 * g4 * (p * p * x2 * c1 + lam_sq * q * q * y2 * c2)
    return _mirror(a)


# --- dispatch -------------------------------------------------------------

CLOSED_FORM_SIZES = (2, 3, 4, 5)


def expc(g, t: float) -> np.ndarray:
    """exp(-itC) by the closed form matching len(g) + 1 levels."""
    g = as_couplings(g)
    n = g.n
    if n == 2:
        return expc2(g[0], t)
    if n == 3:
        return expc3(g[0], g[1], t)
    if n == 4:
        return expc4(g, t)
    if n == 5:
        return expc5(g, t)
    raise ValueError(f"no closed form for n = {n}; closed forms exist for n in {CLOSED_FORM_SIZES}")


def closed_eigenvalues(g) -> np.ndarray:
    """Descending closed-form spectrum of C(g) for n = 2..5."""
    g = as_couplings(g)
    n = g.n
    if n == 2:
        return np.array([g[0], -g[0]])
    if n == 3:
        om = math.hypot(g[0], g[1])
        return np.array([om, 0.0, -om])
    if n == 4:
        return spectrum4(g).eigenvalues
    if n == 5:
        return spectrum5(g).eigenvalues
    raise ValueError(f"no closed form for n = {n}")
