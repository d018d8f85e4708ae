"""Driven n-level ladder: model types, Hamiltonian, rotating frame, coupling matrix.

Units: hbar = 1, so energies and angular frequencies share one unit.
Levels are indexed 0..n-1 from the bottom of the ladder.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ModelInvalid

RESONANCE_RTOL = 1e-9


class AnharmonicityWarning(UserWarning):
    """Level spacings are not strictly decreasing up the ladder."""


def _as_float_tuple(values, name):
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise ModelInvalid(f"{name}: expected a sequence of real numbers") from exc
    if not all(math.isfinite(v) for v in out):
        raise ModelInvalid(f"{name}: entries must be finite")
    return out


@dataclass(frozen=True)
class CouplingVector:
    """The n-1 non-negative couplings g_1..g_{n-1} between adjacent levels."""

    g: tuple[float, ...]

    def __post_init__(self):
        g = _as_float_tuple(self.g, "couplings")
        if len(g) < 1:
            raise ModelInvalid("couplings: need at least one coupling (n >= 2)")
        if any(v < 0 for v in g):
            raise ModelInvalid("couplings: every g_k must be >= 0 (absorb signs into phases)")
        object.__setattr__(self, "g", g)

    @property
    def n(self) -> int:
        return len(self.g) + 1

    def __len__(self):
        return len(self.g)

    def __iter__(self):
        return iter(self.g)

    def __getitem__(self, k):
        return self.g[k]


def as_couplings(g) -> CouplingVector:
    return g if isinstance(g, CouplingVector) else CouplingVector(tuple(g))


@dataclass(frozen=True)
class SymmetricTridiagonal:
    diagonal: np.ndarray
    off_diagonal: np.ndarray

    def __post_init__(self):
        d = np.array(self.diagonal, dtype=float)
        e = np.array(self.off_diagonal, dtype=float)
        if d.ndim != 1 or e.ndim != 1 or len(d) < 1 or len(e) != len(d) - 1:
            raise ModelInvalid("tridiagonal: need n diagonal and n-1 off-diagonal entries")
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diagonal", d)
        object.__setattr__(self, "off_diagonal", e)

    @property
    def dim(self) -> int:
        return len(self.diagonal)

    def dense(self) -> np.ndarray:
        return (np.diag(self.diagonal)
                + np.diag(self.off_diagonal, 1)
                + np.diag(self.off_diagonal, -1))


@dataclass(frozen=True)
class LadderModel:
    """Level energies, drive frequencies, drive phases and couplings.

    ``omegas[k-1]``, ``phis[k-1]`` and ``couplings[k-1]`` belong to the drive
    connecting level k-1 to level k.
    """

    energies: tuple[float, ...]
    omegas: tuple[float, ...]
    phis: tuple[float, ...]
    couplings: CouplingVector

    def __post_init__(self):
        energies = _as_float_tuple(self.energies, "energies")
        omegas = _as_float_tuple(self.omegas, "omegas")
        phis = _as_float_tuple(self.phis, "phis")
        couplings = as_couplings(self.couplings)
        n = len(energies)
        if n < 2:
            raise ModelInvalid("energies: need at least two levels")
        for name, seq in (("omegas", omegas), ("phis", phis), ("couplings", couplings.g)):
            if len(seq) != n - 1:
                raise ModelInvalid(f"{name}: expected {n - 1} entries for {n} levels, got {len(seq)}")
        gaps = np.diff(energies)
        if np.any(gaps <= 0):
            raise ModelInvalid("energies: must be strictly increasing")
        if np.any(np.diff(gaps) >= 0):
            warnings.warn("level spacings are not strictly decreasing up the ladder",
                          AnharmonicityWarning, stacklevel=3)
        object.__setattr__(self, "energies", energies)
        object.__setattr__(self, "omegas", omegas)
        object.__setattr__(self, "phis", phis)
        object.__setattr__(self, "couplings", couplings)

    @classmethod
    def resonant(cls, energies, couplings, phis=None) -> "LadderModel":
        """Model whose drives sit exactly on the level spacings."""
        energies = tuple(float(e) for e in energies)
        omegas = tuple(np.diff(energies).tolist())
        if phis is None:
            phis = (0.0,) * len(omegas)
        return cls(energies, omegas, tuple(phis), as_couplings(couplings))

    @property
    def n(self) -> int:
        return len(self.energies)

    @property
    def deltas(self) -> np.ndarray:
        """Level offsets E_k - E_0, k = 0..n-1 (first entry is 0)."""
        e = np.asarray(self.energies)
        return e - e[0]


def build_hamiltonian(model: LadderModel, t: float) -> np.ndarray:
    """Lab-frame RWA Hamiltonian at time t."""
    g = np.asarray(model.couplings.g)
    drive = g * np.exp(1j * (np.asarray(model.omegas) * t + np.asarray(model.phis)))
    H = np.diag(np.asarray(model.energies, dtype=complex))
    k = np.arange(model.n - 1)
    H[k, k + 1] = drive
    H[k + 1, k] = drive.conj()
    return H


def frame_phases(model: LadderModel, t: float) -> np.ndarray:
    """Phases theta_k with V(t) = diag(exp(i theta_k)); theta_0 = 0."""
    steps = np.asarray(model.omegas) * t + np.asarray(model.phis)
    return np.concatenate(([0.0], np.cumsum(steps)))


def rotating_frame(model: LadderModel, t: float) -> np.ndarray:
    """Diagonal unitary V(t) that removes the drive phases from H."""
    return np.diag(np.exp(1j * frame_phases(model, t)))


@dataclass(frozen=True)
class ResonanceReport:
    detunings: tuple[float, ...]
    tol: float
    is_resonant: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "is_resonant", self.max_detuning <= self.tol)

    @property
    def max_detuning(self) -> float:
        return max(abs(d) for d in self.detunings)

    def table(self) -> str:
        lines = ["k  detuning"]
        lines += [f"{k}  {d:.17g}" for k, d in enumerate(self.detunings, start=1)]
        return "\n".join(lines)


def default_resonance_tol(model: LadderModel) -> float:
    return RESONANCE_RTOL * float(np.max(np.abs(model.deltas)))


def resonance_report(model: LadderModel, tol: float | None = None) -> ResonanceReport:
    """Detuning delta_k = (E_k - E_{k-1}) - omega_k of every drive.

    ``tol`` is absolute; when omitted it is 1e-9 times the largest level offset.
    """
    if tol is None:
        tol = default_resonance_tol(model)
    if not tol > 0:
        raise ValueError("tol must be positive")
    # Delta_k - Delta_{k-1} == E_k - E_{k-1}; differencing E directly keeps exact zeros
    det = np.diff(np.asarray(model.energies)) - np.asarray(model.omegas)
    return ResonanceReport(tuple(det.tolist()), float(tol))


def coupling_matrix(g) -> SymmetricTridiagonal:
    """Zero-diagonal tridiagonal coupling matrix C(g_1..g_{n-1})."""
    g = as_couplings(g)
    return SymmetricTridiagonal(np.zeros(g.n), np.asarray(g.g))
