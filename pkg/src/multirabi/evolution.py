"""Lab-frame propagator U(t) = exp(-itE_0) V(t)^dagger exp(-itC) and its readouts."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import closed_form
from .errors import DegenerateSpectrum, IndexOutOfRange, NotResonant, NotUnitary
from .ladder import (LadderModel, build_hamiltonian, coupling_matrix, frame_phases,
                     resonance_report)
from .spectral import expm_spectral

UNITARITY_TOL = 1e-8


class Kernel(str, enum.Enum):
    AUTO = "auto"
    CLOSED_FORM = "closed_form"
    SPECTRAL = "spectral"

    @classmethod
    def parse(cls, value) -> "Kernel":
        if isinstance(value, cls):
            return value
        aliases = {"closed": cls.CLOSED_FORM}
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown kernel {value!r}; expected auto, closed or spectral") from None


@dataclass(frozen=True)
class PropagatorOptions:
    kernel: Kernel = Kernel.AUTO
    normalize_initial: bool = False
    resonance_tol: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kernel", Kernel.parse(self.kernel))


def select_kernel(g, kernel=Kernel.AUTO) -> Kernel:
    """Resolve ``auto`` to the kernel that will actually run for couplings g."""
    kernel = Kernel.parse(kernel)
    if kernel is not Kernel.AUTO:
        return kernel
    n = len(g) + 1
    if n not in closed_form.CLOSED_FORM_SIZES:
        return Kernel.SPECTRAL
    try:
        if n == 4:
            closed_form.spectrum4(g)
        elif n == 5:
            closed_form.spectrum5(g)
    except DegenerateSpectrum:
        return Kernel.SPECTRAL
    return Kernel.CLOSED_FORM


def rotating_propagator(g, t: float, kernel=Kernel.AUTO) -> np.ndarray:
    """exp(-itC) through the requested kernel."""
    kernel = select_kernel(g, kernel)
    if t == 0:
        return np.eye(len(g) + 1, dtype=complex)
    if kernel is Kernel.CLOSED_FORM:
        return closed_form.expc(g, t)
    return expm_spectral(coupling_matrix(g), t)


def _check_resonant(model, opts):
    report = resonance_report(model, opts.resonance_tol)
    if not report.is_resonant:
        raise NotResonant(report)


def propagator(model: LadderModel, t: float, opts: PropagatorOptions | None = None) -> np.ndarray:
    opts = opts or PropagatorOptions()
    _check_resonant(model, opts)
    K = rotating_propagator(model.couplings, t, opts.kernel)
    theta = frame_phases(model, t)
    U = np.exp(-1j * t * model.energies[0]) * np.exp(-1j * theta)[:, None] * K
    if opts.normalize_initial:
        # U(0) = V(0)^dagger, so U(t) U(0)^dagger = U(t) V(0)
        U = U * np.exp(1j * frame_phases(model, 0.0))[None, :]
    return U


def unitarity_defect(U: np.ndarray) -> float:
    return float(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))))


def populations(U: np.ndarray, initial: int) -> np.ndarray:
    """Born-rule occupations |U[k, initial]|^2 after starting in level ``initial``."""
    U = np.asarray(U)
    n = U.shape[0]
    if not 0 <= initial < n:
        raise IndexOutOfRange(f"initial level {initial} outside 0..{n - 1}")
    defect = unitarity_defect(U)
    if defect > UNITARITY_TOL:
        raise NotUnitary(f"unitarity defect {defect:.3e} exceeds {UNITARITY_TOL:.0e}")
    return np.abs(U[:, initial]) ** 2


@dataclass(frozen=True)
class TimeSeries:
    times: np.ndarray
    populations: np.ndarray
    propagators: np.ndarray | None = None
    kernel: Kernel = Kernel.AUTO
    max_unitarity_defect: float = 0.0


def time_series(model: LadderModel, t_grid, initial: int = 0,
                opts: PropagatorOptions | None = None,
                keep_propagators: bool = False) -> TimeSeries:
    opts = opts or PropagatorOptions()
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d sequence")
    if np.any(times < 0) or np.any(np.diff(times) < 0):
        raise ValueError("t_grid must be non-negative and sorted ascending")
    if not 0 <= initial < model.n:
        raise IndexOutOfRange(f"initial level {initial} outside 0..{model.n - 1}")
    _check_resonant(model, opts)
    # resolve once so every grid point runs the same kernel
    kernel = select_kernel(model.couplings, opts.kernel)
    fixed = PropagatorOptions(kernel, opts.normalize_initial, opts.resonance_tol)

    pops = np.empty((times.size, model.n))
    props = np.empty((times.size, model.n, model.n), dtype=complex) if keep_propagators else None
    worst = 0.0
    for i, t in enumerate(times):
        U = propagator(model, t, fixed)
        worst = max(worst, unitarity_defect(U))
        pops[i] = populations(U, initial)
        if props is not None:
            props[i] = U
    return TimeSeries(times, pops, props, kernel, worst)


def default_step(model: LadderModel, t: float) -> float:
    hmax = float(np.max(np.abs(build_hamiltonian(model, t))))
    return 1e-5 * max(1.0, 1.0 / hmax) if hmax > 0 else 1e-5


def schrodinger_residual(model: LadderModel, t: float, h: float | None = None,
                         opts: PropagatorOptions | None = None) -> float:
    """max |i (U(t+h) - U(t-h)) / 2h - H(t) U(t)| over all entries.

    The un-normalized propagator is always used (``normalize_initial`` is
    ignored); the equation is linear so both variants satisfy it anyway.
    """
    opts = opts or PropagatorOptions()
    opts = PropagatorOptions(opts.kernel, False, opts.resonance_tol)
    if h is None:
        h = default_step(model, t)
    if not h > 0:
        raise ValueError("h must be positive")
    if t - h < 0:
        raise ValueError("need t - h >= 0")
    plus = propagator(model, t + h, opts)
    minus = propagator(model, t - h, opts)
    here = propagator(model, t, opts)
    lhs = 1j * (plus - minus) / (2.0 * h)
    return float(np.max(np.abs(lhs - build_hamiltonian(model, t) @ here)))
