"""Seeded randomized property battery behind ``multirabi verify``.

Every draw ``i`` uses its own generator seeded with ``(seed, i)`` so a failure
can be replayed in isolation. Nothing time-dependent goes into the report,
which keeps it byte-identical for a fixed seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import closed_form
from .errors import DegenerateSpectrum
from .evolution import (Kernel, PropagatorOptions, populations, propagator,
                        schrodinger_residual)
from .ladder import LadderModel, build_hamiltonian, coupling_matrix
from .spectral import expm_series, tridiag_eigen

RESIDUAL_H = 1e-5
RATIO_H = 1e-3

TOLERANCES = {
    "closed_vs_series": 1e-10,
    "closed_unitarity": 1e-11,
    "group_law": 1e-10,
    "determinant": 1e-10,
    "closed_eigvec_orthonormality": 1e-10,
    "char_poly_residual": 1e-10,
    "product_identity": 1e-12,
    "spectral_vs_series": 1e-10,
    "oracle_unitarity": 1e-11,
    "eigen_orthonormality": 1e-12,
    "eigen_residual": 1e-11,
    "spectral_symmetry": 1e-11,
    "kernel_agreement": 1e-9,
    "phase_invariance": 1e-12,
    "energy_shift": 1e-12,
    "propagator_unitarity": 1e-10,
    "schrodinger_residual": 1e-7,
    "schrodinger_order": 0.3,
}


def random_model(rng, n, g_range=(0.1, 5.0)) -> LadderModel:
    """Resonant ladder with strictly decreasing spacings and random phases."""
    while True:
        spacings = np.sort(rng.uniform(0.5, 3.0, n - 1))[::-1]
        if n < 3 or np.all(np.diff(spacings) < 0):
            break
    e0 = rng.uniform(-1.0, 1.0)
    energies = e0 + np.concatenate(([0.0], np.cumsum(spacings)))
    g = rng.uniform(*g_range, n - 1)
    phis = rng.uniform(0.0, 2 * math.pi, n - 1)
    return LadderModel(tuple(energies), tuple(spacings), tuple(phis), tuple(g))


def _unitarity(M):
    return float(np.max(np.abs(M @ M.conj().T - np.eye(M.shape[0]))))


@dataclass
class PropertyStat:
    name: str
    tol: float
    max_defect: float = 0.0
    count: int = 0
    failures: list = field(default_factory=list)

    def add(self, defect, where):
        self.count += 1
        if not defect <= self.max_defect:
            self.max_defect = float(defect)
        if not defect <= self.tol:
            self.failures.append((float(defect), where))

    @property
    def ok(self) -> bool:
        return not self.failures


@dataclass
class VerifyReport:
    seed: int
    draws: int
    stats: dict
    rejected: int = 0

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.stats.values())

    def render(self) -> str:
        lines = [f"multirabi verify: seed={self.seed} draws={self.draws}",
                 f"closed-form draws rejected as degenerate: {self.rejected}",
                 f"{'property':<30} {'checks':>7} {'max defect':>12} {'tol':>9}  status"]
        for s in self.stats.values():
            status = "PASS" if s.ok else "FAIL"
            lines.append(f"{s.name:<30} {s.count:>7d} {s.max_defect:>12.3e} {s.tol:>9.1e}  {status}")
        for s in self.stats.values():
            for defect, where in s.failures[:10]:
                lines.append(f"FAILED {s.name}: defect={defect:.3e} {where}")
        lines.append("result: " + ("PASS" if self.ok else "FAIL"))
        return "\n".join(lines) + "\n"


def _fmt(arr):
    return "[" + ", ".join(f"{v:.17g}" for v in np.ravel(arr)) + "]"


def _closed_checks(rng, n, stats, where):
    g = rng.uniform(0.1, 10.0, n - 1)
    t = rng.uniform(0.0, 20.0)
    s, u = rng.uniform(0.0, 5.0, 2)
    where = f"{where} n={n} g={_fmt(g)} t={t:.17g}"
    try:
        M = closed_form.expc(g, t)
    except DegenerateSpectrum:
        return 1
    C = coupling_matrix(g).dense()
    stats["closed_vs_series"].add(np.max(np.abs(M - expm_series(C, t))), where)
    stats["closed_unitarity"].add(_unitarity(M), where)
    lhs = closed_form.expc(g, s + u)
    rhs = closed_form.expc(g, s) @ closed_form.expc(g, u)
    stats["group_law"].add(np.max(np.abs(lhs - rhs)), f"{where} s={s:.17g} u={u:.17g}")
    stats["determinant"].add(abs(np.linalg.det(M) - 1.0), where)
    if n == 3:
        return 0

    if n == 4:
        sp = closed_form.spectrum4(g)
        W = closed_form.eigenvectors4(sp)
        coeff = (1.0, -(g[0] ** 2 + g[1] ** 2 + g[2] ** 2), (g[0] * g[2]) ** 2)
        product = abs(sp.lam * sp.lam2 - g[0] * g[2]) / (g[0] * g[2])
    else:
        sp = closed_form.spectrum5(g)
        W = closed_form.eigenvectors5(sp)
        coeff = (1.0, -sp.A, sp.B)
        product = abs(sp.lam * sp.lam2 - math.sqrt(sp.B)) / math.sqrt(sp.B)
    stats["closed_eigvec_orthonormality"].add(np.max(np.abs(W.T @ W - np.eye(n))), where)
    quartic = max(abs(coeff[0] * x ** 4 + coeff[1] * x ** 2 + coeff[2]) for x in (sp.lam, sp.lam2))
    stats["char_poly_residual"].add(quartic / sp.A ** 2, where)
    stats["product_identity"].add(product, where)
    return 0


def _spectral_checks(rng, stats, where):
    n = int(rng.integers(2, 9))
    g = rng.uniform(0.0, 10.0, n - 1)
    t = rng.uniform(0.0, 20.0)
    where = f"{where} n={n} g={_fmt(g)} t={t:.17g}"
    C = coupling_matrix(g)
    dec = tridiag_eigen(C)
    lam, W = dec.eigenvalues, dec.W
    dense = C.dense()
    stats["eigen_orthonormality"].add(np.max(np.abs(W.T @ W - np.eye(n))), where)
    stats["eigen_residual"].add(
        np.max(np.abs(dense @ W - W * lam)) / max(1.0, float(np.max(np.abs(lam)))), where)
    stats["spectral_symmetry"].add(float(np.max(np.abs(lam + lam[::-1]))), where)
    Ms = dec.expm(t)
    Mt = expm_series(dense, t)
    stats["spectral_vs_series"].add(np.max(np.abs(Ms - Mt)), where)
    stats["oracle_unitarity"].add(max(_unitarity(Ms), _unitarity(Mt)), where)


def _model_checks(rng, stats, where):
    n = int(rng.integers(2, 7))
    model = random_model(rng, n)
    t = rng.uniform(0.5, 5.0)
    where = (f"{where} n={n} E={_fmt(model.energies)} g={_fmt(model.couplings.g)} "
             f"phi={_fmt(model.phis)} t={t:.17g}")
    U = propagator(model, t)
    stats["propagator_unitarity"].add(_unitarity(U), where)

    if n <= 5:
        try:
            Uc = propagator(model, t, PropagatorOptions(Kernel.CLOSED_FORM))
        except DegenerateSpectrum:
            Uc = None
        if Uc is not None:
            Us = propagator(model, t, PropagatorOptions(Kernel.SPECTRAL))
            stats["kernel_agreement"].add(np.max(np.abs(Uc - Us)), where)

    phis = rng.uniform(0.0, 2 * math.pi, n - 1)
    other = LadderModel(model.energies, model.omegas, tuple(phis), model.couplings)
    initial = int(rng.integers(0, n))
    grid = np.linspace(0.0, t, 5)
    drift = max(np.max(np.abs(populations(propagator(model, s), initial)
                              - populations(propagator(other, s), initial))) for s in grid)
    stats["phase_invariance"].add(drift, f"{where} phi'={_fmt(phis)} initial={initial}")

    c = rng.uniform(-5.0, 5.0)
    shifted = LadderModel(tuple(np.asarray(model.energies) + c), model.omegas,
                          model.phis, model.couplings)
    stats["energy_shift"].add(
        np.max(np.abs(propagator(shifted, t) - np.exp(-1j * t * c) * U)), f"{where} c={c:.17g}")

    hmax = float(np.max(np.abs(build_hamiltonian(model, t))))
    res = schrodinger_residual(model, t, RESIDUAL_H)
    stats["schrodinger_residual"].add(res / hmax, where)
    ratio = schrodinger_residual(model, t, RATIO_H) / schrodinger_residual(model, t, RATIO_H / 2)
    stats["schrodinger_order"].add(abs(ratio - 4.0), f"{where} ratio={ratio:.6f}")


def run_battery(seed: int, draws: int) -> VerifyReport:
    if draws < 1:
        raise ValueError("draws must be >= 1")
    stats = {name: PropertyStat(name, tol) for name, tol in TOLERANCES.items()}
    rejected = 0
    for i in range(draws):
        rng = np.random.default_rng([seed, i])
        where = f"seed=({seed},{i})"
        rejected += _closed_checks(rng, 3 + i % 3, stats, where)
        _spectral_checks(rng, stats, where)
        _model_checks(rng, stats, where)
    return VerifyReport(seed, draws, stats, rejected)
