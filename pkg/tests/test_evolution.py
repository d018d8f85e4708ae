import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_c, max_abs, unitarity_defect
from multirabi import (DegenerateSpectrum, IndexOutOfRange, Kernel, LadderModel, NotResonant,
                       NotUnitary, PropagatorOptions, build_hamiltonian, expc2, expc3,
                       expm_series, populations, propagator, schrodinger_residual, spectrum4,
                       time_series)
from multirabi.evolution import select_kernel, unitarity_defect as lib_defect
from multirabi.verify import random_model

TRANSFER_T = math.pi / math.sqrt(2)


def three_level(phis=(0.0, 0.0), g=(1.0, 1.0)):
    return LadderModel.resonant((0.0, 1.0, 1.8), g, phis)


def test_identity_at_zero_without_phases():
    m = LadderModel.resonant((0, 1, 1.8, 2.4), (1, 2, 3))
    assert max_abs(propagator(m, 0.0), np.eye(4)) < 1e-14


def test_literal_initial_value_with_phases():
    m = three_level(phis=(math.pi / 3, 0.0))
    expected = np.diag([1, np.exp(-1j * math.pi / 3), np.exp(-1j * math.pi / 3)])
    assert max_abs(propagator(m, 0.0), expected) < 1e-15
    normalized = propagator(m, 0.0, PropagatorOptions(normalize_initial=True))
    assert max_abs(normalized, np.eye(3)) < 1e-15


def test_normalized_variant_is_right_multiplied():
    m = three_level(phis=(0.4, 1.9))
    U0 = propagator(m, 0.0)
    for t in (0.3, 2.0):
        U = propagator(m, t)
        V = propagator(m, t, PropagatorOptions(normalize_initial=True))
        assert max_abs(V, U @ U0.conj().T) < 1e-14


@pytest.mark.parametrize("phis", [(0.0, 0.0), (0.3, 2.0), (math.pi, -1.0)])
def test_three_level_full_transfer(phis):
    U = propagator(three_level(phis), TRANSFER_T)
    assert max_abs(populations(U, 0), [0, 0, 1]) < 1e-12


def test_off_resonance_raises_with_report():
    m = LadderModel((0, 1, 1.8), (1, 0.9), (0, 0), (1, 1))
    with pytest.raises(NotResonant) as info:
        propagator(m, 1.0)
    assert info.value.report.detunings[1] == pytest.approx(-0.1)


def test_populations_examples():
    assert list(populations(np.eye(3), 0)) == [1, 0, 0]
    assert max_abs(populations(expc2(1.0, math.pi / 4), 0), [0.5, 0.5]) < 1e-15
    assert max_abs(populations(expc3(1, 1, TRANSFER_T), 0), [0, 0, 1]) < 1e-15


def test_populations_errors():
    with pytest.raises(IndexOutOfRange):
        populations(np.eye(3), 3)
    with pytest.raises(IndexOutOfRange):
        populations(np.eye(3), -1)
    with pytest.raises(NotUnitary):
        populations(2 * np.eye(2), 0)


def test_kernel_selection():
    assert select_kernel((1, 2, 3)) is Kernel.CLOSED_FORM
    assert select_kernel((1, 0, 1)) is Kernel.SPECTRAL
    assert select_kernel((0, 1, 1, 0)) is Kernel.SPECTRAL
    assert select_kernel((0, 0, 0)) is Kernel.SPECTRAL
    assert select_kernel((1,) * 6) is Kernel.SPECTRAL
    assert select_kernel((1,), "closed") is Kernel.CLOSED_FORM
    with pytest.raises(ValueError):
        Kernel.parse("krylov")


def test_explicit_closed_kernel_propagates_degeneracy():
    m = LadderModel.resonant((0, 1, 1.8, 2.4), (1, 0, 1))
    with pytest.raises(DegenerateSpectrum):
        propagator(m, 1.0, PropagatorOptions(Kernel.CLOSED_FORM))


def test_time_series_single_point():
    ts = time_series(LadderModel.resonant((0, 1, 1.8, 2.4), (1, 2, 3)), [0.0], 0)
    assert ts.populations.shape == (1, 4)
    assert max_abs(ts.populations[0], [1, 0, 0, 0]) < 1e-14


def test_two_level_rabi_formula():
    m = LadderModel.resonant((0.0, 1.0), (0.5,), (0.7,))
    grid = np.linspace(0, 2 * math.pi / (2 * 0.5), 101)
    ts = time_series(m, grid, 0)
    assert max_abs(ts.populations[:, 0], np.cos(0.5 * grid) ** 2) < 1e-14
    assert ts.populations[50, 1] == pytest.approx(1.0, abs=1e-14)   # t = pi


def test_four_level_frequency_content():
    g = (1.0, 1.0, 1.0)
    m = LadderModel.resonant((0, 1, 1.8, 2.4), g)
    sp = spectrum4(g)
    dt, N = 0.05, 2 ** 14
    grid = dt * np.arange(N)
    p1 = time_series(m, grid, 0).populations[:, 1]
    # reference samples from the series oracle, independent of both kernels
    ref = np.array([abs(expm_series(dense_c(g), t)[1, 0]) ** 2 for t in grid[::64]])
    assert max_abs(p1[::64], ref) < 1e-10

    amp = np.abs(np.fft.rfft((p1 - p1.mean()) * np.hanning(N)))
    freqs = 2 * np.pi * np.fft.rfftfreq(N, dt)
    allowed = [sp.lam + sp.lam2, sp.lam - sp.lam2, 2 * sp.lam, 2 * sp.lam2]
    peaks = [i for i in range(1, len(amp) - 1)
             if amp[i] > amp[i - 1] and amp[i] >= amp[i + 1] and amp[i] > 0.05 * amp.max()]
    resolution = 2 * np.pi / (N * dt)
    assert peaks
    for i in peaks:
        assert min(abs(freqs[i] - f) for f in allowed) < 3 * resolution


def test_time_series_validates_grid():
    m = LadderModel.resonant((0, 1), (1,))
    with pytest.raises(ValueError):
        time_series(m, [1.0, 0.5], 0)
    with pytest.raises(ValueError):
        time_series(m, [-1.0], 0)
    with pytest.raises(IndexOutOfRange):
        time_series(m, [0.0], 2)


def test_time_series_keeps_propagators():
    m = three_level((0.2, 0.4))
    ts = time_series(m, [0.0, 0.5, 1.0], 1, keep_propagators=True)
    for t, U in zip(ts.times, ts.propagators):
        assert max_abs(U, propagator(m, t)) == 0
    assert ts.kernel is Kernel.CLOSED_FORM
    assert ts.max_unitarity_defect < 1e-14


def test_residual_free_evolution():
    h = 1e-4
    m = LadderModel.resonant((0.0, 0.4, 0.7), (0.0, 0.0), (0.5, 0.1))
    assert schrodinger_residual(m, 1.0, h) <= 1e-9
    # only truncation remains: |i(e^{-iEh} - e^{iEh})/2h - E| = |sin(Eh)/h - E| ~ h^2 E^3 / 6
    m = LadderModel.resonant((0.0, 1.0, 1.8), (0.0, 0.0), (0.5, 0.1))
    expected = abs(math.sin(1.8 * h) / h - 1.8)
    assert schrodinger_residual(m, 1.0, h) == pytest.approx(expected, rel=1e-3)


def test_residual_second_order():
    m = LadderModel.resonant((0.0, 1.0, 1.8, 2.4), (1, 2, 3), (0.3, 0.0, 1.0))
    ratio = schrodinger_residual(m, 1.0, 1e-3) / schrodinger_residual(m, 1.0, 5e-4)
    assert 3.7 <= ratio <= 4.3


def test_residual_five_levels():
    m = LadderModel.resonant((0.0, 1.0, 1.8, 2.4, 2.8), (1, 1, 1, 1))
    hmax = float(np.max(np.abs(build_hamiltonian(m, 2.0))))
    assert schrodinger_residual(m, 2.0, 1e-5) <= 1e-7 * hmax
    assert schrodinger_residual(m, 2.0) <= 1e-7 * hmax


def test_residual_preconditions():
    m = LadderModel.resonant((0, 1), (1,))
    with pytest.raises(ValueError):
        schrodinger_residual(m, 0.0, 1e-3)
    with pytest.raises(ValueError):
        schrodinger_residual(m, 1.0, 0.0)


seeds = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(2, 7), st.floats(0, 10))
def test_propagator_properties(seed, n, t):
    rng = np.random.default_rng(seed)
    m = random_model(rng, n)
    U = propagator(m, t)
    assert lib_defect(U) <= 1e-10
    if n <= 5 and select_kernel(m.couplings) is Kernel.CLOSED_FORM:
        Us = propagator(m, t, PropagatorOptions(Kernel.SPECTRAL))
        assert max_abs(U, Us) <= 1e-9

    other = LadderModel(m.energies, m.omegas, tuple(rng.uniform(-7, 7, n - 1)), m.couplings)
    grid = np.linspace(0, t, 4)
    a = time_series(m, grid, 0).populations
    b = time_series(other, grid, 0).populations
    assert max_abs(a, b) <= 1e-12
    assert np.all(np.abs(a.sum(axis=1) - 1) <= 1e-10)
    assert np.all((a >= -1e-12) & (a <= 1 + 1e-12))

    c = rng.uniform(-10, 10)
    shifted = LadderModel(tuple(np.add(m.energies, c)), m.omegas, m.phis, m.couplings)
    assert max_abs(propagator(shifted, t), np.exp(-1j * t * c) * U) <= 1e-12
    assert max_abs(time_series(shifted, grid, 0).populations, a) <= 1e-12
