"""Spectral time evolution, fidelity traces, and design verification."""

import math

import numpy as np
import pytest

from spinstar import (
    LARGEST,
    SMALLEST,
    DesignInput,
    DesignSolution,
    EvolutionCache,
    ReducedParams,
    StarSpec,
    build_arrowhead,
    design,
    exchange_parities,
    fidelity_trace,
    propagate,
    reduced_matrix,
    transfer_time_grid,
    transition_amplitude,
    verify_design,
)


def _random_symmetric_matrix(rng, dim):
    raw = rng.standard_normal((dim, dim))
    return (raw + raw.T) / 2.0


# ---------------------------------------------------------------------------
# Propagation
# ---------------------------------------------------------------------------

def test_propagate_identity_at_t0():
    rng = np.random.default_rng(2)
    h = _random_symmetric_matrix(rng, 8)
    u = propagate(h, 0.0)
    assert np.max(np.abs(u - np.eye(8))) < 1e-12


def test_propagate_diagonal_hamiltonian():
    lam = np.array([0.3, -1.1, 2.0])
    u = propagate(np.diag(lam), 1.7)
    expected = np.diag(np.exp(-1j * lam * 1.7))
    assert np.max(np.abs(u - expected)) < 1e-12


def test_propagate_two_level_swap():
    # closed form: exp(-i t X) = cos(t) I - i sin(t) X
    h = np.array([[0.0, 1.0], [1.0, 0.0]])
    for t in (0.4, math.pi / 2, 2.9):
        u = propagate(h, t)
        expected = math.cos(t) * np.eye(2) - 1j * math.sin(t) * h
        assert np.max(np.abs(u - expected)) < 1e-12
    u = propagate(h, math.pi / 2)
    assert abs(abs(u[0, 1]) - 1.0) < 1e-12


def test_propagate_rejects_asymmetric():
    with pytest.raises(ValueError):
        propagate(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def test_unitarity_random_sweep():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(200):
        dim = int(rng.integers(2, 65))
        h = _random_symmetric_matrix(rng, dim)
        t = float(rng.uniform(0.0, 100.0))
        u = propagate(h, t)
        worst = max(worst, float(np.max(np.abs(u.conj().T @ u - np.eye(dim)))))
    assert worst < 1e-10


def test_group_property():
    rng = np.random.default_rng(5)
    h = _random_symmetric_matrix(rng, 12)
    t1, t2 = 0.9, 2.3
    gap = np.max(np.abs(propagate(h, t1 + t2) - propagate(h, t1) @ propagate(h, t2)))
    assert gap < 1e-9


def test_probability_conservation():
    rng = np.random.default_rng(7)
    h = _random_symmetric_matrix(rng, 32)
    cache = EvolutionCache.from_hamiltonian(h)
    for t in (0.1, 4.2, 77.0):
        total = sum(abs(cache.amplitude(t, 4, dst)) ** 2 for dst in range(32))
        assert abs(total - 1.0) < 1e-10


def test_evolution_cache_invariants():
    rng = np.random.default_rng(11)
    h = _random_symmetric_matrix(rng, 24)
    cache = EvolutionCache.from_hamiltonian(h)
    v, e = cache.eigenvectors, cache.eigenvalues
    assert np.max(np.abs((v * e) @ v.T - h)) < 1e-10
    assert np.max(np.abs(v.T @ v - np.eye(24))) < 1e-12
    assert cache.fingerprint == EvolutionCache.from_hamiltonian(h).fingerprint
    assert cache.fingerprint != EvolutionCache.from_hamiltonian(h + np.eye(24)).fingerprint


# ---------------------------------------------------------------------------
# Transition amplitudes and traces
# ---------------------------------------------------------------------------

def test_transition_amplitude_t0_off_diagonal():
    h = np.diag([1.0, 2.0, 3.0])
    assert transition_amplitude(h, 0.0, 0, 2) == 0.0


def test_transition_amplitude_at_transfer_time():
    sol = design(DesignInput(m=2, eta=4, root_choice=SMALLEST))
    h4 = reduced_matrix(sol.params)
    amp = transition_amplitude(h4, sol.transfer_time, 2, 3)
    assert abs(amp - 1.0) < 1e-9


def test_transition_amplitude_halfway_below_unit():
    sol = design(DesignInput(m=2, eta=4, root_choice=SMALLEST))
    h4 = reduced_matrix(sol.params)
    amp = transition_amplitude(h4, sol.transfer_time / 2.0, 2, 3)
    assert abs(amp) < 1.0


def test_transition_amplitude_index_validation():
    h = np.diag([1.0, 2.0])
    with pytest.raises(ValueError):
        transition_amplitude(h, 1.0, 0, 2)
    with pytest.raises(ValueError):
        transition_amplitude(h, 1.0, -1, 0)


def test_fidelity_trace_single_point():
    h = np.diag([1.0, 2.0, 3.0])
    trace = fidelity_trace(h, [0.0], 0, 1)
    assert list(trace.times) == [0.0]
    assert list(trace.values) == [0.0]


def test_fidelity_trace_peaks_at_transfer_time():
    sol = design(DesignInput(m=2, eta=4, root_choice=SMALLEST))
    h4 = reduced_matrix(sol.params)
    grid = np.linspace(0.0, sol.transfer_time, 801)
    trace = fidelity_trace(h4, grid, 2, 3)
    assert int(np.argmax(trace.values)) == len(grid) - 1
    assert trace.values[-1] >= 1.0 - 1e-9


def test_fidelity_trace_reuses_one_decomposition():
    sol = design(DesignInput(m=2, eta=4, root_choice=SMALLEST))
    h4 = reduced_matrix(sol.params)
    grid = transfer_time_grid(sol.transfer_time, steps=200)
    trace = fidelity_trace(h4, grid, 2, 3)
    pointwise = [abs(transition_amplitude(h4, float(t), 2, 3)) ** 2 for t in grid]
    assert np.max(np.abs(trace.values - np.asarray(pointwise))) < 1e-12


def test_fidelity_trace_offset_invariance():
    sol = design(DesignInput(m=3, eta=4))
    h = build_arrowhead(sol.realized).to_dense()
    grid = transfer_time_grid(sol.transfer_time, steps=400)
    base = fidelity_trace(h, grid, 1, 2)
    shifted = fidelity_trace(h + 7.3 * np.eye(h.shape[0]), grid, 1, 2)
    assert np.max(np.abs(base.values - shifted.values)) < 1e-12


def test_fidelity_trace_grid_validation():
    h = np.diag([1.0, 2.0])
    with pytest.raises(ValueError):
        fidelity_trace(h, [], 0, 1)
    with pytest.raises(ValueError):
        fidelity_trace(h, [0.0, 0.0], 0, 1)
    with pytest.raises(ValueError):
        fidelity_trace(h, [1.0, 0.5], 0, 1)


def test_transfer_time_grid_pins_tau():
    tau = 6.0836680139604175
    grid = transfer_time_grid(tau)
    assert grid.size == 1000
    assert np.min(np.abs(grid - tau)) < 1e-12
    assert grid[0] == 0.0
    assert abs(grid[-1] - 1.2 * tau) < 2.0 * (grid[1] - grid[0])
    spacing = np.diff(grid)
    assert np.max(spacing) - np.min(spacing) < 1e-15


def test_transfer_time_grid_outside_window_falls_back():
    grid = transfer_time_grid(50.0, t_max=1.0, steps=11)
    assert np.array_equal(grid, np.linspace(0.0, 1.0, 11))


def test_transfer_time_grid_validation():
    with pytest.raises(ValueError):
        transfer_time_grid(1.0, steps=1)
    with pytest.raises(ValueError):
        transfer_time_grid(1.0, t_max=-2.0)
    with pytest.raises(ValueError):
        transfer_time_grid(-1.0)


# ---------------------------------------------------------------------------
# Parities and verification
# ---------------------------------------------------------------------------

def test_exchange_parities_on_design():
    sol = design(DesignInput(m=2, eta=4, root_choice=SMALLEST))
    evals, vecs = np.linalg.eigh(reduced_matrix(sol.params))
    parities = exchange_parities(evals, vecs, 2, 3)
    antisym = int(np.argmin(np.abs(evals - sol.params.e)))
    expected = np.ones(4)
    expected[antisym] = -1.0
    assert np.max(np.abs(parities - expected)) < 1e-9


def test_exchange_parities_degenerate_cluster():
    # exactly degenerate pair: parity must split into one +1 and one -1
    h = np.diag([1.0, 1.0, 2.0, 3.0])
    h[0, 1] = h[1, 0] = 0.0
    evals, vecs = np.linalg.eigh(h)
    parities = exchange_parities(evals, vecs, 0, 1)
    assert sorted(np.round(parities[:2]).tolist()) == [-1.0, 1.0]
    assert np.allclose(parities[2:], 1.0)


def test_verify_design_passes_for_both_roots():
    for policy in (SMALLEST, LARGEST):
        sol = design(DesignInput(m=2, eta=4, root_choice=policy))
        report = verify_design(sol, tol=1e-9)
        assert report.passed
        assert report.fidelity_at_tau >= 1.0 - 1e-9
        assert report.spectrum_deviation <= 1e-9
        assert report.parity_check


def test_verify_design_detects_detuned_potential():
    sol = design(DesignInput(m=2, eta=4, root_choice=SMALLEST))
    e = sol.params.e * 1.01
    params = ReducedParams(a=sol.params.a, b=sol.params.b, c=1.0, d=sol.params.d, e=e, m=2)
    detuned = DesignSolution(
        params=params,
        eta=4,
        transfer_time=math.pi / e,
        target_spectrum=(0.0, e, 4 * e, -4 * e),
        root_residual=0.0,
        realized=StarSpec(4, 1.0, (params.a, e, e, params.d, params.d)),
    )
    report = verify_design(detuned, tol=1e-9)
    assert not report.passed
    assert report.fidelity_at_tau < 1.0 - 1e-4


def test_phase_cancellation_at_transfer_time():
    rng = np.random.default_rng(19)
    from spinstar import min_feasible_even_eta

    for _ in range(10):
        m = int(rng.integers(1, 101))
        eta = min_feasible_even_eta(m) + 2 * int(rng.integers(0, 6))
        sol = design(DesignInput(m=m, eta=eta))
        evals = np.linalg.eigvalsh(reduced_matrix(sol.params))
        tau = sol.transfer_time
        antisym = int(np.argmin(np.abs(evals - sol.params.e)))
        for k, energy in enumerate(evals):
            phase = np.exp(-1j * energy * tau)
            expected = -1.0 if k == antisym else 1.0
            assert abs(phase - expected) < 1e-9
