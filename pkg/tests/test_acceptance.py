"""Acceptance suite: one group of tests per criterion, summarized at the end of the run."""

import time
from math import pi, sqrt

import numpy as np
import pytest

from qwsearch import (
    complete_graph,
    eigh,
    equitable_partition,
    evolve_state,
    hypercube_quotient,
    overlap_sweep,
    quotient,
    simplex_complete_graph,
    success_curve,
    superposition_state,
)
from qwsearch.cli import main
from qwsearch.perturbation import (
    analyze,
    default_split,
    effective_subspace,
    split,
    table1_column,
    unmarked_uniform_state,
)
from qwsearch.quotient import family_quotient
from qwsearch.spectral import energy, minimum_gap_gamma

from .test_cli import REFERENCE_TABLE1
from .test_quotient import complete_display, simplex_display

criterion = pytest.mark.criterion


@criterion(1, "table1 columns at 6 decimals, < 1 s")
def test_criterion_1_table1(capsys):
    start = time.perf_counter()
    code = main(["table1", "--n", ",".join(str(n) for n in range(10, 101, 10))])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    assert code == 0
    assert out == REFERENCE_TABLE1
    assert elapsed < 1.0


@criterion(2, "complete-graph quotient entries, 1e-12, < 1 s")
def test_criterion_2_complete_quotient():
    start = time.perf_counter()
    for N in (4, 64, 1024):
        g = complete_graph(N)
        for gamma in (1.0, 1 / N, 0.37):
            H = quotient(g, equitable_partition(g)).hamiltonian(gamma).entries
            assert np.max(np.abs(H - complete_display(N, gamma))) <= 1e-12
    assert time.perf_counter() - start < 1.0


@criterion(3, "simplex M=5 quotient equals the 7x7 display, 1e-12")
def test_criterion_3_simplex_quotient():
    g = simplex_complete_graph(5)
    for gamma in (1.0, 0.2, 1 / 3):
        H = quotient(g).hamiltonian(gamma).entries
        assert H.shape == (7, 7)
        assert np.max(np.abs(H - simplex_display(5, gamma))) <= 1e-12


def _crossing(x, f, g):
    d = np.asarray(f) - np.asarray(g)
    zeros = np.flatnonzero(d == 0)
    strict = np.flatnonzero(d[:-1] * d[1:] < 0)
    assert zeros.size + strict.size == 1, (zeros, strict)
    if zeros.size:
        return x[zeros[0]]
    i = strict[0]
    return x[i] - d[i] * (x[i + 1] - x[i]) / (d[i + 1] - d[i])


@criterion(4, "overlap sweep on complete N=1024, 200 points, < 5 s")
def test_criterion_4_overlap_sweep():
    N = 1024
    q = quotient(complete_graph(N))
    grid = np.linspace(0.1 / N, 3.0 / N, 199)
    grid = np.sort(np.append(grid, 1 / N))
    assert grid.size == 200
    start = time.perf_counter()
    table = overlap_sweep(q, grid, 2)
    elapsed = time.perf_counter() - start
    at = int(np.flatnonzero(grid == 1 / N)[0])
    for i in range(2):
        assert abs(table.overlap_s[at, i] - 0.5) <= 0.05
        assert abs(table.overlap_a[at, i] - 0.5) <= 0.05
    cross = _crossing(grid, table.overlap_s[:, 0], table.overlap_a[:, 0])
    assert 0.8 / N <= cross <= 1.2 / N
    assert elapsed < 5.0


@criterion(5, "complete N=1024 peak >= 0.99 near pi*sqrt(N)/2; gap 2/sqrt(N)")
def test_criterion_5_complete_dynamics():
    N = 1024
    q = quotient(complete_graph(N))
    H = q.hamiltonian(1 / N)
    w = eigh(H).eigenvalues
    assert abs((w[1] - w[0]) - 2 / sqrt(N)) <= 1e-12
    target = pi * sqrt(N) / 2
    res = success_curve(H, superposition_state(q), 0, 2 * target, 1024)
    assert res.peak_probability >= 0.99
    assert abs(res.peak_time - target) <= 0.02 * target


HYPERCUBE_NS = range(8, 15)


def _hypercube_peak(n, gamma):
    q = hypercube_quotient(n)
    N = 2**n
    return success_curve(q.hamiltonian(gamma), superposition_state(q), 0, 2 * pi * sqrt(N), 2048)


def _fit_exponent(gamma_of_n):
    Ns, Ts = [], []
    for n in HYPERCUBE_NS:
        Ns.append(2.0**n)
        Ts.append(_hypercube_peak(n, gamma_of_n(n)).peak_time)
    slope, _ = np.polyfit(np.log(Ns), np.log(Ts), 1)
    return slope


def _table1_gamma(n):
    return table1_column([n])[0].one_over_actual_eig


@criterion(6, "hypercube at the table1 gamma: n=10 peak >= 0.5; time exponent 0.5 +/- 0.05, < 30 s")
def test_criterion_6_hypercube_peak_n10():
    res = _hypercube_peak(10, _table1_gamma(10))
    assert res.peak_probability >= 0.5, f"peak {res.peak_probability:.4f} at t={res.peak_time:.3f}"


@criterion(6, "hypercube at the table1 gamma: n=10 peak >= 0.5; time exponent 0.5 +/- 0.05, < 30 s")
def test_criterion_6_hypercube_scaling():
    start = time.perf_counter()
    slope = _fit_exponent(_table1_gamma)
    assert time.perf_counter() - start < 30.0
    assert abs(slope - 0.5) <= 0.05, f"fitted exponent {slope:.4f}"


def _min_gap_gamma(n):
    g1 = _table1_gamma(n)
    return minimum_gap_gamma(hypercube_quotient(n), (0.8 * g1, 1.5 * g1))


@criterion("6s", "supplementary: same checks at the gap-minimizing gamma")
def test_criterion_6_supplement_at_minimum_gap():
    assert _hypercube_peak(10, _min_gap_gamma(10)).peak_probability >= 0.5
    slope = _fit_exponent(_min_gap_gamma)
    assert abs(slope - 0.5) <= 0.05, f"fitted exponent {slope:.4f}"


@criterion(7, "full vs reduced curves agree to 1e-10 (verify exit 0)")
@pytest.mark.parametrize("family, size", [("hypercube", "6"), ("simplex", "4"), ("complete", "64")])
def test_criterion_7_oracle_equivalence(capsys, family, size):
    code = main(["verify", "--family", family, "--size", size])
    capsys.readouterr()
    assert code == 0


@criterion(8, "effective 2x2: complete N=1024 and hypercube n=10 coupling")
def test_criterion_8_complete_effective():
    N = 1024
    eff = analyze(quotient(complete_graph(N)), default_split("complete")).effective
    assert eff.dimension == 2
    c = eff.coefficients
    # columns are eigenvectors in the (|a>, bulk) basis: (1, 1)/sqrt2 and (1, -1)/sqrt2 up to sign
    for col, sign in ((0, 1), (1, -1)):
        v = c[:, col] * np.sign(c[0, col])
        np.testing.assert_allclose(v, np.array([1, sign]) / sqrt(2), atol=1e-2)
    np.testing.assert_allclose(eff.eigenvalues, [-1 - 1 / sqrt(N), -1 + 1 / sqrt(N)], atol=2 / N)


@criterion(8, "effective 2x2: complete N=1024 and hypercube n=10 coupling")
def test_criterion_8_hypercube_effective():
    n, N = 10, 2**10
    q = hypercube_quotient(n)
    a = analyze(q, default_split("hypercube"))
    eff = effective_subspace(a.hamiltonian, a.split, bulk_states=[unmarked_uniform_state(q)])
    assert eff.dimension == 2
    target = -1 / sqrt(N - 1)
    assert abs(eff.effective_matrix[0, 1] - target) <= 0.05 * abs(target)


def _random_symmetric(rng, d):
    a = rng.uniform(-10, 10, size=(d, d))
    return np.triu(a) + np.triu(a, 1).T


@criterion(9, "property suites, split exactness, simplex class count")
def test_criterion_9_properties():
    rng = np.random.default_rng(20240531)
    for _ in range(120):
        d = int(rng.integers(1, 51))
        h = _random_symmetric(rng, d)
        dec = eigh(h)
        w, v = dec.eigenvalues, dec.eigenvectors
        scale = max(1.0, float(np.abs(w).max()))
        assert np.max(np.linalg.norm(h @ v - v * w, axis=0)) <= 1e-10 * scale
        psi0 = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi0 /= np.linalg.norm(psi0)
        t = float(rng.uniform(-50, 50))
        psi = evolve_state(h, psi0, t)
        assert abs(np.linalg.norm(psi) - 1) <= 1e-10
        assert abs(energy(h, psi) - energy(h, psi0)) <= 1e-10 * scale


@criterion(9, "property suites, split exactness, simplex class count")
def test_criterion_9_split_exactness():
    rng = np.random.default_rng(7)
    cases = [("complete", 256), ("simplex", 32), ("hypercube", 10)]
    for kind, size in cases:
        q = family_quotient(kind, size)
        spec = default_split(kind)
        for gamma in rng.uniform(1e-4, 2.0, size=25):
            H = q.hamiltonian(float(gamma))
            parts = split(H, spec)
            assert (parts.h0 + parts.h1).tobytes() == H.entries.tobytes()


@criterion(9, "property suites, split exactness, simplex class count")
@pytest.mark.parametrize("M", range(3, 13))
def test_criterion_9_simplex_classes(M):
    assert equitable_partition(simplex_complete_graph(M)).num_classes == 7
