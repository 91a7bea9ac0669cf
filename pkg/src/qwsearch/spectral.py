"""Eigendecomposition, Schrodinger evolution and overlap sweeps."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ContractViolation, InvalidParameterError
from .quotient import Quotient, superposition_state

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def _matrix(H) -> np.ndarray:
    return np.asarray(getattr(H, "entries", H), dtype=float)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def eigh(H) -> SpectralDecomposition:
    """Full symmetric eigendecomposition, eigenvalues ascending.

    Each eigenvector is signed so its largest-magnitude entry is positive
    (the lowest index wins ties).
    """
    h = _matrix(H)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] == 0:
        raise ContractViolation("expected a non-empty square matrix")
    scale = max(1.0, float(np.abs(h).max()))
    if np.abs(h - h.T).max() > 1e-12 * scale:
        raise ContractViolation("matrix is not symmetric")
    w, v = np.linalg.eigh(h)
    mags = np.abs(v)
    lead = np.argmax(mags >= mags.max(axis=0) * (1 - 1e-12), axis=0)
    signs = np.sign(v[lead, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    v = v * signs
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


def _decomp(H) -> SpectralDecomposition:
    return H if isinstance(H, SpectralDecomposition) else eigh(H)


def evolve_many(H, psi0, times) -> np.ndarray:
    """States ``exp(-iHt) psi0`` for every ``t`` in ``times``; shape (T, d)."""
    dec = _decomp(H)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (dec.eigenvalues.size,):
        raise ContractViolation(
            f"state has shape {psi0.shape}, Hamiltonian has order {dec.eigenvalues.size}"
        )
    times = np.atleast_1d(np.asarray(times, dtype=float))
    v = dec.eigenvectors
    coeffs = v.T @ psi0
    phases = np.exp(-1j * np.outer(times, dec.eigenvalues))
    return (phases * coeffs) @ v.T


def evolve_state(H, psi0, t: float) -> np.ndarray:
    if t == 0:
        psi0 = np.asarray(psi0, dtype=complex)
        dec = _decomp(H)
        if psi0.shape != (dec.eigenvalues.size,):
            raise ContractViolation("state and Hamiltonian dimensions differ")
        return psi0.copy()
    return evolve_many(H, psi0, [t])[0]


def energy(H, psi) -> float:
    psi = np.asarray(psi, dtype=complex)
    return float(np.real(np.vdot(psi, _matrix(H) @ psi)))


@dataclass(frozen=True, eq=False)
class EvolutionResult:
    times: np.ndarray
    success_probability: np.ndarray
    peak_time: float
    peak_probability: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "probability"])
        for t, p in zip(self.times, self.success_probability):
            w.writerow([repr(float(t)), repr(float(p))])
        return buf.getvalue()


def golden_section_max(f, lo: float, hi: float, rtol: float = 1e-6) -> tuple[float, float]:
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rtol * max(abs(a), abs(b), 1e-300):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def success_curve(
    H, psi0, marked_index: int = 0, t_max: float = 1.0, num_points: int = 1024
) -> EvolutionResult:
    """Sample ``|<marked|psi(t)>|^2`` on a uniform grid and locate the first peak.

    The first peak is the first grid local maximum reaching at least half the
    grid maximum; it is refined by golden-section search between its grid
    neighbours.
    """
    if num_points < 2:
        raise InvalidParameterError("num_points must be at least 2")
    if not t_max > 0:
        raise InvalidParameterError("t_max must be positive")
    dec = _decomp(H)
    times = np.linspace(0.0, t_max, num_points)
    probs = np.abs(evolve_many(dec, psi0, times)[:, marked_index]) ** 2

    def prob_at(t: float) -> float:
        return float(np.abs(evolve_many(dec, psi0, [t])[0, marked_index]) ** 2)

    threshold = 0.5 * probs.max()
    interior = (probs[1:-1] >= probs[:-2]) & (probs[1:-1] > probs[2:]) & (probs[1:-1] >= threshold)
    hits = np.flatnonzero(interior)
    if hits.size:
        i = int(hits[0]) + 1
        t_peak, p_peak = golden_section_max(prob_at, times[i - 1], times[i + 1])
        if p_peak < probs[i]:
            t_peak, p_peak = float(times[i]), float(probs[i])
    else:
        i = int(np.argmax(probs))
        t_peak, p_peak = float(times[i]), float(probs[i])
    times.setflags(write=False)
    probs.setflags(write=False)
    return EvolutionResult(times, probs, float(t_peak), float(p_peak))


def spectral_gap(H) -> float:
    w = _decomp(H).eigenvalues
    return float(w[1] - w[0]) if w.size > 1 else 0.0


@dataclass(frozen=True, eq=False)
class SweepTable:
    gammas: np.ndarray
    eigenvalues: np.ndarray
    overlap_s: np.ndarray
    overlap_a: np.ndarray

    @property
    def k(self) -> int:
        return self.eigenvalues.shape[1]

    def header(self) -> list[str]:
        cols = ["gamma"]
        for i in range(self.k):
            cols += [f"eig_{i}", f"overlap_s_{i}", f"overlap_a_{i}"]
        return cols

    def rows(self):
        for g, w, s, a in zip(self.gammas, self.eigenvalues, self.overlap_s, self.overlap_a):
            row = [float(g)]
            for i in range(self.k):
                row += [float(w[i]), float(s[i]), float(a[i])]
            yield row

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.header())
        for row in self.rows():
            w.writerow([repr(x) for x in row])
        return buf.getvalue()


def overlap_sweep(q: Quotient, gamma_grid, k: int = 2, form: str = "auto") -> SweepTable:
    """Squared overlaps of the ``k`` lowest eigenstates with ``|s>`` and ``|a>``."""
    gammas = np.asarray(gamma_grid, dtype=float)
    if np.any(gammas <= 0):
        raise InvalidParameterError("gamma values must be positive")
    if not 1 <= k <= q.order:
        raise InvalidParameterError(f"k must lie in 1..{q.order}")
    s = superposition_state(q)
    eig = np.empty((gammas.size, k))
    ov_s = np.empty_like(eig)
    ov_a = np.empty_like(eig)
    for row, gamma in enumerate(gammas):
        dec = eigh(q.hamiltonian(gamma, form))
        vecs = dec.eigenvectors[:, :k]
        eig[row] = dec.eigenvalues[:k]
        ov_s[row] = (s @ vecs) ** 2
        ov_a[row] = vecs[0] ** 2
    return SweepTable(gammas, eig, ov_s, ov_a)


def minimum_gap_gamma(q: Quotient, bracket: tuple[float, float], form: str = "auto") -> float:
    """Jumping rate minimising the exact ground-state gap inside ``bracket``."""
    lo, hi = bracket
    res = minimize_scalar(
        lambda g: spectral_gap(q.hamiltonian(g, form)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-12 * hi},
    )
    return float(res.x)
