"""Degenerate perturbation analysis of reduced search Hamiltonians.

The reduced Hamiltonian is read as a small weighted graph with self-loops.
Entries are split into a leading-order part ``h0`` and a perturbation ``h1``;
the jumping rate is tuned so the marked vertex's ``h0`` level becomes
degenerate with a bulk level, and the full Hamiltonian restricted to that
degenerate eigenspace gives the transition gap and the runtime ``pi/gap``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ContractViolation, NoCrossingError, NoDegeneracyError, QWSearchError
from .quotient import (
    Quotient,
    ReducedHamiltonian,
    family_quotient,
    hypercube_quotient,
    superposition_state,
)
from .spectral import eigh, success_curve

# Reference sizes for exponent estimation; the hypercube has no fixed-dimension pair.
EXPONENT_SIZES = {"complete": (64, 256), "simplex": (16, 64)}


def estimate_exponents(
    builder: Callable[[int], Quotient],
    size1: int,
    size2: int,
    gamma_of_size: Callable[[int], float] | None = None,
) -> np.ndarray:
    """Scaling exponent ``p`` of each reduced entry, ``entry ~ c * size**p``.

    Entries are measured in units of ``-gamma``: the walk matrix, with the
    oracle's ``1/gamma`` self-loop added at (0, 0) using ``gamma_of_size``
    (default ``1/degree``). Zero entries get ``-inf``.
    """
    if not size2 > size1:
        raise ContractViolation("size2 must exceed size1")
    q1, q2 = builder(size1), builder(size2)
    if q1.order != q2.order or np.any((q1.counts == 0) != (q2.counts == 0)):
        raise ContractViolation(
            "reduced structure differs between sizes; use an explicit mask split instead"
        )
    if gamma_of_size is None:
        gammas = (1.0 / q1.max_degree, 1.0 / q2.max_degree)
    else:
        gammas = (gamma_of_size(size1), gamma_of_size(size2))
    mats = []
    for q, g in zip((q1, q2), gammas):
        m = q.walk_matrix()
        m[0, 0] += 1.0 / g
        mats.append(np.abs(m))
    m1, m2 = mats
    p = np.full(m1.shape, -np.inf)
    nz = (m1 > 0) & (m2 > 0)
    p[nz] = np.log(m2[nz] / m1[nz]) / math.log(size2 / size1)
    p[nz & (m1 == m2)] = 0.0
    return p


@dataclass(frozen=True, eq=False)
class SplitSpec:
    """How to divide reduced entries between ``h0`` and ``h1``.

    ``mode="threshold"`` sends entries whose exponent is at most ``cutoff`` to
    ``h1``; ``mode="mask"`` sends the listed positions to ``h1``. The oracle
    entry (0, 0) always stays in ``h0``.
    """

    mode: str
    cutoff: float | None = None
    mask: frozenset[tuple[int, int]] = frozenset()
    exponents: np.ndarray | None = None

    @classmethod
    def threshold(cls, cutoff: float, exponents: np.ndarray) -> SplitSpec:
        return cls("threshold", cutoff=float(cutoff), exponents=np.asarray(exponents, dtype=float))

    @classmethod
    def explicit_mask(cls, positions) -> SplitSpec:
        pos = set()
        for i, j in positions:
            pos.add((int(i), int(j)))
            pos.add((int(j), int(i)))
        if (0, 0) in pos:
            raise ContractViolation("the oracle entry (0, 0) cannot be perturbative")
        return cls("mask", mask=frozenset(pos))

    def h1_mask(self, d: int) -> np.ndarray:
        if self.mode == "threshold":
            if self.exponents is None or self.exponents.shape != (d, d):
                raise ContractViolation(f"exponent map does not match dimension {d}")
            m = self.exponents <= self.cutoff
        elif self.mode == "mask":
            m = np.zeros((d, d), dtype=bool)
            for i, j in self.mask:
                if not (0 <= i < d and 0 <= j < d):
                    raise ContractViolation(f"mask position ({i}, {j}) outside {d}x{d} matrix")
                m[i, j] = True
        else:
            raise ContractViolation(f"unknown split mode {self.mode!r}")
        m = m.copy()
        m[0, 0] = False
        return m


@dataclass(frozen=True, eq=False)
class PerturbationSplit:
    h0: np.ndarray
    h1: np.ndarray
    gamma: float


def split(H: ReducedHamiltonian, spec: SplitSpec) -> PerturbationSplit:
    h = np.asarray(H.entries, dtype=float)
    mask = spec.h1_mask(h.shape[0])
    # signed zeros keep h0 + h1 == H bit-for-bit, including -0.0 entries
    zero = np.copysign(0.0, h)
    h0 = np.where(mask, zero, h)
    h1 = np.where(mask, h, zero)
    h0.setflags(write=False)
    h1.setflags(write=False)
    return PerturbationSplit(h0, h1, H.gamma)


@dataclass(frozen=True)
class CriticalGamma:
    gamma_c: float
    crossings: int
    warnings: tuple[str, ...] = ()


def _pick(vecs: np.ndarray, ref: np.ndarray, exclude: int | None = None) -> int:
    score = np.abs(ref @ vecs)
    if exclude is not None:
        score[exclude] = -1.0
    return int(np.argmax(score))


def critical_gamma(
    h0_builder: Callable[[float], np.ndarray],
    select_a: np.ndarray,
    select_b: np.ndarray,
    bracket: tuple[float, float],
    *,
    samples: int = 64,
    rtol: float = 1e-12,
) -> CriticalGamma:
    """Jumping rate where two tracked ``h0`` eigenvalue curves cross.

    ``select_a``/``select_b`` are reference vectors: at the lower bracket end
    the eigenvectors overlapping them most are chosen, and from there each
    curve is followed by maximal eigenvector overlap with the previous sample.
    Bisection on ``E_a - E_b`` then refines the first sign change.
    """
    lo, hi = bracket
    if not 0 < lo < hi:
        raise ContractViolation("bracket must satisfy 0 < lo < hi")
    ref_a = np.asarray(select_a, dtype=float)
    ref_b = np.asarray(select_b, dtype=float)

    def evaluate(g, va, vb):
        dec = eigh(h0_builder(g))
        ia = _pick(dec.eigenvectors, va)
        ib = _pick(dec.eigenvectors, vb, exclude=ia)
        w, v = dec.eigenvalues, dec.eigenvectors
        return w[ia] - w[ib], v[:, ia], v[:, ib]

    grid = np.geomspace(lo, hi, samples)
    fs, tracked = [], []
    va, vb = ref_a, ref_b
    for g in grid:
        f, va, vb = evaluate(g, va, vb)
        fs.append(f)
        tracked.append((va, vb))
    fs = np.array(fs)
    sign = np.sign(fs)
    changes = np.flatnonzero((sign[:-1] * sign[1:] < 0) | (sign[:-1] == 0))
    if sign[-1] == 0:
        changes = np.append(changes, samples - 1)
    if changes.size == 0:
        raise NoCrossingError(f"no eigenvalue crossing in [{lo}, {hi}]")
    notes = []
    if changes.size > 1:
        msg = f"{changes.size} crossings found in bracket; using the lowest"
        notes.append(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    i = int(changes[0])
    if sign[i] == 0:
        return CriticalGamma(float(grid[i]), int(changes.size), tuple(notes))
    a, b = grid[i], grid[i + 1]
    fa = fs[i]
    va, vb = tracked[i]
    while (b - a) > rtol * b:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            break
        fm, wa, wb = evaluate(mid, va, vb)
        if fm == 0:
            a = b = mid
            break
        if np.sign(fm) == np.sign(fa):
            a, fa, va, vb = mid, fm, wa, wb
        else:
            b = mid
    return CriticalGamma(float(0.5 * (a + b)), int(changes.size), tuple(notes))


def decoupled_critical_gamma(walk: np.ndarray, target: float | None = None) -> float:
    """``1/lambda`` for an ``h0`` that isolates the marked vertex.

    ``lambda`` is the eigenvalue of the unmarked block of the walk matrix
    nearest ``target`` (its largest eigenvalue by default).
    """
    w = np.linalg.eigvalsh(np.asarray(walk, dtype=float)[1:, 1:])
    lam = w[-1] if target is None else w[np.argmin(np.abs(w - target))]
    return float(1.0 / lam)


@dataclass(frozen=True)
class Table1Row:
    n: int
    one_over_actual_eig: float
    one_over_n: float

    def csv_line(self) -> str:
        return f"{self.n},{self.one_over_actual_eig:.6f},{self.one_over_n:.6f}"


def table1_column(n_list) -> list[Table1Row]:
    rows = []
    for n in n_list:
        if n < 2:
            raise ContractViolation("table rows need n >= 2")
        gc = decoupled_critical_gamma(hypercube_quotient(n).walk_matrix(), target=n)
        rows.append(Table1Row(int(n), round(gc, 6), round(1.0 / n, 6)))
    return rows


@dataclass(frozen=True, eq=False)
class EffectiveSubspace:
    gamma_c: float
    degenerate_value: float
    basis: np.ndarray
    effective_matrix: np.ndarray
    eigenvalues: np.ndarray
    coefficients: np.ndarray
    gap: float
    runtime: float
    transition_pair: tuple[int, int]

    @property
    def dimension(self) -> int:
        return self.basis.shape[1]


def _canonical_basis(vecs: np.ndarray, s: np.ndarray | None) -> np.ndarray:
    """Rotate a cluster basis so column 0 is the marked vertex's projection.

    Remaining columns are the original eigenvectors with that direction
    removed, Gram-Schmidt orthonormalised, each signed to overlap ``|s>``
    non-negatively.
    """
    pa = vecs @ vecs[0]
    cols = [pa / np.linalg.norm(pa)]
    rest = [v - cols[0] * (cols[0] @ v) for v in vecs.T]
    rest.sort(key=lambda v: -np.linalg.norm(v))
    for v in rest:
        for c in cols:
            v = v - c * (c @ v)
        norm = np.linalg.norm(v)
        if norm < 1e-8 or len(cols) == vecs.shape[1]:
            continue
        v = v / norm
        if s is not None and s @ v < 0:
            v = -v
        cols.append(v)
    return np.column_stack(cols)


def _orthonormal_bulk(states, marked_dir: np.ndarray) -> list[np.ndarray]:
    cols = [marked_dir]
    for st in states:
        v = np.asarray(st, dtype=float)
        for c in cols:
            v = v - c * (c @ v)
        norm = np.linalg.norm(v)
        if norm < 1e-8:
            raise ContractViolation("bulk states are linearly dependent on the marked direction")
        cols.append(v / norm)
    return cols[1:]


def effective_subspace(
    H: ReducedHamiltonian,
    split_result: PerturbationSplit,
    degeneracy_tol: float = 1e-6,
    superposition: np.ndarray | None = None,
    bulk_states=None,
) -> EffectiveSubspace:
    """Full ``H`` restricted to the degenerate ``h0`` eigenspace of the marked level.

    Candidate marked levels are the ``h0`` eigenvalues whose eigenvectors
    touch ``|a>``, tried in order of decreasing ``|a>`` weight; the first
    with another eigenvalue within ``degeneracy_tol`` (relative) forms the
    cluster. The gap uses the two effective eigenvectors with the largest
    squared ``|a>`` component.

    ``bulk_states`` replaces the cluster's non-marked eigenvectors by given
    approximate eigenstates (e.g. the uniform state over unmarked vertices);
    each must lie mostly inside the cluster.
    """
    h = np.asarray(H.entries, dtype=float)
    dec = eigh(split_result.h0)
    w, v = dec.eigenvalues, dec.eigenvectors
    a_weight = v[0] ** 2
    idx = None
    for cand in np.argsort(-a_weight, kind="stable"):
        if a_weight[cand] <= 1e-12:
            break
        ref = w[cand]
        close = np.abs(w - ref) <= degeneracy_tol * max(abs(ref), np.finfo(float).tiny)
        if close.sum() >= 2:
            idx = np.flatnonzero(close)
            break
    if idx is None:
        raise NoDegeneracyError(f"no degenerate marked level of h0 at gamma={H.gamma!r}")
    degenerate_value = float(np.mean(w[idx]))
    basis = _canonical_basis(v[:, idx], superposition)
    if bulk_states is not None:
        bulk = _orthonormal_bulk(bulk_states, basis[:, 0])
        if len(bulk) >= idx.size:
            raise ContractViolation("more bulk states than degenerate directions")
        for b in bulk:
            if np.sum((basis.T @ b) ** 2) < 0.5:
                raise ContractViolation("bulk state lies mostly outside the degenerate eigenspace")
        basis = np.column_stack([basis[:, 0], *bulk])
    eff = basis.T @ h @ basis
    eff = 0.5 * (eff + eff.T)
    edec = eigh(eff)
    # a-weight of an effective eigenvector is its column-0 coefficient squared
    weight = edec.eigenvectors[0] ** 2
    top = np.sort(np.argsort(-weight, kind="stable")[:2])
    i, j = int(top[0]), int(top[1])
    gap = float(abs(edec.eigenvalues[j] - edec.eigenvalues[i]))
    runtime = math.pi / gap if gap > 0 else math.inf
    basis.setflags(write=False)
    eff.setflags(write=False)
    return EffectiveSubspace(
        gamma_c=float(H.gamma),
        degenerate_value=degenerate_value,
        basis=basis,
        effective_matrix=eff,
        eigenvalues=edec.eigenvalues,
        coefficients=edec.eigenvectors,
        gap=gap,
        runtime=runtime,
        transition_pair=(i, j),
    )


def unmarked_uniform_state(q: Quotient) -> np.ndarray:
    """Reduced coordinates of the uniform superposition over unmarked vertices."""
    sizes = q.class_sizes
    rest = sum(sizes) - sizes[0]
    return np.array([0.0] + [np.sqrt(s / rest) for s in sizes[1:]])


def default_split(kind: str, cutoff: float | None = None, mask=None) -> SplitSpec:
    """Split used for a family when no explicit choice is made.

    Complete and simplex graphs split by exponent threshold (0.75 unless
    ``cutoff`` is given); the hypercube disconnects the marked vertex.
    """
    if mask is not None:
        return SplitSpec.explicit_mask(mask)
    if kind in EXPONENT_SIZES:
        s1, s2 = EXPONENT_SIZES[kind]
        exps = estimate_exponents(lambda m: family_quotient(kind, m), s1, s2)
        return SplitSpec.threshold(0.75 if cutoff is None else cutoff, exps)
    if cutoff is not None:
        raise ContractViolation(f"cannot estimate exponents for {kind!r}; pass an explicit mask")
    if kind == "hypercube":
        return SplitSpec.explicit_mask({(0, 1)})
    raise ContractViolation(f"no default split for {kind!r}; pass an explicit mask")


@dataclass
class PerturbativeAnalysis:
    quotient: Quotient
    spec: SplitSpec
    critical: CriticalGamma
    hamiltonian: ReducedHamiltonian
    split: PerturbationSplit
    effective: EffectiveSubspace
    warnings: list[str] = field(default_factory=list)


def find_critical_gamma(
    q: Quotient,
    spec: SplitSpec,
    bracket: tuple[float, float] | None = None,
    form: str = "auto",
) -> CriticalGamma:
    """Critical rate tracking the ``|a>`` level against the ``|s>``-like level."""
    if bracket is None:
        deg = q.max_degree
        bracket = (0.1 / deg, 10.0 / deg)
    e0 = np.zeros(q.order)
    e0[0] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return critical_gamma(
            lambda g: split(q.hamiltonian(g, form), spec).h0,
            e0,
            superposition_state(q),
            bracket,
        )


def analyze(
    q: Quotient,
    spec: SplitSpec,
    bracket: tuple[float, float] | None = None,
    degeneracy_tol: float = 1e-6,
    form: str = "auto",
) -> PerturbativeAnalysis:
    crit = find_critical_gamma(q, spec, bracket, form)
    H = q.hamiltonian(crit.gamma_c, form)
    parts = split(H, spec)
    eff = effective_subspace(H, parts, degeneracy_tol, superposition=superposition_state(q))
    return PerturbativeAnalysis(q, spec, crit, H, parts, eff, list(crit.warnings))


def perturbative_runtime_report(
    family: str,
    size: int,
    split_spec: SplitSpec | None = None,
    *,
    quotient_: Quotient | None = None,
    bracket: tuple[float, float] | None = None,
    degeneracy_tol: float = 1e-6,
    points: int = 1024,
    form: str = "auto",
) -> dict:
    """JSON-ready report comparing ``pi/gap`` with the simulated first peak.

    Computational failures are reported in an ``error`` field rather than raised.
    """
    report = {
        "family": family,
        "size": size,
        "gamma_c": None,
        "degenerate_value": None,
        "cluster_dim": None,
        "gap": None,
        "runtime": None,
        "simulated_peak_time": None,
        "simulated_peak_probability": None,
        "relative_difference": None,
        "warnings": [],
    }
    try:
        q = quotient_ if quotient_ is not None else family_quotient(family, size)
        spec = split_spec if split_spec is not None else default_split(family)
        result = analyze(q, spec, bracket, degeneracy_tol, form)
    except QWSearchError as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return report
    eff = result.effective
    report.update(
        gamma_c=result.critical.gamma_c,
        degenerate_value=eff.degenerate_value,
        cluster_dim=eff.dimension,
        gap=eff.gap,
        runtime=eff.runtime,
        warnings=result.warnings,
    )
    if math.isfinite(eff.runtime):
        curve = success_curve(
            result.hamiltonian, superposition_state(q), 0, 2.0 * eff.runtime, points
        )
        report.update(
            simulated_peak_time=curve.peak_time,
            simulated_peak_probability=curve.peak_probability,
            relative_difference=abs(eff.runtime - curve.peak_time) / curve.peak_time,
        )
    return report
