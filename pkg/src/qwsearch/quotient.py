"""Equitable partitions and the reduced (quotient) search Hamiltonian.

Vertices that evolve identically under the search walk are grouped into the
coarsest equitable partition that isolates the marked vertex. The walk then
closes on the span of the normalised class states
``|u_i> = |V_i|^{-1/2} sum_{v in V_i} |v>``.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import ContractViolation, InvalidParameterError
from .graphs import GraphSpec, build_family

# Above this size the hypercube quotient is built in closed form.
HYPERCUBE_GRAPH_LIMIT = 16


@dataclass(frozen=True, eq=False)
class Partition:
    classes: tuple[np.ndarray, ...]
    labels: np.ndarray
    marked_class: int = 0

    @property
    def class_sizes(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.classes)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def num_vertices(self) -> int:
        return len(self.labels)


def neighbor_counts(g: GraphSpec, labels: np.ndarray, k: int) -> np.ndarray:
    """``counts[v, j]`` = number of neighbours of ``v`` carrying label ``j``."""
    n = g.num_vertices
    u, v = g.edges.T
    flat = np.concatenate([u * k + labels[v], v * k + labels[u]])
    return np.bincount(flat, minlength=n * k).reshape(n, k)


def _bfs_distances(g: GraphSpec) -> np.ndarray:
    n = g.num_vertices
    order = np.argsort(np.concatenate([g.edges[:, 0], g.edges[:, 1]]), kind="stable")
    targets = np.concatenate([g.edges[:, 1], g.edges[:, 0]])[order]
    starts = np.concatenate([[0], np.cumsum(g.degree_list)])
    dist = np.full(n, -1, dtype=np.int64)
    dist[g.marked] = 0
    frontier = np.array([g.marked])
    level = 0
    while frontier.size:
        level += 1
        nbrs = np.concatenate([targets[starts[x] : starts[x + 1]] for x in frontier])
        nbrs = np.unique(nbrs[dist[nbrs] < 0])
        dist[nbrs] = level
        frontier = nbrs
    # unreachable vertices sort after every reachable one
    dist[dist < 0] = n
    return dist


def equitable_partition(g: GraphSpec) -> Partition:
    """Coarsest equitable partition refining ``{marked} | rest``.

    Classes are split by their exact neighbour-count signature until a pass
    splits nothing. Output classes are ordered by distance from the marked
    vertex, then by the (back, same, forward) neighbour-count signature in
    descending order, then by smallest vertex.
    """
    n = g.num_vertices
    labels = np.ones(n, dtype=np.int64)
    labels[g.marked] = 0
    if n == 1:
        labels[:] = 0
    _, labels = np.unique(labels, return_inverse=True)
    k = int(labels.max()) + 1
    while True:
        counts = neighbor_counts(g, labels, k)
        _, refined = np.unique(np.column_stack([labels, counts]), axis=0, return_inverse=True)
        refined = refined.ravel()
        k_new = int(refined.max()) + 1
        labels = refined
        if k_new == k:
            break
        k = k_new

    dist = _bfs_distances(g)
    counts = neighbor_counts(g, labels, k)
    reps = np.array([np.flatnonzero(labels == c)[0] for c in range(k)])
    class_dist = dist[reps]
    keys = []
    for c, rep in enumerate(reps):
        d = class_dist[c]
        row = counts[rep]
        back = int(row[class_dist == d - 1].sum())
        same = int(row[class_dist == d].sum())
        fwd = int(row[class_dist == d + 1].sum())
        keys.append((int(d), (-back, -same, -fwd), int(rep)))
    order = sorted(range(k), key=keys.__getitem__)
    remap = np.empty(k, dtype=np.int64)
    remap[order] = np.arange(k)
    labels = remap[labels]
    labels.setflags(write=False)
    classes = []
    for c in range(k):
        members = np.flatnonzero(labels == c)
        members.setflags(write=False)
        classes.append(members)
    return Partition(tuple(classes), labels)


def class_letters(d: int) -> tuple[str, ...]:
    if d <= 26:
        return tuple(string.ascii_lowercase[:d])
    return tuple(str(i) for i in range(d))


@dataclass(frozen=True, eq=False)
class ReducedHamiltonian:
    entries: np.ndarray
    gamma: float
    class_sizes: tuple[int, ...]
    labels: tuple[str, ...]
    marked_index: int = 0

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "gamma": self.gamma,
            "class_sizes": list(self.class_sizes),
            "labels": list(self.labels),
            "entries": self.entries.tolist(),
        }


@dataclass(frozen=True, eq=False)
class Quotient:
    """Gamma-independent part of a reduced Hamiltonian.

    ``counts[i, j]`` is the number of neighbours in class ``j`` of any
    vertex of class ``i``.
    """

    counts: np.ndarray
    class_sizes: tuple[int, ...]
    labels: tuple[str, ...]

    @property
    def order(self) -> int:
        return self.counts.shape[0]

    @property
    def class_degrees(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def max_degree(self) -> int:
        return int(self.class_degrees.max())

    def is_regular(self) -> bool:
        deg = self.class_degrees
        return bool(np.all(deg == deg[0]))

    def walk_matrix(self) -> np.ndarray:
        """Adjacency restricted to the class states, ``sqrt(b_ij * b_ji)``.

        Equal to ``b_ij * sqrt(|V_i|/|V_j|)`` because ``|V_i| b_ij = |V_j| b_ji``,
        and symmetric bit-for-bit.
        """
        return np.sqrt((self.counts * self.counts.T).astype(float))

    def hamiltonian(self, gamma: float, form: str = "auto") -> ReducedHamiltonian:
        if not gamma > 0:
            raise InvalidParameterError("gamma must be positive")
        if form not in ("auto", "adjacency", "laplacian"):
            raise InvalidParameterError(f"unknown Hamiltonian form {form!r}")
        h = -gamma * self.walk_matrix()
        if form == "laplacian" or (form == "auto" and not self.is_regular()):
            h[np.diag_indices_from(h)] += gamma * self.class_degrees
        h[0, 0] -= 1.0
        h.setflags(write=False)
        return ReducedHamiltonian(h, float(gamma), self.class_sizes, self.labels)


def quotient(g: GraphSpec, p: Partition | None = None) -> Quotient:
    """Class-to-class neighbour counts, verifying that ``p`` is equitable."""
    if p is None:
        p = equitable_partition(g)
    if p.num_vertices != g.num_vertices:
        raise ContractViolation("partition does not cover the graph's vertices")
    if p.classes[0].tolist() != [g.marked]:
        raise ContractViolation("class 0 must be the marked vertex alone")
    k = p.num_classes
    counts = neighbor_counts(g, np.asarray(p.labels), k)
    b = np.empty((k, k), dtype=np.int64)
    for i, members in enumerate(p.classes):
        rows = counts[members]
        if np.any(rows != rows[0]):
            raise ContractViolation(f"partition is not equitable: class {i} has mixed signatures")
        b[i] = rows[0]
    b.setflags(write=False)
    return Quotient(b, p.class_sizes, class_letters(k))


def quotient_hamiltonian(
    g: GraphSpec, p: Partition, gamma: float, form: str = "auto"
) -> ReducedHamiltonian:
    return quotient(g, p).hamiltonian(gamma, form)


def hypercube_quotient(n: int) -> Quotient:
    """Closed-form Hamming-weight quotient of the n-cube (marked = all zeros)."""
    if n < 1:
        raise InvalidParameterError("hypercube needs n >= 1")
    b = np.zeros((n + 1, n + 1), dtype=np.int64)
    k = np.arange(n)
    b[k, k + 1] = n - k
    b[k + 1, k] = k + 1
    b.setflags(write=False)
    sizes = tuple(comb(n, j) for j in range(n + 1))
    return Quotient(b, sizes, tuple(str(j) for j in range(n + 1)))


def family_quotient(kind: str, size: int, marked: int = 0) -> Quotient:
    if kind == "hypercube" and size > HYPERCUBE_GRAPH_LIMIT:
        # vertex-transitive, so the marked vertex does not change the quotient
        return hypercube_quotient(size)
    return quotient(build_family(kind, size, marked))


def superposition_state(p) -> np.ndarray:
    """Reduced coordinates of the uniform superposition ``|s>``.

    Accepts anything with ``class_sizes`` (a Partition or a Quotient).
    """
    sizes = p.class_sizes
    total = sum(sizes)
    return np.array([np.sqrt(s / total) for s in sizes])


def lift(p: Partition, reduced) -> np.ndarray:
    reduced = np.asarray(reduced, dtype=complex)
    if reduced.shape != (p.num_classes,):
        raise ContractViolation(
            f"reduced vector has length {reduced.shape}, expected {p.num_classes}"
        )
    scale = reduced / np.sqrt(np.array(p.class_sizes, dtype=float))
    return scale[np.asarray(p.labels)]


def project(p: Partition, full) -> np.ndarray:
    """Class-state coordinates ``<u_i|psi>`` of a full-space vector."""
    full = np.asarray(full, dtype=complex)
    sums = np.bincount(p.labels, weights=full.real, minlength=p.num_classes) + 1j * np.bincount(
        p.labels, weights=full.imag, minlength=p.num_classes
    )
    return sums / np.sqrt(np.array(p.class_sizes, dtype=float))
