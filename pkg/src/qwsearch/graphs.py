"""Graph families, edge-list I/O and the full-space search Hamiltonian."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidParameterError, ParseError

FAMILY_KINDS = ("complete", "simplex", "hypercube", "custom")


@dataclass(frozen=True)
class Family:
    kind: str
    param: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in FAMILY_KINDS:
            raise InvalidParameterError(f"unknown family {self.kind!r}")

    def expected_vertices(self) -> int | None:
        if self.kind == "complete":
            return self.param
        if self.kind == "simplex":
            return self.param * (self.param + 1)
        if self.kind == "hypercube":
            return 2**self.param
        return None

    def __str__(self) -> str:
        return self.kind if self.param is None else f"{self.kind}({self.param})"


CUSTOM = Family("custom")


@dataclass(frozen=True, eq=False)
class GraphSpec:
    """Simple undirected graph on vertices ``0..num_vertices-1`` with a marked vertex.

    ``edges`` is normalised to a read-only ``(E, 2)`` integer array with
    ``u < v`` in every row and rows sorted lexicographically.
    """

    num_vertices: int
    edges: np.ndarray
    marked: int = 0
    family: Family = field(default=CUSTOM)

    def __post_init__(self) -> None:
        n = int(self.num_vertices)
        if n < 1:
            raise InvalidParameterError("graph needs at least one vertex")
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise InvalidParameterError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise InvalidParameterError("self-loops are not allowed")
        e = np.sort(e, axis=1)
        e = e[np.lexsort((e[:, 1], e[:, 0]))]
        if len(e) > 1 and np.any(np.all(e[1:] == e[:-1], axis=1)):
            raise InvalidParameterError("duplicate edge")
        e.setflags(write=False)
        if not 0 <= self.marked < n:
            raise InvalidParameterError(f"marked vertex {self.marked} out of range")
        expected = self.family.expected_vertices()
        if expected is not None and expected != n:
            raise InvalidParameterError(f"{self.family} requires {expected} vertices, got {n}")
        object.__setattr__(self, "num_vertices", n)
        object.__setattr__(self, "edges", e)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def degree_list(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.num_vertices)
        deg.setflags(write=False)
        return deg

    def is_regular(self) -> bool:
        return bool(np.all(self.degree_list == self.degree_list[0]))

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.num_vertices, self.num_vertices))
        u, v = self.edges.T
        a[u, v] = 1.0
        a[v, u] = 1.0
        return a

    def with_marked(self, marked: int) -> GraphSpec:
        return GraphSpec(self.num_vertices, self.edges, marked, self.family)


def complete_graph(N: int, marked: int = 0) -> GraphSpec:
    if N < 1:
        raise InvalidParameterError("complete graph needs N >= 1")
    u, v = np.triu_indices(N, k=1)
    return GraphSpec(N, np.column_stack([u, v]), marked, Family("complete", N))


def simplex_complete_graph(M: int, marked: int = 0) -> GraphSpec:
    """M-simplex whose M+1 corners are each replaced by a clique on M vertices.

    Clique ``c`` occupies vertices ``cM .. cM+M-1``. For cliques ``c < d`` the
    single connecting edge joins ``cM + (d-1)`` to ``dM + c``, so every vertex
    carries exactly one inter-clique edge.
    """
    if M < 2:
        raise InvalidParameterError("simplex of complete graphs needs M >= 2")
    iu, iv = np.triu_indices(M, k=1)
    offsets = np.arange(M + 1)[:, None] * M
    intra = np.column_stack([(offsets + iu).ravel(), (offsets + iv).ravel()])
    c, d = np.triu_indices(M + 1, k=1)
    inter = np.column_stack([c * M + (d - 1), d * M + c])
    return GraphSpec(M * (M + 1), np.vstack([intra, inter]), marked, Family("simplex", M))


def hypercube_graph(n: int, marked: int = 0) -> GraphSpec:
    """n-cube; vertex index equals the integer value of its bit string."""
    if n < 1:
        raise InvalidParameterError("hypercube needs n >= 1")
    verts = np.arange(2**n)
    parts = []
    for bit in range(n):
        low = verts[(verts >> bit) & 1 == 0]
        parts.append(np.column_stack([low, low | (1 << bit)]))
    return GraphSpec(2**n, np.vstack(parts), marked, Family("hypercube", n))


_BUILDERS = {
    "complete": complete_graph,
    "simplex": simplex_complete_graph,
    "hypercube": hypercube_graph,
}


def build_family(kind: str, size: int, marked: int = 0) -> GraphSpec:
    try:
        builder = _BUILDERS[kind]
    except KeyError:
        raise InvalidParameterError(f"unknown family {kind!r}") from None
    return builder(size, marked)


def load_edge_list(text: str) -> GraphSpec:
    """Parse the edge-list format.

    First content line is the vertex count, an optional ``marked K`` line
    follows, then one ``u v`` pair per line. ``#`` starts a comment.
    """
    num_vertices = None
    marked = 0
    seen_edge = False
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if not tokens:
            continue
        if num_vertices is None:
            if len(tokens) != 1:
                raise ParseError(lineno, "expected vertex count")
            num_vertices = _parse_int(tokens[0], lineno)
            if num_vertices < 1:
                raise ParseError(lineno, "vertex count must be positive")
            continue
        if tokens[0] == "marked":
            if seen_edge or len(tokens) != 2:
                raise ParseError(lineno, "'marked K' must directly follow the vertex count")
            marked = _parse_int(tokens[1], lineno)
            if not 0 <= marked < num_vertices:
                raise ParseError(lineno, f"marked vertex {marked} out of range")
            continue
        if len(tokens) != 2:
            raise ParseError(lineno, "expected 'u v'")
        u, v = (_parse_int(t, lineno) for t in tokens)
        if not (0 <= u < num_vertices and 0 <= v < num_vertices):
            raise ParseError(lineno, f"endpoint out of range in edge {u} {v}")
        if u == v:
            raise ParseError(lineno, f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(lineno, f"duplicate edge {u} {v}")
        seen.add(key)
        edges.append(key)
        seen_edge = True
    if num_vertices is None:
        raise ParseError(1, "empty document")
    return GraphSpec(num_vertices, np.array(edges, dtype=np.int64).reshape(-1, 2), marked)


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(lineno, f"not an integer: {token!r}") from None


def to_edge_list(g: GraphSpec) -> str:
    lines = [str(g.num_vertices), f"marked {g.marked}"]
    lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class DenseHamiltonian:
    entries: np.ndarray
    gamma: float

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def full_hamiltonian(g: GraphSpec, gamma: float, form: str = "auto") -> DenseHamiltonian:
    """Search Hamiltonian ``-gamma*A - |a><a|`` on the full vertex space.

    ``form="auto"`` uses the adjacency form for regular graphs and the
    Laplacian form ``-gamma*(A - D) - |a><a|`` otherwise.
    """
    if not gamma > 0:
        raise InvalidParameterError("gamma must be positive")
    if form not in ("auto", "adjacency", "laplacian"):
        raise InvalidParameterError(f"unknown Hamiltonian form {form!r}")
    laplacian = form == "laplacian" or (form == "auto" and not g.is_regular())
    h = -gamma * g.adjacency()
    if laplacian:
        h[np.diag_indices_from(h)] += gamma * g.degree_list
    h[g.marked, g.marked] -= 1.0
    h.setflags(write=False)
    return DenseHamiltonian(h, float(gamma))
