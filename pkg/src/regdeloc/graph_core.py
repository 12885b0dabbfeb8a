"""Regular graphs: construction, edge-list I/O, random generation, girth scans."""
from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from . import _accel
from .errors import (
    DuplicateEdge,
    MalformedLine,
    NonRegular,
    NotSimple,
    ParityError,
    RejectionLimitExceeded,
    ScanLimitTooSmall,
    SelfLoop,
    UnsupportedDegree,
)

__all__ = [
    "RegularGraph",
    "GirthReport",
    "from_edges",
    "load_graph",
    "parse_edge_list",
    "write_edge_list",
    "generate_random_regular",
    "girth_report",
    "ball_sizes",
    "tree_ball_size",
    "complete_graph",
    "complete_bipartite",
    "petersen_graph",
    "cube_graph",
    "prism_graph",
    "lcf_graph",
]


@dataclass(frozen=True, eq=False)
class RegularGraph:
    """Immutable (d+1)-regular graph stored as sorted neighbour lists.

    Parameters
    ----------
    neighbors : ndarray of shape (n, d + 1)
        Row ``x`` lists the neighbours of vertex ``x`` in ascending order.
        A vertex appears twice in a row when there are parallel edges; a
        vertex appears in its own row for a self-loop.
    simple : bool
        False only for graphs ingested with ``permissive=True`` that
        actually contain loops or parallel edges.
    """

    neighbors: np.ndarray
    simple: bool = True
    name: str = field(default="", compare=False)

    def __post_init__(self):
        nbrs = np.ascontiguousarray(self.neighbors, dtype=np.int64)
        if nbrs.ndim != 2:
            raise NonRegular("neighbour table must be two-dimensional")
        nbrs = np.sort(nbrs, axis=1)
        nbrs.setflags(write=False)
        object.__setattr__(self, "neighbors", nbrs)
        n, k = nbrs.shape
        d = k - 1
        if d < 2:
            raise UnsupportedDegree(f"degree parameter d = {d} unsupported; need d >= 2")
        if n < d + 2:
            raise NonRegular(f"{n} vertices is too few for a {k}-regular graph")

    @property
    def vertex_count(self) -> int:
        return self.neighbors.shape[0]

    @property
    def d(self) -> int:
        """Degree parameter; the graph is (d+1)-regular."""
        return self.neighbors.shape[1] - 1

    @property
    def degree(self) -> int:
        return self.neighbors.shape[1]

    def __len__(self):
        return self.vertex_count

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"RegularGraph{label}(n={self.vertex_count}, d={self.d})"

    def edges(self) -> list[tuple[int, int]]:
        """Sorted list of edges ``(u, v)`` with ``u <= v``, with multiplicity."""
        out = []
        for u, row in enumerate(self.neighbors.tolist()):
            for v in row:
                if u < v:
                    out.append((u, v))
                elif u == v:
                    out.append((u, u))
        if not self.simple:
            # loops appear twice in their own row
            loops = Counter(e for e in out if e[0] == e[1])
            out = [e for e in out if e[0] != e[1]]
            for e, c in loops.items():
                out.extend([e] * (c // 2))
        return sorted(out)

    def adjacency(self, sparse: bool = True):
        """Adjacency matrix (CSR by default, float entries)."""
        n, k = self.neighbors.shape
        indptr = np.arange(0, n * k + 1, k)
        A = sp.csr_matrix(
            (np.ones(n * k), self.neighbors.ravel(), indptr), shape=(n, n)
        )
        A.sum_duplicates()
        return A if sparse else A.toarray()

    def relabel(self, perm) -> "RegularGraph":
        """Copy with vertex ``x`` renamed ``perm[x]``."""
        perm = np.asarray(perm, dtype=np.int64)
        new = np.empty_like(self.neighbors)
        new[perm] = perm[self.neighbors]
        return RegularGraph(new, simple=self.simple, name=self.name)

    def require_simple(self):
        if not self.simple:
            raise NotSimple("analysis requires a simple graph (no loops or parallel edges)")


def from_edges(edges: Iterable[tuple[int, int]], vertex_count: int | None = None,
               permissive: bool = False, name: str = "") -> RegularGraph:
    """Build a :class:`RegularGraph` from an edge iterable, validating it."""
    edges = [(int(u), int(v)) for u, v in edges]
    if not edges:
        raise NonRegular("empty edge list")
    n = vertex_count if vertex_count is not None else 1 + max(max(e) for e in edges)
    adj: list[list[int]] = [[] for _ in range(n)]
    seen = set()
    simple = True
    for u, v in edges:
        if u < 0 or v < 0 or u >= n or v >= n:
            raise NonRegular(f"vertex id out of range in edge ({u}, {v})")
        if u == v:
            if not permissive:
                raise SelfLoop(f"self-loop at vertex {u}")
            simple = False
        key = (min(u, v), max(u, v))
        if key in seen:
            if not permissive:
                raise DuplicateEdge(f"duplicate edge {key}")
            simple = False
        seen.add(key)
        adj[u].append(v)
        adj[v].append(u)
    degrees = {len(row) for row in adj}
    if len(degrees) != 1:
        bad = [x for x, row in enumerate(adj) if len(row) != len(adj[0])]
        raise NonRegular(
            f"degrees {sorted(degrees)} differ; first offending vertex {bad[0]}"
        )
    return RegularGraph(np.array(adj, dtype=np.int64), simple=simple, name=name)


def parse_edge_list(text: str) -> list[tuple[int, int]]:
    """Parse ``u v`` lines; blank lines and ``#`` comments are skipped."""
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLine(lineno, raw)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLine(lineno, raw) from None
        if u < 0 or v < 0:
            raise MalformedLine(lineno, raw)
        edges.append((u, v))
    return edges


def load_graph(source, permissive: bool = False) -> RegularGraph:
    """Load a graph from edge-list text, a path, or an open file.

    Raises
    ------
    MalformedLine, SelfLoop, DuplicateEdge, NonRegular
    """
    name = ""
    if isinstance(source, Path):
        name = source.name
        text = source.read_text()
    elif hasattr(source, "read"):
        text = source.read()
    else:
        text = str(source)
    return from_edges(parse_edge_list(text), permissive=permissive, name=name)


def write_edge_list(g: RegularGraph, dest=None) -> str:
    """Serialise ``g`` as sorted ``u v`` lines; optionally write to ``dest``."""
    lines = [f"# n={g.vertex_count} d={g.d}"]
    lines += [f"{u} {v}" for u, v in g.edges()]
    text = "\n".join(lines) + "\n"
    if dest is not None:
        Path(dest).write_text(text)
    return text


def generate_random_regular(n: int, d: int, seed: int, max_tries: int = 10000) -> RegularGraph:
    """Random simple (d+1)-regular graph on ``n`` vertices.

    Configuration model: shuffle the ``n (d+1)`` half-edges, pair them up,
    and resample from scratch whenever a loop or parallel edge appears.
    Conditioned on success the result is uniform over simple graphs.
    """
    k = d + 1
    if d < 2:
        raise UnsupportedDegree(f"degree parameter d = {d} unsupported; need d >= 2")
    if (n * k) % 2:
        raise ParityError(f"(d+1) * n = {n * k} is odd")
    if n < d + 2:
        raise NonRegular(f"need n >= d + 2, got n = {n}")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n, dtype=np.int64), k)
    for _ in range(max_tries):
        perm = rng.permutation(stubs)
        a, b = perm[0::2], perm[1::2]
        if np.any(a == b):
            continue
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        keys = lo * n + hi
        if np.unique(keys).size != keys.size:
            continue
        adj = np.empty((n, k), dtype=np.int64)
        fill = np.zeros(n, dtype=np.int64)
        for u, v in zip(lo.tolist(), hi.tolist()):
            adj[u, fill[u]] = v
            fill[u] += 1
            adj[v, fill[v]] = u
            fill[v] += 1
        return RegularGraph(adj, name=f"rrg(n={n},d={d},seed={seed})")
    raise RejectionLimitExceeded(
        f"no simple graph after {max_tries} configuration-model draws"
    )


@dataclass(frozen=True)
class GirthReport:
    """Short-cycle statistics of a graph.

    ``girth`` is ``math.inf`` when no cycle of length <= ``scan_limit`` was
    found, in which case ``injectivity_radius`` and
    ``max_shared_edge_cycle_bound`` are lower bounds.  ``exceeded`` is set
    whenever any reported quantity was capped by the scan limit.
    """

    girth: float
    injectivity_radius: int
    max_shared_edge_cycle_bound: int
    scan_limit: int
    exceeded: bool = False

    def to_dict(self):
        return {
            "girth": None if math.isinf(self.girth) else int(self.girth),
            "injectivity_radius": self.injectivity_radius,
            "max_shared_edge_cycle_bound": self.max_shared_edge_cycle_bound,
            "scan_limit": self.scan_limit,
            "scan_limit_exceeded": self.exceeded,
        }


def girth_report(g: RegularGraph, scan_limit: int = 12) -> GirthReport:
    """Girth, injectivity radius and the shared-edge short-cycle bound.

    The injectivity radius is the largest n for which the covering map from
    the tree is injective on radius-n balls, i.e. ``(girth - 1) // 2``.
    ``max_shared_edge_cycle_bound`` is the largest L such that no two
    distinct cycles of length <= L share an edge (capped at ``scan_limit``).
    """
    g.require_simple()
    girth = _accel.bfs_girth(g.neighbors, scan_limit)
    shared = _accel.shared_edge_cycle_length(g.neighbors, scan_limit)
    bound = scan_limit if shared < 0 else shared - 1
    if girth < 0:
        warnings.warn(
            f"girth exceeds scan limit {scan_limit}", ScanLimitTooSmall, stacklevel=2
        )
        return GirthReport(math.inf, scan_limit // 2, bound, scan_limit, True)
    return GirthReport(girth, (girth - 1) // 2, bound, scan_limit, shared < 0)


def tree_ball_size(d: int, radius: int) -> int:
    """Number of vertices within ``radius`` of a point in the (d+1)-regular tree."""
    if radius == 0:
        return 1
    return 1 + (d + 1) * (d**radius - 1) // (d - 1)


def ball_sizes(g: RegularGraph, radius: int) -> np.ndarray:
    """``out[x, r]`` = number of vertices within distance r of x."""
    A = g.adjacency()
    n = g.vertex_count
    out = np.empty((n, radius + 1), dtype=np.int64)
    reach = sp.identity(n, format="csr", dtype=bool)
    step = (A + sp.identity(n, format="csr")).astype(bool)
    for r in range(radius + 1):
        out[:, r] = reach.getnnz(axis=1)
        reach = (reach @ step).astype(bool)
    return out


# small named graphs used by tests, examples and the CLI

def complete_graph(k: int) -> RegularGraph:
    return from_edges([(u, v) for u in range(k) for v in range(u + 1, k)], name=f"K{k}")


def complete_bipartite(k: int) -> RegularGraph:
    return from_edges([(u, k + v) for u in range(k) for v in range(k)], name=f"K{k},{k}")


def petersen_graph() -> RegularGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return from_edges(outer + spokes + inner, name="Petersen")


def cube_graph() -> RegularGraph:
    return from_edges(
        [(u, u ^ (1 << b)) for u in range(8) for b in range(3) if u < u ^ (1 << b)],
        name="Q3",
    )


def prism_graph(k: int) -> RegularGraph:
    ring = [(i, (i + 1) % k) for i in range(k)]
    return from_edges(
        ring + [(k + a, k + b) for a, b in ring] + [(i, k + i) for i in range(k)],
        name=f"prism{k}",
    )


def lcf_graph(n: int, shifts, repeats: int, name: str = "") -> RegularGraph:
    """Cubic Hamiltonian graph from LCF notation ``[shifts]^repeats`` on ``n`` vertices."""
    pattern = list(shifts) * repeats
    if len(pattern) != n:
        raise NonRegular(f"LCF pattern of length {len(pattern)} does not match n = {n}")
    edges = {(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)}
    for i, s in enumerate(pattern):
        j = (i + s) % n
        edges.add((min(i, j), max(i, j)))
    return from_edges(sorted(edges), vertex_count=n, name=name)
