"""Simple undirected graphs: parsing, exact adjacency algebra, isomorphism.

Vertices are 0-indexed internally.  All text formats (edge lists, fixture
tables) use 1-indexed vertices, matching the usual convention of published
edge lists.  Graphs are immutable and hashable; every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations

import numpy as np

from .exceptions import BudgetError, GraphParseError

MAX_VERTICES = 32
ISO_MAX_VERTICES = 13


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1.

    ``edges`` is the canonical form: sorted tuple of (i, j) pairs with i < j,
    no duplicates, no self-loops.  Use :meth:`from_edges` to normalize
    arbitrary pair iterables.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VERTICES:
            raise ValueError(f"vertex count {self.n} outside [1, {MAX_VERTICES}]")
        seen = set()
        for i, j in self.edges:
            if not (0 <= i < j < self.n):
                raise ValueError(f"edge ({i},{j}) not canonical for n={self.n}")
            seen.add((i, j))
        if len(seen) != len(self.edges) or self.edges != tuple(sorted(self.edges)):
            raise ValueError("edges must be sorted and duplicate-free")

    @classmethod
    def from_edges(cls, n: int, pairs) -> "Graph":
        """Build a graph from any iterable of vertex pairs (0-indexed)."""
        canon = set()
        for i, j in pairs:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            canon.add((min(i, j), max(i, j)))
        return cls(n, tuple(sorted(canon)))

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> np.ndarray:
        """n x n symmetric 0/1 integer matrix (read-only)."""
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for i, j in self.edges:
            a[i, j] = a[j, i] = 1
        a.setflags(write=False)
        return a

    @cached_property
    def neighbors(self) -> tuple[tuple[int, ...], ...]:
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    def degree_sequence(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.neighbors)

    def relabel(self, perm) -> "Graph":
        """Apply the vertex permutation v -> perm[v]."""
        if sorted(perm) != list(range(self.n)):
            raise ValueError("perm is not a permutation of range(n)")
        return Graph.from_edges(self.n, ((perm[i], perm[j]) for i, j in self.edges))


def parse_edge_list(text: str, n: int) -> Graph:
    """Parse the 1-indexed ``i,j;i,j;...`` edge-list format.

    Duplicate pairs (in either order) collapse; isolated vertices up to n are
    retained.  An empty/whitespace string yields the edgeless graph.
    """
    if not 1 <= n <= MAX_VERTICES:
        raise GraphParseError(f"vertex count {n} outside [1, {MAX_VERTICES}]")
    pairs = []
    for token in text.split(";"):
        token = token.strip()
        if not token:
            continue
        parts = token.split(",")
        if len(parts) != 2:
            raise GraphParseError(f"malformed edge token {token!r}")
        try:
            i, j = (int(p.strip()) for p in parts)
        except ValueError:
            raise GraphParseError(f"malformed edge token {token!r}") from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphParseError(f"vertex index out of range in {token!r} (n={n})")
        if i == j:
            raise GraphParseError(f"self-loop in {token!r}")
        pairs.append((i - 1, j - 1))
    return Graph.from_edges(n, pairs)


def format_edge_list(g: Graph) -> str:
    """Inverse of :func:`parse_edge_list` (1-indexed, canonical order)."""
    return ";".join(f"{i + 1},{j + 1}" for i, j in g.edges)


def parse_graph6(line: str) -> Graph:
    """Decode one header-less graph6 record (n <= 32)."""
    data = line.strip()
    if not data:
        raise GraphParseError("empty graph6 record")
    vals = []
    for ch in data:
        o = ord(ch)
        if not 63 <= o <= 126:
            raise GraphParseError(f"invalid graph6 character {ch!r}")
        vals.append(o - 63)
    if vals[0] == 63:
        raise GraphParseError("graph6 records with n > 62 are not supported")
    n = vals[0]
    if not 1 <= n <= MAX_VERTICES:
        raise GraphParseError(f"graph6 vertex count {n} outside [1, {MAX_VERTICES}]")
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 5) // 6
    if len(vals) - 1 != nbytes:
        raise GraphParseError(
            f"graph6 record for n={n} needs {nbytes} data characters, got {len(vals) - 1}"
        )
    bits = []
    for v in vals[1:]:
        bits.extend((v >> shift) & 1 for shift in range(5, -1, -1))
    if any(bits[nbits:]):
        raise GraphParseError("nonzero padding bits in graph6 record")
    pairs = []
    pos = 0
    for j in range(1, n):
        for i in range(j):
            if bits[pos]:
                pairs.append((i, j))
            pos += 1
    return Graph.from_edges(n, pairs)


def encode_graph6(g: Graph) -> str:
    """Encode as a canonical header-less graph6 record."""
    edge_set = set(g.edges)
    bits = []
    for j in range(1, g.n):
        for i in range(j):
            bits.append(1 if (i, j) in edge_set else 0)
    while len(bits) % 6:
        bits.append(0)
    chars = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        v = 0
        for b in bits[k : k + 6]:
            v = (v << 1) | b
        chars.append(chr(v + 63))
    return "".join(chars)


@dataclass(frozen=True)
class IntMatrix:
    """Square matrix of exact (arbitrary-precision) integers."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("matrix must be square")

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def from_array(cls, a) -> "IntMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in a))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        cols = tuple(zip(*other.rows))
        return IntMatrix(
            tuple(
                tuple(sum(a * b for a, b in zip(row, col)) for col in cols)
                for row in self.rows
            )
        )


def adjacency_power(g: Graph, k: int) -> IntMatrix:
    """Exact integer k-th power of the adjacency matrix, 1 <= k <= 4."""
    if not 1 <= k <= 4:
        raise ValueError(f"adjacency power {k} outside [1, 4]")
    a = IntMatrix.from_array(g.adjacency)
    out = a
    for _ in range(k - 1):
        out = out @ a
    return out


@dataclass(frozen=True)
class IntPolynomial:
    """Exact integer polynomial, coefficients degree-ascending.

    Normalized: no trailing zero coefficients; the zero polynomial is the
    empty tuple.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")

    @classmethod
    def from_coeffs(cls, coeffs) -> "IntPolynomial":
        cs = [int(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc


def char_poly(m: IntMatrix) -> IntPolynomial:
    """Exact characteristic polynomial det(lambda*I - M).

    Division-free (Berkowitz) recursion over leading principal submatrices,
    entirely in integer arithmetic, so polynomial equality is a bit-exact
    test of cospectrality.
    """
    n = m.n
    rows = m.rows
    if n == 0:
        return IntPolynomial((1,))
    p = [1, -rows[0][0]]  # descending coefficients, monic
    for r in range(1, n):
        block = [rows[i][:r] for i in range(r)]
        row_r = rows[r][:r]
        col_r = [rows[i][r] for i in range(r)]
        q = [1, -rows[r][r]]
        v = col_r
        for _ in range(r):
            q.append(-sum(a * b for a, b in zip(row_r, v)))
            v = [sum(a * b for a, b in zip(row, v)) for row in block]
        p = [
            sum(q[i - j] * p[j] for j in range(max(0, i - r - 1), min(i, r) + 1))
            for i in range(r + 2)
        ]
    return IntPolynomial.from_coeffs(reversed(p))


def adjacency_char_poly(g: Graph) -> IntPolynomial:
    return char_poly(adjacency_power(g, 1))


def _stable_colors(g: Graph) -> list[int]:
    """Iterated neighbor-color refinement with canonical color ids.

    Ids are ranks of sorted signatures, so colorings of two different graphs
    are directly comparable.
    """
    colors = list(g.degree_sequence())
    while True:
        sigs = [
            (colors[v], tuple(sorted(colors[u] for u in g.neighbors[v])))
            for v in range(g.n)
        ]
        rank = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def are_isomorphic(g1: Graph, g2: Graph) -> bool:
    """Exact isomorphism test (n <= 13) by refinement-pruned backtracking."""
    if g1.n > ISO_MAX_VERTICES or g2.n > ISO_MAX_VERTICES:
        raise BudgetError(
            f"isomorphism oracle limited to n <= {ISO_MAX_VERTICES}"
        )
    if g1.n != g2.n or g1.edge_count != g2.edge_count:
        return False
    c1, c2 = _stable_colors(g1), _stable_colors(g2)
    if sorted(c1) != sorted(c2):
        return False
    n = g1.n
    by_color: dict[int, list[int]] = {}
    for w in range(n):
        by_color.setdefault(c2[w], []).append(w)

    # Map vertices of g1 in an order that keeps the partial map connected
    # where possible, most-constrained color class first.
    order: list[int] = []
    placed = set()
    while len(order) < n:
        frontier = [
            v
            for v in range(n)
            if v not in placed and any(u in placed for u in g1.neighbors[v])
        ]
        pool = frontier or [v for v in range(n) if v not in placed]
        v = min(pool, key=lambda v: (len(by_color[c1[v]]), v))
        order.append(v)
        placed.add(v)

    adj1, adj2 = g1.adjacency, g2.adjacency
    mapping: dict[int, int] = {}
    used = [False] * n

    def extend(pos: int) -> bool:
        if pos == len(order):
            return True
        v = order[pos]
        for w in by_color[c1[v]]:
            if used[w]:
                continue
            if any(adj1[v, u] != adj2[w, mapping[u]] for u in mapping):
                continue
            mapping[v] = w
            used[w] = True
            if extend(pos + 1):
                return True
            del mapping[v]
            used[w] = False
        return False

    return extend(0)


def random_graph(n: int, edge_prob: float, rng) -> Graph:
    """Erdos-Renyi sample, used by tests and benchmarks."""
    pairs = [e for e in combinations(range(n), 2) if rng.random() < edge_prob]
    return Graph.from_edges(n, pairs)
