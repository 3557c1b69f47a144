"""Exhaustive search for equal-invariant non-isomorphic graph pairs.

Two-phase scan: (1) bucket graphs by a 128-bit fingerprint of the canonical
invariant serialization, (2) confirm candidate buckets by exact comparison,
then filter isomorphic duplicates with the exact oracle.  The hash is only
a filter; every reported pair is re-verified exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from itertools import product

from .classical import signature_polynomial
from .exceptions import BudgetError, GraphParseError
from .graphs import ISO_MAX_VERTICES, Graph, are_isomorphic, encode_graph6, parse_graph6
from .observables import ObservableSet
from .quantum import IsingParams, QuantumOperator, lowest_k_eigenvalues

LEVELS = ("energy", "bivariate", "multivariate", "quantum")
TREE_MAX_VERTICES = 10


def invariant_payload(
    g: Graph,
    level: str,
    omega_ks: tuple[int, ...] = (2,),
    quantum_params: IsingParams | None = None,
    solver_tol: float = 1e-10,
) -> bytes:
    """Canonical byte serialization of the graph's invariant at a level.

    quantum level: both extremal eigenvalues at the given couplings, rounded
    to 1e-8 (stored as scaled integers so the bytes are stable).
    """
    if level == "energy":
        marg = signature_polynomial(g).marginal("e")
        data = {"n": g.n, "energy": sorted(marg.items())}
    elif level == "bivariate":
        data = {"n": g.n, "poly": signature_polynomial(g).to_json_dict()}
    elif level == "multivariate":
        poly = signature_polynomial(g, ObservableSet(tuple(omega_ks)))
        data = {"n": g.n, "poly": poly.to_json_dict()}
    elif level == "quantum":
        params = quantum_params or IsingParams(1.0, 1.0, 1.0)
        op = QuantumOperator(g, params)
        lo = lowest_k_eigenvalues(op, 1, solver_tol).eigenvalues[0]
        hi = -lowest_k_eigenvalues(op.negated(), 1, solver_tol).eigenvalues[0]
        data = {
            "n": g.n,
            "extremal": [int(round(lo * 1e8)), int(round(hi * 1e8))],
        }
    else:
        raise ValueError(f"unknown invariant level {level!r}; use one of {LEVELS}")
    return json.dumps(data, separators=(",", ":"), sort_keys=True).encode()


def fingerprint(payload: bytes) -> bytes:
    """128-bit bucketing hash of a canonical invariant payload."""
    return hashlib.blake2b(payload, digest_size=16).digest()


@dataclass(frozen=True)
class ScanPair:
    index_a: int
    index_b: int
    graph6_a: str
    graph6_b: str
    equal_invariant: bool
    isomorphic: bool | None  # None: oracle over budget, pair unfiltered

    def to_json_dict(self) -> dict:
        return {
            "index_a": self.index_a,
            "index_b": self.index_b,
            "graph6_a": self.graph6_a,
            "graph6_b": self.graph6_b,
            "equal_invariant": self.equal_invariant,
            "isomorphic": self.isomorphic,
        }


@dataclass
class ScanResult:
    family: str
    level: str
    graphs_processed: int
    groups: int  # equal-invariant groups with >= 2 members
    hash_collisions: int  # bucket members refuted by exact comparison
    pairs: list[ScanPair]  # non-isomorphic (or unfiltered) equal-invariant pairs
    quantum_params: IsingParams | None = None
    mode: str | None = None  # quantum level: "extremal"

    def to_json_dict(self) -> dict:
        out = {
            "family": self.family,
            "level": self.level,
            "graphs_processed": self.graphs_processed,
            "equal_invariant_groups": self.groups,
            "hash_collisions": self.hash_collisions,
            "pairs": [p.to_json_dict() for p in self.pairs],
        }
        if self.quantum_params is not None:
            p = self.quantum_params
            out["quantum_params"] = {"J": p.J, "h": p.h, "Delta": p.Delta}
        if self.mode is not None:
            out["mode"] = self.mode
        return out

    def summary(self) -> str:
        lines = [
            f"family: {self.family}",
            f"level: {self.level}"
            + (f" (mode: {self.mode})" if self.mode else ""),
            f"graphs: {self.graphs_processed}   equal-invariant groups: "
            f"{self.groups}   hash collisions: {self.hash_collisions}",
            f"non-isomorphic equal-invariant pairs: {len(self.pairs)}",
        ]
        for p in self.pairs[:20]:
            iso = "unfiltered" if p.isomorphic is None else "non-isomorphic"
            lines.append(
                f"  [{p.index_a}] {p.graph6_a}  ~  [{p.index_b}] {p.graph6_b}  ({iso})"
            )
        if len(self.pairs) > 20:
            lines.append(f"  ... {len(self.pairs) - 20} more")
        return "\n".join(lines)


def scan_stream(
    lines,
    level: str,
    omega_ks: tuple[int, ...] = (2,),
    quantum_params: IsingParams | None = None,
    family: str = "<stream>",
) -> ScanResult:
    """Scan a graph6 stream for equal-invariant non-isomorphic pairs.

    Output order is deterministic: groups by first-member input order, pairs
    in lexicographic index order within each group.
    """
    graphs: list[Graph] = []
    records: list[str] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            g = parse_graph6(line)
        except GraphParseError as exc:
            raise GraphParseError(f"line {lineno}: {exc}") from None
        graphs.append(g)
        records.append(encode_graph6(g))

    kwargs = dict(omega_ks=tuple(omega_ks), quantum_params=quantum_params)
    buckets: dict[tuple[int, bytes], list[int]] = {}
    for idx, g in enumerate(graphs):
        fp = fingerprint(invariant_payload(g, level, **kwargs))
        buckets.setdefault((g.n, fp), []).append(idx)

    pairs: list[ScanPair] = []
    groups = 0
    collisions = 0
    order = sorted(buckets, key=lambda key: buckets[key][0])
    for key in order:
        members = buckets[key]
        if len(members) < 2:
            continue
        # exact confirmation within the bucket
        by_payload: dict[bytes, list[int]] = {}
        for idx in members:
            payload = invariant_payload(graphs[idx], level, **kwargs)
            by_payload.setdefault(payload, []).append(idx)
        if len(by_payload) > 1:
            collisions += len(members) - max(len(v) for v in by_payload.values())
        for group in sorted(by_payload.values(), key=lambda v: v[0]):
            if len(group) < 2:
                continue
            groups += 1
            for a_pos in range(len(group)):
                for b_pos in range(a_pos + 1, len(group)):
                    a, b = group[a_pos], group[b_pos]
                    if graphs[a].n <= ISO_MAX_VERTICES:
                        iso = are_isomorphic(graphs[a], graphs[b])
                        if iso:
                            continue
                    else:
                        iso = None
                    pairs.append(
                        ScanPair(a, b, records[a], records[b], True, iso)
                    )
    return ScanResult(
        family=family,
        level=level,
        graphs_processed=len(graphs),
        groups=groups,
        hash_collisions=collisions,
        pairs=pairs,
        quantum_params=quantum_params if level == "quantum" else None,
        mode="extremal" if level == "quantum" else None,
    )


def _prufer_edges(seq: tuple[int, ...], n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(v for v in range(n) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    a, b = (v for v in range(n) if degree[v] == 1)
    edges.append((a, b))
    return edges


def _tree_canonical(n: int, edges) -> tuple:
    """Rooted-at-center canonical form (sorted-subtree encoding)."""
    adj = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    # centers by leaf stripping
    degree = [len(a) for a in adj]
    layer = [v for v in range(n) if degree[v] <= 1]
    remaining = n
    while remaining > 2:
        remaining -= len(layer)
        nxt = []
        for v in layer:
            for u in adj[v]:
                degree[u] -= 1
                if degree[u] == 1:
                    nxt.append(u)
        layer = nxt

    def enc(v: int, parent: int) -> tuple:
        return tuple(sorted(enc(u, v) for u in adj[v] if u != parent))

    if len(layer) == 1:
        return (1, enc(layer[0], -1))
    c1, c2 = layer
    return (2, tuple(sorted((enc(c1, c2), enc(c2, c1)))))


def enumerate_trees(n: int) -> list[Graph]:
    """One representative per isomorphism class of trees on n vertices.

    Walks all n^(n-2) labeled trees via their sequence encoding and dedupes
    by canonical form; fine at desk scale (n <= 10), ingest bigger families
    as graph6 files.
    """
    if not 2 <= n <= TREE_MAX_VERTICES:
        raise BudgetError(f"tree enumeration limited to 2 <= n <= {TREE_MAX_VERTICES}")
    if n == 2:
        return [Graph.from_edges(2, [(0, 1)])]
    seen: dict[tuple, Graph] = {}
    for seq in product(range(n), repeat=n - 2):
        edges = _prufer_edges(seq, n)
        canon = _tree_canonical(n, edges)
        if canon not in seen:
            seen[canon] = Graph.from_edges(n, edges)
    return list(seen.values())
