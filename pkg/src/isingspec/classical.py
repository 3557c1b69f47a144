"""Exact enumeration of classical spin observables over all 2^n states.

The central object is the signature polynomial: the exact count of spin
states per observable tuple (e, m, omega-k, ...).  Marginals of it answer
every fixed-coupling and all-coupling cospectrality question for diagonal
Hamiltonians:

* equal energy marginals  <=>  equal energy spectra for every coupling J;
* equal (e, m) joint counts  <=>  equal field-refined spectra for every
  (J, h), because rescaling couplings only rescales exponents;
* the fixed-coupling spectrum at integer (J, h) is the multiset
  {J*e + h*m}, compared exactly in integers.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from math import exp, isfinite

import numpy as np

from . import _kernels
from .exceptions import BudgetError
from .graphs import Graph, adjacency_char_poly, are_isomorphic
from .observables import ObservableSet, QuadraticForm, observable_forms

ENUM_MAX_VERTICES = 28
DENSE_CELL_CAP = 1 << 27  # flat histogram cells (1 GiB of uint64)
DICT_STATE_CAP = 1 << 20  # pure-dict path when the dense grid would be too big

_EXP_OVERFLOW = 709.0  # exp() overflows float64 just above this


@dataclass(frozen=True)
class SignaturePolynomial:
    """Sparse integer-coefficient polynomial over observable exponent tuples.

    ``terms`` maps each realized tuple of observable values to the number of
    spin states attaining it; counts sum to 2^n.
    """

    observables: tuple[str, ...]
    n: int
    edge_count: int
    terms: dict[tuple[int, ...], int]

    @property
    def arity(self) -> int:
        return len(self.observables)

    def total(self) -> int:
        return sum(self.terms.values())

    def sorted_terms(self) -> list[tuple[tuple[int, ...], int]]:
        """Terms in canonical order: lexicographic ascending exponent tuples."""
        return sorted(self.terms.items())

    def marginal(self, name: str) -> Counter:
        """Multiset of one observable's values, as value -> state count."""
        axis = self.observables.index(name)
        out: Counter = Counter()
        for exps, count in self.terms.items():
            out[exps[axis]] += count
        return out

    def project(self, names) -> "SignaturePolynomial":
        """Marginalize onto a subset of the observables (kept in given order)."""
        axes = [self.observables.index(name) for name in names]
        terms: dict[tuple[int, ...], int] = {}
        for exps, count in self.terms.items():
            key = tuple(exps[a] for a in axes)
            terms[key] = terms.get(key, 0) + count
        return SignaturePolynomial(tuple(names), self.n, self.edge_count, terms)

    def to_json_dict(self) -> dict:
        return {
            "observables": list(self.observables),
            "n": self.n,
            "edges": self.edge_count,
            "terms": [
                {"exps": list(exps), "count": count}
                for exps, count in self.sorted_terms()
            ],
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_json_dict(), separators=(",", ":"), sort_keys=True)


def _flip_cost_order(n: int, pair_weights: dict[tuple[int, int], int]) -> list[int]:
    """Assign low bit ids to low-degree vertices.

    Bit v flips 2^(n-1-v) times during the Gray walk, so putting the sparsest
    rows on the most-flipped bits makes the incremental update O(1) amortized.
    Returns old->new vertex ids.
    """
    nnz = [0] * n
    for (i, j), _ in pair_weights.items():
        nnz[i] += 1
        nnz[j] += 1
    order = sorted(range(n), key=lambda v: (nnz[v], v))
    newid = [0] * n
    for bit, v in enumerate(order):
        newid[v] = bit
    return newid


def _dense_gray_counts(n: int, forms: list[QuadraticForm], sizes: list[int]):
    """Run the Gray-code kernel over a dense flat histogram and decode it."""
    combined: dict[tuple[int, int], int] = {}
    strides = [1] * len(forms)
    for t in range(len(forms) - 2, -1, -1):
        strides[t] = strides[t + 1] * sizes[t + 1]
    for f, stride in zip(forms, strides):
        for i, j, w in f.pairs:
            combined[(i, j)] = combined.get((i, j), 0) + w * stride

    newid = _flip_cost_order(n, combined)
    lin_flat = np.zeros(n, dtype=np.int64)
    for f, stride in zip(forms, strides):
        for v, c in enumerate(f.lin):
            lin_flat[newid[v]] += c * stride

    rows: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for (i, j), w in combined.items():
        a, b = newid[i], newid[j]
        rows[a].append((b, w))
        rows[b].append((a, w))
    indptr = np.zeros(n + 1, dtype=np.int64)
    idx_list, w_list = [], []
    for v in range(n):
        rows[v].sort()
        indptr[v + 1] = indptr[v] + len(rows[v])
        idx_list.extend(u for u, _ in rows[v])
        w_list.extend(w for _, w in rows[v])
    indices = np.asarray(idx_list, dtype=np.int32)
    weights = np.asarray(w_list, dtype=np.int64)

    halves = [f.value_range_halfwidth() for f in forms]
    start_flat = 0
    for f, half, stride in zip(forms, halves, strides):
        all_plus = sum(f.lin) + sum(w for _, _, w in f.pairs)
        start_flat += ((all_plus + half) // 2) * stride

    counts = np.zeros(int(np.prod(sizes, dtype=np.int64)), dtype=np.uint64)
    _kernels.gray_histogram(n, lin_flat, indptr, indices, weights, start_flat, counts)

    nz = np.flatnonzero(counts)
    axes = np.unravel_index(nz, sizes)
    terms: dict[tuple[int, ...], int] = {}
    for row in range(len(nz)):
        key = tuple(
            f.const - half + 2 * int(axes[t][row])
            for t, (f, half) in enumerate(zip(forms, halves))
        )
        terms[key] = int(counts[nz[row]])
    return terms


def _dict_gray_counts(n: int, forms: list[QuadraticForm]):
    """Plain-dict Gray walk; used when the dense grid would be oversized."""
    rows_per_form = []
    for f in forms:
        rows: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for i, j, w in f.pairs:
            rows[i].append((j, w))
            rows[j].append((i, w))
        rows_per_form.append(rows)
    vals = [f.const + sum(f.lin) + sum(w for _, _, w in f.pairs) for f in forms]
    spins = [1] * n
    terms: dict[tuple[int, ...], int] = {}
    key = tuple(vals)
    terms[key] = 1
    for t in range(1, 1 << n):
        v = (t & -t).bit_length() - 1
        sv = spins[v]
        for idx, f in enumerate(forms):
            acc = f.lin[v]
            for u, w in rows_per_form[idx][v]:
                acc += w * spins[u]
            vals[idx] -= 2 * sv * acc
        spins[v] = -sv
        key = tuple(vals)
        terms[key] = terms.get(key, 0) + 1
    return terms


def signature_polynomial(
    g: Graph, obs: ObservableSet = ObservableSet()
) -> SignaturePolynomial:
    """Exact observable-tuple counts over all 2^n states (Gray-code walk)."""
    if g.n > ENUM_MAX_VERTICES:
        raise BudgetError(
            f"enumeration limited to n <= {ENUM_MAX_VERTICES}, got n={g.n}"
        )
    forms = observable_forms(g, obs)
    sizes = [f.value_range_halfwidth() + 1 for f in forms]
    cells = int(np.prod(sizes, dtype=np.float64))
    if cells <= DENSE_CELL_CAP:
        terms = _dense_gray_counts(g.n, forms, sizes)
    elif (1 << g.n) <= DICT_STATE_CAP:
        terms = _dict_gray_counts(g.n, forms)
    else:
        raise BudgetError(
            f"observable grid needs {cells} cells (cap {DENSE_CELL_CAP}) and "
            f"n={g.n} is past the dict-walk budget"
        )
    return SignaturePolynomial(obs.names, g.n, g.edge_count, terms)


def energy_spectrum(p: SignaturePolynomial) -> Counter:
    """Energy marginal as a multiset (value -> multiplicity).

    Equality of these multisets for two graphs is equivalent to equal energy
    spectra at every coupling J, since eigenvalues scale linearly in J.
    """
    return p.marginal("e")


def longitudinal_spectrum(p: SignaturePolynomial, J: int = 1, h: int = 1) -> Counter:
    """Multiset {J*e + h*m} -- the diagonal field-refined spectrum at (J, h).

    Integer couplings keep the comparison exact.
    """
    ei = p.observables.index("e")
    mi = p.observables.index("m")
    out: Counter = Counter()
    for exps, count in p.terms.items():
        out[J * exps[ei] + h * exps[mi]] += count
    return out


def partition_function(
    p: SignaturePolynomial, beta: float, J: float = 1.0, h: float = 1.0
) -> float:
    """Sum of count * exp(-beta*(J*e + h*m)) over all terms.

    Raises OverflowError instead of returning infinity for extreme beta.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    ei = p.observables.index("e")
    mi = p.observables.index("m")
    exponents = {
        exps: -beta * (J * exps[ei] + h * exps[mi]) for exps in p.terms
    }
    peak = max(exponents.values(), default=0.0)
    if peak > _EXP_OVERFLOW:
        raise OverflowError(f"partition function overflows float64 at beta={beta}")
    z = sum(count * exp(exponents[exps]) for exps, count in p.terms.items())
    if not isfinite(z):
        raise OverflowError(f"partition function overflows float64 at beta={beta}")
    return z


_DEFAULT_JH_SAMPLES = ((1, 1), (2, 1), (1, 2), (2, 3))


@dataclass(frozen=True)
class InvariantReport:
    """Pairwise classical-invariant comparison of two graphs."""

    adjacency_cospectral: bool
    co_ising: bool
    longitudinal_co_ising: bool
    longitudinal_cospectral_at: dict[tuple[int, int], bool]
    multivariate_equal: dict[int, bool]
    isomorphic: bool | None

    def to_json_dict(self) -> dict:
        return {
            "adjacency_cospectral": self.adjacency_cospectral,
            "co_ising": self.co_ising,
            "longitudinal_co_ising": self.longitudinal_co_ising,
            "longitudinal_cospectral_at": {
                f"J={J},h={h}": v
                for (J, h), v in self.longitudinal_cospectral_at.items()
            },
            "multivariate_equal": {
                f"omega{k}": v for k, v in self.multivariate_equal.items()
            },
            "isomorphic": self.isomorphic,
        }


def compare_invariants(
    g1: Graph,
    g2: Graph,
    omega_ks: tuple[int, ...] = (2,),
    jh_samples=_DEFAULT_JH_SAMPLES,
) -> InvariantReport:
    """Full classical comparison: adjacency spectrum, energy spectrum,
    bivariate and omega-refined signature polynomials, isomorphism oracle.

    ``longitudinal_co_ising`` is equality of the full (e, m) joint counts,
    hence of the field-refined spectra for *all* couplings; the per-(J, h)
    entries report fixed-coupling spectrum equality, which can hold at (1, 1)
    while the joint counts differ.
    """
    obs = ObservableSet(tuple(omega_ks))
    p1 = signature_polynomial(g1, obs)
    p2 = signature_polynomial(g2, obs)
    bi1 = p1.project(("e", "m"))
    bi2 = p2.project(("e", "m"))
    iso = None
    if max(g1.n, g2.n) <= 13:
        iso = are_isomorphic(g1, g2)
    return InvariantReport(
        adjacency_cospectral=adjacency_char_poly(g1) == adjacency_char_poly(g2),
        co_ising=energy_spectrum(bi1) == energy_spectrum(bi2),
        longitudinal_co_ising=(bi1.n == bi2.n and bi1.terms == bi2.terms),
        longitudinal_cospectral_at={
            (J, h): longitudinal_spectrum(bi1, J, h) == longitudinal_spectrum(bi2, J, h)
            for J, h in jh_samples
        },
        multivariate_equal={
            k: (
                p1.project(("e", "m", f"omega{k}")).terms
                == p2.project(("e", "m", f"omega{k}")).terms
            )
            for k in omega_ks
        },
        isomorphic=iso,
    )
