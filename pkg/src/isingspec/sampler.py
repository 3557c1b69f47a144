"""Gibbs statistics of spin states: exact distributions, Metropolis
sampling, bootstrap errors, and histogram comparison.

The sampler's contract is the classical Gibbs family p(sigma) proportional
to exp(-beta*(J*e + h*m)), with beta a free knob; `fit_temperature`
reproduces the pick-the-best-temperature step used when matching observed
signature statistics.  All randomness is drawn from explicitly seeded
streams in fixed-size blocks, so a run is reproducible bit for bit on
either kernel backend.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import exp

import numpy as np

from . import _kernels
from .classical import SignaturePolynomial, signature_polynomial
from .graphs import Graph
from .observables import ObservableSet, batch_observables

_BLOCK_SWEEPS = 1 << 14  # fixed so the RNG stream partition never changes


@dataclass(frozen=True)
class GibbsModel:
    """Thermal model on a graph's classical Ising Hamiltonian."""

    graph: Graph
    beta: float
    J: float = 1.0
    h: float = 1.0
    observables: ObservableSet = ObservableSet()

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be >= 0")


@dataclass(frozen=True)
class SignatureHistogram:
    """Occurrence counts per observable tuple, in canonical bin order.

    ``counts`` holds sampled counts (integers) or exact probability mass
    (floats summing to 1); ``total`` is the corresponding normalization.
    Bins sort lexicographically ascending on the tuple everywhere the
    histogram is displayed or serialized.
    """

    observables: tuple[str, ...]
    counts: dict[tuple[int, ...], float]
    total: float
    ci: dict[tuple[int, ...], tuple[float, float]] | None = None

    @property
    def arity(self) -> int:
        return len(self.observables)

    def sorted_bins(self) -> list[tuple[tuple[int, ...], float]]:
        return sorted(self.counts.items())

    def probabilities(self) -> dict[tuple[int, ...], float]:
        return {k: v / self.total for k, v in self.counts.items()}

    def merge(self, other: "SignatureHistogram") -> "SignatureHistogram":
        """Bin-wise sum; associative and commutative.  Drops intervals."""
        if self.observables != other.observables:
            raise ValueError("histogram observable sets differ")
        counts = dict(self.counts)
        for k, v in other.counts.items():
            counts[k] = counts.get(k, 0) + v
        return SignatureHistogram(self.observables, counts, self.total + other.total)

    def to_json_dict(self) -> dict:
        bins = []
        for key, count in self.sorted_bins():
            entry = {
                "tuple": list(key),
                "count": count,
                "probability": count / self.total,
            }
            if self.ci is not None and key in self.ci:
                entry["ci_low"], entry["ci_high"] = self.ci[key]
            bins.append(entry)
        return {
            "observables": list(self.observables),
            "total": self.total,
            "bins": bins,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SignatureHistogram":
        counts = {}
        ci = {}
        for entry in data["bins"]:
            key = tuple(int(x) for x in entry["tuple"])
            counts[key] = entry["count"]
            if "ci_low" in entry:
                ci[key] = (entry["ci_low"], entry["ci_high"])
        return cls(
            tuple(data["observables"]), counts, data["total"], ci or None
        )

    def to_csv(self, fileobj) -> None:
        names = ",".join(self.observables)
        fileobj.write(f"bin_index,{names},count,probability,ci_low,ci_high\n")
        for idx, (key, count) in enumerate(self.sorted_bins()):
            tup = ",".join(str(x) for x in key)
            prob = count / self.total
            lo = hi = ""
            if self.ci is not None and key in self.ci:
                lo, hi = (f"{x:.10g}" for x in self.ci[key])
            fileobj.write(f"{idx},{tup},{count:.10g},{prob:.10g},{lo},{hi}\n")


def _reweighted(
    poly: SignaturePolynomial, beta: float, J: float, h: float
) -> SignatureHistogram:
    ei = poly.observables.index("e")
    mi = poly.observables.index("m")
    exponents = {
        exps: -beta * (J * exps[ei] + h * exps[mi]) for exps in poly.terms
    }
    peak = max(exponents.values(), default=0.0)
    weights = {
        exps: count * exp(exponents[exps] - peak)
        for exps, count in poly.terms.items()
    }
    z = sum(weights.values())
    probs = {exps: w / z for exps, w in weights.items()}
    return SignatureHistogram(poly.observables, probs, 1.0)


def exact_distribution(model: GibbsModel) -> SignatureHistogram:
    """Exact Boltzmann probabilities per observable tuple."""
    poly = signature_polynomial(model.graph, model.observables)
    return _reweighted(poly, model.beta, model.J, model.h)


def metropolis_sample(
    model: GibbsModel,
    sweeps: int,
    chains: int = 1,
    seed: int | None = None,
    burn_in: int | None = None,
) -> SignatureHistogram:
    """Sample signatures with single-spin-flip Metropolis chains.

    One signature is recorded per sweep (n proposed spin assignments); each
    chain first burns ``burn_in`` sweeps (default sweeps//10).  Chains run
    on independently seeded streams and their histograms merge, for a total
    of sweeps*chains recorded signatures.
    """
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    if seed is None:
        raise ValueError("metropolis_sample requires an explicit seed")
    g = model.graph
    n = g.n
    if burn_in is None:
        burn_in = sweeps // 10

    indptr = np.zeros(n + 1, dtype=np.int64)
    idx = []
    for v in range(n):
        nbrs = g.neighbors[v]
        indptr[v + 1] = indptr[v] + len(nbrs)
        idx.extend(nbrs)
    indices = np.asarray(idx, dtype=np.int32)

    merged: SignatureHistogram | None = None
    for child in np.random.SeedSequence(seed).spawn(chains):
        rng = np.random.default_rng(child)
        bits = rng.integers(0, 2, size=n, dtype=np.uint64)
        spins = (1 - 2 * bits).astype(np.int8)
        state = np.array([int((bits << np.arange(n, dtype=np.uint64)).sum())],
                         dtype=np.uint64)
        recorded = np.empty(sweeps, dtype=np.uint64)
        empty = np.empty(0, dtype=np.uint64)
        done_burn = 0
        done_rec = 0
        while done_burn < burn_in or done_rec < sweeps:
            if done_burn < burn_in:
                block = min(_BLOCK_SWEEPS, burn_in - done_burn)
                out = empty
                done_burn += block
            else:
                block = min(_BLOCK_SWEEPS, sweeps - done_rec)
                out = recorded[done_rec : done_rec + block]
                done_rec += block
            proposals = rng.integers(0, 2 * n, size=block * n, dtype=np.uint32)
            uniforms = rng.random(block * n)
            _kernels.metropolis_chain(
                indptr, indices, spins, state,
                float(model.J), float(model.h), float(model.beta),
                proposals, uniforms, out,
            )
        values = batch_observables(g, recorded, model.observables)
        keys, counts = np.unique(values, axis=0, return_counts=True)
        hist = SignatureHistogram(
            model.observables.names,
            {tuple(int(x) for x in k): int(c) for k, c in zip(keys, counts)},
            float(sweeps),
        )
        merged = hist if merged is None else merged.merge(hist)
    return merged


def bootstrap_ci(
    hist: SignatureHistogram, resamples: int, seed: int
) -> SignatureHistogram:
    """Attach per-bin 16-84 percentile intervals from multinomial resampling."""
    if resamples < 2:
        raise ValueError("resamples must be >= 2")
    if hist.total < 1:
        raise ValueError("histogram is empty")
    counts = [c for _, c in hist.sorted_bins()]
    if any(c != int(c) for c in counts):
        raise ValueError("bootstrap needs integer sample counts")
    total = int(hist.total)
    keys = [k for k, _ in hist.sorted_bins()]
    probs = np.asarray(counts, dtype=np.float64) / total
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(total, probs, size=resamples)
    lo = np.percentile(draws, 16, axis=0)
    hi = np.percentile(draws, 84, axis=0)
    ci = {k: (float(a), float(b)) for k, a, b in zip(keys, lo, hi)}
    return SignatureHistogram(hist.observables, dict(hist.counts), hist.total, ci)


@dataclass(frozen=True)
class HistogramComparison:
    total_variation: float
    support_equal: bool
    per_bin_z: dict[tuple[int, ...], float]

    def to_json_dict(self) -> dict:
        return {
            "total_variation": self.total_variation,
            "support_equal": self.support_equal,
            "per_bin_z": {
                ",".join(str(x) for x in k): v
                for k, v in sorted(self.per_bin_z.items())
            },
        }


def compare_histograms(
    h1: SignatureHistogram, h2: SignatureHistogram
) -> HistogramComparison:
    """Total variation over the union of supports plus per-bin z-scores.

    z-scores use the pooled two-proportion normal approximation; they are
    meaningful for count histograms (not exact-probability ones).
    """
    if h1.arity != h2.arity:
        raise ValueError(f"arity mismatch: {h1.arity} != {h2.arity}")
    support = set(h1.counts) | set(h2.counts)
    tv = 0.0
    zs: dict[tuple[int, ...], float] = {}
    for key in support:
        p1 = h1.counts.get(key, 0) / h1.total
        p2 = h2.counts.get(key, 0) / h2.total
        tv += abs(p1 - p2)
        pooled = (h1.counts.get(key, 0) + h2.counts.get(key, 0)) / (h1.total + h2.total)
        se2 = pooled * (1 - pooled) * (1 / h1.total + 1 / h2.total)
        zs[key] = (p1 - p2) / se2 ** 0.5 if se2 > 0 else 0.0
    return HistogramComparison(
        total_variation=0.5 * tv,
        support_equal=set(h1.counts) == set(h2.counts),
        per_bin_z=zs,
    )


@dataclass(frozen=True)
class FitResult:
    beta: float
    total_variation: float


def fit_temperature(
    g: Graph,
    target: SignatureHistogram,
    beta_grid,
    J: float = 1.0,
    h: float = 1.0,
) -> FitResult:
    """Grid-search the Gibbs temperature minimizing TV to a target histogram.

    Ties break toward smaller beta.
    """
    beta_grid = list(beta_grid)
    if not beta_grid:
        raise ValueError("beta grid is empty")
    obs = ObservableSet.from_names(target.observables)
    poly = signature_polynomial(g, obs)
    best: FitResult | None = None
    for beta in sorted(beta_grid):
        dist = _reweighted(poly, beta, J, h)
        tv = compare_histograms(dist, target).total_variation
        if best is None or tv < best.total_variation:
            best = FitResult(float(beta), tv)
    return best
