"""Diagonal spin observables evaluated on +-1 spin configurations.

A state is an integer bitmask sigma; bit i = 0 means spin +1, bit i = 1 means
spin -1.  Every observable used here is an integer quadratic form in the
spins:

    value(s) = const + sum_i lin[i]*s_i + sum_{i<j} quad[i,j]*s_i*s_j

Energy counts each edge once; the walk observables omega-k sum
[A^k]_{ij}*s_i*s_j over *ordered* pairs including the diagonal, so each
unordered off-diagonal pair carries weight 2*[A^k]_{ij} and the diagonal
contributes the constant trace(A^k).  With that convention omega-1 equals
twice the energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph, adjacency_power

_OMEGA_KS = (1, 2, 3, 4)


@dataclass(frozen=True)
class ObservableSet:
    """Energy and magnetization, plus optional omega-k refinements."""

    omega_ks: tuple[int, ...] = ()

    def __post_init__(self):
        for k in self.omega_ks:
            if k not in _OMEGA_KS:
                raise ValueError(f"omega order {k} outside {_OMEGA_KS}")
        if len(set(self.omega_ks)) != len(self.omega_ks):
            raise ValueError("duplicate omega orders")

    @classmethod
    def from_names(cls, names) -> "ObservableSet":
        names = list(names)
        if names[:2] != ["e", "m"]:
            raise ValueError("observable list must start with 'e,m'")
        ks = []
        for name in names[2:]:
            if not name.startswith("omega"):
                raise ValueError(f"unknown observable {name!r}")
            ks.append(int(name[5:]))
        return cls(tuple(ks))

    @property
    def names(self) -> tuple[str, ...]:
        return ("e", "m") + tuple(f"omega{k}" for k in self.omega_ks)

    @property
    def arity(self) -> int:
        return 2 + len(self.omega_ks)


@dataclass(frozen=True)
class QuadraticForm:
    """One integer observable: const + lin.s + sum of pair terms."""

    const: int
    lin: tuple[int, ...]
    pairs: tuple[tuple[int, int, int], ...]  # (i, j, weight) with i < j

    def value_range_halfwidth(self) -> int:
        return sum(abs(c) for c in self.lin) + sum(abs(w) for _, _, w in self.pairs)

    def evaluate(self, spins) -> int:
        acc = self.const
        for i, c in enumerate(self.lin):
            acc += c * spins[i]
        for i, j, w in self.pairs:
            acc += w * spins[i] * spins[j]
        return acc


def observable_forms(g: Graph, obs: ObservableSet) -> list[QuadraticForm]:
    """Quadratic forms for (e, m, omega_k...) on the given graph."""
    zeros = (0,) * g.n
    forms = [
        QuadraticForm(0, zeros, tuple((i, j, 1) for i, j in g.edges)),
        QuadraticForm(0, (1,) * g.n, ()),
    ]
    for k in obs.omega_ks:
        ak = adjacency_power(g, k).rows
        pairs = tuple(
            (i, j, 2 * ak[i][j])
            for i in range(g.n)
            for j in range(i + 1, g.n)
            if ak[i][j]
        )
        forms.append(QuadraticForm(sum(ak[i][i] for i in range(g.n)), zeros, pairs))
    return forms


def spins_of(sigma: int, n: int) -> tuple[int, ...]:
    """Spin vector of a state bitmask (bit 0 -> +1, bit 1 -> -1)."""
    return tuple(1 - 2 * ((sigma >> i) & 1) for i in range(n))


def state_observables(g: Graph, sigma: int, obs: ObservableSet) -> tuple[int, ...]:
    """Evaluate the observable tuple on one state."""
    if not 0 <= sigma < (1 << g.n):
        raise ValueError(f"state {sigma} outside [0, 2^{g.n})")
    spins = spins_of(sigma, g.n)
    return tuple(f.evaluate(spins) for f in observable_forms(g, obs))


def batch_observables(g: Graph, sigmas: np.ndarray, obs: ObservableSet) -> np.ndarray:
    """Vectorized observable tuples for an array of state bitmasks.

    Returns an int64 array of shape (len(sigmas), arity).
    """
    sigmas = np.asarray(sigmas, dtype=np.uint64)
    spins = 1 - 2 * ((sigmas[:, None] >> np.arange(g.n, dtype=np.uint64)) & 1).astype(
        np.int64
    )
    forms = observable_forms(g, obs)
    out = np.empty((len(sigmas), len(forms)), dtype=np.int64)
    for t, f in enumerate(forms):
        acc = np.full(len(sigmas), f.const, dtype=np.int64)
        for i, c in enumerate(f.lin):
            if c:
                acc += c * spins[:, i]
        for i, j, w in f.pairs:
            acc += w * (spins[:, i] * spins[:, j])
        out[:, t] = acc
    return out
