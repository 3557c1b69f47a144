import math

import numpy as np
import pytest

import isingspec.classical as classical
from isingspec.classical import (
    compare_invariants,
    energy_spectrum,
    longitudinal_spectrum,
    partition_function,
    signature_polynomial,
)
from isingspec.exceptions import BudgetError
from isingspec.fixtures import fixture
from isingspec.graphs import Graph, random_graph
from isingspec.observables import ObservableSet, batch_observables, state_observables

from conftest import naive_signature_counts

K2 = Graph.from_edges(2, [(0, 1)])


def random_bipartite(n_left, n_right, p, rng):
    pairs = [
        (i, n_left + j)
        for i in range(n_left)
        for j in range(n_right)
        if rng.random() < p
    ]
    return Graph.from_edges(n_left + n_right, pairs)


class TestStateObservables:
    def test_k2_aligned(self):
        assert state_observables(K2, 0, ObservableSet()) == (1, 2)

    def test_k2_antialigned(self):
        assert state_observables(K2, 1, ObservableSet()) == (-1, 0)

    def test_omega1_is_twice_energy(self, rng):
        obs = ObservableSet((1,))
        for _ in range(8):
            g = random_graph(int(rng.integers(2, 9)), 0.5, rng)
            sigma = int(rng.integers(0, 1 << g.n))
            e, _, om1 = state_observables(g, sigma, obs)
            assert om1 == 2 * e

    def test_batch_matches_scalar(self, rng):
        g = random_graph(7, 0.5, rng)
        obs = ObservableSet((2, 3))
        sigmas = rng.integers(0, 1 << g.n, size=50, dtype=np.uint64)
        batch = batch_observables(g, sigmas, obs)
        for row, sigma in zip(batch, sigmas):
            assert tuple(row) == state_observables(g, int(sigma), obs)

    def test_rejects_out_of_range_state(self):
        with pytest.raises(ValueError):
            state_observables(K2, 4, ObservableSet())


class TestObservableSet:
    def test_names(self):
        assert ObservableSet((2,)).names == ("e", "m", "omega2")

    def test_from_names_requires_e_m_prefix(self):
        with pytest.raises(ValueError):
            ObservableSet.from_names(["m", "e"])

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            ObservableSet((5,))


class TestSignaturePolynomial:
    def test_k2_terms(self):
        p = signature_polynomial(K2)
        assert p.terms == {(1, 2): 1, (-1, 0): 2, (1, -2): 1}

    def test_g3_g4_refinement_coefficients(self):
        # brute-force oracle first, then the frozen expected values
        oracle3 = naive_signature_counts(fixture("G3"))
        oracle4 = naive_signature_counts(fixture("G4"))
        assert oracle3[(-2, 0)] == 2 and oracle4[(-2, 0)] == 4
        assert signature_polynomial(fixture("G3")).terms == oracle3
        assert signature_polynomial(fixture("G4")).terms == oracle4

    def test_g13_pair_bivariate_equal(self):
        p1 = signature_polynomial(fixture("G13"))
        p2 = signature_polynomial(fixture("G13p"))
        assert p1.terms == p2.terms

    def test_counts_sum_to_state_count(self, rng):
        for _ in range(6):
            g = random_graph(int(rng.integers(1, 11)), 0.4, rng)
            assert signature_polynomial(g).total() == 1 << g.n

    def test_gray_walk_equals_naive_recomputation(self, rng):
        for _ in range(10):
            n = int(rng.integers(2, 11))
            g = random_graph(n, float(rng.uniform(0.1, 0.9)), rng)
            ks = (2,) if rng.random() < 0.5 else ()
            obs = ObservableSet(ks)
            p = signature_polynomial(g, obs)
            sigmas = np.arange(1 << n, dtype=np.uint64)
            values = batch_observables(g, sigmas, obs)
            keys, counts = np.unique(values, axis=0, return_counts=True)
            vectorized = {tuple(int(x) for x in k): int(c) for k, c in zip(keys, counts)}
            assert p.terms == vectorized
            if n <= 7:
                assert p.terms == naive_signature_counts(g, obs)

    def test_dict_path_matches_dense_path(self, rng, monkeypatch):
        g = random_graph(8, 0.5, rng)
        obs = ObservableSet((2,))
        dense = signature_polynomial(g, obs)
        monkeypatch.setattr(classical, "DENSE_CELL_CAP", 0)
        dict_path = signature_polynomial(g, obs)
        assert dense.terms == dict_path.terms

    def test_spin_flip_symmetry(self, rng):
        # m is odd under the global flip, e and omega-k are even
        g = random_graph(8, 0.5, rng)
        p = signature_polynomial(g, ObservableSet((2,)))
        for (e, m, o2), count in p.terms.items():
            assert p.terms[(e, -m, o2)] == count

    def test_relabeling_invariance(self, rng):
        g = random_graph(9, 0.4, rng)
        perm = list(rng.permutation(9))
        obs = ObservableSet((2,))
        assert signature_polynomial(g, obs).terms == signature_polynomial(
            g.relabel(perm), obs
        ).terms

    def test_projection_consistency(self):
        p = signature_polynomial(fixture("G3"), ObservableSet((2,)))
        assert p.project(("e", "m")).terms == signature_polynomial(fixture("G3")).terms

    def test_enumeration_budget(self):
        with pytest.raises(BudgetError):
            signature_polynomial(Graph(30, ()))

    def test_canonical_json_sorted(self):
        p = signature_polynomial(K2)
        terms = p.to_json_dict()["terms"]
        exps = [tuple(t["exps"]) for t in terms]
        assert exps == sorted(exps)


class TestMoments:
    def test_zero_sums_and_energy_second_moment(self, rng):
        # sum_sigma e = 0, sum_sigma m = 0, sum_sigma e^2 = |E| * 2^n, exactly
        for _ in range(8):
            g = random_graph(int(rng.integers(2, 10)), 0.5, rng)
            p = signature_polynomial(g)
            assert sum(e * c for (e, _), c in p.terms.items()) == 0
            assert sum(m * c for (_, m), c in p.terms.items()) == 0
            assert sum(e * e * c for (e, _), c in p.terms.items()) == (
                g.edge_count << g.n
            )

    def test_bipartite_energy_symmetry(self, rng):
        for _ in range(6):
            g = random_bipartite(3, 4, 0.6, rng)
            marg = energy_spectrum(signature_polynomial(g))
            assert marg == {-e: c for e, c in marg.items()}


class TestEnergySpectrum:
    def test_g3_g4_co_ising(self):
        m3 = energy_spectrum(signature_polynomial(fixture("G3")))
        m4 = energy_spectrum(signature_polynomial(fixture("G4")))
        assert dict(m3) == {-2: 4, 0: 8, 2: 4}
        assert m3 == m4

    def test_g1_g2_not_co_ising(self):
        m1 = energy_spectrum(signature_polynomial(fixture("G1")))
        m2 = energy_spectrum(signature_polynomial(fixture("G2")))
        assert m1 != m2

    def test_k2(self):
        assert dict(energy_spectrum(signature_polynomial(K2))) == {1: 2, -1: 2}


class TestPartitionFunction:
    def test_beta_zero_counts_states(self, rng):
        g = random_graph(6, 0.5, rng)
        assert partition_function(signature_polynomial(g), 0.0) == 1 << 6

    def test_k2_closed_form(self):
        z = partition_function(signature_polynomial(K2), 1.0, J=1.0, h=0.0)
        assert z == pytest.approx(2 * math.exp(-1) + 2 * math.exp(1), rel=1e-14)

    def test_matches_direct_state_sum(self, rng):
        for _ in range(6):
            g = random_graph(int(rng.integers(2, 11)), 0.4, rng)
            p = signature_polynomial(g)
            beta = float(rng.uniform(0, 2))
            direct = sum(
                math.exp(-beta * state_observables(g, s, ObservableSet())[0])
                for s in range(1 << g.n)
            )
            assert partition_function(p, beta, J=1.0, h=0.0) == pytest.approx(
                direct, rel=1e-12
            )

    def test_overflow_is_an_error(self):
        with pytest.raises(OverflowError):
            partition_function(signature_polynomial(K2), 1e4)

    def test_negative_beta_rejected(self):
        with pytest.raises(ValueError):
            partition_function(signature_polynomial(K2), -1.0)


class TestCompareInvariants:
    def test_g3_g4(self):
        r = compare_invariants(fixture("G3"), fixture("G4"))
        assert r.co_ising
        assert not r.longitudinal_co_ising
        assert not r.longitudinal_cospectral_at[(1, 1)]
        assert r.isomorphic is False

    def test_g1_g2_fixed_coupling_vs_all_couplings(self):
        # Equal field-refined spectra exactly at J=h=1, unequal in general,
        # unequal energy spectra.
        r = compare_invariants(fixture("G1"), fixture("G2"))
        assert not r.co_ising
        assert r.longitudinal_cospectral_at[(1, 1)]
        assert not r.longitudinal_cospectral_at[(2, 1)]
        assert not r.longitudinal_co_ising

    def test_g13_pair(self):
        r = compare_invariants(fixture("G13"), fixture("G13p"))
        assert r.adjacency_cospectral
        assert r.co_ising
        assert r.longitudinal_co_ising
        assert r.multivariate_equal[2] is False
        assert r.isomorphic is False

    def test_longitudinal_spectrum_is_emh_multiset(self):
        p = signature_polynomial(K2)
        assert dict(longitudinal_spectrum(p, 1, 1)) == {3: 1, -1: 3}

    def test_json_shape(self):
        d = compare_invariants(fixture("G3"), fixture("G4")).to_json_dict()
        assert set(d) == {
            "adjacency_cospectral",
            "co_ising",
            "longitudinal_co_ising",
            "longitudinal_cospectral_at",
            "multivariate_equal",
            "isomorphic",
        }
