import io

import numpy as np
import pytest

from isingspec.exceptions import BudgetError
from isingspec.fixtures import fixture
from isingspec.graphs import Graph, random_graph
from isingspec.quantum import (
    IsingParams,
    QuantumOperator,
    annealing_sweep,
    full_spectrum_dense,
    lowest_k_eigenvalues,
    quantum_cospectral_probe,
    quantum_partition_function,
)

K2 = Graph.from_edges(2, [(0, 1)])


def kron_oracle(g, J, h, Delta):
    """Independent dense construction from explicit tensor products."""
    z = np.diag([1.0, -1.0])
    x = np.array([[0.0, 1.0], [1.0, 0.0]])
    eye = np.eye(2)

    def on_bit(op, i):
        out = np.eye(1)
        for bit in range(g.n - 1, -1, -1):
            out = np.kron(out, op if bit == i else eye)
        return out

    dim = 1 << g.n
    ham = np.zeros((dim, dim))
    for i, j in g.edges:
        ham += J * on_bit(z, i) @ on_bit(z, j)
    for i in range(g.n):
        ham += h * on_bit(z, i) + Delta * on_bit(x, i)
    return ham


class TestOperator:
    def test_matches_kron_construction(self, rng):
        for _ in range(6):
            g = random_graph(int(rng.integers(1, 5)), 0.5, rng)
            params = IsingParams(
                float(rng.uniform(-2, 2)),
                float(rng.uniform(-2, 2)),
                float(rng.uniform(-2, 2)),
            )
            op = QuantumOperator(g, params)
            oracle = kron_oracle(g, params.J, params.h, params.Delta)
            assert np.allclose(op.dense_matrix(), oracle, rtol=0, atol=1e-12)

    def test_apply_single_spin(self):
        op = QuantumOperator(Graph(1, ()), IsingParams(J=0.0, h=1.0, Delta=1.0))
        assert np.array_equal(op.apply(np.array([1.0, 0.0])), [1.0, 1.0])

    def test_apply_reduces_to_diagonal_without_field(self, rng):
        g = random_graph(6, 0.5, rng)
        op = QuantumOperator(g, IsingParams(1.0, 1.0, 0.0))
        v = rng.standard_normal(op.dim)
        assert np.array_equal(op.apply(v), op.diag * v)

    def test_apply_is_symmetric_and_linear(self, rng):
        g = random_graph(7, 0.4, rng)
        op = QuantumOperator(g, IsingParams(1.3, -0.7, 0.9))
        u = rng.standard_normal(op.dim)
        v = rng.standard_normal(op.dim)
        assert u @ op.apply(v) == pytest.approx(op.apply(u) @ v, rel=1e-12)
        lhs = op.apply(2.5 * u - v)
        assert np.allclose(lhs, 2.5 * op.apply(u) - op.apply(v), rtol=1e-12)

    def test_apply_matches_dense(self, rng):
        g = random_graph(5, 0.5, rng)
        op = QuantumOperator(g, IsingParams(1.0, 0.5, 0.8))
        v = rng.standard_normal(op.dim)
        assert np.allclose(op.apply(v), op.dense_matrix() @ v, rtol=1e-13)

    def test_trace_of_square_identity(self, rng):
        # Tr H^2 = 2^n (J^2 |E| + h^2 n + Delta^2 n), via apply on basis vectors
        for _ in range(4):
            g = random_graph(int(rng.integers(1, 5)), 0.6, rng)
            J, h, D = 1.0, 1.0, 1.0
            op = QuantumOperator(g, IsingParams(J, h, D))
            tr2 = 0.0
            for s in range(op.dim):
                e = np.zeros(op.dim)
                e[s] = 1.0
                tr2 += op.apply(e) @ op.apply(e)
            expected = (1 << g.n) * (J * J * g.edge_count + h * h * g.n + D * D * g.n)
            assert tr2 == pytest.approx(expected, rel=1e-12)
            oracle = kron_oracle(g, J, h, D)
            assert np.trace(oracle @ oracle) == pytest.approx(expected, rel=1e-12)

    def test_anneal_mode_endpoints(self):
        g = fixture("G3")
        p = IsingParams(1.0, 1.0, 1.0)
        from dataclasses import replace

        op1 = QuantumOperator(g, replace(p, s=1.0), mode="anneal")
        assert op1.amp == 0.0
        op0 = QuantumOperator(g, replace(p, s=0.0), mode="anneal")
        assert np.all(op0.diag == 0.0) and op0.amp == 1.0

    def test_dimension_mismatch(self):
        op = QuantumOperator(K2, IsingParams())
        with pytest.raises(ValueError):
            op.apply(np.zeros(5))

    def test_size_budget(self):
        with pytest.raises(BudgetError):
            QuantumOperator(Graph(25, ()), IsingParams())


class TestDenseSpectrum:
    def test_classical_limit_is_sorted_diagonal(self, rng):
        g = random_graph(6, 0.5, rng)
        op = QuantumOperator(g, IsingParams(1.0, 1.0, 0.0))
        spec = full_spectrum_dense(op)
        assert np.allclose(spec.eigenvalues, np.sort(op.diag), atol=1e-12)

    def test_k2_block_structure(self):
        # symmetric sector gives the cubic x^3 - x^2 - 9x + 1; antisymmetric -1
        spec = full_spectrum_dense(QuantumOperator(K2, IsingParams(1, 1, 1)))
        expected = np.sort(np.concatenate([np.roots([1.0, -1, -9, 1]).real, [-1.0]]))
        assert np.allclose(spec.eigenvalues, expected, atol=1e-10)
        assert spec.eigenvalues[0] == pytest.approx(-2.6039, abs=1e-4)

    def test_traceless(self, rng):
        g = random_graph(8, 0.4, rng)
        spec = full_spectrum_dense(QuantumOperator(g, IsingParams(1.2, 0.7, 0.9)))
        assert abs(spec.eigenvalues.sum()) <= 1e-9 * (1 << g.n)

    def test_trace_identities(self, rng):
        for _ in range(5):
            g = random_graph(int(rng.integers(2, 9)), 0.5, rng)
            J, h, D = (float(x) for x in rng.uniform(0.2, 1.5, size=3))
            spec = full_spectrum_dense(QuantumOperator(g, IsingParams(J, h, D)))
            n, dim = g.n, 1 << g.n
            second = dim * (J * J * g.edge_count + h * h * n + D * D * n)
            assert abs(spec.eigenvalues.sum()) <= 1e-8 * second**0.5 * dim**0.5
            assert (spec.eigenvalues**2).sum() == pytest.approx(second, rel=1e-8)

    def test_budget(self):
        with pytest.raises(BudgetError):
            full_spectrum_dense(QuantumOperator(Graph(14, ()), IsingParams()))


class TestLowestK:
    def test_k2_ground_state(self):
        spec = lowest_k_eigenvalues(QuantumOperator(K2, IsingParams(1, 1, 1)), 1)
        oracle = np.linalg.eigvalsh(
            np.array(
                [[3.0, 1, 1, 0], [1, -1, 0, 1], [1, 0, -1, 1], [0, 1, 1, -1]]
            )
        )
        assert spec.eigenvalues[0] == pytest.approx(oracle[0], abs=1e-10)
        assert spec.eigenvalues[0] == pytest.approx(-2.6039, abs=1e-4)

    def test_single_spin_pair(self):
        op = QuantumOperator(Graph(1, ()), IsingParams(J=0.0, h=1.0, Delta=1.0))
        spec = lowest_k_eigenvalues(op, 2)
        assert np.allclose(spec.eigenvalues, [-np.sqrt(2), np.sqrt(2)], atol=1e-10)

    def test_free_spins(self):
        op = QuantumOperator(Graph(3, ()), IsingParams(J=0.0, h=0.0, Delta=1.0))
        assert lowest_k_eigenvalues(op, 1).eigenvalues[0] == pytest.approx(-3.0)
        # multiplicities resolved: -3, then -1 three times
        spec = lowest_k_eigenvalues(op, 4)
        assert np.allclose(spec.eigenvalues, [-3.0, -1.0, -1.0, -1.0], atol=1e-9)

    def test_matches_dense_small_graphs(self, rng):
        for trial in range(8):
            n = int(rng.integers(2, 11))
            g = random_graph(n, 0.4, rng)
            params = IsingParams(
                float(rng.uniform(-1.5, 1.5)),
                float(rng.uniform(-1.5, 1.5)),
                float(rng.uniform(0.2, 1.5)),
            )
            k = int(rng.integers(1, min(14, 1 << n) + 1))
            dense = full_spectrum_dense(QuantumOperator(g, params))
            krylov = lowest_k_eigenvalues(
                QuantumOperator(g, params), k, tol=1e-11, seed=trial
            )
            assert np.max(np.abs(dense.eigenvalues[:k] - krylov.eigenvalues)) <= 1e-9

    def test_relabeling_invariance(self, rng):
        g = random_graph(8, 0.4, rng)
        perm = list(rng.permutation(8))
        p = IsingParams(1.0, 1.0, 1.0)
        a = full_spectrum_dense(QuantumOperator(g, p)).eigenvalues
        b = full_spectrum_dense(QuantumOperator(g.relabel(perm), p)).eigenvalues
        assert np.max(np.abs(a - b)) <= 1e-9

    def test_k_bounds(self):
        op = QuantumOperator(K2, IsingParams())
        with pytest.raises(ValueError):
            lowest_k_eigenvalues(op, 5)


class TestPartitionFunction:
    def test_infinite_temperature_counts_states(self, rng):
        g = random_graph(6, 0.5, rng)
        spec = full_spectrum_dense(QuantumOperator(g, IsingParams(1, 1, 1)))
        assert quantum_partition_function(spec, 0.0) == pytest.approx(1 << 6)

    def test_k2_direct_sum(self):
        spec = full_spectrum_dense(QuantumOperator(K2, IsingParams(1, 1, 1)))
        assert quantum_partition_function(spec, 1.0) == pytest.approx(
            np.exp(-spec.eigenvalues).sum(), rel=1e-14
        )

    def test_low_temperature_asymptote_gives_ground_multiplicity(self):
        # Z * exp(beta*E0) -> nu0
        op = QuantumOperator(Graph(3, ()), IsingParams(J=0.0, h=0.0, Delta=1.0))
        spec = full_spectrum_dense(op)
        e0 = spec.eigenvalues[0]
        nu0 = int(np.sum(np.abs(spec.eigenvalues - e0) < 1e-9))
        for beta in (20.0, 40.0):
            z = quantum_partition_function(spec, beta)
            assert z * np.exp(beta * e0) == pytest.approx(nu0, rel=1e-8)
        assert nu0 == 1

    def test_refuses_partial_spectrum(self):
        spec = lowest_k_eigenvalues(QuantumOperator(K2, IsingParams()), 2)
        with pytest.raises(ValueError):
            quantum_partition_function(spec, 1.0)

    def test_overflow_is_an_error(self):
        spec = full_spectrum_dense(QuantumOperator(K2, IsingParams(1, 1, 1)))
        with pytest.raises(OverflowError):
            quantum_partition_function(spec, 1e4)


class TestAnnealingSweep:
    def test_endpoints_and_continuity(self):
        from isingspec.classical import longitudinal_spectrum, signature_polynomial

        g = fixture("G3")
        k = 6
        sweep = annealing_sweep(
            g, IsingParams(1.0, 1.0, 1.0, s=0.0), np.linspace(0, 1, 21), k=k
        )
        assert not sweep.failures
        # s=1: classical multiset {e+m}, ground-shifted
        classical = sorted(
            longitudinal_spectrum(signature_polynomial(g)).elements()
        )[:k]
        expected = np.array(classical, dtype=float)
        assert np.max(np.abs(sweep.shifted[-1] - (expected - expected[0]))) <= 1e-9
        # s=0: free spins, levels Delta*(n-2w) -> gaps 0,2,2,2,2,4 for n=4
        free = np.array([0.0, 2, 2, 2, 2, 4])
        assert np.max(np.abs(sweep.shifted[0] - free)) <= 1e-9
        # continuity: raw eigenvalue jumps bounded by the operator-norm bound
        raw = sweep.shifted + sweep.ground[:, None]
        ds = np.diff(sweep.s_values)
        norm_bound = np.max(np.abs(QuantumOperator(g, IsingParams(1, 1, 1)).diag))
        bound = ds[:, None] * (norm_bound + 1.0 * g.n) + 1e-9
        assert np.all(np.abs(np.diff(raw, axis=0)) <= bound)

    def test_csv_format(self):
        g = fixture("G3")
        sweep = annealing_sweep(g, IsingParams(1, 1, 1, s=0.0), [0.0, 0.5, 1.0], k=3)
        buf = io.StringIO()
        sweep.to_csv(buf)
        lines = buf.getvalue().strip().split("\n")
        assert lines[0] == "s,index,lambda_shifted"
        assert len(lines) == 1 + 3 * 3
        assert lines[1].startswith("0,1,0")

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            annealing_sweep(K2, IsingParams(), [-0.1], k=1)
        with pytest.raises(ValueError):
            annealing_sweep(K2, IsingParams(), [0.5], k=100)


class TestCospectralProbe:
    def test_relabeled_graph_never_distinguished(self, rng):
        g = random_graph(7, 0.4, rng)
        twin = g.relabel(list(rng.permutation(7)))
        report = quantum_cospectral_probe(
            g, twin, [IsingParams(1, 1, 1), IsingParams(0.5, 0.25, 1.5)]
        )
        assert not report.distinguished
        for point in report.points:
            assert point.max_abs_diff <= 1e-10

    def test_classical_co_ising_limit(self):
        report = quantum_cospectral_probe(
            fixture("G3"), fixture("G4"), [IsingParams(1.0, 0.0, 0.0)]
        )
        assert report.points[0].max_abs_diff == 0.0
        assert report.points[0].verdict == "not distinguished on grid"

    def test_transverse_field_distinguishes_g3_g4(self):
        # derived magnitude ~0.89 from dense diagonalization
        report = quantum_cospectral_probe(
            fixture("G3"), fixture("G4"), [IsingParams(1, 1, 1)]
        )
        assert report.distinguished
        assert report.points[0].max_abs_diff == pytest.approx(0.8901, abs=1e-4)

    def test_tolerance_guard(self):
        with pytest.raises(ValueError):
            quantum_cospectral_probe(K2, K2, tol=1e-12)
