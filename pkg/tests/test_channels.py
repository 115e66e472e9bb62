import numpy as np
import pytest

from cqbounds import (
    SizeCapError,
    ValidationError,
    classical_to_pure,
    confusability_graph,
    cycle_graph,
    make_graph,
    product_channel,
    strong_product,
    validate_classical,
    validate_cq,
    validate_distribution,
)

from conftest import random_classical, random_pure_cq, typewriter_channel


class TestValidateClassical:
    def test_accepts_bsc(self):
        ch = validate_classical([[0.9, 0.1], [0.1, 0.9]])
        assert ch.input_size == 2 and ch.output_size == 2

    def test_accepts_noiseless(self):
        validate_classical([[1, 0], [0, 1]])

    def test_rejects_bad_row_sum_naming_row(self):
        with pytest.raises(ValidationError, match="row 0"):
            validate_classical([[0.5, 0.4], [0.1, 0.9]])

    def test_rejects_negative_entry(self):
        with pytest.raises(ValidationError):
            validate_classical([[1.1, -0.1], [0.5, 0.5]])


class TestValidateCQ:
    def test_accepts_orthogonal_pure(self):
        ch = validate_cq([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        assert ch.dim == 2 and ch.input_size == 2

    def test_accepts_mixed(self):
        plus = np.full((2, 2), 0.5)
        validate_cq([np.eye(2) / 2, plus])

    def test_rejects_bad_trace_naming_state(self):
        with pytest.raises(ValidationError, match="state 0"):
            validate_cq([np.diag([0.6, 0.5])])

    def test_rejects_dim_mismatch(self):
        with pytest.raises(ValidationError):
            validate_cq([np.eye(2) / 2, np.eye(3) / 3])

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError, match="state 1"):
            validate_cq([np.eye(2) / 2, np.array([[0.5, 0.1], [0.0, 0.5]])])


class TestDistribution:
    def test_accepts_simplex_point(self):
        validate_distribution([0.2, 0.8])

    def test_rejects_negative(self):
        with pytest.raises(ValidationError):
            validate_distribution([1.1, -0.1])

    def test_rejects_bad_sum(self):
        with pytest.raises(ValidationError):
            validate_distribution([0.5, 0.4])


class TestClassicalToPure:
    def test_bsc_bhattacharyya_overlap(self, bsc):
        emb = classical_to_pure(bsc)
        # <phi0|phi1> = 2 sqrt(0.9 * 0.1) = 0.6, so Tr(S0 S1) = 0.36
        assert np.trace(emb.states[0] @ emb.states[1]).real == pytest.approx(0.36, abs=1e-12)

    def test_identity_gives_orthonormal(self, noiseless_binary):
        emb = classical_to_pure(noiseless_binary)
        assert np.trace(emb.states[0] @ emb.states[1]).real == pytest.approx(0.0, abs=1e-14)

    def test_identical_rows_give_overlap_one(self):
        ch = validate_classical([[0.3, 0.7], [0.3, 0.7]])
        emb = classical_to_pure(ch)
        assert np.trace(emb.states[0] @ emb.states[1]).real == pytest.approx(1.0, abs=1e-12)

    def test_overlaps_are_bhattacharyya_sums(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            ch = random_classical(rng, 4, 5)
            emb = classical_to_pure(ch)
            phi = np.sqrt(ch.matrix)
            for i in range(4):
                for j in range(4):
                    expected = float(phi[i] @ phi[j])
                    got = np.sqrt(np.trace(emb.states[i] @ emb.states[j]).real)
                    assert abs(got - expected) <= 1e-12


class TestConfusabilityGraph:
    def test_bsc_complete(self, bsc):
        g = confusability_graph(bsc)
        assert g.edges == frozenset({(0, 1)})

    def test_noiseless_empty(self, noiseless_binary):
        g = confusability_graph(noiseless_binary)
        assert g.edges == frozenset()

    def test_typewriter_pentagon(self, pentagon_channel):
        g = confusability_graph(pentagon_channel)
        assert g.edges == cycle_graph(5).edges

    def test_pure_embedding_preserves_graph(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            nx, ny = rng.integers(2, 6), rng.integers(2, 6)
            W = rng.dirichlet(np.ones(ny), size=nx)
            # sprinkle structural zeros
            mask = rng.random((nx, ny)) < 0.4
            W = np.where(mask, 0.0, W)
            keep = W.sum(axis=1) > 0
            if keep.sum() < 2:
                continue
            W = W[keep]
            ch = validate_classical(W / W.sum(axis=1, keepdims=True))
            assert confusability_graph(classical_to_pure(ch)).edges == confusability_graph(ch).edges


class TestProductChannel:
    def test_n1_identity(self):
        rng = np.random.default_rng(13)
        ch = random_pure_cq(rng, 2, 2)
        assert product_channel(ch, 1) is ch

    def test_orthogonal_pairs(self):
        ch = validate_cq([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        prod = product_channel(ch, 2)
        assert prod.input_size == 4 and prod.dim == 4
        for i in range(4):
            for j in range(i + 1, 4):
                assert np.trace(prod.states[i] @ prod.states[j]).real == pytest.approx(0.0, abs=1e-14)

    def test_product_trace_identity(self):
        rng = np.random.default_rng(14)
        ch = random_pure_cq(rng, 3, 2)
        prod = product_channel(ch, 2)
        for _ in range(10):
            a = rng.integers(0, 9)
            b = rng.integers(0, 9)
            lhs = np.trace(prod.states[a] @ prod.states[b]).real
            rhs = 1.0
            for x, y in zip(divmod(a, 3), divmod(b, 3)):
                rhs *= np.trace(ch.states[x] @ ch.states[y]).real
            assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_size_cap(self):
        ch = validate_cq([np.eye(8, dtype=complex)[i:i + 1].T @ np.eye(8, dtype=complex)[i:i + 1] for i in range(2)])
        with pytest.raises(SizeCapError):
            product_channel(ch, 5)

    def test_product_graph_is_strong_product(self, pentagon_channel):
        emb = classical_to_pure(pentagon_channel)
        prod = product_channel(emb, 2)
        got = confusability_graph(prod)
        expected = strong_product(cycle_graph(5), cycle_graph(5))
        assert got.edges == expected.edges


class TestGraphType:
    def test_rejects_self_loop(self):
        with pytest.raises(ValidationError):
            make_graph(3, [(0, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValidationError):
            make_graph(2, [(0, 5)])

    def test_normalizes_edge_order(self):
        g = make_graph(3, [(2, 0)])
        assert g.has_edge(0, 2) and g.has_edge(2, 0)
        assert not g.has_edge(1, 2)
