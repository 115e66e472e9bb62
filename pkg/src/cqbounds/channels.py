"""Channel data model: classical and classical-quantum channels, input/output
distributions, confusability graphs, and small tensor-power products.

Channels are immutable once validated; all constructors go through the
validate_* helpers so downstream code can trust the invariants.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import matcore
from .errors import SizeCapError, ValidationError

ROW_SUM_ATOL = 1e-10
DIST_SUM_ATOL = 1e-10
# Tr(S_x S_x') above this counts as confusable; keeps eigen-noise from
# creating spurious zero-error pairs.
CONFUSABILITY_TRACE_TOL = 1e-10
# Hard caps for tensor powers (desk-scale certification only).
PRODUCT_DIM_CAP = 4096
PRODUCT_ENTRY_CAP = 4_194_304


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ProbabilityDistribution:
    """Point on the probability simplex."""

    p: np.ndarray

    @property
    def size(self) -> int:
        return self.p.shape[0]


@dataclass(frozen=True)
class ClassicalChannel:
    """Discrete memoryless channel given by a row-stochastic matrix W[x, y]."""

    matrix: np.ndarray
    labels: tuple[str, ...] | None = None

    @property
    def input_size(self) -> int:
        return self.matrix.shape[0]

    @property
    def output_size(self) -> int:
        return self.matrix.shape[1]


@dataclass(frozen=True)
class CQChannel:
    """Classical-quantum channel: one density operator per input symbol."""

    states: tuple[np.ndarray, ...]
    labels: tuple[str, ...] | None = None

    @property
    def input_size(self) -> int:
        return len(self.states)

    @property
    def dim(self) -> int:
        return self.states[0].shape[0]


@dataclass(frozen=True)
class ConfusabilityGraph:
    """Undirected graph on input symbols; an edge marks a confusable pair."""

    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for i, j in self.edges:
            if i == j:
                raise ValidationError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValidationError(f"edge ({i},{j}) out of range for n={self.n}")
            if i > j:
                raise ValidationError("edges must be stored as (i, j) with i < j")

    def has_edge(self, i: int, j: int) -> bool:
        if i == j:
            return False
        return (min(i, j), max(i, j)) in self.edges

    def non_edges(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i in range(self.n)
            for j in range(i + 1, self.n)
            if (i, j) not in self.edges
        ]

    def adjacency_matrix(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=bool)
        for i, j in self.edges:
            A[i, j] = A[j, i] = True
        return A


def make_graph(n: int, edges) -> ConfusabilityGraph:
    """Build a graph from any iterable of vertex pairs (normalizing order)."""
    if n <= 0:
        raise ValidationError(f"vertex count must be positive, got {n}")
    norm = set()
    for i, j in edges:
        i, j = int(i), int(j)
        if i == j:
            raise ValidationError(f"self-loop at vertex {i}")
        norm.add((min(i, j), max(i, j)))
    return ConfusabilityGraph(n=n, edges=frozenset(norm))


def validate_distribution(p) -> ProbabilityDistribution:
    """Validate a vector as a point on the simplex."""
    v = np.asarray(p, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValidationError(f"distribution must be a nonempty vector, got shape {v.shape}")
    if v.min() < 0:
        raise ValidationError(f"negative probability {v.min():.3e} at index {int(v.argmin())}")
    s = v.sum()
    if abs(s - 1.0) > DIST_SUM_ATOL:
        raise ValidationError(f"probabilities sum to {s:.12f}, expected 1")
    return ProbabilityDistribution(p=_readonly(v.copy()))


def uniform_distribution(n: int) -> ProbabilityDistribution:
    return ProbabilityDistribution(p=_readonly(np.full(n, 1.0 / n)))


def validate_classical(rows, labels=None) -> ClassicalChannel:
    """Validate a row-stochastic matrix as a classical channel."""
    W = np.asarray(rows, dtype=float)
    if W.ndim != 2 or W.shape[0] == 0 or W.shape[1] == 0:
        raise ValidationError(f"transition matrix must be 2-D and nonempty, got shape {W.shape}")
    for x in range(W.shape[0]):
        row = W[x]
        if row.min() < 0 or row.max() > 1 + ROW_SUM_ATOL:
            raise ValidationError(f"row {x} has entries outside [0, 1]")
        s = row.sum()
        if abs(s - 1.0) > ROW_SUM_ATOL:
            raise ValidationError(f"row {x} sums to {s:.10g}")
    return ClassicalChannel(
        matrix=_readonly(W.copy()),
        labels=tuple(labels) if labels is not None else None,
    )


def validate_cq(mats, labels=None) -> CQChannel:
    """Validate a list of complex matrices as density operators of equal dim."""
    if len(mats) == 0:
        raise ValidationError("channel needs at least one state")
    states = []
    dim = None
    for x, raw in enumerate(mats):
        try:
            S = matcore.require_density(raw, name=f"state {x}")
        except ValidationError as exc:
            raise ValidationError(f"state {x}: {exc}") from exc
        if dim is None:
            dim = S.shape[0]
        elif S.shape[0] != dim:
            raise ValidationError(
                f"state {x} has dim {S.shape[0]}, expected {dim}"
            )
        states.append(_readonly(S))
    return CQChannel(
        states=tuple(states),
        labels=tuple(labels) if labels is not None else None,
    )


def classical_to_pure(ch: ClassicalChannel) -> CQChannel:
    """Embed a classical channel as a pure-state cq channel.

    Symbol x maps to the rank-one state built from the unit vector with
    components sqrt(W[x, y]); pairwise state overlaps are then squared
    Bhattacharyya coefficients, so confusability is preserved exactly.
    """
    phi = np.sqrt(ch.matrix)
    states = [_readonly(np.outer(v, v).astype(complex)) for v in phi]
    return CQChannel(states=tuple(states), labels=ch.labels)


def confusability_graph(ch) -> ConfusabilityGraph:
    """Graph with an edge wherever two input symbols can be confused."""
    if isinstance(ch, ClassicalChannel):
        W = ch.matrix
        n = ch.input_size
        overlap = W @ W.T
        edges = {
            (i, j)
            for i in range(n)
            for j in range(i + 1, n)
            if overlap[i, j] > 0
        }
        return ConfusabilityGraph(n=n, edges=frozenset(edges))
    if isinstance(ch, CQChannel):
        n = ch.input_size
        edges = set()
        for i in range(n):
            for j in range(i + 1, n):
                t = np.trace(ch.states[i] @ ch.states[j]).real
                if t > CONFUSABILITY_TRACE_TOL:
                    edges.add((i, j))
        return ConfusabilityGraph(n=n, edges=frozenset(edges))
    raise TypeError(f"expected a channel, got {type(ch).__name__}")


def product_channel(ch: CQChannel, n: int) -> CQChannel:
    """n-fold tensor power channel over sequences of input symbols.

    States are ordered lexicographically over input sequences, matching the
    vertex numbering of iterated strong products.
    """
    if n < 1:
        raise ValueError(f"blocklength must be >= 1, got {n}")
    if not isinstance(ch, CQChannel):
        raise TypeError("product_channel expects a CQChannel")
    if n == 1:
        return ch
    dim_out = ch.dim**n
    if dim_out > PRODUCT_DIM_CAP:
        raise SizeCapError(f"tensor dimension {ch.dim}^{n} exceeds cap {PRODUCT_DIM_CAP}")
    n_states = ch.input_size**n
    if n_states * dim_out * dim_out > PRODUCT_ENTRY_CAP:
        raise SizeCapError(
            f"product channel would hold {n_states} states of dim {dim_out}; too large"
        )
    states = []
    for seq in itertools.product(range(ch.input_size), repeat=n):
        S = ch.states[seq[0]]
        for x in seq[1:]:
            S = np.kron(S, ch.states[x])
        states.append(_readonly(matcore.hermitize(S)))
    return CQChannel(states=tuple(states))
