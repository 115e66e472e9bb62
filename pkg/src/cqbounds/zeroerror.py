"""Confusability-graph combinatorics (strong products, exact independence
numbers), orthonormal and projector representations with their min-max
values, the Lovasz theta function as a certified SDP pair, and the
sub-partition bound check tying zero-error codes to representation values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import matcore, optim
from .channels import ConfusabilityGraph, make_graph
from .errors import (
    ConvergenceError,
    InvariantViolationError,
    SizeCapError,
    ValidationError,
)
from .optim import DEFAULT_CONFIG, LogTraceFamily, SolverConfig, SolverReport

VERTEX_CAP = 64
PRODUCT_VERTEX_CAP = 4096
TENSOR_DIM_CAP = 4096
UNIT_NORM_ATOL = 1e-10
ORTHOGONALITY_ATOL = 1e-8
IDEMPOTENCE_ATOL = 1e-8


# ---------------------------------------------------------------------------
# Graph combinatorics
# ---------------------------------------------------------------------------


def strong_product(g: ConfusabilityGraph, h: ConfusabilityGraph) -> ConfusabilityGraph:
    """Strong graph product: distinct pairs are adjacent iff every coordinate
    pair is equal or adjacent.  Vertex (a, b) gets index a * h.n + b."""
    n = g.n * h.n
    if n > PRODUCT_VERTEX_CAP:
        raise SizeCapError(f"product would have {n} > {PRODUCT_VERTEX_CAP} vertices")
    Ag = g.adjacency_matrix() | np.eye(g.n, dtype=bool)
    Ah = h.adjacency_matrix() | np.eye(h.n, dtype=bool)
    Ap = np.kron(Ag, Ah)
    np.fill_diagonal(Ap, False)
    idx = np.argwhere(np.triu(Ap, 1))
    return ConfusabilityGraph(
        n=n, edges=frozenset((int(i), int(j)) for i, j in idx)
    )


def graph_power(g: ConfusabilityGraph, n: int) -> ConfusabilityGraph:
    """n-fold strong product of a graph with itself."""
    if n < 1:
        raise ValueError(f"power must be >= 1, got {n}")
    if g.n**n > PRODUCT_VERTEX_CAP:
        raise SizeCapError(f"{g.n}^{n} vertices exceeds cap {PRODUCT_VERTEX_CAP}")
    out = g
    for _ in range(n - 1):
        out = strong_product(out, g)
    return out


def _adj_masks(g: ConfusabilityGraph) -> list[int]:
    adj = [0] * g.n
    for i, j in g.edges:
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    return adj


def _clique_cover_bound(cand: int, adj: list[int]) -> int:
    # alpha(G[cand]) is at most the number of cliques in any cover.
    bound = 0
    rest = cand
    while rest:
        v = (rest & -rest).bit_length() - 1
        member = 1 << v
        allowed = rest & adj[v]
        while allowed:
            u = (allowed & -allowed).bit_length() - 1
            member |= 1 << u
            allowed &= adj[u]
        rest &= ~member
        bound += 1
    return bound


def _search_max(cand: int, size: int, adj: list[int], best: list[int]) -> None:
    if cand == 0:
        if size > best[0]:
            best[0] = size
        return
    if size + _clique_cover_bound(cand, adj) <= best[0]:
        return
    v = (cand & -cand).bit_length() - 1
    bit = 1 << v
    _search_max(cand & ~(adj[v] | bit), size + 1, adj, best)
    _search_max(cand & ~bit, size, adj, best)


def _can_reach(cand: int, need: int, adj: list[int]) -> bool:
    if need <= 0:
        return True
    if cand == 0 or _clique_cover_bound(cand, adj) < need:
        return False
    v = (cand & -cand).bit_length() - 1
    bit = 1 << v
    if _can_reach(cand & ~(adj[v] | bit), need - 1, adj):
        return True
    return _can_reach(cand & ~bit, need, adj)


def max_independent_set(g: ConfusabilityGraph) -> tuple[int, tuple[int, ...]]:
    """Exact maximum independent set by branch and bound.

    The bound is a greedy clique cover of the candidate set.  The witness is
    the lexicographically smallest maximum independent set, found by a
    second greedy completion pass, so the result is deterministic.
    """
    if g.n > VERTEX_CAP:
        raise SizeCapError(f"{g.n} vertices exceeds cap {VERTEX_CAP}")
    adj = _adj_masks(g)
    best = [0]
    full = (1 << g.n) - 1
    _search_max(full, 0, adj, best)
    size = best[0]
    witness = []
    cand = full
    remaining = size
    for v in range(g.n):
        bit = 1 << v
        if not cand & bit:
            continue
        if _can_reach(cand & ~(adj[v] | bit), remaining - 1, adj):
            witness.append(v)
            cand &= ~(adj[v] | bit)
            remaining -= 1
            if remaining == 0:
                break
        else:
            cand &= ~bit
    return size, tuple(witness)


def capacity_lower_bound(g: ConfusabilityGraph, n: int) -> float:
    """Rate (1/n) ln alpha(G^n) of the best zero-error code of length n."""
    size, _ = max_independent_set(graph_power(g, n))
    return math.log(size) / n


# ---------------------------------------------------------------------------
# Representations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VectorRepresentation:
    """Unit vectors, one per symbol, orthogonal on every non-confusable pair."""

    graph: ConfusabilityGraph
    vectors: tuple
    handle: np.ndarray | None = None


@dataclass(frozen=True)
class ProjectorRepresentation:
    """Projectors, one per symbol, with zero products on non-confusable pairs."""

    graph: ConfusabilityGraph
    projectors: tuple
    handle: np.ndarray | None = None


def validate_vector_representation(graph, vectors, handle=None) -> VectorRepresentation:
    if len(vectors) != graph.n:
        raise ValidationError(
            f"got {len(vectors)} vectors for a graph on {graph.n} vertices"
        )
    vecs = [np.asarray(v, dtype=complex).reshape(-1) for v in vectors]
    d = vecs[0].shape[0]
    for x, v in enumerate(vecs):
        if v.shape[0] != d:
            raise ValidationError(f"vector {x} has dimension {v.shape[0]}, expected {d}")
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > UNIT_NORM_ATOL:
            raise ValidationError(f"vector {x} has norm {nrm:.12f}, expected 1")
    for i, j in graph.non_edges():
        ov = abs(np.vdot(vecs[i], vecs[j]))
        if ov > ORTHOGONALITY_ATOL:
            raise ValidationError(
                f"vectors {i},{j} overlap by {ov:.3e} but the symbols are not confusable"
            )
    h = None
    if handle is not None:
        h = np.asarray(handle, dtype=complex).reshape(-1)
        if abs(np.linalg.norm(h) - 1.0) > UNIT_NORM_ATOL:
            raise ValidationError("handle must be a unit vector")
    return VectorRepresentation(graph=graph, vectors=tuple(vecs), handle=h)


def validate_projector_representation(graph, projectors, handle=None) -> ProjectorRepresentation:
    if len(projectors) != graph.n:
        raise ValidationError(
            f"got {len(projectors)} projectors for a graph on {graph.n} vertices"
        )
    mats = []
    d = None
    for x, raw in enumerate(projectors):
        U = matcore.require_hermitian(raw, atol=1e-10, name=f"projector {x}")
        if d is None:
            d = U.shape[0]
        elif U.shape[0] != d:
            raise ValidationError(f"projector {x} has dim {U.shape[0]}, expected {d}")
        dev = np.abs(U @ U - U).max()
        if dev > IDEMPOTENCE_ATOL:
            raise ValidationError(f"projector {x} is not idempotent: |U^2 - U| = {dev:.3e}")
        mats.append(U)
    for i, j in graph.non_edges():
        dev = np.abs(mats[i] @ mats[j]).max()
        if dev > ORTHOGONALITY_ATOL:
            raise ValidationError(
                f"projectors {i},{j} have product {dev:.3e} but the symbols are not confusable"
            )
    h = matcore.require_density(handle, name="handle") if handle is not None else None
    return ProjectorRepresentation(graph=graph, projectors=tuple(mats), handle=h)


def projectors_from_vectors(rep: VectorRepresentation) -> ProjectorRepresentation:
    """Rank-one projector representation built from a vector representation."""
    projs = tuple(np.outer(v, v.conj()) for v in rep.vectors)
    h = np.outer(rep.handle, rep.handle.conj()) if rep.handle is not None else None
    return ProjectorRepresentation(graph=rep.graph, projectors=projs, handle=h)


def cycle_graph(n: int) -> ConfusabilityGraph:
    return make_graph(n, [(k, (k + 1) % n) for k in range(n)])


def umbrella_c5() -> VectorRepresentation:
    """The optimal three-dimensional representation of the pentagon.

    Five unit vectors at polar angle arccos(5^(-1/4)) around the z axis,
    spaced by 2 pi / 5; second-neighbor pairs are exactly orthogonal and the
    axis handle sees every vector with squared overlap 1/sqrt(5).
    """
    cos_t = 5.0 ** (-0.25)
    sin_t = math.sqrt(1.0 - cos_t * cos_t)
    vecs = [
        np.array(
            [
                sin_t * math.cos(2.0 * math.pi * k / 5.0),
                sin_t * math.sin(2.0 * math.pi * k / 5.0),
                cos_t,
            ]
        )
        for k in range(5)
    ]
    return VectorRepresentation(
        graph=cycle_graph(5),
        vectors=tuple(v.astype(complex) for v in vecs),
        handle=np.array([0.0, 0.0, 1.0], dtype=complex),
    )


# ---------------------------------------------------------------------------
# Lovasz theta (certified SDP pair)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaCertificate:
    """Log of the theta value plus independently checkable primal/dual matrices."""

    theta_log: float
    primal_matrix: np.ndarray
    dual_matrix: np.ndarray
    duality_gap: float


def theta(g: ConfusabilityGraph, solver: str = "CLARABEL") -> ThetaCertificate:
    """Lovasz theta of a confusability graph as a primal/dual SDP pair.

    Primal: maximize the entry sum of a unit-trace PSD matrix vanishing on
    confusable pairs.  Dual: minimize the top eigenvalue over symmetric
    matrices fixed to 1 on the diagonal and on non-confusable pairs.  Both
    solutions are projected to exact feasibility and re-evaluated here, so
    the certificate does not rely on the solver's own claims.
    """
    import cvxpy as cp

    n = g.n
    if n > VERTEX_CAP:
        raise SizeCapError(f"{n} vertices exceeds cap {VERTEX_CAP}")
    edges = sorted(g.edges)
    non_edges = g.non_edges()

    B = cp.Variable((n, n), symmetric=True)
    cons = [B >> 0, cp.trace(B) == 1]
    cons += [B[i, j] == 0 for i, j in edges]
    primal = cp.Problem(cp.Maximize(cp.sum(B)), cons)
    primal.solve(solver=solver)
    if B.value is None:
        raise ConvergenceError("theta primal SDP failed to solve")

    A = cp.Variable((n, n), symmetric=True)
    cons = [cp.diag(A) == 1]
    cons += [A[i, j] == 1 for i, j in non_edges]
    dual = cp.Problem(cp.Minimize(cp.lambda_max(A)), cons)
    dual.solve(solver=solver)
    if A.value is None:
        raise ConvergenceError("theta dual SDP failed to solve")

    # Project the primal to exact feasibility.
    Bv = 0.5 * (np.asarray(B.value) + np.asarray(B.value).T)
    for i, j in edges:
        Bv[i, j] = Bv[j, i] = 0.0
    Bv = optim.psd_project(Bv).real
    for i, j in edges:
        Bv[i, j] = Bv[j, i] = 0.0
    Bv = optim.psd_project(Bv).real
    Bv /= np.trace(Bv)

    # Rebuild the dual on its exact affine structure.
    Av = np.ones((n, n))
    Araw = 0.5 * (np.asarray(A.value) + np.asarray(A.value).T)
    for i, j in edges:
        Av[i, j] = Av[j, i] = Araw[i, j]

    primal_value = float(Bv.sum())
    dual_value = float(np.linalg.eigvalsh(Av)[-1])
    gap = max(dual_value - primal_value, 0.0)
    return ThetaCertificate(
        theta_log=float(math.log(primal_value)),
        primal_matrix=Bv,
        dual_matrix=Av,
        duality_gap=gap,
    )


def verify_theta_certificate(cert: ThetaCertificate, g: ConfusabilityGraph,
                             tol: float = 1e-6) -> None:
    """Re-check a theta certificate from its stored matrices alone."""
    B, A = cert.primal_matrix, cert.dual_matrix
    if abs(np.trace(B) - 1.0) > 1e-8:
        raise InvariantViolationError("primal matrix trace is not 1")
    if np.linalg.eigvalsh(0.5 * (B + B.T))[0] < -1e-8:
        raise InvariantViolationError("primal matrix is not PSD")
    for i, j in g.edges:
        if abs(B[i, j]) > 1e-8:
            raise InvariantViolationError(f"primal matrix nonzero on edge ({i},{j})")
    if np.abs(np.diag(A) - 1.0).max() > 1e-8:
        raise InvariantViolationError("dual matrix diagonal is not all ones")
    for i, j in g.non_edges():
        if abs(A[i, j] - 1.0) > 1e-8:
            raise InvariantViolationError(f"dual matrix entry ({i},{j}) is not 1")
    primal_value = float(B.sum())
    dual_value = float(np.linalg.eigvalsh(0.5 * (A + A.T))[-1])
    scale = max(1.0, math.exp(cert.theta_log))
    if dual_value - primal_value > tol * scale:
        raise InvariantViolationError(
            f"certificate gap {dual_value - primal_value:.3e} exceeds tolerance"
        )
    if abs(math.log(primal_value) - cert.theta_log) > tol:
        raise InvariantViolationError("stored theta_log does not match the primal matrix")


# ---------------------------------------------------------------------------
# Representation values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ValueSPResult:
    value: float
    handle: np.ndarray
    gap: float
    report: SolverReport | None = None


def value_sp(rep: ProjectorRepresentation, cfg: SolverConfig = DEFAULT_CONFIG) -> ValueSPResult:
    """min over density operators F of max_x ln(1 / Tr(U_x F)).

    Same certified center solve as the information-radius machinery with
    support-projector payoffs; the optimal F is the representation's handle.
    """
    kernels = np.array(rep.projectors)
    fam = LogTraceFamily(kernels, power=1.0, scale=-1.0)
    F, report = optim.minimize_convex_density(None, None, fam.dim, cfg, family=fam)
    return ValueSPResult(value=report.value, handle=F, gap=report.gap, report=report)


@dataclass(frozen=True)
class LovaszValue:
    value: float
    handle: np.ndarray
    relaxed_value: float
    relaxed_gap: float
    report: SolverReport | None = None


def _polish_rank_one(vectors, c0: np.ndarray):
    """Locally maximize min_x |<u_x|c>|^2 over unit vectors c from start c0."""
    from scipy.optimize import minimize

    U = np.array(vectors)
    complex_case = bool(np.abs(U.imag).max() > 1e-14) or bool(np.abs(c0.imag).max() > 1e-14)
    d = U.shape[1]
    if complex_case:
        a = np.hstack([U.real, U.imag])
        b = np.hstack([-U.imag, U.real])
        z0 = np.hstack([c0.real, c0.imag])
    else:
        a = U.real
        b = None
        z0 = c0.real
    z0 = z0 / np.linalg.norm(z0)
    m0 = float(((a @ z0) ** 2 + ((b @ z0) ** 2 if b is not None else 0.0)).min())
    nvar = z0.shape[0]

    def overlaps(z):
        s = (a @ z) ** 2
        if b is not None:
            s = s + (b @ z) ** 2
        return s

    def neg_m(v):
        return -v[nvar]

    def neg_m_jac(v):
        j = np.zeros(nvar + 1)
        j[nvar] = -1.0
        return j

    def cons_f(v):
        return overlaps(v[:nvar]) - v[nvar]

    def cons_jac(v):
        z = v[:nvar]
        J = 2.0 * (a @ z)[:, None] * a
        if b is not None:
            J = J + 2.0 * (b @ z)[:, None] * b
        return np.hstack([J, -np.ones((J.shape[0], 1))])

    def norm_f(v):
        return v[:nvar] @ v[:nvar] - 1.0

    def norm_jac(v):
        j = np.concatenate([2.0 * v[:nvar], [0.0]])
        return j

    res = minimize(
        neg_m,
        np.concatenate([z0, [m0]]),
        jac=neg_m_jac,
        method="SLSQP",
        constraints=[
            {"type": "ineq", "fun": cons_f, "jac": cons_jac},
            {"type": "eq", "fun": norm_f, "jac": norm_jac},
        ],
        options={"ftol": 1e-14, "maxiter": 400},
    )
    z = res.x[:nvar]
    nrm = np.linalg.norm(z)
    if nrm <= 0 or not np.all(np.isfinite(z)):
        z, m = z0, m0
    else:
        z = z / nrm
        m = float(overlaps(z).min())
    if m < m0:
        z, m = z0, m0
    if complex_case:
        c = z[:d] + 1j * z[d:]
    else:
        c = z.astype(complex)
    return c, m


def lovasz_value(rep: VectorRepresentation, cfg: SolverConfig = DEFAULT_CONFIG) -> LovaszValue:
    """Value of a vector representation: min over unit handles c of
    max_x ln(1 / |<u_x|c>|^2).

    Solved by relaxing the handle to a density operator (the projector-value
    problem on the rank-one projectors), extracting the top eigenvector of
    the optimal relaxed center, and polishing it by local ascent on the unit
    sphere.  The returned value belongs to the best rank-one handle found and
    upper-bounds the true minimum; the relaxed value is reported alongside so
    a rank gap is detectable.
    """
    relaxed = value_sp(projectors_from_vectors(rep), cfg)
    w, V = np.linalg.eigh(relaxed.handle)
    candidates = [V[:, -1]]
    if rep.handle is not None:
        candidates.append(np.asarray(rep.handle, dtype=complex))
    best_c, best_m = None, -1.0
    for c0 in candidates:
        c, m = _polish_rank_one(rep.vectors, c0)
        if m > best_m:
            best_c, best_m = c, m
    value = float("inf") if best_m <= 0 else float(-math.log(best_m))
    return LovaszValue(
        value=value,
        handle=best_c,
        relaxed_value=relaxed.value,
        relaxed_gap=relaxed.gap,
        report=relaxed.report,
    )


# ---------------------------------------------------------------------------
# Theorem-level certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CapacityBoundReport:
    """Zero-error capacity sandwich: code rate <= projector value <= theta."""

    lower: float
    lower_blocklength: int
    theta_log: float
    theta_sp_log: float

    def validate(self, tol: float = 1e-6) -> None:
        if self.lower > self.theta_sp_log + tol:
            raise InvariantViolationError(
                f"code rate {self.lower:.8f} exceeds projector value {self.theta_sp_log:.8f}"
            )
        if self.theta_sp_log > self.theta_log + 2 * tol:
            raise InvariantViolationError(
                f"projector value {self.theta_sp_log:.8f} exceeds theta {self.theta_log:.8f}"
            )


def certify_theorem3(
    g: ConfusabilityGraph,
    reps,
    n: int,
    cfg: SolverConfig = DEFAULT_CONFIG,
    ordering_tol: float = 1e-4,
) -> CapacityBoundReport:
    """Certify the capacity sandwich on one graph.

    Computes the blocklength-n zero-error code rate, theta, and the minimum
    projector-representation value over the supplied representations, then
    checks the ordering (code rate <= min value, min value >= theta up to
    tolerance; the minimum of theta and the representation values is
    reported as the projector-relaxation bound).
    """
    lower = capacity_lower_bound(g, n)
    cert = theta(g)
    values = []
    for rep in reps:
        if rep.graph.n != g.n or rep.graph.edges != g.edges:
            raise ValidationError("representation graph does not match the input graph")
        values.append(value_sp(rep, cfg).value)
    min_value = min(values) if values else cert.theta_log
    if lower > min_value + ordering_tol:
        raise InvariantViolationError(
            f"code rate {lower:.8f} exceeds representation value {min_value:.8f}"
        )
    if values and min_value < cert.theta_log - ordering_tol:
        raise InvariantViolationError(
            f"representation value {min_value:.8f} is below theta {cert.theta_log:.8f}"
        )
    return CapacityBoundReport(
        lower=lower,
        lower_blocklength=n,
        theta_log=cert.theta_log,
        theta_sp_log=min(min_value, cert.theta_log),
    )


def _sequences_confusable(a, b, g: ConfusabilityGraph) -> bool:
    if tuple(a) == tuple(b):
        return False
    return all(x == y or g.has_edge(x, y) for x, y in zip(a, b))


def subpartition_check(
    rep: ProjectorRepresentation,
    code,
    n: int,
    cfg: SolverConfig = DEFAULT_CONFIG,
) -> tuple[float, float]:
    """Check the sub-partition bound on a zero-error code.

    Builds the tensor-product projectors of the codewords and the n-fold
    tensor power of the representation handle, and returns

        lhs   = sum_m Tr(U_{x_m} F^(x) n)      (must be <= 1)
        bound = M * exp(-n * value)

    where value is the representation's certified min-max value.  Since each
    codeword's trace is at least exp(-value) per coordinate, bound <= lhs,
    and lhs <= 1 because orthogonal projectors sum below the identity.
    """
    code = [tuple(int(x) for x in word) for word in code]
    if not code:
        raise ValidationError("code must contain at least one codeword")
    for word in code:
        if len(word) != n:
            raise ValidationError(f"codeword {word} does not have length {n}")
        for x in word:
            if not 0 <= x < rep.graph.n:
                raise ValidationError(f"symbol {x} out of range")
    for i in range(len(code)):
        for j in range(i + 1, len(code)):
            if _sequences_confusable(code[i], code[j], rep.graph):
                raise ValidationError(
                    f"codewords {code[i]} and {code[j]} are confusable"
                )
    dim = rep.projectors[0].shape[0]
    if dim**n > TENSOR_DIM_CAP:
        raise SizeCapError(f"tensor dimension {dim}^{n} exceeds cap {TENSOR_DIM_CAP}")

    solved = value_sp(rep, cfg)
    handle = rep.handle if rep.handle is not None else solved.handle
    Fn = handle
    for _ in range(n - 1):
        Fn = np.kron(Fn, handle)
    lhs = 0.0
    for word in code:
        U = rep.projectors[word[0]]
        for x in word[1:]:
            U = np.kron(U, rep.projectors[x])
        lhs += float(np.trace(U @ Fn).real)
    if lhs > 1.0 + 1e-8:
        raise InvariantViolationError(
            f"sub-partition sum {lhs:.10f} exceeds 1; code or representation is invalid"
        )
    bound = len(code) * math.exp(-n * solved.value)
    return lhs, bound
