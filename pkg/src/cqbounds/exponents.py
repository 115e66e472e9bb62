"""Gallager exponent functions, sphere-packing exponent, capacities, the
zero-error feedback bound, and min-max information radii for classical and
classical-quantum channels.

All rates and exponents are in nats.  +inf is a first-class value for
diverging sphere-packing exponents and radii.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import matcore, optim
from .channels import (
    CQChannel,
    ClassicalChannel,
    ProbabilityDistribution,
    _readonly,
    uniform_distribution,
    validate_distribution,
)
from .errors import ConvergenceError, ValidationError
from .optim import DEFAULT_CONFIG, LogTraceFamily, SolverConfig, SolverReport


@dataclass(frozen=True)
class ExponentPoint:
    """Value of E0 at one rho together with the maximizing input distribution."""

    rho: float
    e0: float
    optimal_input: ProbabilityDistribution
    report: SolverReport | None = None


@dataclass(frozen=True)
class RadiusResult:
    """Certified min-max radius: value, optimal center, and duality gap.

    ``alpha`` covers [0, 1]: the open interval is the Renyi family, 1 marks
    the Kullback-Leibler endpoint (capacity) and 0 the support-projector
    endpoint (R_infinity).  ``value`` is the certified lower bound from the
    dual weights; ``gap`` is the width of the enclosure, i.e. the payoff of
    the returned center minus ``value``.
    """

    alpha: float
    value: float
    center: object
    gap: float
    report: SolverReport | None = None


@dataclass(frozen=True)
class SpherePackingCurve:
    """Sampled (rate, exponent) pairs plus the divergence-threshold estimate."""

    points: tuple
    r_inf_estimate: float

    def validate(self, convexity_tol: float = 1e-6) -> None:
        rates = [r for r, _ in self.points]
        if any(b < a for a, b in zip(rates, rates[1:])):
            raise ValidationError("curve rates must be nondecreasing")
        vals = [v for _, v in self.points]
        for a, b in zip(vals, vals[1:]):
            if b > a + 1e-9:
                raise ValidationError("sphere-packing exponent must be nonincreasing")
        finite = [(r, v) for r, v in self.points if math.isfinite(v)]
        for r, v in self.points:
            if math.isinf(v) and r >= self.r_inf_estimate:
                raise ValidationError("infinite exponent above the divergence threshold")
        for (r0, v0), (r1, v1), (r2, v2) in zip(finite, finite[1:], finite[2:]):
            if r2 - r0 <= 0:
                continue
            lam = (r1 - r0) / (r2 - r0)
            chord = (1 - lam) * v0 + lam * v2
            if v1 > chord + convexity_tol:
                raise ValidationError("finite exponents must form a convex sequence")


# ---------------------------------------------------------------------------
# Gallager E0
# ---------------------------------------------------------------------------


def _check_input_dist(ch, P) -> np.ndarray:
    p = P.p if isinstance(P, ProbabilityDistribution) else validate_distribution(P).p
    if p.shape[0] != ch.input_size:
        raise ValidationError(
            f"input distribution has size {p.shape[0]}, channel has {ch.input_size} inputs"
        )
    return p


def _e0_classical_batch(Wa: np.ndarray, P: np.ndarray, rho: float) -> np.ndarray:
    g = P @ Wa
    with np.errstate(divide="ignore"):
        ln = np.where(g > 0, np.log(np.where(g > 0, g, 1.0)), -np.inf)
    m = ((1.0 + rho) * ln).max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp((1.0 + rho) * ln - m).sum(axis=1))
    return -lse


def _e0_classical_grad(Wa: np.ndarray, P: np.ndarray, rho: float) -> np.ndarray:
    g = P @ Wa
    with np.errstate(divide="ignore"):
        ln = np.where(g > 0, np.log(np.where(g > 0, g, 1.0)), -np.inf)
    m = ((1.0 + rho) * ln).max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp((1.0 + rho) * ln - m).sum(axis=1))
    wts = np.exp(rho * ln - lse[:, None])  # g^rho / sum g^(1+rho), zero where g = 0
    return -(1.0 + rho) * wts @ Wa.T


def e0_classical(ch: ClassicalChannel, P, rho: float) -> float:
    """Gallager function -ln sum_y (sum_x P(x) W(y|x)^(1/(1+rho)))^(1+rho)."""
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    p = _check_input_dist(ch, P)
    if rho == 0:
        return 0.0
    Wa = ch.matrix ** (1.0 / (1.0 + rho))
    return float(_e0_classical_batch(Wa, p[None, :], rho)[0])


def _e0_quantum_batch(Ka: np.ndarray, P: np.ndarray, rho: float) -> np.ndarray:
    A = np.einsum("kx,xij->kij", P, Ka)
    lam = np.clip(np.linalg.eigvalsh(A), 0.0, None)
    with np.errstate(divide="ignore"):
        ln = np.where(lam > 0, np.log(np.where(lam > 0, lam, 1.0)), -np.inf)
    m = ((1.0 + rho) * ln).max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp((1.0 + rho) * ln - m).sum(axis=1))
    return -lse


def _e0_quantum_grad(Ka: np.ndarray, P: np.ndarray, rho: float) -> np.ndarray:
    A = np.einsum("kx,xij->kij", P, Ka)
    w, V = np.linalg.eigh(A)
    lam = np.clip(w, 0.0, None)
    with np.errstate(divide="ignore"):
        ln = np.where(lam > 0, np.log(np.where(lam > 0, lam, 1.0)), -np.inf)
    m = ((1.0 + rho) * ln).max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp((1.0 + rho) * ln - m).sum(axis=1))
    wts = np.exp(rho * ln - lse[:, None])
    diag = np.einsum("xij,kjl,kil->kxl", Ka, V, V.conj()).real
    return -(1.0 + rho) * np.einsum("kxl,kl->kx", diag, wts)


def e0_quantum(ch: CQChannel, P, rho: float) -> float:
    """Gallager function -ln Tr (sum_x P(x) S_x^(1/(1+rho)))^(1+rho)."""
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    p = _check_input_dist(ch, P)
    if rho == 0:
        return 0.0
    a = 1.0 / (1.0 + rho)
    Ka = np.array([matcore.mat_pow(S, a) for S in ch.states])
    return float(_e0_quantum_batch(Ka, p[None, :], rho)[0])


def e0_max(ch, rho: float, cfg: SolverConfig = DEFAULT_CONFIG) -> ExponentPoint:
    """Maximize E0(rho, .) over input distributions.

    Runs multiplicative-weights ascent from the uniform start plus seeded
    random restarts; the certificate tolerance is scaled by (1 + rho) since
    E0 itself scales that way.  Raises ConvergenceError (carrying the best
    iterate) if the certificate cannot be closed.
    """
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    n = ch.input_size
    if rho == 0 or n == 1:
        point = ExponentPoint(
            rho=rho,
            e0=0.0 if rho == 0 else e0_of(ch, uniform_distribution(n), rho),
            optimal_input=uniform_distribution(n),
            report=SolverReport(value=0.0, iterations=0, gap=0.0, converged=True),
        )
        return point
    a = 1.0 / (1.0 + rho)
    if isinstance(ch, ClassicalChannel):
        Wa = ch.matrix**a
        objective = lambda P: _e0_classical_batch(Wa, P, rho)
        gradient = lambda P: _e0_classical_grad(Wa, P, rho)
    elif isinstance(ch, CQChannel):
        Ka = np.array([matcore.mat_pow(S, a) for S in ch.states])
        objective = lambda P: _e0_quantum_batch(Ka, P, rho)
        gradient = lambda P: _e0_quantum_grad(Ka, P, rho)
    else:
        raise TypeError(f"expected a channel, got {type(ch).__name__}")

    inner = replace(cfg, tolerance=cfg.tolerance * (1.0 + rho))
    dist, report = optim.maximize_concave_simplex(objective, gradient, n, inner)
    point = ExponentPoint(rho=rho, e0=report.value, optimal_input=dist, report=report)
    if not report.converged:
        raise ConvergenceError(
            f"E0 maximization did not certify tolerance at rho={rho}: gap={report.gap:.3e}",
            best=point,
            report=report,
        )
    return point


def e0_of(ch, P, rho: float) -> float:
    """Dispatch E0(rho, P) on the channel type."""
    if isinstance(ch, ClassicalChannel):
        return e0_classical(ch, P, rho)
    if isinstance(ch, CQChannel):
        return e0_quantum(ch, P, rho)
    raise TypeError(f"expected a channel, got {type(ch).__name__}")


def r_rho_primal(ch, rho: float, cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """The rate E0(rho)/rho at which the slope-rho supporting line hits the axis."""
    if rho <= 0:
        raise ValueError(f"rho must be > 0, got {rho}")
    return e0_max(ch, rho, cfg).e0 / rho


# ---------------------------------------------------------------------------
# Sphere-packing exponent
# ---------------------------------------------------------------------------


class _E0Evaluator:
    """Memoizing E0(rho) evaluator; falls back to the best iterate when the
    certificate at some grid rho cannot be closed."""

    def __init__(self, ch, cfg: SolverConfig):
        self.ch = ch
        self.cfg = cfg
        self.cache: dict[float, float] = {}

    def __call__(self, rho: float) -> float:
        if rho not in self.cache:
            if rho == 0.0:
                self.cache[rho] = 0.0
            else:
                try:
                    self.cache[rho] = e0_max(self.ch, rho, self.cfg).e0
                except ConvergenceError as exc:
                    self.cache[rho] = exc.best.e0
        return self.cache[rho]


ESP_CONFIG = SolverConfig(tolerance=1e-7, max_iterations=3000)


def esp(ch, rate: float, rho_max: float = 1e4, cfg: SolverConfig = ESP_CONFIG) -> float:
    """Sphere-packing exponent sup_rho [E0(rho) - rho * rate] at one rate.

    Returns +inf when the objective still increases at rho_max and the rate
    lies below the E0(rho_max)/rho_max divergence-threshold estimate.
    """
    ev = _E0Evaluator(ch, cfg)
    return optim.sup_over_rho(ev, rate, rho_max, cfg)


def esp_curve(ch, rates, rho_max: float = 1e4, cfg: SolverConfig = ESP_CONFIG) -> SpherePackingCurve:
    """Evaluate the sphere-packing exponent over a rate grid.

    All rates share one set of E0 evaluations: after the per-rate searches,
    every finite point is recomputed as the max over the full evaluation set,
    which makes the returned curve exactly convex and nonincreasing in rate.
    """
    rates = [float(r) for r in rates]
    if any(r < 0 for r in rates):
        raise ValueError("rates must be >= 0")
    ev = _E0Evaluator(ch, cfg)
    raw = [optim.sup_over_rho(ev, r, rho_max, cfg) for r in rates]
    rho_grid = sorted(ev.cache)
    e0_grid = np.array([ev.cache[r] for r in rho_grid])
    rho_arr = np.array(rho_grid)
    points = []
    for r, v in zip(rates, raw):
        if math.isinf(v):
            points.append((r, float("inf")))
        else:
            points.append((r, float(np.max(e0_grid - rho_arr * r))))
    threshold = ev(rho_max) / rho_max
    return SpherePackingCurve(points=tuple(points), r_inf_estimate=float(threshold))


# ---------------------------------------------------------------------------
# Information radii (Renyi center problems)
# ---------------------------------------------------------------------------


def _radius_family(ch, alpha: float) -> LogTraceFamily:
    if isinstance(ch, ClassicalChannel):
        kernels = np.array(
            [np.diag((row**alpha).astype(complex)) for row in ch.matrix]
        )
        dim = ch.output_size
    elif isinstance(ch, CQChannel):
        kernels = np.array([matcore.mat_pow(S, alpha) for S in ch.states])
        dim = ch.dim
    else:
        raise TypeError(f"expected a channel, got {type(ch).__name__}")
    del dim
    return LogTraceFamily(kernels, power=1.0 - alpha, scale=1.0 / (alpha - 1.0))


def _center_for(ch, F: np.ndarray):
    if isinstance(ch, ClassicalChannel):
        q = np.clip(np.diag(F).real, 0.0, None)
        q /= q.sum()
        return ProbabilityDistribution(p=_readonly(q))
    return F


def radius_solve(ch, alpha: float, cfg: SolverConfig = DEFAULT_CONFIG) -> RadiusResult:
    """Smallest worst-case Renyi divergence from the channel states to a center.

    Solves min over centers (output distributions for classical channels,
    density operators for cq channels) of max_x D_alpha(S_x || center),
    certified by the duality gap between the returned center's payoff and
    the dual weights' closed-form bound.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly in (0, 1), got {alpha}")
    fam = _radius_family(ch, alpha)
    F, report = optim.minimize_convex_density(None, None, fam.dim, cfg, family=fam)
    result = RadiusResult(
        alpha=alpha,
        value=report.value,
        center=_center_for(ch, F),
        gap=report.gap,
        report=report,
    )
    if not report.converged:
        raise ConvergenceError(
            f"radius solve did not certify tolerance at alpha={alpha}: gap={report.gap:.3e}",
            best=result,
            report=report,
        )
    return result


def handle_from_input_dist(ch: CQChannel, alpha: float, P) -> np.ndarray:
    """Recover the optimal center from an input distribution.

    Returns the normalized (1/alpha) matrix power of the S_x^alpha mixture,
    the exponent for which the trace-Holder equality condition holds; at the
    maximizing input distribution this center equalizes the divergences and
    closes the saddle gap.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly in (0, 1), got {alpha}")
    if not isinstance(ch, CQChannel):
        raise TypeError("handle recovery expects a CQChannel")
    p = _check_input_dist(ch, P)
    A = np.tensordot(p, np.array([matcore.mat_pow(S, alpha) for S in ch.states]), axes=1)
    tr = A.trace().real
    if tr <= 1e-300:
        raise ValidationError("mixture of state powers is numerically zero")
    F = matcore.mat_pow(matcore.hermitize(A), 1.0 / alpha)
    return F / F.trace().real


# ---------------------------------------------------------------------------
# Capacity
# ---------------------------------------------------------------------------


def capacity_classical(ch: ClassicalChannel, tol: float = 1e-11, max_iter: int = 200_000) -> float:
    """Channel capacity by alternating maximization (fixed-point iteration).

    Independent of the min-max route: iterates the classic multiplicative
    update on the input distribution, with the certified sandwich
    I(P) <= C <= max_x D(W_x || Q_P) as the stopping rule.
    """
    W = ch.matrix
    nx = ch.input_size
    p = np.full(nx, 1.0 / nx)
    value = 0.0
    for _ in range(max_iter):
        q = p @ W
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(W > 0, W / np.where(q > 0, q, 1.0), 1.0)
            d = np.sum(np.where(W > 0, W * np.log(ratio), 0.0), axis=1)
        lower = float(p @ d)
        upper = float(d.max())
        value = lower
        if upper - lower <= tol:
            break
        p = p * np.exp(d - d.max())
        p /= p.sum()
    return value


class _KLCenterFamily:
    """Center-solver protocol for Kullback-Leibler payoffs over the output
    simplex (represented as diagonal density operators).

    The dual bound at input weights P is the mutual information I(P), since
    the P-weighted divergence is minimized by the output mixture.
    """

    linear = False

    def __init__(self, W: np.ndarray):
        self.W = W
        self.size, self.dim = W.shape
        with np.errstate(divide="ignore"):
            self.lnW = np.where(W > 0, np.log(np.where(W > 0, W, 1.0)), 0.0)
        self.row_ent = np.sum(np.where(W > 0, W * self.lnW, 0.0), axis=1)

    def _payoffs_q(self, q: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore"):
            lnq = np.where(q > 0, np.log(np.where(q > 0, q, 1.0)), -np.inf)
        cross = np.where(self.W > 0, self.W * lnq[None, :], 0.0).sum(axis=1)
        return self.row_ent - cross

    def _payoffs_q_batch(self, Q: np.ndarray) -> np.ndarray:
        # rows of Q are strictly positive for interior weights; the floor only
        # turns a vanishing output mass into a large finite penalty
        lnq = np.log(np.clip(Q, 1e-300, None))
        return self.row_ent[None, :] - lnq @ self.W.T

    def traces(self, V: np.ndarray, f: np.ndarray) -> np.ndarray:
        q = np.clip(np.einsum("jk,k,jk->j", V, f, V.conj()).real, 0.0, None)
        d = self._payoffs_q(q / max(q.sum(), 1e-300))
        return np.exp(-np.minimum(d, 700.0))

    def payoffs_from_traces(self, tr: np.ndarray) -> np.ndarray:
        return -np.log(np.clip(tr, 1e-300, None))

    def max_payoff(self, F: np.ndarray) -> float:
        q = np.clip(np.diag(F).real, 0.0, None)
        s = q.sum()
        if s <= 0:
            return float("inf")
        return float(self._payoffs_q(q / s).max())

    def best_response(self, P: np.ndarray) -> np.ndarray:
        return np.diag((P @ self.W).astype(complex))

    def dual_bound(self, P: np.ndarray) -> float:
        return float(P @ self._payoffs_q(P @ self.W))

    def dual_bound_batch(self, P: np.ndarray) -> np.ndarray:
        D = self._payoffs_q_batch(P @ self.W)
        return np.einsum("kx,kx->k", P, D)

    def dual_grad_batch(self, P: np.ndarray) -> np.ndarray:
        # gradient of mutual information up to an additive constant, which
        # cancels in both the certificate and the multiplicative update
        return self._payoffs_q_batch(P @ self.W)

    def ascent_grad(self, V: np.ndarray, f: np.ndarray, P: np.ndarray) -> np.ndarray:
        q = np.clip(np.einsum("jk,k,jk->j", V, f, V.conj()).real, 1e-12, None)
        mix = P @ self.W
        return np.diag((mix / q).astype(complex))


def capacity_minmax(ch: ClassicalChannel, cfg: SolverConfig = DEFAULT_CONFIG) -> RadiusResult:
    """Capacity as the min over output distributions of the worst-case KL
    divergence from the channel rows, with a certified duality gap."""
    fam = _KLCenterFamily(ch.matrix)
    F, report = optim.minimize_convex_density(None, None, fam.dim, cfg, family=fam)
    result = RadiusResult(
        alpha=1.0,
        value=report.value,
        center=_center_for(ch, F),
        gap=report.gap,
        report=report,
    )
    if not report.converged:
        raise ConvergenceError(
            f"capacity min-max did not certify tolerance: gap={report.gap:.3e}",
            best=result,
            report=report,
        )
    return result


# ---------------------------------------------------------------------------
# Zero-error feedback bound and the divergence threshold R_infinity
# ---------------------------------------------------------------------------


def _support_minimax_lp(M: np.ndarray):
    """min over simplex P of max_y (M @ P)_y for a 0/1 matrix M; exact LP."""
    from scipy.optimize import linprog

    ny, nx = M.shape
    c = np.zeros(nx + 1)
    c[nx] = 1.0
    A_ub = np.hstack([M, -np.ones((ny, 1))])
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=np.zeros(ny),
        A_eq=[[1.0] * nx + [0.0]],
        b_eq=[1.0],
        bounds=[(0, None)] * nx + [(None, None)],
        method="highs",
    )
    if not res.success:
        raise ConvergenceError(f"support minimax LP failed: {res.message}")
    p = np.clip(res.x[:nx], 0.0, None)
    p /= p.sum()
    return float(res.x[nx]), p


def _support_maximin_lp(N: np.ndarray):
    """max over simplex Q of min_x (N @ Q)_x for a 0/1 matrix N; exact LP."""
    from scipy.optimize import linprog

    nx, ny = N.shape
    c = np.zeros(ny + 1)
    c[ny] = -1.0
    A_ub = np.hstack([-N, np.ones((nx, 1))])
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=np.zeros(nx),
        A_eq=[[1.0] * ny + [0.0]],
        b_eq=[1.0],
        bounds=[(0, None)] * ny + [(None, None)],
        method="highs",
    )
    if not res.success:
        raise ConvergenceError(f"support maximin LP failed: {res.message}")
    q = np.clip(res.x[:ny], 0.0, None)
    q /= q.sum()
    return float(res.x[ny]), q


def c_fb(ch: ClassicalChannel) -> float:
    """Zero-error capacity with perfect feedback (when positive):
    max_P -ln max_y sum over x with W(y|x) > 0 of P(x); exact via LP."""
    M = (ch.matrix > 0).astype(float).T
    t, _ = _support_minimax_lp(M)
    return float(-np.log(t))


def r_inf_classical(ch: ClassicalChannel) -> tuple[float, RadiusResult]:
    """Divergence threshold of the sphere-packing exponent, both routes.

    The primal route maximizes over input distributions, the dual route
    minimizes over output distributions; linear programming duality forces
    agreement, which is verified to 1e-6 as a solver cross-check.
    """
    support = ch.matrix > 0
    t, _ = _support_minimax_lp(support.astype(float).T)
    primal = float(-np.log(t))
    s, q = _support_maximin_lp(support.astype(float))
    dual_value = float(-np.log(s))
    gap = abs(primal - dual_value)
    if gap > 1e-6:
        raise ConvergenceError(
            f"primal/dual divergence-threshold values disagree by {gap:.3e}"
        )
    dual = RadiusResult(
        alpha=0.0,
        value=dual_value,
        center=ProbabilityDistribution(p=_readonly(q)),
        gap=gap,
        report=SolverReport(value=dual_value, iterations=1, gap=gap, converged=True),
    )
    return primal, dual


def r_inf_quantum(ch: CQChannel, cfg: SolverConfig = DEFAULT_CONFIG) -> RadiusResult:
    """min over density operators F of max_x -ln Tr(S_x^0 F).

    S_x^0 is the support projector of the x-th state.  The linear payoffs
    make this a semidefinite program; the result carries the optimal F and
    the certified duality gap.
    """
    kernels = np.array([matcore.support_projector(S) for S in ch.states])
    fam = LogTraceFamily(kernels, power=1.0, scale=-1.0)
    F, report = optim.minimize_convex_density(None, None, fam.dim, cfg, family=fam)
    return RadiusResult(
        alpha=0.0, value=report.value, center=F, gap=report.gap, report=report
    )
