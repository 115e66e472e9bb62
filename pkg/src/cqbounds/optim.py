"""Reusable solvers: concave maximization on the probability simplex, convex
min-max over density operators, one-dimensional sup over the exponent
parameter, and PSD projection.

Every solver certifies its answer from feasible primal/dual objects: the
reported ``gap`` always sandwiches the optimum between a value attained by a
feasible point and an explicit bound, never an iteration delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import matcore
from .channels import ProbabilityDistribution, _readonly
from .errors import ConvergenceError, ValidationError


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-6
    max_iterations: int = 50_000
    restarts: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValidationError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValidationError("max_iterations must be >= 1")


@dataclass(frozen=True)
class SolverReport:
    value: float
    iterations: int
    gap: float
    converged: bool


DEFAULT_CONFIG = SolverConfig()


# ---------------------------------------------------------------------------
# Simplex maximization (entropic mirror ascent, batched restarts)
# ---------------------------------------------------------------------------


def _fd_gradient(objective, P: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central finite differences along ambient coordinates (batched)."""
    k, n = P.shape
    g = np.empty((k, n))
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        g[:, i] = (objective(P + e) - objective(P - e)) / (2.0 * h)
    return g


def maximize_concave_simplex(objective, gradient, size: int, cfg: SolverConfig = DEFAULT_CONFIG):
    """Maximize a concave function over the probability simplex.

    ``objective`` maps a batch of distributions, shape (k, size), to values
    of shape (k,); ``gradient`` likewise to (k, size) ambient gradients, or
    may be None to fall back to central finite differences.  One restart
    starts uniform, the rest at seeded Dirichlet draws; restarts evolve
    independently under multiplicative-weights ascent with Polyak-type
    steps, followed by an away-step refinement of the best iterate when the
    certificate has not yet closed.  The certificate per iterate is the
    simplex linear-maximization bound max_i g_i - <g, p>, which upper-bounds
    the suboptimality of any concave objective; the reported gap is
    (best upper bound) - (best value).

    Returns (argmax as ProbabilityDistribution, SolverReport).
    """
    if size < 1:
        raise ValidationError("simplex dimension must be >= 1")
    grad = gradient if gradient is not None else (lambda P: _fd_gradient(objective, P))
    rng = np.random.default_rng(cfg.seed)
    starts = [np.full((1, size), 1.0 / size)]
    if cfg.restarts > 0 and size > 1:
        starts.append(rng.dirichlet(np.ones(size), size=cfg.restarts))
    P = np.vstack(starts)
    k = P.shape[0]

    mw_budget = min(cfg.max_iterations, 200 + 50 * size)
    best_f = np.full(k, -np.inf)
    best_P = P.copy()
    upper = np.full(k, np.inf)
    iterations = mw_budget
    for t in range(1, mw_budget + 1):
        f = np.asarray(objective(P), dtype=float)
        if not np.all(np.isfinite(f)):
            raise ConvergenceError("objective returned a non-finite value on the simplex")
        g = np.asarray(grad(P), dtype=float)
        centered = g - np.einsum("ki,ki->k", g, P)[:, None]
        gap = centered.max(axis=1)
        upper = np.minimum(upper, f + np.maximum(gap, 0.0))
        improved = f > best_f
        best_f = np.where(improved, f, best_f)
        best_P[improved] = P[improved]
        cert = upper.min() - best_f.max()
        if cert <= cfg.tolerance:
            iterations = t
            break
        # Polyak step toward a target slightly above the restart's own best.
        target = np.minimum(upper, best_f + 0.9 * (upper - best_f))
        denom = np.maximum(centered.max(axis=1) ** 2, 1e-300)
        eta = np.clip((target - f) / denom, 0.0, 1e8)
        logs = np.log(np.maximum(P, 1e-300)) + eta[:, None] * g
        logs -= logs.max(axis=1, keepdims=True)
        P = np.exp(logs)
        P /= P.sum(axis=1, keepdims=True)

    i = int(np.argmax(best_f))
    value = float(best_f[i])
    bound = float(upper.min())
    p = np.maximum(best_P[i], 0.0)
    p /= p.sum()
    if bound - value > cfg.tolerance and iterations < cfg.max_iterations:
        p, value, bound, extra = _away_step_polish(
            objective, grad, p, value, bound, cfg.tolerance,
            cfg.max_iterations - iterations,
        )
        iterations += extra
    gap = max(bound - value, 0.0)
    report = SolverReport(value=value, iterations=iterations, gap=gap,
                          converged=gap <= cfg.tolerance)
    return ProbabilityDistribution(p=_readonly(p)), report


def _away_step_polish(objective, grad, p, best_value, bound, tol, budget):
    """Frank-Wolfe refinement with away steps and exact line search.

    Every iterate is a feasible simplex point, so objective values and the
    linear-maximization bound remain valid; on smooth concave objectives the
    certificate closes at a linear rate where multiplicative weights stall.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    n = p.shape[0]

    def f_of(q):
        return float(objective(q[None, :])[0])

    value = f_of(p)
    if value > best_value:
        best_value, best_p = value, p.copy()
    else:
        best_p = p.copy()
    used = 1
    while used < budget:
        g = np.asarray(grad(p[None, :]), dtype=float)[0]
        used += 1
        cert_gap = float(g.max() - g @ p)
        bound = min(bound, value + max(cert_gap, 0.0))
        if bound - best_value <= tol:
            break
        s = int(np.argmax(g))
        support = p > 1e-15
        masked = np.where(support, g, np.inf)
        a = int(np.argmin(masked))
        fw_gain = g[s] - g @ p
        away_gain = g @ p - g[a]
        if fw_gain >= away_gain:
            direction = -p.copy()
            direction[s] += 1.0
            gamma_max = 1.0
        else:
            direction = p.copy()
            direction[a] -= 1.0
            gamma_max = p[a] / max(1.0 - p[a], 1e-300) if p[a] < 1.0 else 1.0
            gamma_max = min(gamma_max, 1e6)
        lo, hi = 0.0, gamma_max
        c = hi - invphi * (hi - lo)
        d = lo + invphi * (hi - lo)
        fc, fd = f_of(p + c * direction), f_of(p + d * direction)
        used += 2
        for _ in range(30):
            if fc >= fd:
                hi, d, fd = d, c, fc
                c = hi - invphi * (hi - lo)
                fc = f_of(p + c * direction)
            else:
                lo, c, fc = c, d, fd
                d = lo + invphi * (hi - lo)
                fd = f_of(p + d * direction)
            used += 1
        gamma = c if fc >= fd else d
        new_p = np.clip(p + gamma * direction, 0.0, None)
        new_p /= new_p.sum()
        new_value = f_of(new_p)
        used += 1
        if new_value <= value + 1e-18:
            break
        p, value = new_p, new_value
        if value > best_value:
            best_value, best_p = value, p.copy()
    return best_p, best_value, bound, used


# ---------------------------------------------------------------------------
# Min-max over density operators
# ---------------------------------------------------------------------------


class LogTraceFamily:
    """Payoff family  D_x(F) = scale * ln Tr(K_x F^power)  with scale < 0.

    power in (0, 1) covers Renyi-type payoffs; power = 1 covers the linear
    D_min payoffs (-ln Tr(K_x F), scale = -1).  The family supplies the
    structure the solver needs for certified bounds: for any distribution P
    over payoffs,

        min_F max_x D_x(F)  >=  scale * ln || sum_x P(x) K_x ||_r,

    with r = 1/(1-power) (operator norm at power = 1), because the trace of
    the mixture against F^power is maximized over densities at exactly that
    Schatten norm.  Best responses to P are mixture powers (top-eigenspace
    projectors at power = 1).
    """

    def __init__(self, kernels, power: float, scale: float):
        K = np.asarray(kernels, dtype=complex)
        if K.ndim != 3 or K.shape[1] != K.shape[2]:
            raise ValidationError("kernels must be a stack of square matrices")
        if not 0.0 < power <= 1.0:
            raise ValidationError(f"power must lie in (0, 1], got {power}")
        if scale >= 0:
            raise ValidationError("scale must be negative")
        self.kernels = K
        self.power = float(power)
        self.scale = float(scale)
        self.size, self.dim, _ = K.shape
        self.norm_order = np.inf if power >= 1.0 else 1.0 / (1.0 - power)
        self.linear = power >= 1.0

    # -- spectral-handle helpers (F = V diag(f) V^dag) --

    def traces(self, V: np.ndarray, f: np.ndarray) -> np.ndarray:
        fp = np.where(f > 0, f, 0.0) ** self.power
        diag = np.einsum("xij,jk,ik->xk", self.kernels, V, V.conj()).real
        return diag @ fp

    def payoffs_from_traces(self, tr: np.ndarray) -> np.ndarray:
        out = np.full(self.size, np.inf)
        pos = tr > 0
        out[pos] = self.scale * np.log(tr[pos])
        return out

    def max_payoff(self, F: np.ndarray) -> float:
        w, V = np.linalg.eigh(F)
        tmin = self.traces(V, np.clip(w, 0.0, None)).min()
        return float("inf") if tmin <= 0 else float(self.scale * math.log(tmin))

    def mixture(self, P: np.ndarray) -> np.ndarray:
        return np.tensordot(P, self.kernels, axes=1)

    def dual_bound(self, P: np.ndarray) -> float:
        lam = np.clip(np.linalg.eigvalsh(self.mixture(P)), 0.0, None)
        m = lam.max()
        if m <= 0:
            # scale < 0, so a vanishing mixture certifies an infinite value
            return float("inf")
        if np.isinf(self.norm_order):
            s = m
        else:
            s = m * np.sum((lam / m) ** self.norm_order) ** (1.0 / self.norm_order)
        return float(self.scale * math.log(s))

    def _dual_batch(self, P: np.ndarray):
        key = P.tobytes()
        if getattr(self, "_dual_cache_key", None) == key:
            return self._dual_cache_val
        A = np.einsum("kx,xij->kij", P, self.kernels)
        w, V = np.linalg.eigh(A)
        lam = np.clip(w, 1e-300, None)
        diag = np.einsum("xij,kjl,kil->kxl", self.kernels, V, V.conj()).real
        r = self.norm_order
        if np.isinf(r):
            m = lam[:, -1]
            top = lam >= (lam[:, -1] - 1e-13 * np.maximum(m, 1e-300))[:, None]
            g = (diag * top[:, None, :]).sum(axis=2) / top.sum(axis=1)[:, None]
            vals = self.scale * np.log(m)
            grads = self.scale * g / m[:, None]
        else:
            m = lam[:, -1:]
            nrm = (m * np.sum((lam / m) ** r, axis=1, keepdims=True) ** (1.0 / r))[:, 0]
            wts = (lam / nrm[:, None]) ** (r - 1.0)
            vals = self.scale * np.log(nrm)
            grads = self.scale * np.einsum("kxl,kl->kx", diag, wts) / nrm[:, None]
        self._dual_cache_key = key
        self._dual_cache_val = (vals, grads)
        return vals, grads

    def dual_bound_batch(self, P: np.ndarray) -> np.ndarray:
        return self._dual_batch(P)[0]

    def dual_grad_batch(self, P: np.ndarray) -> np.ndarray:
        return self._dual_batch(P)[1]

    def best_response(self, P: np.ndarray) -> np.ndarray:
        A = self.mixture(P)
        if self.linear:
            w, V = np.linalg.eigh(A)
            top = w >= w[-1] - 1e-12 * max(abs(w[-1]), 1e-300)
            F = V[:, top] @ V[:, top].conj().T
        else:
            F = matcore.mat_pow(matcore.hermitize(A), 1.0 / (1.0 - self.power))
        tr = F.trace().real
        if tr <= 0:
            return np.eye(self.dim) / self.dim
        return F / tr

    def ascent_grad(self, V: np.ndarray, f: np.ndarray, P: np.ndarray) -> np.ndarray:
        """Gradient in F of the concave game payoff sum_x P(x) Tr(K_x F^power)."""
        A = self.mixture(P)
        At = V.conj().T @ A @ V
        if self.linear:
            G = At
        else:
            fs = np.maximum(f, 1e-14)
            fp = fs**self.power
            den = fs[:, None] - fs[None, :]
            close = np.abs(den) < 1e-13
            dd = np.where(
                close,
                self.power * fs[:, None] ** (self.power - 1.0),
                (fp[:, None] - fp[None, :]) / np.where(close, 1.0, den),
            )
            G = At * dd
        return matcore.hermitize(V @ G @ V.conj().T)


def _density_from_potential(Z: np.ndarray):
    """Return (V, f, F) for F proportional to exp(-Z), exactly unit trace."""
    w, V = np.linalg.eigh(-Z)
    w = w - w.max()
    e = np.exp(w)
    f = e / e.sum()
    F = matcore.hermitize((V * f) @ V.conj().T)
    return V, f, F


def _certified_value(best_upper, best_lower):
    if math.isinf(best_lower) and best_lower > 0:
        return float("inf"), 0.0
    gap = max(best_upper - best_lower, 0.0)
    return best_lower, gap


def _solve_linear_family_sdp_once(fam: LogTraceFamily, solver: str):
    import cvxpy as cp

    K = fam.kernels
    nx, d = fam.size, fam.dim
    complex_case = bool(np.abs(K.imag).max() > 1e-14)
    if complex_case:
        F = cp.Variable((d, d), hermitian=True)
        traces = [cp.real(cp.sum(cp.multiply(K[x].T, F))) for x in range(nx)]
        trace_con = cp.real(cp.trace(F)) == 1
    else:
        Kr = K.real
        F = cp.Variable((d, d), symmetric=True)
        traces = [cp.sum(cp.multiply(Kr[x].T, F)) for x in range(nx)]
        trace_con = cp.trace(F) == 1
    s = cp.Variable()
    primal = cp.Problem(
        cp.Maximize(s), [F >> 0, trace_con] + [t >= s for t in traces]
    )
    primal.solve(solver=solver)
    if F.value is None:
        raise ConvergenceError("interior-point solve of the center problem failed")

    P = cp.Variable(nx, nonneg=True)
    mix = 0
    for x in range(nx):
        mix = mix + P[x] * (K[x] if complex_case else K[x].real)
    dual = cp.Problem(cp.Minimize(cp.lambda_max(mix)), [cp.sum(P) == 1])
    dual.solve(solver=solver)
    if P.value is None:
        raise ConvergenceError("interior-point solve of the dual weights failed")

    Fv = matcore.hermitize(np.asarray(F.value, dtype=complex))
    w, V = np.linalg.eigh(Fv)
    w = np.clip(w, 0.0, None)
    w /= w.sum()
    Fv = matcore.hermitize((V * w) @ V.conj().T)
    Pv = np.clip(np.asarray(P.value, dtype=float), 0.0, None)
    Pv /= Pv.sum()

    upper = fam.max_payoff(Fv)
    lower = fam.dual_bound(Pv)
    value, gap = _certified_value(upper, lower)
    return Fv, Pv, value, gap


def _solve_linear_family_sdp(fam: LogTraceFamily, tol: float):
    """Exact route for linear payoffs: the center problem is a small SDP.

    Solves max_F min_x Tr(K_x F) and its dual min_P lambda_max(mixture)
    with an interior-point solver, then rebuilds both bounds from the
    projected feasible solutions so the certificate is independent of the
    solver's own claims.  Falls back to a second solver if the recomputed
    certificate stays loose.
    """
    import warnings

    best = None
    for solver in ("CLARABEL", "SCS"):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                result = _solve_linear_family_sdp_once(fam, solver)
        except ConvergenceError:
            continue
        if best is None or result[3] < best[3]:
            best = result
        if best[3] <= max(tol, 1e-8):
            break
    if best is None:
        raise ConvergenceError("no interior-point solver produced a usable center")
    return best


def minimize_convex_density(
    payoffs,
    subgradients,
    dim: int,
    cfg: SolverConfig = DEFAULT_CONFIG,
    *,
    family: LogTraceFamily | None = None,
    validate_iterates: bool = False,
):
    """Minimize max_x D_x(F) over density operators F of the given dimension.

    The engine is mirror descent with matrix exponential potentials, so every
    iterate is positive with exactly unit trace.  When ``family`` (a
    LogTraceFamily or an object with the same protocol) is supplied, the
    solver additionally certifies a two-sided enclosure: upper bounds from
    feasible centers (iterates, running averages, and best responses to the
    dual weights) and lower bounds from the family's closed-form dual.
    Linear payoff families are routed to an interior-point solve of the
    equivalent semidefinite program, with certificates rebuilt from the
    returned feasible pair.

    Without a family the payoffs/subgradients callables drive a plain
    subgradient version whose lower bound comes from averaged linearizations.
    Returns (argmin density matrix, SolverReport); the report value is the
    certified lower bound and gap the width of the enclosure.
    """
    if family is not None:
        return _minimize_with_family(family, cfg, validate_iterates)
    return _minimize_generic(payoffs, subgradients, dim, cfg, validate_iterates)


def _minimize_with_family(fam, cfg: SolverConfig, validate_iterates: bool):
    nx, d = fam.size, fam.dim
    tol = cfg.tolerance

    best_upper = np.inf
    best_lower = -np.inf
    best_F = np.eye(d) / d

    def consider_center(F):
        nonlocal best_upper, best_F
        u = fam.max_payoff(F)
        if u < best_upper:
            best_upper, best_F = u, F

    def consider_weights(P):
        nonlocal best_lower
        val = fam.dual_bound(P)
        if val > best_lower:
            best_lower = val

    uniform = np.full(nx, 1.0 / nx)
    consider_weights(uniform)
    consider_center(np.eye(d) / d)
    consider_center(fam.best_response(uniform))
    value, gap = _certified_value(best_upper, best_lower)
    if gap <= tol:
        return best_F, SolverReport(value=value, iterations=0, gap=gap, converged=True)

    if getattr(fam, "linear", False):
        F, P, _, _ = _solve_linear_family_sdp(fam, tol)
        consider_center(F)
        consider_weights(P)
        value, gap = _certified_value(best_upper, best_lower)
        return best_F, SolverReport(
            value=value, iterations=1, gap=gap, converged=gap <= tol
        )

    # Phase 1: simultaneous multiplicative weights on (F, P).
    saddle_budget = min(max(cfg.max_iterations // 50, 100), 300)
    Z = np.zeros((d, d), dtype=complex)
    y = np.zeros(nx)
    cumP = np.zeros(nx)
    accF = 1e-12
    accP = 1e-12
    iterations = 0
    check_every = 25
    for t in range(1, saddle_budget + 1):
        iterations = t
        V, f, F = _density_from_potential(Z)
        if validate_iterates:
            assert abs(F.trace().real - 1.0) <= 1e-10
            assert np.linalg.eigvalsh(F)[0] >= -1e-12
        tr = fam.traces(V, f)
        P = np.exp(y - y.max())
        P /= P.sum()
        G = fam.ascent_grad(V, f, P)
        accF += np.linalg.norm(G) ** 2
        Z -= (1.0 / math.sqrt(accF)) * G
        accP += float(np.max(np.abs(tr))) ** 2
        y -= (1.0 / math.sqrt(accP)) * tr
        cumP += P
        if t % check_every == 0:
            Pbar = cumP / cumP.sum()
            consider_center(fam.best_response(Pbar))
            consider_center(fam.best_response(P))
            consider_center(F)
            consider_weights(Pbar)
            consider_weights(P)
            value, gap = _certified_value(best_upper, best_lower)
            if gap <= tol:
                return best_F, SolverReport(value=value, iterations=t, gap=gap, converged=True)

    # Phase 2: tighten the lower bound by maximizing the family's closed-form
    # dual over the weight simplex (every evaluation is a valid bound), and
    # refresh the center from the best response to the maximizing weights.
    inner = replace(
        cfg,
        tolerance=0.25 * tol,
        max_iterations=max(cfg.max_iterations - iterations, 1000),
    )
    dist, dual_report = maximize_concave_simplex(
        fam.dual_bound_batch, fam.dual_grad_batch, nx, inner
    )
    iterations += dual_report.iterations
    if dual_report.value > best_lower:
        best_lower = dual_report.value
    value, gap = _certified_value(best_upper, best_lower)
    if gap > tol:
        # Close the remaining upper-bound slack: line searches in weight space
        # toward the worst-payoff state, keeping only feasible centers.
        best_upper, best_F = _polish_center(fam, dist.p, best_upper, best_F, tol, best_lower)
        value, gap = _certified_value(best_upper, best_lower)
    else:
        consider_center(fam.best_response(dist.p))
        value, gap = _certified_value(best_upper, best_lower)
    return best_F, SolverReport(
        value=value, iterations=iterations, gap=gap, converged=gap <= tol
    )


def _polish_center(fam, P, best_upper, best_F, tol, best_lower, rounds: int = 20):
    """Greedy reweighting polish for the center's worst-case payoff.

    Repeatedly line-searches from the current weights toward the vertex of
    the worst-payoff state, taking best responses as center candidates.  All
    candidates are feasible, so the upper bound only improves.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0

    def upper_and_worst(Pc):
        F = fam.best_response(Pc)
        w, V = np.linalg.eigh(F)
        tr = fam.traces(V, np.clip(w, 0.0, None))
        payoffs = fam.payoffs_from_traces(tr)
        return float(payoffs.max()), int(payoffs.argmax()), F

    for _ in range(rounds):
        u, worst, F = upper_and_worst(P)
        if u < best_upper:
            best_upper, best_F = u, F
        if best_upper - best_lower <= tol:
            break
        vertex = np.zeros_like(P)
        vertex[worst] = 1.0

        def u_at(s):
            return upper_and_worst((1.0 - s) * P + s * vertex)[0]

        a, b = 0.0, 0.25
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc, fd = u_at(c), u_at(d)
        for _ in range(24):
            if fc <= fd:
                b, d, fd = d, c, fc
                c = b - invphi * (b - a)
                fc = u_at(c)
            else:
                a, c, fc = c, d, fd
                d = a + invphi * (b - a)
                fd = u_at(d)
        s = c if fc <= fd else d
        if min(fc, fd) >= u - 1e-16:
            break
        P = (1.0 - s) * P + s * vertex
        P = P / P.sum()
    u, _, F = upper_and_worst(P)
    if u < best_upper:
        best_upper, best_F = u, F
    return best_upper, best_F


def _hermitian_basis(d: int):
    basis = []
    for i in range(d):
        E = np.zeros((d, d), dtype=complex)
        E[i, i] = 1.0
        basis.append(E)
    for i in range(d):
        for j in range(i + 1, d):
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = E[j, i] = 1.0 / math.sqrt(2)
            basis.append(E)
            E = np.zeros((d, d), dtype=complex)
            E[i, j] = 1j / math.sqrt(2)
            E[j, i] = -1j / math.sqrt(2)
            basis.append(E)
    return basis


def _fd_matrix_gradient(fn, F: np.ndarray, h: float = 1e-6) -> np.ndarray:
    G = np.zeros_like(F)
    for E in _hermitian_basis(F.shape[0]):
        d = (fn(F + h * E) - fn(F - h * E)) / (2.0 * h)
        G = G + d * E
    return matcore.hermitize(G)


def _minimize_generic(payoffs, subgradients, dim, cfg, validate_iterates):
    nx = len(payoffs)
    if subgradients is None:
        subgradients = [
            (lambda F, fn=payoffs[x]: _fd_matrix_gradient(fn, F)) for x in range(nx)
        ]

    def eval_payoffs(F):
        return np.array([payoffs[x](F) for x in range(nx)], dtype=float)

    Z = np.zeros((dim, dim), dtype=complex)
    acc = 1e-12
    best_upper = np.inf
    best_lower = -np.inf
    best_F = np.eye(dim) / dim
    # Averaged-linearization lower bound accumulators.
    sum_h = 0.0
    sum_gF = 0.0
    sum_G = np.zeros((dim, dim), dtype=complex)
    iterations = 0
    for t in range(1, cfg.max_iterations + 1):
        iterations = t
        V, f, F = _density_from_potential(Z)
        if validate_iterates:
            assert abs(F.trace().real - 1.0) <= 1e-10
        vals = eval_payoffs(F)
        if not np.all(np.isfinite(vals)):
            # Mix toward the maximally mixed state to regain finiteness.
            Z *= 0.5
            continue
        worst = int(np.argmax(vals))
        h = float(vals[worst])
        if h < best_upper:
            best_upper, best_F = h, F
        G = matcore.hermitize(np.asarray(subgradients[worst](F), dtype=complex))
        sum_h += h
        sum_gF += float(np.trace(G @ F).real)
        sum_G += G
        lower = (sum_h - sum_gF + np.linalg.eigvalsh(matcore.hermitize(sum_G))[0]) / t
        best_lower = max(best_lower, float(lower))
        gap = max(best_upper - best_lower, 0.0)
        if gap <= cfg.tolerance:
            break
        acc += np.linalg.norm(G) ** 2
        Z += (1.0 / math.sqrt(acc)) * G

    gap = max(best_upper - best_lower, 0.0)
    return best_F, SolverReport(
        value=float(best_lower),
        iterations=iterations,
        gap=gap,
        converged=gap <= cfg.tolerance,
    )


# ---------------------------------------------------------------------------
# One-dimensional sup over the exponent parameter
# ---------------------------------------------------------------------------

RHO_GRID_POINTS = 200
RHO_GRID_MIN = 1e-3
INF_RATE_MARGIN = 1e-6


def sup_over_rho(e0_of_rho, rate: float, rho_max: float = 1e4,
                 cfg: SolverConfig = DEFAULT_CONFIG) -> float:
    """sup over rho >= 0 of e0(rho) - rho * rate for concave nondecreasing e0.

    Scans rho = 0 plus a logarithmic grid up to rho_max, then refines around
    the best grid point by golden-section search (the objective is concave in
    rho, hence unimodal).  Declares +inf when the objective is still
    increasing at rho_max and the rate sits below the e0(rho_max)/rho_max
    estimate of the divergence threshold.
    """
    if rate < 0:
        raise ValueError(f"rate must be >= 0, got {rate}")
    cache: dict[float, float] = {}

    def phi(rho: float) -> float:
        if rho not in cache:
            cache[rho] = float(e0_of_rho(rho))
        return cache[rho] - rho * rate

    grid = [0.0] + list(np.geomspace(RHO_GRID_MIN, rho_max, RHO_GRID_POINTS))
    vals = [phi(r) for r in grid]
    e0_tail = cache[grid[-1]]
    tail_increasing = vals[-1] > vals[-2] + 1e-12 * max(1.0, abs(vals[-1]))
    if tail_increasing and rate < e0_tail / rho_max - INF_RATE_MARGIN:
        return float("inf")

    i = int(np.argmax(vals))
    lo = grid[i - 1] if i > 0 else 0.0
    hi = grid[i + 1] if i + 1 < len(grid) else grid[-1]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = phi(c), phi(d)
    for _ in range(80):
        if b - a <= cfg.tolerance * (1.0 + b):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = phi(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = phi(d)
    best = max(max(vals), fc, fd)
    return float(best)


def psd_project(H) -> np.ndarray:
    """Nearest (Frobenius) positive semidefinite matrix: clip eigenvalues at 0."""
    M = matcore.require_hermitian(H)
    w, V = np.linalg.eigh(M)
    return matcore.hermitize((V * np.clip(w, 0.0, None)) @ V.conj().T)
