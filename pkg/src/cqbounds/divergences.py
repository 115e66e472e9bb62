"""Kullback-Leibler and Renyi divergences, classical and quantum, plus the
support-projector divergence d_min.

All values are in nats.  +inf is a legitimate result (disjoint supports),
returned as float('inf') rather than raised.
"""

from __future__ import annotations

import numpy as np

from . import matcore
from .channels import ProbabilityDistribution
from .errors import ValidationError


def _as_prob_vector(q, name: str) -> np.ndarray:
    if isinstance(q, ProbabilityDistribution):
        return q.p
    v = np.asarray(q, dtype=float)
    if v.ndim != 1:
        raise ValidationError(f"{name} must be a vector")
    return v


def kl(q1, q2) -> float:
    """Kullback-Leibler divergence sum q1 ln(q1/q2), with 0 ln(0/q) = 0.

    Returns +inf when q1 puts mass where q2 is zero.
    """
    a = _as_prob_vector(q1, "first distribution")
    b = _as_prob_vector(q2, "second distribution")
    if a.shape != b.shape:
        raise ValidationError(f"size mismatch: {a.shape[0]} vs {b.shape[0]}")
    sup = a > 0
    if np.any(b[sup] <= 0):
        return float("inf")
    return float(np.sum(a[sup] * np.log(a[sup] / b[sup])))


def renyi_classical(q1, q2, alpha: float) -> float:
    """Renyi divergence of order alpha in (0, 1): ln[sum q1^a q2^(1-a)] / (a-1).

    Returns +inf exactly when the supports are disjoint.  The endpoints are
    intentionally excluded; use kl (alpha -> 1) or d_min (alpha -> 0).
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly in (0, 1), got {alpha}")
    a = _as_prob_vector(q1, "first distribution")
    b = _as_prob_vector(q2, "second distribution")
    if a.shape != b.shape:
        raise ValidationError(f"size mismatch: {a.shape[0]} vs {b.shape[0]}")
    both = (a > 0) & (b > 0)
    if not both.any():
        return float("inf")
    s = np.sum(a[both] ** alpha * b[both] ** (1.0 - alpha))
    return float(np.log(s) / (alpha - 1.0))


def renyi_quantum(f1, f2, alpha: float) -> float:
    """Quantum Renyi divergence ln[Tr F1^a F2^(1-a)] / (a-1) for a in (0, 1)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie strictly in (0, 1), got {alpha}")
    A = matcore.as_matrix(f1, "first operator")
    B = matcore.as_matrix(f2, "second operator")
    if A.shape != B.shape:
        raise ValidationError(f"dimension mismatch: {A.shape[0]} vs {B.shape[0]}")
    t = np.trace(matcore.mat_pow(A, alpha) @ matcore.mat_pow(B, 1.0 - alpha)).real
    if t <= 0:
        return float("inf")
    return float(np.log(t) / (alpha - 1.0))


def d_min(s, f) -> float:
    """Support-projector divergence -ln Tr(S^0 F); the alpha -> 0 endpoint."""
    S = matcore.as_matrix(s, "first operator")
    F = matcore.as_matrix(f, "second operator")
    if S.shape != F.shape:
        raise ValidationError(f"dimension mismatch: {S.shape[0]} vs {F.shape[0]}")
    t = np.trace(matcore.support_projector(S) @ F).real
    if t <= 0:
        return float("inf")
    return float(-np.log(t))
