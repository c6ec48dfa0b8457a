"""Gauss quadrature rules generated by the Golub-Welsch procedure.

Nodes and weights come from the symmetric eigenvalue problem for the Jacobi
matrix of the classical three-term recurrences (Jacobi and Hermite).  An
n-node rule integrates weight * polynomial exactly through polynomial
degree 2n - 1.
"""

from __future__ import annotations

from math import gamma, lgamma, exp, sqrt, pi

import numpy as np

__all__ = [
    "gauss_from_recurrence",
    "gauss_jacobi",
    "gauss_legendre",
    "gauss_hermite",
]


def _jacobi_recurrence(n, a, b):
    """Recurrence coefficients for (1-x)^a (1+x)^b on [-1, 1].

    Returns (alpha, beta) with beta[0] the total mass; monic convention
    p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}.
    """
    alpha = np.zeros(n)
    beta = np.zeros(n)
    apb = a + b
    # log-gamma keeps the mass finite for large parameters
    beta[0] = exp((apb + 1) * np.log(2.0) + lgamma(a + 1) + lgamma(b + 1) - lgamma(apb + 2))
    if n == 1:
        alpha[0] = (b - a) / (apb + 2)
        return alpha, beta
    alpha[0] = (b - a) / (apb + 2)
    for k in range(1, n):
        den = (2 * k + apb) * (2 * k + apb + 2)
        alpha[k] = (b * b - a * a) / max(den, np.finfo(float).tiny) if den != 0 else 0.0
        num = 4 * k * (k + a) * (k + b) * (k + apb)
        d2 = (2 * k + apb) ** 2 * (2 * k + apb + 1) * (2 * k + apb - 1)
        beta[k] = num / d2
    return alpha, beta


def _hermite_recurrence(n):
    """Recurrence coefficients for exp(-x^2) on the real line."""
    alpha = np.zeros(n)
    beta = np.zeros(n)
    beta[0] = sqrt(pi)
    beta[1:] = 0.5 * np.arange(1, n)
    return alpha, beta


def gauss_from_recurrence(alpha, beta):
    """Golub-Welsch: nodes and weights from monic recurrence coefficients."""
    n = len(alpha)
    if n == 1:
        return np.array([alpha[0]]), np.array([beta[0]])
    j = np.diag(alpha) + np.diag(np.sqrt(beta[1:]), 1) + np.diag(np.sqrt(beta[1:]), -1)
    nodes, vecs = np.linalg.eigh(j)
    weights = beta[0] * vecs[0, :] ** 2
    return nodes, weights


def gauss_jacobi(n, a, b, lo=-1.0, hi=1.0):
    """n-node Gauss rule for (hi-x)^a (x-lo)^b on [lo, hi]."""
    if n < 1:
        raise ValueError("need at least one node")
    if a <= -1 or b <= -1:
        raise ValueError(f"jacobi exponents must exceed -1, got a={a}, b={b}")
    alpha, beta = _jacobi_recurrence(n, a, b)
    t, w = gauss_from_recurrence(alpha, beta)
    half = 0.5 * (hi - lo)
    x = 0.5 * (lo + hi) + half * t
    w = w * half ** (a + b + 1)
    return x, w


def gauss_legendre(n, lo=-1.0, hi=1.0):
    """n-node Gauss-Legendre rule on [lo, hi]."""
    return gauss_jacobi(n, 0.0, 0.0, lo, hi)


def gauss_hermite(n, center=0.0, scale=1.0):
    """n-node Gauss rule for scale * exp(-(x-center)^2) on the real line."""
    if n < 1:
        raise ValueError("need at least one node")
    alpha, beta = _hermite_recurrence(n)
    t, w = gauss_from_recurrence(alpha, beta)
    return t + center, w * scale
