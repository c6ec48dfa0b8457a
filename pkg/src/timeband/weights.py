"""Matrix weights as sums of classical-scalar-factor times matrix-polynomial terms.

Storing a weight as ``W(x) = sum_t f_t(x) * rho_t(x)`` with f_t a classical
scalar density (Jacobi / Gegenbauer / shifted Gaussian / constant) and rho_t
a matrix polynomial makes full-interval inner products exact Gauss quadrature
and makes first and second derivatives analytic, via the factor logarithmic
derivatives.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError, QuadratureError
from .matpoly import MatrixPolynomial
from .quadrature import gauss_hermite, gauss_jacobi, gauss_legendre

__all__ = [
    "JacobiFactor",
    "GegenbauerFactor",
    "ShiftedGaussianFactor",
    "UnitFactor",
    "WeightTerm",
    "MatrixWeight",
    "TermRule",
    "WeightRule",
    "quad_full",
    "quad_truncated",
    "chebyshev_points",
]

_MAX_NODES = 4096


def chebyshev_points(lo, hi, n):
    """n Chebyshev (first kind) points, strictly interior to (lo, hi)."""
    t = np.cos((2 * np.arange(n) + 1) * np.pi / (2 * n))
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * t


class JacobiFactor:
    """(hi - x)^a * (x - lo)^b on (lo, hi)."""

    def __init__(self, a, b, lo=0.0, hi=1.0):
        if a <= -1 or b <= -1:
            raise ConfigError(f"jacobi exponents must exceed -1, got a={a}, b={b}")
        if not lo < hi:
            raise ConfigError(f"empty interval ({lo}, {hi})")
        self.a, self.b, self.lo, self.hi = float(a), float(b), float(lo), float(hi)

    interval = property(lambda self: (self.lo, self.hi))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return (self.hi - x) ** self.a * (x - self.lo) ** self.b

    def logderiv(self, x):
        x = np.asarray(x, dtype=float)
        return -self.a / (self.hi - x) + self.b / (x - self.lo)

    def logderiv_prime(self, x):
        x = np.asarray(x, dtype=float)
        return -self.a / (self.hi - x) ** 2 - self.b / (x - self.lo) ** 2

    def exponent_at(self, endpoint):
        return self.b if endpoint == self.lo else self.a

    def gauss_rule(self, n):
        return gauss_jacobi(n, self.a, self.b, self.lo, self.hi)

    def truncated_rule(self, omega, n):
        # carry the lo-endpoint exponent exactly; fold the smooth (hi-x)^a part
        x, w = gauss_jacobi(n, 0.0, self.b, self.lo, omega)
        return x, w * (self.hi - x) ** self.a


class GegenbauerFactor:
    """(1 - x^2)^g on (-1, 1)."""

    def __init__(self, g):
        if g <= -1:
            raise ConfigError(f"gegenbauer exponent must exceed -1, got {g}")
        self.g = float(g)

    interval = (-1.0, 1.0)
    lo, hi = -1.0, 1.0

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return (1.0 - x * x) ** self.g

    def logderiv(self, x):
        x = np.asarray(x, dtype=float)
        return -2.0 * self.g * x / (1.0 - x * x)

    def logderiv_prime(self, x):
        x = np.asarray(x, dtype=float)
        return -2.0 * self.g * (1.0 + x * x) / (1.0 - x * x) ** 2

    def exponent_at(self, endpoint):
        return self.g

    def gauss_rule(self, n):
        return gauss_jacobi(n, self.g, self.g, -1.0, 1.0)

    def truncated_rule(self, omega, n):
        x, w = gauss_jacobi(n, 0.0, self.g, -1.0, omega)
        return x, w * (1.0 - x) ** self.g


class ShiftedGaussianFactor:
    """s * exp(-(x - c)^2) on the real line."""

    #: distance below the center where the density is below double precision
    TAIL = 9.0

    def __init__(self, center=0.0, scale=1.0):
        if scale <= 0:
            raise ConfigError(f"gaussian scale must be positive, got {scale}")
        self.center, self.scale = float(center), float(scale)

    interval = (-np.inf, np.inf)
    lo, hi = -np.inf, np.inf

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.scale * np.exp(-(x - self.center) ** 2)

    def logderiv(self, x):
        x = np.asarray(x, dtype=float)
        return -2.0 * (x - self.center)

    def logderiv_prime(self, x):
        return -2.0 * np.ones_like(np.asarray(x, dtype=float))

    def exponent_at(self, endpoint):
        return 0.0

    def gauss_rule(self, n):
        return gauss_hermite(n, self.center, self.scale)

    def truncated_rule(self, omega, panels, order=12):
        lo = self.center - self.TAIL
        if omega <= lo:
            return np.zeros(0), np.zeros(0)
        edges = np.linspace(lo, omega, panels + 1)
        xs, ws = [], []
        for i in range(panels):
            x, w = gauss_legendre(order, edges[i], edges[i + 1])
            xs.append(x)
            ws.append(w * self.value(x))
        return np.concatenate(xs), np.concatenate(ws)


class UnitFactor:
    """Constant 1 on (lo, hi)."""

    def __init__(self, lo=-1.0, hi=1.0):
        if not lo < hi:
            raise ConfigError(f"empty interval ({lo}, {hi})")
        self.lo, self.hi = float(lo), float(hi)

    interval = property(lambda self: (self.lo, self.hi))

    def value(self, x):
        return np.ones_like(np.asarray(x, dtype=float))

    def logderiv(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    logderiv_prime = logderiv

    def exponent_at(self, endpoint):
        return 0.0

    def gauss_rule(self, n):
        return gauss_legendre(n, self.lo, self.hi)

    def truncated_rule(self, omega, n):
        return gauss_legendre(n, self.lo, omega)


class WeightTerm:
    """One scalar factor times one matrix polynomial."""

    def __init__(self, factor, polypart):
        if not isinstance(polypart, MatrixPolynomial):
            polypart = MatrixPolynomial(polypart)
        self.factor = factor
        self.polypart = polypart


class MatrixWeight:
    """Symmetric positive definite matrix density on an open interval."""

    def __init__(self, terms, interval=None, name=""):
        if not terms:
            raise ConfigError("weight needs at least one term")
        self.terms = list(terms)
        self.dim = self.terms[0].polypart.dim
        for t in self.terms:
            if t.polypart.dim != self.dim:
                raise ConfigError("all weight terms must share one dimension")
        if interval is None:
            interval = self.terms[0].factor.interval
        self.lo, self.hi = float(interval[0]), float(interval[1])
        self.name = name
        self._validate()

    interval = property(lambda self: (self.lo, self.hi))

    def sample_window(self, margin=4.0):
        """A finite window inside the support, for sampling and probing."""
        lo, hi = self.lo, self.hi
        centers = [t.factor.center for t in self.terms if isinstance(t.factor, ShiftedGaussianFactor)]
        if not np.isfinite(lo):
            lo = (min(centers) if centers else 0.0) - margin
        if not np.isfinite(hi):
            hi = (max(centers) if centers else 0.0) + margin
        return lo, hi

    def _check_x(self, x):
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(xs < self.lo) or np.any(xs > self.hi):
            raise ConfigError(f"evaluation point outside interval [{self.lo}, {self.hi}]")
        for endpoint in (self.lo, self.hi):
            if np.isfinite(endpoint) and np.any(xs == endpoint):
                if any(t.factor.exponent_at(endpoint) < 0 for t in self.terms):
                    raise ConfigError(f"weight is singular at endpoint {endpoint}")

    def __call__(self, x):
        self._check_x(x)
        return self._eval_unchecked(x)

    def _eval_unchecked(self, x):
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        out = np.zeros((xs.size, self.dim, self.dim))
        for t in self.terms:
            out += t.factor.value(xs)[:, None, None] * t.polypart(xs)
        return out[0] if scalar else out

    def deriv(self, x, order=1):
        """Analytic derivative of order 1 or 2."""
        if order not in (1, 2):
            raise ValueError(f"derivative order must be 1 or 2, got {order}")
        self._check_x(x)
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)
        out = np.zeros((xs.size, self.dim, self.dim))
        for t in self.terms:
            f = t.factor.value(xs)[:, None, None]
            ell = t.factor.logderiv(xs)[:, None, None]
            rho = t.polypart(xs)
            rho1 = t.polypart.deriv()(xs)
            if order == 1:
                out += f * (ell * rho + rho1)
            else:
                ellp = t.factor.logderiv_prime(xs)[:, None, None]
                rho2 = t.polypart.deriv(2)(xs)
                out += f * ((ell * ell + ellp) * rho + 2 * ell * rho1 + rho2)
        return out[0] if scalar else out

    def _validate(self, npoints=50):
        lo, hi = self.sample_window()
        xs = chebyshev_points(lo, hi, npoints)
        w = self._eval_unchecked(xs)
        scale = max(float(np.max(np.abs(w))), 1e-300)
        defect = float(np.max(np.abs(w - w.transpose(0, 2, 1))))
        if defect > 1e-12 * scale:
            raise ConfigError(f"weight '{self.name}' is not symmetric: defect {defect:.3e}")
        mins = np.linalg.eigvalsh(0.5 * (w + w.transpose(0, 2, 1)))[:, 0]
        if np.any(mins <= 0):
            raise ConfigError(
                f"weight '{self.name}' is not positive definite in the interior "
                f"(min eigenvalue {float(mins.min()):.3e})"
            )

    def max_polypart_degree(self):
        return max(t.polypart.degree for t in self.terms)

    def __repr__(self):
        return f"MatrixWeight(name={self.name!r}, dim={self.dim}, interval=({self.lo}, {self.hi}))"


class TermRule:
    """Nodes and weights for one term; the scalar factor is folded into the weights."""

    def __init__(self, nodes, weights):
        self.nodes = np.asarray(nodes, dtype=float)
        self.weights = np.asarray(weights, dtype=float)


class WeightRule:
    """Per-term quadrature for a MatrixWeight.

    ``poly_degree`` is the largest combined degree of the polynomial factors
    (excluding each term's own polypart) integrated exactly (full rules) or to
    the requested tolerance (truncated rules).
    """

    def __init__(self, term_rules, poly_degree, kind, error_estimate=0.0):
        self.term_rules = term_rules
        self.poly_degree = poly_degree
        self.kind = kind
        self.error_estimate = error_estimate


def quad_full(weight, poly_degree):
    """Exact full-interval rule: per term, a classical Gauss rule of order
    sufficient for factor * polynomial through degree poly_degree + deg(polypart)."""
    if poly_degree < 0:
        raise QuadratureError(f"polynomial degree must be nonnegative, got {poly_degree}")
    rules = []
    for t in weight.terms:
        total = poly_degree + t.polypart.degree
        n = total // 2 + 1
        x, w = t.factor.gauss_rule(n)
        rules.append(TermRule(x, w))
    return WeightRule(rules, poly_degree, "full")


def _moments(nodes, weights, kmax):
    powers = nodes[None, :] ** np.arange(kmax + 1)[:, None]
    m = powers @ weights
    m_abs = np.abs(powers) @ np.abs(weights)
    return m, m_abs


def _converge(make_rule, start, kmax, tol):
    """Double the resolution of ``make_rule`` until the moments through
    degree kmax stabilize to ``tol`` relative."""
    n = start
    x, w = make_rule(n)
    m_old, _ = _moments(x, w, kmax)
    while True:
        n *= 2
        if n > _MAX_NODES:
            raise QuadratureError(
                f"truncated rule failed to converge to {tol:.1e} below {_MAX_NODES} nodes"
            )
        x, w = make_rule(n)
        m_new, m_abs = _moments(x, w, kmax)
        err = float(np.max(np.abs(m_new - m_old) / np.maximum(m_abs, 1e-300)))
        if err < tol:
            return TermRule(x, w), err
        m_old = m_new


def quad_truncated(weight, omega, tol=1e-12, poly_degree=None):
    """Convergence-controlled rule on (lo, omega].

    Finite left endpoints keep their singular exponent via Gauss-Jacobi on
    [lo, omega]; Gaussian terms use composite Gauss-Legendre panels starting
    nine units below their center.  omega == hi falls back to the exact full
    rule.
    """
    lo, hi = weight.interval
    if not (lo < omega <= hi):
        raise ConfigError(f"band edge {omega} outside ({lo}, {hi}]")
    if poly_degree is None:
        poly_degree = 2 * weight.max_polypart_degree() + 8
    if omega == hi:
        full = quad_full(weight, poly_degree)
        return WeightRule(full.term_rules, poly_degree, "truncated", 0.0)
    rules, err = [], 0.0
    for t in weight.terms:
        kmax = poly_degree + t.polypart.degree
        if isinstance(t.factor, ShiftedGaussianFactor):
            span = omega - (t.factor.center - ShiftedGaussianFactor.TAIL)
            if span <= 0:
                rules.append(TermRule(np.zeros(0), np.zeros(0)))
                continue
            start = max(2, int(np.ceil(span / 3.0)))
            rule, e = _converge(lambda p: t.factor.truncated_rule(omega, p), start, kmax, tol)
        else:
            start = max(8, kmax // 2 + 2)
            rule, e = _converge(lambda n: t.factor.truncated_rule(omega, n), start, kmax, tol)
        rules.append(rule)
        err = max(err, e)
    return WeightRule(rules, poly_degree, "truncated", err)
