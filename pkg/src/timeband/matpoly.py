"""Polynomials with square matrix coefficients.

A MatrixPolynomial stores coefficients C_0 ... C_d and evaluates as
P(x) = sum_k C_k x^k with the coefficient matrices multiplying on the left.

The monomial basis is numerically hostile for orthogonal polynomials of
degree ~10+ (coefficient-to-value condition numbers reach 1e7 and beyond),
so every polynomial carries a compensated low-order coefficient correction
alongside the float64 coefficients, and arithmetic propagates it with
error-free transformations.  Evaluation uses compensated Horner.  The public
coefficients remain plain float64 matrices; the correction only restores the
digits that a single float64 array cannot represent.
"""

from __future__ import annotations

import numpy as np

__all__ = ["MatrixPolynomial", "mp_zero", "mp_const", "mp_x", "compensated_sum"]

_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant for float64


def _two_sum(a, b):
    s = a + b
    z = s - a
    return s, (a - (s - z)) + (b - z)


def _two_prod(a, b):
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    d = _SPLIT * b
    bh = d - (d - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _sum2(terms, axis=0):
    """Pairwise summation along ``axis`` returning (sum, error-term)."""
    t = np.moveaxis(np.asarray(terms, dtype=float), axis, 0)
    err = np.zeros(t.shape[1:])
    while t.shape[0] > 1:
        half = t.shape[0] // 2
        s, e = _two_sum(t[:half], t[half:2 * half])
        err += e.sum(axis=0)
        t = np.concatenate([s, t[-1:]]) if t.shape[0] % 2 else s
    return t[0], err


def compensated_sum(terms, axis=0):
    """Summation along ``axis`` accurate to ~eps * |result| under cancellation."""
    s, e = _sum2(terms, axis)
    return s + e


def dd_matmul(ahi, alo, bhi, blo):
    """Matrix product of (value, correction) pairs over the last two axes."""
    prods, perr = _two_prod(ahi[..., :, :, None], bhi[..., None, :, :])
    hi, serr = _sum2(prods, axis=-2)
    lo = serr + perr.sum(axis=-2)
    if alo is not None:
        lo = lo + alo @ bhi
    if blo is not None:
        lo = lo + ahi @ blo
    return hi, lo


class MatrixPolynomial:
    def __init__(self, coeffs, lo=None):
        """coeffs: array-like of shape (d+1, R, R), index k holding the x^k block."""
        c = np.asarray(coeffs, dtype=float)
        if c.ndim == 1:
            c = c.reshape(-1, 1, 1)
        if c.ndim != 3 or c.shape[1] != c.shape[2]:
            raise ValueError(f"coefficients must have shape (d+1, R, R), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        if lo is None:
            lo = np.zeros_like(c)
        else:
            lo = np.asarray(lo, dtype=float)
            if lo.shape != c.shape:
                raise ValueError("correction array must match the coefficient shape")
        # drop exactly-zero leading blocks, keeping at least the constant term
        d = c.shape[0] - 1
        while d > 0 and not (c[d].any() or lo[d].any()):
            d -= 1
        self.coeffs = c[:d + 1].copy()
        self._lo = lo[:d + 1].copy()
        self.coeffs.setflags(write=False)
        self._lo.setflags(write=False)

    @property
    def dim(self):
        return self.coeffs.shape[1]

    @property
    def degree(self):
        """Degree of the stored representation; the zero polynomial has degree 0."""
        return self.coeffs.shape[0] - 1

    def is_zero(self):
        return not (self.coeffs.any() or self._lo.any())

    def __call__(self, x):
        """Evaluate by compensated Horner. Scalar x -> (R,R); array x -> (m,R,R)."""
        out, err = self.call2(x)
        return out + err

    def call2(self, x):
        """Evaluation returning the unfolded (value, correction) pair."""
        xs = np.asarray(x, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs)[:, None, None]
        m = xs.shape[0]
        out = np.broadcast_to(self.coeffs[-1], (m, self.dim, self.dim)).copy()
        err = np.broadcast_to(self._lo[-1], (m, self.dim, self.dim)).copy()
        for k in range(self.degree - 1, -1, -1):
            p, e1 = _two_prod(out, xs)
            out, e2 = _two_sum(p, self.coeffs[k])
            err = err * xs + (e1 + e2 + self._lo[k])
        if scalar:
            return out[0], err[0]
        return out, err

    def deriv(self, order=1):
        hi, lo = self.coeffs, self._lo
        for _ in range(order):
            if hi.shape[0] == 1:
                hi = np.zeros((1, self.dim, self.dim))
                lo = np.zeros_like(hi)
                break
            k = np.arange(1, hi.shape[0], dtype=float)[:, None, None]
            hi, e = _two_prod(hi[1:], k)
            lo = e + lo[1:] * k
        return MatrixPolynomial(hi, lo)

    def shift(self, k=1):
        """Multiply by x^k."""
        pad = np.zeros((k, self.dim, self.dim))
        return MatrixPolynomial(np.concatenate([pad, self.coeffs]),
                                np.concatenate([pad, self._lo]))

    def _padded(self, n):
        hi = np.zeros((n, self.dim, self.dim))
        lo = np.zeros_like(hi)
        hi[:self.coeffs.shape[0]] = self.coeffs
        lo[:self.coeffs.shape[0]] = self._lo
        return hi, lo

    def __add__(self, other):
        n = max(self.coeffs.shape[0], other.coeffs.shape[0])
        ahi, alo = self._padded(n)
        bhi, blo = other._padded(n)
        s, e = _two_sum(ahi, bhi)
        return MatrixPolynomial(s, e + alo + blo)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return MatrixPolynomial(-self.coeffs, -self._lo)

    def scale(self, c):
        p, e = _two_prod(self.coeffs, float(c))
        return MatrixPolynomial(p, e + self._lo * float(c))

    def lmul(self, a):
        """Constant matrix times polynomial: A @ P(x)."""
        a = np.asarray(a, dtype=float)
        prods, perr = _two_prod(a[None, :, :, None], self.coeffs[:, None, :, :])
        hi, serr = _sum2(prods, axis=2)
        lo = serr + perr.sum(axis=2) + np.einsum("ij,kjl->kil", a, self._lo)
        return MatrixPolynomial(hi, lo)

    def rmul(self, a):
        """Polynomial times constant matrix: P(x) @ A."""
        a = np.asarray(a, dtype=float)
        prods, perr = _two_prod(self.coeffs[:, :, :, None], a[None, None, :, :])
        hi, serr = _sum2(prods, axis=2)
        lo = serr + perr.sum(axis=2) + np.einsum("kij,jl->kil", self._lo, a)
        return MatrixPolynomial(hi, lo)

    def matmul(self, other):
        """Polynomial product P(x) @ Q(x) with matrix coefficient products."""
        na, nb = self.coeffs.shape[0], other.coeffs.shape[0]
        r = self.dim
        # T[a, b, i, s, j] = P_a[i, s] * Q_b[s, j]
        prods, perr = _two_prod(self.coeffs[:, None, :, :, None],
                                other.coeffs[None, :, None, :, :])
        cross = (np.einsum("ais,bsj->abij", self.coeffs, other._lo)
                 + np.einsum("ais,bsj->abij", self._lo, other.coeffs))
        hi = np.zeros((na + nb - 1, r, r))
        lo = np.zeros_like(hi)
        for a in range(na):
            for b in range(nb):
                s, e = _sum2(prods[a, b], axis=1)
                hi_k, e2 = _two_sum(hi[a + b], s)
                hi[a + b] = hi_k
                lo[a + b] += e + e2 + perr[a, b].sum(axis=1) + cross[a, b]
        return MatrixPolynomial(hi, lo)

    def transpose(self):
        return MatrixPolynomial(self.coeffs.transpose(0, 2, 1), self._lo.transpose(0, 2, 1))

    def coeff(self, k):
        r = self.dim
        return self.coeffs[k] if k <= self.degree else np.zeros((r, r))

    def max_abs_coeff(self):
        return float(np.max(np.abs(self.coeffs)))

    def allclose(self, other, tol=1e-12):
        """Coefficientwise comparison, absolute tolerance scaled by the larger poly."""
        scale = max(self.max_abs_coeff(), other.max_abs_coeff(), 1.0)
        return (self - other).max_abs_coeff() <= tol * scale

    def __repr__(self):
        return f"MatrixPolynomial(dim={self.dim}, degree={self.degree})"


def mp_zero(dim):
    return MatrixPolynomial(np.zeros((1, dim, dim)))


def mp_const(a):
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    return MatrixPolynomial(a[None, :, :])


def mp_x(dim, coeff=None):
    """The polynomial x * C (C defaults to the identity)."""
    c = np.eye(dim) if coeff is None else np.asarray(coeff, dtype=float)
    return MatrixPolynomial(np.stack([np.zeros((dim, dim)), c]))
