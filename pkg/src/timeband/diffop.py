"""Second-order matrix differential operators acting from the right.

An operator D with polynomial coefficients (f2, f1, f0) acts on a matrix
polynomial P as (P D)(x) = P''(x) f2(x) + P'(x) f1(x) + P(x) f0(x).  In
operator products the leftmost factor acts first, the unique convention under
which x D = D x + 2 d/dx f2 + f1 holds for right-acting operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import lstsq_affine, max_abs
from .matpoly import MatrixPolynomial, mp_const, mp_zero
from .weights import MatrixWeight, chebyshev_points

__all__ = [
    "RightDiffOp",
    "apply_right",
    "monic_eigenvalue",
    "mul_x_left",
    "SymmetryReport",
    "check_symmetry",
    "solve_symmetric_operator",
]


class RightDiffOp:
    def __init__(self, f2, f1, f0, label=""):
        f2, f1, f0 = (c if isinstance(c, MatrixPolynomial) else MatrixPolynomial(c)
                      for c in (f2, f1, f0))
        if not (f2.dim == f1.dim == f0.dim):
            raise ValueError("coefficient dimensions differ")
        self.f2, self.f1, self.f0 = f2, f1, f0
        self.label = label

    @property
    def dim(self):
        return self.f2.dim

    def is_classical_shape(self):
        """deg f2 <= 2, deg f1 <= 1, f0 constant: the shape with closed-form
        monic eigenvalues."""
        return (self.f2.degree <= 2 or self.f2.is_zero()) and \
            (self.f1.degree <= 1 or self.f1.is_zero()) and \
            (self.f0.degree == 0)

    def __add__(self, other):
        return RightDiffOp(self.f2 + other.f2, self.f1 + other.f1, self.f0 + other.f0)

    def __sub__(self, other):
        return RightDiffOp(self.f2 - other.f2, self.f1 - other.f1, self.f0 - other.f0)

    def scale(self, c):
        return RightDiffOp(self.f2.scale(c), self.f1.scale(c), self.f0.scale(c), self.label)

    def shift_identity(self, c):
        """D + c * I as an operator (adds c * I to the order-zero coefficient)."""
        return RightDiffOp(self.f2, self.f1, self.f0 + mp_const(np.eye(self.dim) * c))

    def allclose(self, other, tol=1e-12):
        return (self.f2.allclose(other.f2, tol) and self.f1.allclose(other.f1, tol)
                and self.f0.allclose(other.f0, tol))

    def max_abs_coeff(self):
        return max(self.f2.max_abs_coeff(), self.f1.max_abs_coeff(), self.f0.max_abs_coeff())

    def __repr__(self):
        return (f"RightDiffOp(label={self.label!r}, dim={self.dim}, "
                f"deg=({self.f2.degree},{self.f1.degree},{self.f0.degree}))")


def apply_right(p, op):
    """(P D)(x) = P'' f2 + P' f1 + P f0, by exact coefficient arithmetic."""
    return (p.deriv(2).matmul(op.f2) + p.deriv().matmul(op.f1) + p.matmul(op.f0))


def monic_eigenvalue(op, n):
    """Eigenvalue matrix of the degree-n monic orthogonal polynomial:
    n(n-1) f2[x^2] + n f1[x] + f0."""
    if not op.is_classical_shape():
        raise ValueError(
            f"operator {op.label!r} does not have the classical shape "
            f"(deg f2 <= 2, deg f1 <= 1, deg f0 = 0); coefficient degrees are "
            f"({op.f2.degree}, {op.f1.degree}, {op.f0.degree})"
        )
    return n * (n - 1) * op.f2.coeff(2) + n * op.f1.coeff(1) + op.f0.coeff(0)


def mul_x_left(op):
    """The operator P -> (x P) D; coefficients (x f2, x f1 + 2 f2, x f0 + f1)."""
    return RightDiffOp(
        op.f2.shift(),
        op.f1.shift() + op.f2.scale(2.0),
        op.f0.shift() + op.f1,
    )


@dataclass
class SymmetryReport:
    """Residuals of the pointwise symmetry identities and boundary defects."""

    eq_residuals: tuple          # three sup-relative residuals
    boundary_defects: tuple      # (lo: (f2w, f1w-skew), hi: (...)) relative defects
    band_edge_defects: tuple     # at omega for the truncated variant, else ()
    tolerance: float
    boundary_tolerance: float

    @property
    def verdict(self):
        ok = all(r < self.tolerance for r in self.eq_residuals)
        flat = [d for pair in self.boundary_defects for d in pair]
        flat += list(self.band_edge_defects)
        return ok and all(d < self.boundary_tolerance for d in flat)

    def worst(self):
        flat = [d for pair in self.boundary_defects for d in pair] + list(self.band_edge_defects)
        return max(list(self.eq_residuals) + flat)


def _identity_residuals(op, weight, xs):
    """Pointwise residual matrices of the three symmetry identities, plus scales."""
    w = weight._eval_unchecked(xs)
    w1 = weight.deriv(xs, 1)
    w2 = weight.deriv(xs, 2)
    f2, f1, f0 = op.f2(xs), op.f1(xs), op.f0(xs)
    f2p, f2pp = op.f2.deriv()(xs), op.f2.deriv(2)(xs)
    f1p = op.f1.deriv()(xs)

    tr = lambda a: a.transpose(0, 2, 1)
    e1 = f2 @ w - w @ tr(f2)
    d_f2w = f2p @ w + f2 @ w1
    e2 = 2 * d_f2w - f1 @ w - w @ tr(f1)
    dd_f2w = f2pp @ w + 2 * f2p @ w1 + f2 @ w2
    d_f1w = f1p @ w + f1 @ w1
    e3 = dd_f2w - d_f1w + f0 @ w - w @ tr(f0)

    s1 = max(max_abs(f2 @ w), 1e-300)
    s2 = max(max_abs(d_f2w), max_abs(f1 @ w), 1e-300)
    s3 = max(max_abs(dd_f2w), max_abs(d_f1w), max_abs(f0 @ w), 1e-300)
    return (max_abs(e1) / s1, max_abs(e2) / s2, max_abs(e3) / s3)


def _aitken_limit(values):
    """Accelerated limit of a (matrix-normed) sequence; falls back to the
    final value when the increments vanish."""
    v = np.asarray(values, dtype=float)
    if len(v) < 3:
        return abs(v[-1])
    acc = v[-1]
    d1, d2 = v[-1] - v[-2], v[-2] - v[-3]
    denom = d1 - d2
    if abs(denom) > 1e-300:
        acc = v[-1] - d1 * d1 / denom
    return abs(acc)


def _boundary_defects(op, weight, endpoint, side, scale_f2w, scale_f1w):
    """Extrapolated limits of f2 W and the skew part of f1 W at an endpoint."""
    if not np.isfinite(endpoint):
        # gaussian decay kills any polynomial coefficient
        return (0.0, 0.0)
    lo, hi = weight.sample_window()
    span = hi - lo
    hs = span * 2.0 ** -np.arange(10, 31, dtype=float)
    xs = endpoint + hs if side == "lo" else endpoint - hs
    w = weight._eval_unchecked(xs)
    f2w = op.f2(xs) @ w
    f1w = op.f1(xs) @ w
    skew = f1w - f1w.transpose(0, 2, 1)
    # xs runs toward the endpoint, so the sequences run toward their limits
    d1 = _aitken_limit([max_abs(f2w[i]) for i in range(len(xs))])
    d2 = _aitken_limit([max_abs(skew[i]) for i in range(len(xs))])
    return (d1 / scale_f2w, d2 / scale_f1w)


def check_symmetry(op, weight, omega=None, tol=1e-8, boundary_tol=1e-7, npoints=64):
    """Verify the pointwise symmetry identities and boundary conditions.

    With ``omega`` set, additionally checks the band-edge limits that make the
    operator symmetric on the truncated interval (lo, omega].
    """
    lo, hi = weight.sample_window()
    xs = chebyshev_points(lo, hi, npoints)
    eq = _identity_residuals(op, weight, xs)

    w = weight._eval_unchecked(xs)
    sf2 = max(max_abs(op.f2(xs) @ w), 1e-300)
    f1w = op.f1(xs) @ w
    sf1 = max(max_abs(f1w), 1e-300)
    defects = (
        _boundary_defects(op, weight, weight.lo, "lo", sf2, sf1),
        _boundary_defects(op, weight, weight.hi, "hi", sf2, sf1),
    )
    band = ()
    if omega is not None:
        if not (weight.lo < omega <= weight.hi):
            raise ValueError(f"band edge {omega} outside the weight interval")
        wom = weight._eval_unchecked(omega)
        f2w = op.f2(np.float64(omega)) @ wom
        f1w_om = op.f1(np.float64(omega)) @ wom
        band = (max_abs(f2w) / sf2, max_abs(f1w_om - f1w_om.T) / sf1)
    return SymmetryReport(eq, defects, band, tol, boundary_tol)


def _operator_from_vector(u, dim, degrees):
    """Unpack a coefficient vector into an operator; `degrees = (d2, d1, d0)`."""
    sizes = [(d + 1) * dim * dim for d in degrees]
    parts = np.split(np.asarray(u, dtype=float), np.cumsum(sizes)[:-1])
    polys = [MatrixPolynomial(p.reshape(d + 1, dim, dim)) for p, d in zip(parts, degrees)]
    return RightDiffOp(*polys)


def _vector_from_operator(op, degrees):
    dim = op.dim
    out = []
    for poly, d in zip((op.f2, op.f1, op.f0), degrees):
        c = np.zeros((d + 1, dim, dim))
        c[:poly.degree + 1] = poly.coeffs[:d + 1]
        out.append(c.reshape(-1))
    return np.concatenate(out)


def solve_symmetric_operator(weight, degrees=(2, 1, 0), pinned=None, npoints=None):
    """Linear solve for operators symmetric with respect to ``weight``.

    Unknowns are the coefficient entries of (f2, f1, f0) up to the given
    degrees.  Rows impose the three symmetry identities at interior Chebyshev
    points plus, at finite endpoints whose factor exponent is <= 0, the
    vanishing of the endpoint values of f2*rho and the skew part of f1*rho
    (the boundary conditions for the singular-factor form).  ``pinned`` maps
    coefficient positions (j, k) with j in {2,1,0} and power k to fixed
    matrices, e.g. the entries determined by a prescribed eigenvalue sequence.

    Returns (AffineSolutionSet over the coefficient vector, unpack) where
    ``unpack`` turns a coefficient vector into a RightDiffOp.
    """
    dim = weight.dim
    pinned = dict(pinned or {})
    d2, d1, d0 = degrees
    nunk = (d2 + d1 + d0 + 3) * dim * dim
    if npoints is None:
        deg_rows = max(t.polypart.degree for t in weight.terms) + max(degrees) + 4
        npoints = max(3 * (deg_rows + 1), 40)
    lo, hi = weight.sample_window()
    xs = chebyshev_points(lo, hi, npoints)
    w = weight._eval_unchecked(xs)
    w1 = weight.deriv(xs, 1)
    w2 = weight.deriv(xs, 2)
    tr = lambda a: a.transpose(0, 2, 1)

    def rows_for(u):
        op = _operator_from_vector(u, dim, degrees)
        f2, f1, f0 = op.f2(xs), op.f1(xs), op.f0(xs)
        f2p, f2pp = op.f2.deriv()(xs), op.f2.deriv(2)(xs)
        f1p = op.f1.deriv()(xs)
        e1 = f2 @ w - w @ tr(f2)
        e2 = 2 * (f2p @ w + f2 @ w1) - f1 @ w - w @ tr(f1)
        e3 = (f2pp @ w + 2 * f2p @ w1 + f2 @ w2) - (f1p @ w + f1 @ w1) + f0 @ w - w @ tr(f0)
        pieces = [e1.ravel(), e2.ravel(), e3.ravel()]
        # boundary rows at finite endpoints with non-positive factor exponent
        for endpoint in (weight.lo, weight.hi):
            if not np.isfinite(endpoint):
                continue
            for t in weight.terms:
                if t.factor.exponent_at(endpoint) > 0:
                    continue
                rho = t.polypart(np.float64(endpoint))
                f2e = op.f2(np.float64(endpoint)) @ rho
                f1e = op.f1(np.float64(endpoint)) @ rho
                pieces.append(f2e.ravel())
                pieces.append((f1e - f1e.T).ravel())
        return np.concatenate(pieces)

    # pin coefficients by substitution: base vector carries them, unknown
    # directions exclude them
    base = np.zeros(nunk)
    mask = np.ones(nunk, dtype=bool)
    offsets = {2: 0, 1: (d2 + 1) * dim * dim, 0: (d2 + d1 + 2) * dim * dim}
    for (j, k), value in pinned.items():
        sl = slice(offsets[j] + k * dim * dim, offsets[j] + (k + 1) * dim * dim)
        base[sl] = np.asarray(value, dtype=float).ravel()
        mask[sl] = False

    b0 = rows_for(base)
    cols = []
    idx = np.nonzero(mask)[0]
    for i in idx:
        e = base.copy()
        e[i] += 1.0
        cols.append(rows_for(e) - b0)
    a = np.array(cols).T
    sol = lstsq_affine(a, -b0)

    def unpack(free_vector):
        u = base.copy()
        u[idx] = free_vector
        return _operator_from_vector(u, dim, degrees)

    return sol, unpack
