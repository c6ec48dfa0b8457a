"""Dense real linear algebra at small fixed dimension.

Matrices are plain ``numpy.ndarray`` objects of shape (R, R).  Everything
here is eigendecomposition-based: the dimensions in this package are tiny
(R <= 4, block matrices a few dozen rows), so robustness beats speed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "max_abs",
    "require_symmetric",
    "sym_eig",
    "spd_sqrt",
    "spd_inv_sqrt",
    "AffineSolutionSet",
    "lstsq_affine",
    "MatrixAffineSet",
    "BlockMatrix",
]

RANK_TOL = 1e-10


def max_abs(a):
    """Entrywise sup norm; 0.0 for empty arrays."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def require_symmetric(a, tol=1e-10, what="matrix"):
    """Raise ValueError if ``a`` is not symmetric within ``tol`` relative."""
    a = np.asarray(a, dtype=float)
    defect = max_abs(a - a.T)
    scale = max(max_abs(a), 1e-300)
    if defect > tol * scale:
        raise ValueError(
            f"{what} is not symmetric: defect {defect:.3e} exceeds {tol:.0e} * {scale:.3e}"
        )
    return 0.5 * (a + a.T)


def sym_eig(a, tol=1e-10):
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues ascending, orthonormal eigenvector columns).
    Rejects non-symmetric input with the symmetry defect in the message.
    """
    a = require_symmetric(a, tol=tol, what="sym_eig input")
    w, v = np.linalg.eigh(a)
    return w, v


def spd_sqrt(a, min_eig_tol=1e-13):
    """Symmetric positive definite square root via eigendecomposition."""
    w, v = sym_eig(a)
    if w[-1] <= 0 or w[0] <= min_eig_tol * w[-1]:
        raise ValueError(
            f"matrix is not safely positive definite: min eigenvalue {w[0]:.3e}, "
            f"max eigenvalue {w[-1]:.3e}"
        )
    return (v * np.sqrt(w)) @ v.T


def spd_inv_sqrt(a, min_eig_tol=1e-13):
    """Inverse of the SPD square root."""
    w, v = sym_eig(a)
    if w[-1] <= 0 or w[0] <= min_eig_tol * w[-1]:
        raise ValueError(
            f"matrix is not safely positive definite: min eigenvalue {w[0]:.3e}, "
            f"max eigenvalue {w[-1]:.3e}"
        )
    return (v / np.sqrt(w)) @ v.T


@dataclass
class AffineSolutionSet:
    """Solution set {particular + nullspace * c} of a linear system.

    particular : (k,) minimum-norm least-squares solution
    nullspace  : (k, d) orthonormal columns spanning the numerical kernel
    residual   : euclidean norm of A @ particular - b
    """

    particular: np.ndarray
    nullspace: np.ndarray
    residual: float
    singular_values: np.ndarray = field(default=None, repr=False)

    @property
    def dimension(self):
        return self.nullspace.shape[1]

    def distance(self, v):
        """Euclidean distance from vector ``v`` to the affine set."""
        d = np.asarray(v, dtype=float).ravel() - self.particular
        return float(np.linalg.norm(d - self.nullspace @ (self.nullspace.T @ d)))

    def contains(self, v, tol=1e-8):
        return self.distance(v) <= tol


def lstsq_affine(a, b=None, rank_tol=RANK_TOL):
    """Minimum-norm least squares with nullspace extraction.

    Solves A x ~= b (b defaults to zero, making the system homogeneous) and
    returns the particular solution together with an orthonormal basis of
    {v : ||A v|| <= rank_tol * sigma_max * ||v||}.  A degenerate system
    (A == 0) returns the full space as nullspace.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    m, k = a.shape
    if m < 1:
        raise ValueError("system must have at least one row")
    if b is None:
        b = np.zeros(m)
    b = np.asarray(b, dtype=float).ravel()
    u, s, vt = np.linalg.svd(a, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return AffineSolutionSet(np.zeros(k), np.eye(k), float(np.linalg.norm(b)), s)
    rank = int(np.sum(s > rank_tol * s[0]))
    coeffs = (u.T @ b)[:rank] / s[:rank]
    particular = vt[:rank].T @ coeffs
    nullspace = vt[rank:].T
    residual = float(np.linalg.norm(a @ particular - b))
    return AffineSolutionSet(particular, nullspace, residual, s)


@dataclass
class MatrixAffineSet:
    """Affine set of R x R matrices, wrapping a vectorized AffineSolutionSet."""

    dim: int
    flat: AffineSolutionSet

    @property
    def particular(self):
        return self.flat.particular.reshape(self.dim, self.dim)

    @property
    def basis(self):
        r = self.dim
        return [self.flat.nullspace[:, j].reshape(r, r) for j in range(self.flat.dimension)]

    @property
    def dimension(self):
        return self.flat.dimension

    def distance(self, m):
        return self.flat.distance(np.asarray(m, dtype=float).reshape(-1))

    def contains(self, m, tol=1e-8):
        return self.distance(m) <= tol


class BlockMatrix:
    """Dense square matrix with an (nblocks x nblocks) grid of R x R blocks."""

    def __init__(self, array, block_dim, symmetric=False):
        array = np.asarray(array, dtype=float)
        n = array.shape[0]
        if array.shape != (n, n) or n % block_dim != 0:
            raise ValueError(f"array of shape {array.shape} is not square in {block_dim}-blocks")
        if symmetric:
            array = require_symmetric(a=array, tol=1e-12, what="block matrix")
        self.array = array
        self.block_dim = block_dim
        self.nblocks = n // block_dim

    def block(self, i, j):
        r = self.block_dim
        return self.array[i * r:(i + 1) * r, j * r:(j + 1) * r]

    def eigenvalues(self):
        return np.linalg.eigvalsh(0.5 * (self.array + self.array.T))

    def __repr__(self):
        return f"BlockMatrix(nblocks={self.nblocks}, block_dim={self.block_dim})"
