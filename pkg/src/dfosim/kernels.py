"""Gaussian kernel evaluation, Gram matrices, and kernel-expansion functions.

A function is represented by a coefficient vector over a fixed set of
centers: f(x) = sum_j c_j K(z_j, x).  All functions in one simulation share
the same center set, so mixing and inner products are exact linear algebra
on coefficient vectors against a single cached Gram matrix.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DfoError


@dataclass(frozen=True)
class GaussianKernel:
    """K(x, y) = exp(-||x - y||^2 / bandwidth^2)."""

    bandwidth: float

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise DfoError("bad-bandwidth", f"bandwidth must be positive, got {self.bandwidth}")

    @property
    def kind(self):
        return "gaussian"

    def pairwise(self, X, Y):
        """Kernel matrix between two point sets, shape (len(X), len(Y))."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        if X.shape[1] != Y.shape[1]:
            raise DfoError("dim-mismatch", f"{X.shape[1]} vs {Y.shape[1]} input dimensions")
        sq = np.sum(X * X, axis=1)[:, None] + np.sum(Y * Y, axis=1)[None, :] - 2.0 * (X @ Y.T)
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-sq / self.bandwidth**2)

    def __call__(self, x, y):
        return float(self.pairwise(np.atleast_2d(x), np.atleast_2d(y))[0, 0])


class CenterSet:
    """Ordered, immutable set of expansion centers in R^d."""

    def __init__(self, points):
        pts = np.array(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise DfoError("bad-centers", f"expected 2-d point array, got shape {pts.shape}")
        pts.flags.writeable = False
        self.points = pts
        self._gram_cache = {}

    @property
    def size(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    def index_of(self, x):
        """Index of an exactly matching center, or -1."""
        x = np.asarray(x, dtype=float)
        hits = np.nonzero(np.all(self.points == x[None, :], axis=1))[0]
        return int(hits[0]) if hits.size else -1


def gram_matrix(kernel, centers):
    """Cached Gram matrix G[j, k] = K(z_j, z_k) of a center set.

    Symmetric positive semi-definite up to round-off; duplicated centers are
    allowed and simply make G singular.
    """
    if centers.size == 0:
        raise DfoError("empty-centers")
    key = (kernel.kind, kernel.bandwidth)
    G = centers._gram_cache.get(key)
    if G is None:
        G = kernel.pairwise(centers.points, centers.points)
        G = 0.5 * (G + G.T)
        G.flags.writeable = False
        centers._gram_cache[key] = G
    return G


@dataclass(frozen=True)
class RkhsFunction:
    """Kernel expansion sum_j c_j K(z_j, .) over a shared center set."""

    coefficients: np.ndarray
    centers: CenterSet
    kernel: GaussianKernel

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.shape != (self.centers.size,):
            raise DfoError(
                "bad-coefficients",
                f"expected {self.centers.size} coefficients, got shape {c.shape}",
            )
        if c.flags.writeable:
            c = c.copy()
            c.flags.writeable = False
        object.__setattr__(self, "coefficients", c)

    def evaluate(self, x):
        """Pointwise value f(x) = sum_j c_j K(z_j, x)."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            x = x[None]
        if x.ndim == 1:
            if x.shape[0] != self.centers.dim:
                raise DfoError("dim-mismatch", f"point has dim {x.shape[0]}, centers have dim {self.centers.dim}")
            k = self.kernel.pairwise(self.centers.points, x[None, :])[:, 0]
            return float(self.coefficients @ k)
        if x.shape[1] != self.centers.dim:
            raise DfoError("dim-mismatch", f"points have dim {x.shape[1]}, centers have dim {self.centers.dim}")
        return self.coefficients @ self.kernel.pairwise(self.centers.points, x)

    def norm(self):
        return float(np.sqrt(max(rkhs_inner(self, self), 0.0)))

    def with_coefficients(self, c):
        return RkhsFunction(np.asarray(c, dtype=float), self.centers, self.kernel)


def zero_function(centers, kernel):
    return RkhsFunction(np.zeros(centers.size), centers, kernel)


def atom(centers, kernel, index, weight=1.0):
    """Single-center expansion weight * K(z_index, .)."""
    c = np.zeros(centers.size)
    c[index] = weight
    return RkhsFunction(c, centers, kernel)


def _check_compatible(f, g):
    if f.centers is not g.centers or f.kernel != g.kernel:
        raise DfoError("center-set-mismatch", "functions live on different center sets or kernels")


def rkhs_inner(f, g):
    """Inner product <f, g> = c_f^T G c_g."""
    _check_compatible(f, g)
    G = gram_matrix(f.kernel, f.centers)
    return float(f.coefficients @ G @ g.coefficients)


def evaluate(f, x):
    return f.evaluate(x)


def linear_combine(weights, funcs):
    """Weighted sum of expansions; exact coefficient arithmetic."""
    if len(weights) != len(funcs):
        raise DfoError("bad-weights", f"{len(weights)} weights for {len(funcs)} functions")
    if not funcs:
        raise DfoError("bad-weights", "no functions given")
    base = funcs[0]
    for g in funcs[1:]:
        _check_compatible(base, g)
    coeffs = np.stack([f.coefficients for f in funcs])
    return base.with_coefficients(np.asarray(weights, dtype=float) @ coeffs)


def coefficient_norms(G, V):
    """Row-wise RKHS norms of a coefficient matrix V (rows are functions)."""
    sq = np.einsum("ij,ij->i", V @ G, V)
    return np.sqrt(np.maximum(sq, 0.0))
