"""Centralized reference solvers: they define J(f*) for error curves.

Three routes, deliberately independent of the iteration engines:

* closed-form normal equations for pooled (regularized) least squares,
* plain full-gradient descent with restarts for the robust losses,
* lattice enumeration over small probability simplexes.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DfoError
from .kernels import CenterSet, gram_matrix
from .losses import loss_derivative, loss_value, smoothness_bounds
from .mirror_descent import LinearFunctional


@dataclass
class OracleReport:
    """Reference minimizer plus diagnostics."""

    minimizer: np.ndarray
    value: float
    method: str
    grad_norm: float | None = None
    mu: float | None = None
    notes: list = field(default_factory=list)


def _pooled_weights(locals_data, scale):
    """Per-sample weights w_k = scale / n_i and the stacked data arrays."""
    X = np.vstack([ld.inputs for ld in locals_data])
    y = np.concatenate([ld.outputs for ld in locals_data])
    w = np.concatenate([np.full(ld.n, scale / ld.n) for ld in locals_data])
    return X, y, w


def solve_ls_pooled(kernel, locals_data, lam, scale, quadratic_factor=1.0):
    """Minimize the pooled quadratic objective over the expansion space.

    Objective in coefficients c over the stacked center set:
        (q/2) (Gc - y)^T W (Gc - y) + (lam_bar/2) c^T G c,
    W = diag(scale/n_i), lam_bar = sum_i lam * scale, and q the curvature of
    the quadratic loss (1 for the half-squared convention, 2 for squared).
    With lam > 0 the stationarity system (q W G + lam_bar I) c = q W y has a
    unique solution; with lam = 0 a minimum-norm least-squares solve covers
    singular Gram matrices from duplicated inputs.
    """
    if not locals_data:
        raise DfoError("bad-data", "no data")
    X, y, w = _pooled_weights(locals_data, scale)
    w = quadratic_factor * w
    centers = CenterSet(X)
    G = gram_matrix(kernel, centers)
    N = centers.size
    lam_bar = lam * scale * len(locals_data)
    notes = []
    if lam_bar > 0:
        c = np.linalg.solve(w[:, None] * G + lam_bar * np.eye(N), w * y)
        method = "ls-pooled-normal-equations"
    else:
        sqw = np.sqrt(w)
        c, *_ = np.linalg.lstsq(sqw[:, None] * G, sqw * y, rcond=None)
        method = "ls-pooled-min-norm"
        notes.append("min-norm-solve")
    resid = G @ c - y
    value = 0.5 * float(resid @ (w * resid)) + 0.5 * lam_bar * float(c @ G @ c)
    g = w * resid + lam_bar * c
    grad_norm = float(np.sqrt(max(g @ G @ g, 0.0)))
    mu = lam * scale if lam > 0 else None
    return OracleReport(minimizer=c, value=value, method=method, grad_norm=grad_norm, mu=mu, notes=notes)


def _pooled_value_and_grad(G, y, w, loss, lam_bar, c):
    resid = G @ c - y
    value = float(np.sum(w * loss_value(loss, resid)))
    g = w * loss_derivative(loss, resid)
    if lam_bar:
        value += 0.5 * lam_bar * float(c @ G @ c)
        g = g + lam_bar * c
    return value, g


def solve_centralized_gd(global_risk, iters=4000, eta=None, restarts=0, seed=0, tol=1e-10):
    """Full-gradient descent on the pooled objective, best over restarts.

    Starts at zero plus ``restarts`` random initializations; the lowest final
    objective wins, ties going to the earliest start.  For nonconvex losses
    the result is flagged as possibly a local minimum.
    """
    if iters < 1:
        raise DfoError("bad-horizon", "iters must be >= 1")
    G = global_risk.gram
    N = global_risk.n_centers
    y = np.concatenate([r.data.outputs for r in global_risk.locals])
    order = np.concatenate(global_risk.indices)
    if not np.array_equal(np.sort(order), np.arange(N)):
        raise DfoError("center-not-registered", "oracle needs data indices covering the center set")
    inv = np.empty(N, dtype=int)
    inv[order] = np.arange(N)
    y = y[inv]
    w = np.concatenate([np.full(r.data.n, r.scale / r.data.n) for r in global_risk.locals])[inv]
    loss = global_risk.locals[0].loss
    if any(r.loss != loss for r in global_risk.locals):
        raise DfoError("bad-data", "pooled descent assumes one loss kind")
    lam_bar = global_risk.lam_total

    if eta is None:
        # Gradient-Lipschitz bound in the expansion space:
        # L <= curv * lmax(sqrt(W) G sqrt(W)) + lam_bar <= curv*lmax(G)*max(w) + lam_bar.
        lmax = float(np.linalg.eigvalsh(G)[-1])
        curv = smoothness_bounds(loss).curvature
        eta = 1.0 / (2.0 * (curv * lmax * float(np.max(w)) + lam_bar))

    rng = np.random.default_rng(seed)
    starts = [np.zeros(N)]
    for _ in range(restarts):
        starts.append(rng.standard_normal(N) / np.sqrt(N))

    finals = []
    for c0 in starts:
        c = c0.copy()
        for _ in range(iters):
            value, g = _pooled_value_and_grad(G, y, w, loss, lam_bar, c)
            gnorm_sq = g @ G @ g
            if gnorm_sq <= tol * tol:
                break
            c = c - eta * g
        value, g = _pooled_value_and_grad(G, y, w, loss, lam_bar, c)
        finals.append((value, c, float(np.sqrt(max(g @ G @ g, 0.0)))))

    values = [v for v, _, _ in finals]
    best = int(np.argmin(values))
    value, c, grad_norm = finals[best]
    notes = [f"restart-spread={max(values) - min(values):.3e}"]
    if not loss.convex:
        notes.append("possibly-local-minimum")
    lam0 = global_risk.locals[0].lam
    mu = lam0 * global_risk.locals[0].scale if (lam0 > 0 and loss.convex) else None
    return OracleReport(
        minimizer=c, value=value, method="centralized-gd", grad_norm=grad_norm, mu=mu, notes=notes
    )


def _simplex_lattice(n, r):
    """All integer compositions of r into n parts, as an array of weights."""
    if n == 1:
        return np.array([[float(r)]]) / r
    rows = []

    def rec(prefix, remaining, parts_left):
        if parts_left == 1:
            rows.append(prefix + [remaining])
            return
        for k in range(remaining + 1):
            rec(prefix + [k], remaining - k, parts_left - 1)

    rec([], r, n)
    return np.asarray(rows, dtype=float) / r


def brute_force_simplex(functional, resolution=100):
    """Grid search over the simplex; exact vertex enumeration for linear costs.

    ``functional`` may be a single convex functional or a list (summed).
    """
    funcs = list(functional) if isinstance(functional, (list, tuple)) else [functional]
    n = funcs[0].size
    if n > 4:
        raise DfoError("simplex-too-large", f"grid search supports n <= 4, got {n}")
    if resolution < 10:
        raise DfoError("bad-resolution", f"resolution must be >= 10, got {resolution}")

    def total(P):
        out = np.zeros(P.shape[0])
        for fl in funcs:
            out += fl.value(P)
        return out

    if all(isinstance(fl, LinearFunctional) for fl in funcs):
        costs = np.sum([fl.costs for fl in funcs], axis=0)
        j = int(np.argmin(costs))
        best = np.zeros(n)
        best[j] = 1.0
        return OracleReport(
            minimizer=best, value=float(costs[j]), method="simplex-vertex-enumeration"
        )

    lattice = _simplex_lattice(n, resolution)
    vals = total(lattice)
    j = int(np.argmin(vals))
    return OracleReport(
        minimizer=lattice[j], value=float(vals[j]), method=f"simplex-lattice-r{resolution}"
    )
