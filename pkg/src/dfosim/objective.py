"""Per-agent empirical risks over a shared kernel expansion space.

A local risk is  scale * [ (1/n_i) sum_s loss(f(x_s) - y_s) + (lam/2) ||f||^2 ].
Its derivative is an explicit kernel expansion supported on the agent's own
data points (plus the dense regularizer term), so gradients are coefficient
updates confined to the agent's block of the global center set.

``GlobalRisk`` bundles the m local risks and provides the batched,
coefficient-matrix forms of the value/gradient maps the engines consume.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DfoError
from .kernels import RkhsFunction, coefficient_norms, gram_matrix
from .losses import loss_derivative, loss_value, smoothness_bounds


@dataclass(frozen=True)
class LocalData:
    """One agent's (inputs, outputs) slice."""

    inputs: np.ndarray
    outputs: np.ndarray
    agent_id: int

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        y = np.asarray(self.outputs, dtype=float).ravel()
        if X.shape[0] != y.shape[0]:
            raise DfoError("bad-data", f"{X.shape[0]} inputs vs {y.shape[0]} outputs")
        if X.shape[0] < 1:
            raise DfoError("bad-data", "agent needs at least one sample")
        X.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "inputs", X)
        object.__setattr__(self, "outputs", y)

    @property
    def n(self):
        return self.outputs.shape[0]


@dataclass(frozen=True)
class LocalRisk:
    """Empirical risk of one agent, with an explicit objective multiplier.

    ``scale`` makes the summed-versus-averaged objective convention explicit:
    the experiment presets use scale = 1/m so that the sum over agents equals
    the mean-of-means objective.  It multiplies both the value and the
    gradient, so with constant steps it changes the effective step size.
    """

    data: LocalData
    loss: object
    lam: float = 0.0
    scale: float = 1.0
    center_indices: np.ndarray | None = None

    def __post_init__(self):
        if self.lam < 0:
            raise DfoError("bad-lambda", f"lam must be nonnegative, got {self.lam}")
        if self.center_indices is not None:
            idx = np.asarray(self.center_indices, dtype=int)
            idx.flags.writeable = False
            object.__setattr__(self, "center_indices", idx)

    def resolved_indices(self, centers):
        """Indices of this agent's inputs inside the global center set."""
        if self.center_indices is not None:
            idx = self.center_indices
            if idx.size != self.data.n or idx.min() < 0 or idx.max() >= centers.size:
                raise DfoError("center-not-registered", f"agent {self.data.agent_id}: bad index array")
            return idx
        idx = np.empty(self.data.n, dtype=int)
        for s, x in enumerate(self.data.inputs):
            j = centers.index_of(x)
            if j < 0:
                raise DfoError(
                    "center-not-registered",
                    f"agent {self.data.agent_id}: data point {s} is not a center",
                )
            idx[s] = j
        return idx

    def value(self, f):
        resid = f.evaluate(self.data.inputs) - self.data.outputs
        fit = float(np.sum(loss_value(self.loss, resid))) / self.data.n
        reg = 0.5 * self.lam * f.norm() ** 2 if self.lam else 0.0
        return self.scale * (fit + reg)

    def gradient(self, f):
        """Derivative as a function on the same center set."""
        idx = self.resolved_indices(f.centers)
        resid = f.evaluate(self.data.inputs) - self.data.outputs
        if self.lam:
            g = self.lam * self.scale * np.asarray(f.coefficients, dtype=float)
        else:
            g = np.zeros(f.centers.size)
        np.add.at(g, idx, self.scale * loss_derivative(self.loss, resid) / self.data.n)
        return f.with_coefficients(g)


def risk_value(risk, f):
    return risk.value(f)


def frechet_gradient(risk, f):
    return risk.gradient(f)


def directional_fd_check(risk, f, direction, h):
    """Relative mismatch between a centered difference and <gradient, dir>."""
    if not h > 0:
        raise DfoError("bad-step", "finite-difference step must be positive")
    from .kernels import rkhs_inner

    plus = f.with_coefficients(f.coefficients + h * direction.coefficients)
    minus = f.with_coefficients(f.coefficients - h * direction.coefficients)
    fd = (risk.value(plus) - risk.value(minus)) / (2.0 * h)
    exact = rkhs_inner(risk.gradient(f), direction)
    return abs(fd - exact) / (abs(exact) + 1e-12)


class GlobalRisk:
    """Sum of local risks plus batched forms over coefficient matrices.

    Rows of a coefficient matrix C are per-agent states.  All batched methods
    are pure and evaluation-order independent.
    """

    def __init__(self, locals_, kernel, centers):
        if not locals_:
            raise DfoError("bad-data", "no local risks")
        self.locals = tuple(locals_)
        self.kernel = kernel
        self.centers = centers
        self.gram = gram_matrix(kernel, centers)
        self.indices = [r.resolved_indices(centers) for r in self.locals]
        self._unique_idx = [np.unique(ix).size == ix.size for ix in self.indices]
        self._blocks = [self.gram[np.ix_(ix, ix)] for ix in self.indices]
        self.lam_total = float(sum(r.lam * r.scale for r in self.locals))

    @property
    def m(self):
        return len(self.locals)

    @property
    def n_centers(self):
        return self.centers.size

    def function(self, coeffs):
        return RkhsFunction(np.asarray(coeffs, dtype=float), self.centers, self.kernel)

    def value(self, f):
        return float(sum(r.value(f) for r in self.locals))

    def gradient(self, f):
        g = np.zeros(self.centers.size)
        for r in self.locals:
            g += r.gradient(f).coefficients
        return f.with_coefficients(g)

    # ---- batched engine interface ------------------------------------

    def local_gradient_matrix(self, C):
        """Row i is the coefficient vector of agent i's own gradient at C[i]."""
        G = self.gram
        out = np.zeros_like(C)
        for i, (r, idx) in enumerate(zip(self.locals, self.indices)):
            if r.lam:
                out[i] = r.lam * r.scale * C[i]
            resid = C[i] @ G[:, idx] - r.data.outputs
            vals = r.scale * loss_derivative(r.loss, resid) / r.data.n
            if self._unique_idx[i]:
                out[i, idx] += vals
            else:
                np.add.at(out[i], idx, vals)
        return out

    def local_gradient_norms_given(self, C, grads):
        """RKHS norms of per-agent gradients already assembled by
        :meth:`local_gradient_matrix` (avoids recomputing residuals)."""
        G = self.gram
        norms = np.empty(self.m)
        for i, (r, idx) in enumerate(zip(self.locals, self.indices)):
            if r.lam:
                g = grads[i]
                sq = g @ G @ g
            else:
                g = grads[i, idx]
                sq = g @ self._blocks[i] @ g
            norms[i] = np.sqrt(max(sq, 0.0))
        return norms

    def local_gradient_norms(self, C):
        """RKHS norms of each agent's own gradient at its own state."""
        return self.local_gradient_norms_given(C, self.local_gradient_matrix(C))

    def values_at_states(self, C):
        """Full objective J evaluated at every row of C."""
        G = self.gram
        out = np.zeros(C.shape[0])
        for r, idx in zip(self.locals, self.indices):
            resid = C @ G[:, idx] - r.data.outputs[None, :]
            out += r.scale * np.sum(loss_value(r.loss, resid), axis=1) / r.data.n
        if self.lam_total:
            out += 0.5 * self.lam_total * np.einsum("ij,jk,ik->i", C, G, C)
        return out

    def gradient_matrix_at_states(self, C):
        """Row i is the coefficient vector of the full gradient of J at C[i]."""
        G = self.gram
        out = self.lam_total * C if self.lam_total else np.zeros_like(C)
        for i, (r, idx) in enumerate(zip(self.locals, self.indices)):
            resid = C @ G[:, idx] - r.data.outputs[None, :]
            vals = r.scale * loss_derivative(r.loss, resid) / r.data.n
            if self._unique_idx[i]:
                out[:, idx] += vals
            else:
                np.add.at(out, (slice(None), idx), vals)
        return out

    def global_gradient_norms(self, C):
        return coefficient_norms(self.gram, self.gradient_matrix_at_states(C))

    def consensus_errors(self, C):
        """RKHS distance of each row from the row average."""
        return coefficient_norms(self.gram, C - C.mean(axis=0, keepdims=True))

    def smoothness_constant(self):
        """Certified gradient-Lipschitz bound max_i scale*(curv*lmax(G_i)/n_i + lam_i)."""
        best = 0.0
        for r, block in zip(self.locals, self._blocks):
            lmax = float(np.linalg.eigvalsh(block)[-1])
            curv = smoothness_bounds(r.loss).curvature
            best = max(best, r.scale * (curv * lmax / r.data.n + r.lam))
        return best


def global_value(global_risk, f):
    return global_risk.value(f)
