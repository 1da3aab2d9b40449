"""Decentralized mirror descent with pluggable geometry.

The update runs in four stages per agent: map the state to the dual space,
take the gradient step there, map back, project onto the decision domain,
then gossip-average with the neighbors.  Two geometries are provided:

* quadratic over the kernel expansion space (dual map is the identity, the
  Bregman divergence is half the squared norm, ball projection is radial),
  under which the iteration collapses to plain distributed gradient descent;
* negative entropy over the probability simplex (dual map 1 + log p, KL
  divergence, normalization as the KL projection), under which the iteration
  collapses to a distributed multiplicative-weights update.

States are stacked row-wise: an (m, n) array holds one state per agent.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DfoError
from .kernels import coefficient_norms
from .network import require_mixing_matrix
from .trajectory import Recorder

WEIGHT_FLOOR = 1e-300


@dataclass(frozen=True)
class DecisionDomain:
    """Feasible set: whole space, a norm ball, or the probability simplex."""

    kind: str
    radius: float | None = None
    size: int | None = None


def whole_space():
    return DecisionDomain("whole-space")


def rkhs_ball(radius):
    if not radius > 0:
        raise DfoError("bad-domain", f"ball radius must be positive, got {radius}")
    return DecisionDomain("rkhs-ball", radius=radius)


def probability_simplex(size):
    if size < 2:
        raise DfoError("bad-domain", f"simplex needs size >= 2, got {size}")
    return DecisionDomain("probability-simplex", size=size)


class QuadraticGeometry:
    """Mirror map half the squared RKHS norm; modulus 1, identity dual maps."""

    sigma = 1.0
    kind = "quadratic"

    def __init__(self, gram):
        self.gram = np.asarray(gram, dtype=float)

    def forward(self, X):
        return X

    def inverse(self, Q):
        return Q

    def bregman(self, X, Y):
        D = np.atleast_2d(X) - np.atleast_2d(Y)
        return 0.5 * coefficient_norms(self.gram, D) ** 2

    def project(self, domain, X):
        if domain.kind == "whole-space":
            return X
        if domain.kind == "rkhs-ball":
            norms = coefficient_norms(self.gram, np.atleast_2d(X))
            factor = np.minimum(1.0, domain.radius / np.maximum(norms, 1e-300))
            return X * factor.reshape(X.shape[:-1] + (1,) * (X.ndim - 1))
        raise DfoError("bad-domain", f"quadratic geometry cannot project onto {domain.kind}")


class EntropyGeometry:
    """Negative-entropy mirror map on the simplex; modulus 1 for the 1-norm.

    Weights are floored just above zero before taking logs so the dual map
    stays defined on the closed simplex.
    """

    sigma = 1.0
    kind = "entropy"

    def __init__(self, size):
        if size < 2:
            raise DfoError("bad-domain", f"simplex needs size >= 2, got {size}")
        self.size = size

    def forward(self, X):
        return 1.0 + np.log(np.maximum(X, WEIGHT_FLOOR))

    def inverse(self, Q):
        return np.exp(Q - 1.0)

    def bregman(self, X, Y):
        X = np.atleast_2d(np.maximum(X, 0.0))
        Y = np.atleast_2d(np.maximum(Y, WEIGHT_FLOOR))
        terms = np.where(X > 0, X * (np.log(np.maximum(X, WEIGHT_FLOOR)) - np.log(Y)), 0.0)
        return terms.sum(axis=-1) - X.sum(axis=-1) + Y.sum(axis=-1)

    def project(self, domain, X):
        if domain.kind != "probability-simplex":
            raise DfoError("bad-domain", f"entropy geometry cannot project onto {domain.kind}")
        X = np.maximum(X, 0.0)
        return X / X.sum(axis=-1, keepdims=True)


def quadratic_geometry(gram):
    return QuadraticGeometry(gram)


def entropy_geometry(size):
    return EntropyGeometry(size)


class ProbabilityVector:
    """Strictly positive weights summing to one, stored as log-weights."""

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0):
            raise DfoError("bad-weights", "probability weights must be nonnegative")
        total = w.sum()
        if abs(total - 1.0) > 1e-12:
            raise DfoError("bad-weights", f"weights sum to {total}, expected 1")
        self._log = np.log(np.maximum(w / total, WEIGHT_FLOOR))
        self._log.flags.writeable = False

    @classmethod
    def uniform(cls, n):
        return cls(np.full(n, 1.0 / n))

    @property
    def weights(self):
        w = np.exp(self._log)
        return w / w.sum()

    @property
    def size(self):
        return self._log.shape[0]


def dfmd_step(states, P, subgradients, eta, geometry, domain):
    """Four-stage mirror step then gossip mixing, on stacked states.

    With the entropy geometry on the simplex this computes exactly
    p <- normalize(p * exp(-eta * g)) per agent before mixing.
    """
    if not eta >= 0:
        raise DfoError("bad-step", "eta must be nonnegative")
    P = require_mixing_matrix(P)
    states = np.asarray(states, dtype=float)
    subgradients = np.asarray(subgradients, dtype=float)
    if states.shape != subgradients.shape or P.shape[0] != states.shape[0]:
        raise DfoError("bad-data", "states, subgradients, and mixing matrix disagree")
    dual = geometry.forward(states)
    stepped = dual - eta * subgradients
    pulled = geometry.inverse(stepped)
    projected = geometry.project(domain, pulled)
    return P @ projected


def run_dfmd(config, schedule, global_risk, geometry, domain, initial=None):
    """Mirror-descent run over the kernel expansion space.

    Records the same metrics as the gradient-descent engine; with the
    quadratic geometry on the whole space the two trajectories coincide.
    """
    m, N = global_risk.m, global_risk.n_centers
    if schedule.m != m:
        raise DfoError("bad-schedule", f"schedule has m={schedule.m}, risk has m={m}")
    eta = config.resolve_eta()
    C = np.zeros((m, N)) if initial is None else np.array(initial, dtype=float)
    G = global_risk.gram
    initial_norm_sum = float(coefficient_norms(G, C).sum())

    rec = Recorder(config.record_stride, config.keep_snapshots)
    ergodic = np.zeros_like(C)
    for t in range(1, config.T + 1):
        ergodic += C
        grads = global_risk.local_gradient_matrix(C)
        rec.every_iterate(
            consensus=global_risk.consensus_errors(C),
            local_norms=global_risk.local_gradient_norms_given(C, grads),
        )
        if rec.due(t, config.T):
            rec.at_stride(
                t,
                J=global_risk.values_at_states(C),
                global_norms=global_risk.global_gradient_norms(C),
                state=C,
            )
        dual = geometry.forward(C)
        stepped = dual - eta * grads
        pulled = geometry.inverse(stepped)
        projected = geometry.project(domain, pulled)
        C = schedule.matrix(t) @ projected
    ergodic /= config.T

    return rec.build(
        T=config.T,
        eta=eta,
        ergodic=ergodic,
        final=C,
        initial_norm_sum=initial_norm_sum,
        meta={"engine": "dfmd", "geometry": geometry.kind, "domain": domain.kind},
    )


class LinearFunctional:
    """<costs, p> on the simplex."""

    convex = True

    def __init__(self, costs):
        self.costs = np.asarray(costs, dtype=float)

    @property
    def size(self):
        return self.costs.shape[0]

    def value(self, p):
        return np.asarray(p, dtype=float) @ self.costs

    def gradient(self, p):
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(self.costs, p.shape).copy()


class QuadraticFunctional:
    """(weight/2) ||p - center||^2 on the simplex."""

    convex = True

    def __init__(self, center, weight=1.0):
        self.center = np.asarray(center, dtype=float)
        self.weight = float(weight)

    @property
    def size(self):
        return self.center.shape[0]

    def value(self, p):
        d = np.asarray(p, dtype=float) - self.center
        return 0.5 * self.weight * np.sum(d * d, axis=-1)

    def gradient(self, p):
        return self.weight * (np.asarray(p, dtype=float) - self.center)


def run_ms_dfmd(config, schedule, functionals, initial=None):
    """Distributed entropic mirror descent over the probability simplex.

    ``functionals[i]`` is agent i's convex cost; the recorded objective is
    their sum evaluated at each agent's measure.  Consensus errors use the
    1-norm and gradient norms its dual, the max norm, matching the geometry's
    strong-convexity modulus.
    """
    m = schedule.m
    if len(functionals) != m:
        raise DfoError("bad-data", f"{len(functionals)} functionals for m={m} agents")
    n = functionals[0].size
    for fl in functionals:
        if fl.size != n or not getattr(fl, "convex", False):
            raise DfoError("bad-data", "functionals must be convex and share the grid size")
    eta = config.resolve_eta()
    geometry = EntropyGeometry(n)
    domain = probability_simplex(n)

    if initial is None:
        W = np.full((m, n), 1.0 / n)
    else:
        rows = [p.weights if isinstance(p, ProbabilityVector) else np.asarray(p, dtype=float) for p in initial]
        W = np.stack(rows)
    initial_norm_sum = float(np.abs(W).sum())

    rec = Recorder(config.record_stride, config.keep_snapshots)
    ergodic = np.zeros_like(W)
    for t in range(1, config.T + 1):
        ergodic += W
        grads = np.stack([fl.gradient(W[i]) for i, fl in enumerate(functionals)])
        rec.every_iterate(
            consensus=np.abs(W - W.mean(axis=0, keepdims=True)).sum(axis=1),
            local_norms=np.abs(grads).max(axis=1),
        )
        if rec.due(t, config.T):
            total = np.zeros(m)
            for fl in functionals:
                total += fl.value(W)
            full_grads = sum(fl.gradient(W) for fl in functionals)
            rec.at_stride(t, J=total, global_norms=np.abs(full_grads).max(axis=1), state=W)
        W = dfmd_step(W, schedule.matrix(t), grads, eta, geometry, domain)
    ergodic /= config.T

    return rec.build(
        T=config.T,
        eta=eta,
        ergodic=ergodic,
        final=W,
        initial_norm_sum=initial_norm_sum,
        meta={"engine": "ms-dfmd", "geometry": "entropy", "domain": "probability-simplex"},
    )
