"""Scalar losses for regression residuals, including robust windowed kinds.

The robust family follows the redescending M-estimator convention: a
squared residual is passed through a window so large residuals get
attenuated influence.  Welsch and Cauchy are nonconvex in the residual and
are only safe for the gradient-descent engine; the convexity flag lets the
harness enforce that routing.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DfoError

KINDS = ("half-squared", "squared", "welsch", "cauchy", "fair")
_ROBUST = ("welsch", "cauchy", "fair")
_CONVEX = ("half-squared", "squared", "fair")


@dataclass(frozen=True)
class LossSpec:
    """Loss choice plus the robustness scale sigma (robust kinds only)."""

    kind: str
    sigma: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DfoError("bad-loss-kind", f"unknown loss {self.kind!r}")
        if self.kind in _ROBUST:
            if self.sigma is None or not self.sigma > 0:
                raise DfoError("bad-sigma", f"{self.kind} needs sigma > 0, got {self.sigma}")

    @property
    def convex(self):
        return self.kind in _CONVEX


def loss_value(spec, u):
    """Loss at residual u; vectorized, nonnegative, zero at u = 0."""
    u = np.asarray(u, dtype=float)
    s = spec.sigma
    if spec.kind == "half-squared":
        return 0.5 * u * u
    if spec.kind == "squared":
        return u * u
    if spec.kind == "welsch":
        return s * s * (-np.expm1(-(u * u) / (2 * s * s)))
    if spec.kind == "cauchy":
        return s * s * np.log1p((u * u) / (2 * s * s))
    # fair
    a = np.abs(u) / s
    return s * s * (a - np.log1p(a))


def loss_derivative(spec, u):
    """d(loss)/du; matches a central finite difference of loss_value."""
    u = np.asarray(u, dtype=float)
    s = spec.sigma
    if spec.kind == "half-squared":
        return u + 0.0
    if spec.kind == "squared":
        return 2.0 * u
    if spec.kind == "welsch":
        return u * np.exp(-(u * u) / (2 * s * s))
    if spec.kind == "cauchy":
        return u / (1.0 + (u * u) / (2 * s * s))
    # fair
    return u / (1.0 + np.abs(u) / s)


@dataclass(frozen=True)
class SmoothnessBounds:
    """Upper bounds on |loss''| and |loss'|; None marks an unbounded one."""

    curvature: float
    gradient: float | None


def smoothness_bounds(spec):
    """Certified bounds used by step-size rules and Lipschitz surrogates.

    half-squared: loss'' = 1 everywhere, derivative unbounded.
    squared:      loss'' = 2 everywhere, derivative unbounded.
    welsch:       max |loss''| = 1 (at 0), max |loss'| = sigma exp(-1/2).
    cauchy:       max |loss''| = 1 (at 0), max |loss'| = sigma / sqrt(2).
    fair:         loss'' in (0, 1], |loss'| < sigma.
    """
    s = spec.sigma
    if spec.kind == "half-squared":
        return SmoothnessBounds(curvature=1.0, gradient=None)
    if spec.kind == "squared":
        return SmoothnessBounds(curvature=2.0, gradient=None)
    if spec.kind == "welsch":
        return SmoothnessBounds(curvature=1.0, gradient=s * float(np.exp(-0.5)))
    if spec.kind == "cauchy":
        return SmoothnessBounds(curvature=1.0, gradient=s / float(np.sqrt(2.0)))
    return SmoothnessBounds(curvature=1.0, gradient=s)
