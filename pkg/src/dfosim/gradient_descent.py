"""Decentralized functional gradient descent over the kernel expansion space.

Each iteration every agent takes a gradient step on its own risk,
  h_i = f_i - eta * grad_i(f_i),
then the network averages:  f_i' = sum_j P[i, j] h_j.  Because P is doubly
stochastic the coefficient average obeys the exact descent identity
  mean' = mean - (eta/m) * sum_i grad_i(f_i),
which the test suite checks at every step.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DfoError
from .kernels import coefficient_norms, linear_combine
from .network import require_mixing_matrix
from .trajectory import Recorder, ergodic_average_from

STEP_RULES = ("constant", "inv-sqrt-horizon", "smooth-horizon")


@dataclass(frozen=True)
class DfgdConfig:
    """Run length, step rule, and metric recording control.

    step rules:
      constant          eta as given
      inv-sqrt-horizon  eta = 1 / sqrt(T)
      smooth-horizon    eta = 1 / (2 L sqrt(T + 3)), L the smoothness bound
    """

    T: int
    step_rule: str = "inv-sqrt-horizon"
    eta: float | None = None
    L: float | None = None
    record_stride: int = 1
    keep_snapshots: bool = False

    def __post_init__(self):
        if self.T < 1:
            raise DfoError("bad-horizon", f"T must be >= 1, got {self.T}")
        if self.step_rule not in STEP_RULES:
            raise DfoError("bad-step-rule", f"unknown step rule {self.step_rule!r}")
        if self.step_rule == "constant" and (self.eta is None or self.eta < 0):
            raise DfoError("bad-step", "constant rule needs eta >= 0")
        if self.step_rule == "smooth-horizon" and not (self.L and self.L > 0):
            raise DfoError("bad-step", "smooth-horizon rule needs L > 0")

    def resolve_eta(self):
        if self.step_rule == "constant":
            return float(self.eta)
        if self.step_rule == "inv-sqrt-horizon":
            return 1.0 / math.sqrt(self.T)
        return 1.0 / (2.0 * self.L * math.sqrt(self.T + 3))


def check_step_range(eta, m, mu, L):
    """Warn when a constant step leaves the linear-rate theorem's range.

    The range eta < min(2m/mu, 1/(4L)) is sufficient, not necessary, so this
    warns instead of raising.
    """
    limit = min(2.0 * m / mu, 1.0 / (4.0 * L))
    if eta >= limit:
        warnings.warn(
            f"constant step {eta:.4g} outside sufficient range (0, {limit:.4g}) "
            f"for mu={mu:.4g}, L={L:.4g}",
            stacklevel=2,
        )
        return False
    return True


def descent_mix(C, P, grads, eta):
    """One synchronized iteration on stacked coefficients."""
    return P @ (C - eta * grads)


def dfgd_step(states, P, risks, eta):
    """Single iteration on a list of per-agent functions.

    ``risks[i]`` supplies agent i's gradient; the mixing matrix is validated
    before use.
    """
    if not eta > 0:
        raise DfoError("bad-step", "eta must be positive")
    P = require_mixing_matrix(P)
    if len(states) != len(risks) or P.shape[0] != len(states):
        raise DfoError("bad-data", "states, risks, and mixing matrix disagree on m")
    grads = [r.gradient(f) for f, r in zip(states, risks)]
    stepped = [
        f.with_coefficients(f.coefficients - eta * g.coefficients)
        for f, g in zip(states, grads)
    ]
    return [linear_combine(P[i], stepped) for i in range(len(states))]


def run_dfgd(config, schedule, global_risk, initial=None):
    """Simulate T iterations and record the trajectory metrics.

    ``initial`` is an (m, N) coefficient matrix; agents start at the zero
    function by default.  Deterministic for fixed inputs.
    """
    m, N = global_risk.m, global_risk.n_centers
    if schedule.m != m:
        raise DfoError("bad-schedule", f"schedule has m={schedule.m}, risk has m={m}")
    eta = config.resolve_eta()
    C = np.zeros((m, N)) if initial is None else np.array(initial, dtype=float)
    if C.shape != (m, N):
        raise DfoError("bad-data", f"initial states must be shape {(m, N)}")
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
        C = descent_mix(C, schedule.matrix(t), grads, eta)
    ergodic /= config.T

    return rec.build(
        T=config.T,
        eta=eta,
        ergodic=ergodic,
        final=C,
        initial_norm_sum=initial_norm_sum,
        meta={"engine": "dfgd", "step_rule": config.step_rule},
    )


def ergodic_average(traj, agent, T):
    """Average of agent's recorded iterates 1..T (stride-1 record required)."""
    return ergodic_average_from(traj, agent, T)


def consensus_bound_margins(traj, schedule, sigma=1.0):
    """Slack of the geometric consensus bound at every iterate.

    Bound checked:  ||f_{i,t} - mean_t|| <=
        omega * gamma^(t-1) * sum_i ||f_{i,1}||  +  m * omega * G_hat * eta
                                                    / (sigma * (1 - gamma)),
    with G_hat the largest local gradient norm observed during the run.
    Returns bound minus observed error; nonnegative everywhere means it holds.
    """
    p = schedule.bound_params()
    ts = np.arange(1, traj.consensus.shape[0] + 1)
    persistent = schedule.m * p.omega * traj.empirical_G * traj.eta / (sigma * (1.0 - p.gamma))
    bound = p.omega * p.gamma ** (ts - 1) * traj.initial_norm_sum + persistent
    return bound[:, None] - traj.consensus
