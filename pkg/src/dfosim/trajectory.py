"""Per-run metric recording shared by the iteration engines."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DfoError


@dataclass
class RunTrajectory:
    """Metrics of one simulated run.

    ``consensus`` and ``local_grad_norms`` cover every iterate t = 1..T so
    the geometric consensus bound can be checked pointwise.  The heavier
    metrics (per-agent objective values, full-gradient norms, snapshots) are
    sampled at ``ts``.  ``ergodic_coeffs`` is the exact running average of
    the states over t = 1..T regardless of the recording stride.
    """

    T: int
    eta: float
    ts: np.ndarray
    per_agent_J: np.ndarray
    global_grad_norms: np.ndarray
    consensus: np.ndarray
    local_grad_norms: np.ndarray
    ergodic_coeffs: np.ndarray
    final_coeffs: np.ndarray
    empirical_G: float
    stride: int
    coeffs: np.ndarray | None = None
    initial_norm_sum: float = 0.0
    meta: dict = field(default_factory=dict)


class Recorder:
    def __init__(self, stride, keep_snapshots):
        self.stride = max(int(stride), 1)
        self.keep_snapshots = keep_snapshots
        self.ts = []
        self.J = []
        self.global_norms = []
        self.consensus = []
        self.local_norms = []
        self.snapshots = [] if keep_snapshots else None

    def due(self, t, T):
        return (t - 1) % self.stride == 0 or t == T

    def every_iterate(self, consensus, local_norms):
        self.consensus.append(np.asarray(consensus, dtype=float))
        self.local_norms.append(np.asarray(local_norms, dtype=float))

    def at_stride(self, t, J, global_norms, state):
        self.ts.append(t)
        self.J.append(np.asarray(J, dtype=float))
        self.global_norms.append(np.asarray(global_norms, dtype=float))
        if self.snapshots is not None:
            self.snapshots.append(np.array(state))

    def build(self, T, eta, ergodic, final, initial_norm_sum, meta):
        local = np.stack(self.local_norms)
        return RunTrajectory(
            T=T,
            eta=eta,
            ts=np.asarray(self.ts, dtype=int),
            per_agent_J=np.stack(self.J),
            global_grad_norms=np.stack(self.global_norms),
            consensus=np.stack(self.consensus),
            local_grad_norms=local,
            ergodic_coeffs=ergodic,
            final_coeffs=final,
            empirical_G=float(local.max()),
            stride=self.stride,
            coeffs=np.stack(self.snapshots) if self.snapshots else None,
            initial_norm_sum=initial_norm_sum,
            meta=dict(meta),
        )


def ergodic_average_from(traj, agent, T):
    """Coefficient average of agent's iterates 1..T; needs stride-1 snapshots."""
    if traj.stride != 1 or traj.coeffs is None:
        raise DfoError("need-full-record", "ergodic average needs snapshots at stride 1")
    if T < 1 or T > traj.coeffs.shape[0]:
        raise DfoError("bad-window", f"T={T} outside recorded range")
    return traj.coeffs[:T, agent, :].mean(axis=0)
