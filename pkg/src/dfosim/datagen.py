"""Synthetic regression data with optional label corruption.

Inputs are uniform on [-1, 1]^d; labels are a half-active linear signal plus
unit normal noise:  y = <a, x> + eps  with a_j = 1 for j < floor(d/2).

Each agent draws from its own counter-based substream of the master seed
(one stream for inputs, one for noise), so datasets are bit-reproducible and
nested across sweeps: growing m appends agents without changing existing
ones, and changing d keeps the noise realization fixed.  Normal deviates are
produced by the inverse CDF applied to uniforms, which is recorded in the
metadata so other implementations can match the distribution exactly.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtri

from .errors import DfoError
from .objective import LocalData


def signal_vector(d):
    a = np.zeros(d)
    a[: d // 2] = 1.0
    return a


def _agent_streams(seed, agent):
    inputs_rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(agent, 0)))
    noise_rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(agent, 1)))
    return inputs_rng, noise_rng


@dataclass(frozen=True)
class ExperimentData:
    """Per-agent datasets plus corruption bookkeeping."""

    m: int
    n: int
    d: int
    seed: int
    locals: tuple
    clean_outputs: np.ndarray
    outlier_mask: np.ndarray
    outlier_shift: float
    meta: dict

    @property
    def inputs(self):
        """All inputs stacked agent-major; the global center set of a run."""
        return np.vstack([ld.inputs for ld in self.locals])

    @property
    def outputs(self):
        return np.concatenate([ld.outputs for ld in self.locals])

    def center_indices(self, agent):
        return np.arange(agent * self.n, (agent + 1) * self.n)


def generate(m, n, d, seed):
    """Draw the m-agent dataset; deterministic given (m, n, d, seed)."""
    if m < 1 or n < 1 or d < 1:
        raise DfoError("bad-data", f"need m, n, d >= 1, got {(m, n, d)}")
    a = signal_vector(d)
    locals_ = []
    clean = np.empty((m, n))
    for i in range(m):
        inputs_rng, noise_rng = _agent_streams(seed, i)
        X = inputs_rng.uniform(-1.0, 1.0, size=(n, d))
        u = np.clip(noise_rng.random(n), 1e-300, 1.0 - 1e-16)
        eps = ndtri(u)
        y = X @ a + eps
        clean[i] = y
        locals_.append(LocalData(inputs=X, outputs=y, agent_id=i))
    return ExperimentData(
        m=m,
        n=n,
        d=d,
        seed=seed,
        locals=tuple(locals_),
        clean_outputs=clean,
        outlier_mask=np.zeros((m, n), dtype=bool),
        outlier_shift=0.0,
        meta={
            "normal_transform": "inverse-cdf",
            "stream": "per-agent counter substreams",
            "outlier_rule": "none",
        },
    )


def inject_outliers(data, shift=5.0, every_second_agent=False):
    """Corrupt the first two labels of each affected agent by +shift / -shift.

    The default affects every agent.  ``every_second_agent`` restricts the
    corruption to agents 0, 2, 4, ... and exists only for sensitivity checks.
    Clean labels and the corruption mask are retained either way.
    """
    if data.n < 2:
        raise DfoError("too-few-samples-for-outliers", f"need n >= 2, got {data.n}")
    mask = np.zeros((data.m, data.n), dtype=bool)
    locals_ = []
    for i, ld in enumerate(data.locals):
        affected = (i % 2 == 0) if every_second_agent else True
        y = ld.outputs.copy()
        if affected:
            y[0] += shift
            y[1] -= shift
            mask[i, 0] = mask[i, 1] = True
        locals_.append(LocalData(inputs=ld.inputs, outputs=y, agent_id=i))
    rule = "every-second-agent" if every_second_agent else "all-agents"
    return replace(
        data,
        locals=tuple(locals_),
        outlier_mask=mask,
        outlier_shift=float(shift),
        meta={**data.meta, "outlier_rule": f"{rule} shift={shift:g}"},
    )


def save_data(data, path):
    """Plain-text table: header "m n d seed", then one row per sample."""
    lines = [f"{data.m} {data.n} {data.d} {data.seed}"]
    for i, ld in enumerate(data.locals):
        for s in range(data.n):
            x = " ".join(f"{v:.17g}" for v in ld.inputs[s])
            lines.append(
                f"{i} {s} {x} {ld.outputs[s]:.17g} {data.clean_outputs[i, s]:.17g} "
                f"{int(data.outlier_mask[i, s])}"
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_data(path):
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise DfoError("bad-data", f"{path}: empty file")
    m, n, d, seed = (int(v) for v in lines[0].split())
    if len(lines) != 1 + m * n:
        raise DfoError("bad-data", f"{path}: expected {m * n} rows, found {len(lines) - 1}")
    X = np.empty((m, n, d))
    y = np.empty((m, n))
    clean = np.empty((m, n))
    mask = np.zeros((m, n), dtype=bool)
    for ln in lines[1:]:
        parts = ln.split()
        i, s = int(parts[0]), int(parts[1])
        X[i, s] = [float(v) for v in parts[2 : 2 + d]]
        y[i, s] = float(parts[2 + d])
        clean[i, s] = float(parts[3 + d])
        mask[i, s] = bool(int(parts[4 + d]))
    locals_ = tuple(LocalData(inputs=X[i], outputs=y[i], agent_id=i) for i in range(m))
    shifts = np.abs(y[mask] - clean[mask])
    shift = float(shifts[0]) if shifts.size else 0.0
    return ExperimentData(
        m=m, n=n, d=d, seed=seed,
        locals=locals_, clean_outputs=clean, outlier_mask=mask, outlier_shift=shift,
        meta={"normal_transform": "inverse-cdf", "stream": "per-agent counter substreams",
              "outlier_rule": "loaded-from-file"},
    )
