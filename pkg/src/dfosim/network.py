"""Time-varying communication schedules and their mixing analysis.

A schedule produces one doubly stochastic matrix per iteration.  Generators
are parameterized so the connectivity window B and the entry floor zeta are
known by construction; loaded schedules get both certified by validation.
The geometric mixing bound omega * gamma^(t-s) on transition products is the
quantity the engines' consensus diagnostics lean on.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import DfoError

ROW_COL_TOL = 1e-12


def is_doubly_stochastic(P, tol=ROW_COL_TOL):
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        return False
    if P.min() < -tol:
        return False
    ok_rows = np.max(np.abs(P.sum(axis=1) - 1.0)) <= tol
    ok_cols = np.max(np.abs(P.sum(axis=0) - 1.0)) <= tol
    return bool(ok_rows and ok_cols)


def require_mixing_matrix(P, tol=1e-10):
    """Gate used by the engines before consuming a matrix."""
    if not is_doubly_stochastic(P, tol):
        raise DfoError("bad-mixing-matrix", "matrix is not doubly stochastic")
    return np.asarray(P, dtype=float)


@dataclass(frozen=True)
class MixingBoundParams:
    """Constants of the geometric bound |[Q(t,s)]_ij - 1/m| <= omega*gamma^(t-s)."""

    omega: float
    gamma: float


def mixing_params(m, zeta, B):
    base = 1.0 - zeta / (4.0 * m * m)
    return MixingBoundParams(omega=base ** (-2.0), gamma=base ** (1.0 / B))


def mixing_bound(m, zeta, B, k):
    """Worst-case deviation of a k-step transition product from uniform 1/m."""
    if k < 0:
        raise DfoError("bad-window", "time gap must be nonnegative")
    p = mixing_params(m, zeta, B)
    return p.omega * p.gamma**k


class MixingSchedule:
    """Periodic sequence of certified doubly stochastic matrices.

    ``matrix(t)`` is 1-indexed; the sequence repeats with the stored period.
    """

    def __init__(self, matrices, B, zeta, kind="custom-list"):
        mats = [np.array(P, dtype=float) for P in matrices]
        if not mats:
            raise DfoError("bad-schedule", "no matrices")
        m = mats[0].shape[0]
        for P in mats:
            if P.shape != (m, m):
                raise DfoError("bad-schedule", "inconsistent matrix sizes")
            P.flags.writeable = False
        if not 0 < zeta < 1:
            raise DfoError("entry-floor", f"zeta must lie in (0,1), got {zeta}")
        self.matrices = tuple(mats)
        self.m = m
        self.B = int(B)
        self.zeta = float(zeta)
        self.kind = kind

    @property
    def period(self):
        return len(self.matrices)

    def matrix(self, t):
        if t < 1:
            raise DfoError("bad-window", f"iteration index must be >= 1, got {t}")
        return self.matrices[(t - 1) % self.period]

    def bound_params(self):
        return mixing_params(self.m, self.zeta, self.B)


def ring_schedule(m):
    """Static ring: weight 1/3 on self and each neighbor (1/2 for m = 2)."""
    if m < 2:
        raise DfoError("too-few-agents", f"need at least 2 agents, got {m}")
    if m == 2:
        P = np.full((2, 2), 0.5)
        return MixingSchedule([P], B=1, zeta=0.5, kind="static-ring")
    P = np.zeros((m, m))
    for i in range(m):
        P[i, i] += 1.0 / 3.0
        P[i, (i - 1) % m] += 1.0 / 3.0
        P[i, (i + 1) % m] += 1.0 / 3.0
    return MixingSchedule([P], B=1, zeta=1.0 / 3.0, kind="static-ring")


def matching_cycle_schedule(m):
    """Alternates two perfect matchings of a ring; connects over windows of 2.

    Each active edge carries weight 1/2 (so zeta = 1/2); a single matching is
    disconnected, the union of consecutive ones is the full ring.
    """
    if m < 4 or m % 2 != 0:
        raise DfoError("need-even-agents", f"matching cycle needs even m >= 4, got {m}")
    mats = []
    for offset in (0, 1):
        P = np.zeros((m, m))
        for k in range(0, m, 2):
            a, b = (k + offset) % m, (k + 1 + offset) % m
            P[a, a] = P[b, b] = 0.5
            P[a, b] = P[b, a] = 0.5
        mats.append(P)
    return MixingSchedule(mats, B=2, zeta=0.5, kind="periodic-edge-cycle")


def custom_schedule(matrices, B=None, zeta=None):
    """Wrap explicit matrices; estimates zeta and certifies B when omitted."""
    mats = [np.asarray(P, dtype=float) for P in matrices]
    if zeta is None:
        floors = []
        for P in mats:
            positive = P[P > 0]
            if positive.size == 0 or np.min(np.diag(P)) <= 0:
                raise DfoError("entry-floor", "zero diagonal entry; no valid floor exists")
            floors.append(min(positive.min(), np.diag(P).min()))
        zeta = min(floors)
    if B is None:
        B = _certify_window(mats)
    sched = MixingSchedule(mats, B=B, zeta=zeta, kind="custom-list")
    report = validate_assumption1(sched, horizon=max(2 * len(mats), 2 * B))
    if not report.passed:
        raise DfoError("bad-schedule", "; ".join(report.issues[:3]))
    return sched


def _union_strongly_connected(mats):
    m = mats[0].shape[0]
    union = np.zeros((m, m), dtype=bool)
    for P in mats:
        union |= P > 0
    n_comp, _ = connected_components(csr_matrix(union), directed=True, connection="strong")
    return n_comp == 1


def _certify_window(mats):
    """Smallest B so that every cyclic length-B window is strongly connected."""
    period = len(mats)
    doubled = mats + mats
    for B in range(1, period + 1):
        if all(_union_strongly_connected(doubled[s : s + B]) for s in range(period)):
            return B
    raise DfoError("not-connected", "no window length connects the union graph")


@dataclass
class ValidationReport:
    passed: bool
    issues: list = field(default_factory=list)

    def __bool__(self):
        return self.passed


def validate_assumption1(schedule, horizon):
    """Check double stochasticity, the entry floor, and windowed connectivity.

    Violations are collected as report entries, one per offending t or window.
    """
    if horizon < schedule.B:
        raise DfoError("bad-window", f"horizon {horizon} shorter than window {schedule.B}")
    issues = []
    for t in range(1, horizon + 1):
        P = schedule.matrix(t)
        if np.min(P) < -ROW_COL_TOL:
            issues.append(f"t={t}: negative entry {np.min(P):.3e}")
        row_dev = np.max(np.abs(P.sum(axis=1) - 1.0))
        col_dev = np.max(np.abs(P.sum(axis=0) - 1.0))
        if row_dev > ROW_COL_TOL:
            issues.append(f"t={t}: row-sum deviation {row_dev:.3e}")
        if col_dev > ROW_COL_TOL:
            issues.append(f"t={t}: col-sum deviation {col_dev:.3e}")
        if np.min(np.diag(P)) < schedule.zeta - 1e-15:
            issues.append(f"t={t}: entry-floor violation on diagonal")
        off = P[(P > 0) & (P < schedule.zeta - 1e-15)]
        if off.size:
            issues.append(f"t={t}: entry-floor violation on {off.size} active edges")
    k = 0
    while (k + 1) * schedule.B <= horizon:
        window = [schedule.matrix(t) for t in range(k * schedule.B + 1, (k + 1) * schedule.B + 1)]
        if not _union_strongly_connected(window):
            issues.append(f"window k={k}: union graph not strongly connected")
        k += 1
    return ValidationReport(passed=not issues, issues=issues)


def transition(schedule, t, s):
    """Transition product P_t P_(t-1) ... P_s of the schedule matrices."""
    if not t >= s >= 1:
        raise DfoError("bad-window", f"need t >= s >= 1, got t={t}, s={s}")
    Q = schedule.matrix(s).copy()
    for u in range(s + 1, t + 1):
        Q = schedule.matrix(u) @ Q
    return Q


def save_schedule(schedule, path, horizon=None):
    """Plain-text dump: first line "m T", then T blocks of m rows."""
    T = horizon if horizon is not None else schedule.period
    lines = [f"{schedule.m} {T}"]
    for t in range(1, T + 1):
        for row in schedule.matrix(t):
            lines.append(" ".join(f"{v:.17g}" for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_schedule(path):
    """Read the plain-text format and validate; raises on a bad schedule."""
    with open(path) as fh:
        tokens = fh.read().split()
    if len(tokens) < 2:
        raise DfoError("bad-schedule", f"{path}: missing 'm T' header")
    m, T = int(tokens[0]), int(tokens[1])
    vals = tokens[2:]
    if len(vals) != T * m * m:
        raise DfoError("bad-schedule", f"{path}: expected {T * m * m} entries, found {len(vals)}")
    data = np.array([float(v) for v in vals]).reshape(T, m, m)
    return custom_schedule(list(data))
