"""Experiment presets, run orchestration, and CSV output.

A preset resolves every knob of one experiment family: data shape, kernel
bandwidth, loss, objective scaling, network, and step rule.  Error curves
are produced by independent runs per horizon T (the horizon-coupled step
rules make eta a function of T, so each plotted point is its own run), with
optimization errors measured against a centralized oracle solution.
"""

import configparser
import dataclasses
from dataclasses import dataclass

import numpy as np

from . import datagen
from .errors import DfoError
from .gradient_descent import DfgdConfig, check_step_range, run_dfgd
from .kernels import GaussianKernel, CenterSet
from .losses import LossSpec
from .mirror_descent import LinearFunctional, run_ms_dfmd
from .network import matching_cycle_schedule, load_schedule, ring_schedule, validate_assumption1
from .objective import GlobalRisk, LocalRisk
from .oracle import brute_force_simplex, solve_centralized_gd, solve_ls_pooled

DEFAULT_T_GRID = (100, 250, 500, 1000, 2000, 4000)
DEFAULT_SEED = 0

# Heterogeneous per-agent simplex costs for the measure-space demo.  All
# agents agree that grid point 2 is cheapest, so the network is not fighting
# itself and the ergodic error decays at the clean 1/T rate under a constant
# step.
MSDFMD_COSTS = (
    (0.8, 0.5, 0.1),
    (0.4, 0.9, 0.2),
    (0.7, 0.6, 0.05),
    (0.5, 1.0, 0.15),
)

PRESET_NAMES = ("fig1-ls", "fig2-agents", "fig4-cauchy", "fig6-dims", "msdfmd-demo")


@dataclass(frozen=True)
class ExperimentPreset:
    """Fully resolved experiment parameters."""

    name: str
    engine: str = "dfgd"
    m: int = 30
    n: int = 10
    d: int = 10
    gamma: float = 0.33
    loss_kind: str = "half-squared"
    sigma: float | None = None
    lam: float = 0.0
    scale: object = "1/m"
    step_rule: str = "inv-sqrt-horizon"
    eta: float | None = None
    schedule_kind: str = "ring"
    outlier_shift: float = 0.0
    costs: tuple | None = None

    def resolved_scale(self):
        if self.scale == "1/m":
            return 1.0 / self.m
        return float(self.scale)

    def loss(self):
        return LossSpec(self.loss_kind, self.sigma)


def get_presets(name, **overrides):
    """Expand a preset name into (tag, preset) pairs; sweeps yield several."""
    base = ExperimentPreset(name=name)
    if name == "fig1-ls":
        out = [("fig1-ls", base)]
    elif name == "fig2-agents":
        out = [
            (f"fig2-agents-m{m}", dataclasses.replace(base, m=m))
            for m in (30, 40, 50)
        ]
    elif name == "fig4-cauchy":
        out = [(
            "fig4-cauchy",
            dataclasses.replace(base, loss_kind="cauchy", sigma=1.0, outlier_shift=5.0),
        )]
    elif name == "fig6-dims":
        robust = dataclasses.replace(base, loss_kind="cauchy", sigma=1.0, outlier_shift=5.0)
        out = [
            (f"fig6-dims-d{d}", dataclasses.replace(robust, d=d))
            for d in (5, 10, 20)
        ]
    elif name == "msdfmd-demo":
        out = [(
            "msdfmd-demo",
            dataclasses.replace(
                base,
                engine="ms-dfmd",
                m=4,
                n=3,
                step_rule="constant",
                eta=0.5,
                costs=MSDFMD_COSTS,
            ),
        )]
    else:
        raise DfoError("bad-preset", f"unknown preset {name!r}; known: {PRESET_NAMES}")
    if overrides:
        out = [(tag, dataclasses.replace(p, **overrides)) for tag, p in out]
    return out


def make_schedule(preset):
    if preset.schedule_kind == "ring":
        return ring_schedule(preset.m)
    if preset.schedule_kind == "matching-cycle":
        return matching_cycle_schedule(preset.m)
    raise DfoError("bad-schedule", f"unknown schedule kind {preset.schedule_kind!r}")


def make_data(preset, seed):
    data = datagen.generate(preset.m, preset.n, preset.d, seed)
    if preset.outlier_shift:
        data = datagen.inject_outliers(data, shift=preset.outlier_shift)
    return data


def make_global_risk(preset, data):
    """Global center set = all inputs; each agent's risk indexes its block."""
    kernel = GaussianKernel(preset.gamma)
    centers = CenterSet(data.inputs)
    scale = preset.resolved_scale()
    loss = preset.loss()
    locals_ = [
        LocalRisk(
            data=ld,
            loss=loss,
            lam=preset.lam,
            scale=scale,
            center_indices=data.center_indices(i),
        )
        for i, ld in enumerate(data.locals)
    ]
    return GlobalRisk(locals_, kernel, centers)


def make_functionals(preset):
    return [LinearFunctional(c) for c in preset.costs]


def reference_solution(preset, data=None, global_risk=None, seed=DEFAULT_SEED):
    """Centralized oracle for the preset's objective."""
    if preset.engine == "ms-dfmd":
        return brute_force_simplex(make_functionals(preset), resolution=200)
    loss = preset.loss()
    if preset.loss_kind in ("half-squared", "squared"):
        factor = 1.0 if preset.loss_kind == "half-squared" else 2.0
        return solve_ls_pooled(
            GaussianKernel(preset.gamma),
            list(data.locals),
            lam=preset.lam,
            scale=preset.resolved_scale(),
            quadratic_factor=factor,
        )
    report = solve_centralized_gd(global_risk, iters=4000, restarts=4, seed=seed + 1)
    return report


def make_config(preset, T, global_risk=None, stride=1, keep_snapshots=False):
    L = None
    if preset.step_rule == "smooth-horizon":
        L = global_risk.smoothness_constant()
    return DfgdConfig(
        T=T,
        step_rule=preset.step_rule,
        eta=preset.eta,
        L=L,
        record_stride=stride,
        keep_snapshots=keep_snapshots,
    )


@dataclass(frozen=True)
class MetricsRow:
    """One summary line per horizon T."""

    T: int
    max_err: float
    min_err: float
    mean_consensus: float
    max_gradnorm: float
    empirical_G: float


CSV_HEADER = "T,max_err,min_err,mean_consensus,max_gradnorm,empirical_G"


def emit_csv(rows, path, metadata=None):
    """Write comment metadata, the fixed header, then 12-significant-digit rows."""
    lines = []
    for key, val in (metadata or {}).items():
        lines.append(f"# {key} = {val}")
    lines.append(CSV_HEADER)
    for r in rows:
        vals = (r.max_err, r.min_err, r.mean_consensus, r.max_gradnorm, r.empirical_G)
        lines.append(f"{r.T}," + ",".join(f"{v:.12g}" for v in vals))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _row_from_traj(T, traj, errors):
    return MetricsRow(
        T=T,
        max_err=float(errors.max()),
        min_err=float(errors.min()),
        mean_consensus=float(traj.consensus[-1].mean()),
        max_gradnorm=float(traj.global_grad_norms.max()),
        empirical_G=float(traj.empirical_G),
    )


def run_single(preset, T, seed=DEFAULT_SEED, stride=1, keep_snapshots=False, reference=None):
    """One independent run at horizon T; returns (row, trajectory, context).

    ``reference`` lets callers reuse an oracle report across the T grid
    (the dataset does not depend on T).
    """
    if preset.engine == "ms-dfmd":
        functionals = make_functionals(preset)
        schedule = make_schedule(preset)
        if reference is None:
            reference = brute_force_simplex(functionals, resolution=200)
        config = DfgdConfig(
            T=T, step_rule=preset.step_rule, eta=preset.eta,
            record_stride=stride, keep_snapshots=keep_snapshots,
        )
        traj = run_ms_dfmd(config, schedule, functionals)
        total = np.zeros(preset.m)
        for fl in functionals:
            total += fl.value(traj.ergodic_coeffs)
        errors = total - reference.value
        ctx = {"schedule": schedule, "reference": reference, "functionals": functionals}
        return _row_from_traj(T, traj, errors), traj, ctx

    data = make_data(preset, seed)
    global_risk = make_global_risk(preset, data)
    schedule = make_schedule(preset)
    if reference is None:
        reference = reference_solution(preset, data=data, global_risk=global_risk, seed=seed)
    config = make_config(preset, T, global_risk, stride=stride, keep_snapshots=keep_snapshots)
    if config.step_rule == "constant" and preset.lam > 0:
        mu = preset.lam * preset.resolved_scale()
        check_step_range(config.resolve_eta(), preset.m, mu, global_risk.smoothness_constant())
    traj = run_dfgd(config, schedule, global_risk)
    errors = global_risk.values_at_states(traj.ergodic_coeffs) - reference.value
    if preset.loss().convex and errors.min() < -1e-9:
        raise DfoError(
            "negative-error",
            f"convex optimization error {errors.min():.3e} below oracle value",
        )
    ctx = {
        "schedule": schedule,
        "reference": reference,
        "global_risk": global_risk,
        "data": data,
    }
    return _row_from_traj(T, traj, errors), traj, ctx


def preset_metadata(tag, preset, seed, t_grid):
    scale = preset.resolved_scale()
    md = {
        "preset": tag,
        "engine": preset.engine,
        "seed": seed,
        "t_grid": ",".join(str(t) for t in t_grid),
        "schedule": preset.schedule_kind,
        "step_rule": preset.step_rule,
    }
    if preset.engine == "ms-dfmd":
        md["grid_size"] = preset.n
        md["agents"] = preset.m
        md["eta"] = preset.eta
        md["mirror_map"] = "negative-entropy"
        md["costs"] = ";".join(",".join(f"{v:g}" for v in c) for c in preset.costs)
    else:
        md.update(
            m=preset.m,
            n=preset.n,
            d=preset.d,
            gamma=preset.gamma,
            loss=preset.loss_kind,
            sigma="" if preset.sigma is None else preset.sigma,
            lam=preset.lam,
            scale=f"{scale:.12g}",
            objective="scale * [(1/n_i) sum_s loss(f(x)-y) + (lam/2)||f||^2], summed over agents",
            loss_convention="half-squared residual loss matches the plain (f(x)-y) kernel update",
            normal_transform="inverse-cdf",
            outliers="none" if not preset.outlier_shift
            else f"first-two-labels-per-agent shift={preset.outlier_shift:g}",
        )
        if preset.eta is not None:
            md["eta"] = preset.eta
    return md


def preset_reference(preset, seed=DEFAULT_SEED):
    """Oracle report for a preset's dataset (T-independent)."""
    if preset.engine == "ms-dfmd":
        return brute_force_simplex(make_functionals(preset), resolution=200)
    data = make_data(preset, seed)
    global_risk = make_global_risk(preset, data)
    return reference_solution(preset, data=data, global_risk=global_risk, seed=seed)


def run_preset(name, t_grid=DEFAULT_T_GRID, seed=DEFAULT_SEED, out=None, stride=None, **overrides):
    """Run every (sweep value, T) combination; optionally write one CSV per tag.

    Returns {tag: [MetricsRow, ...]}.
    """
    t_grid = tuple(int(t) for t in t_grid)
    results = {}
    for tag, preset in get_presets(name, **overrides):
        reference = preset_reference(preset, seed=seed)
        rows = []
        for T in t_grid:
            row_stride = stride if stride is not None else max(1, T // 50)
            row, _, _ = run_single(preset, T, seed=seed, stride=row_stride, reference=reference)
            rows.append(row)
        results[tag] = rows
        if out:
            path = _sweep_path(out, tag, name)
            emit_csv(rows, path, preset_metadata(tag, preset, seed, t_grid))
    return results


def _sweep_path(out, tag, name):
    if "{}" in out:
        return out.format(tag)
    if tag == name:
        return out
    stem, dot, ext = out.rpartition(".")
    if not dot:
        return f"{out}-{tag}"
    suffix = tag[len(name):] if tag.startswith(name) else f"-{tag}"
    return f"{stem}{suffix}.{ext}"


# ---- configuration files -------------------------------------------------

CONFIG_EXPERIMENT_KEYS = {
    "preset", "seed", "tgrid", "m", "n", "d", "gamma", "loss", "sigma",
    "lambda", "scale", "step", "eta", "outlier_shift",
}


def parse_config(path):
    """Read a key = value config; returns (presets, t_grid, seed, issues)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    issues = []
    try:
        with open(path) as fh:
            cp.read_file(fh, source=path)
    except OSError as exc:
        raise DfoError("bad-config", f"{path}: {exc}") from exc
    except configparser.Error as exc:
        raise DfoError("bad-config", f"{path}: {exc}") from exc
    if "experiment" not in cp:
        raise DfoError("bad-config", f"{path}: missing [experiment] section")
    exp = cp["experiment"]
    for key in exp:
        if key not in CONFIG_EXPERIMENT_KEYS:
            issues.append(f"[experiment] unknown key {key!r}")
    name = exp.get("preset", "fig1-ls")
    seed = exp.getint("seed", DEFAULT_SEED)
    tgrid = tuple(
        int(v) for v in exp.get("tgrid", ",".join(map(str, DEFAULT_T_GRID))).split(",")
    )
    overrides = {}
    for key, field in (("m", "m"), ("n", "n"), ("d", "d")):
        if key in exp:
            overrides[field] = exp.getint(key)
    if "gamma" in exp:
        overrides["gamma"] = exp.getfloat("gamma")
    if "loss" in exp:
        overrides["loss_kind"] = exp.get("loss")
    if "sigma" in exp:
        overrides["sigma"] = exp.getfloat("sigma")
    if "lambda" in exp:
        overrides["lam"] = exp.getfloat("lambda")
    if "scale" in exp:
        raw = exp.get("scale")
        overrides["scale"] = raw if raw == "1/m" else float(raw)
    if "outlier_shift" in exp:
        overrides["outlier_shift"] = exp.getfloat("outlier_shift")
    if "step" in exp:
        raw = exp.get("step")
        if raw.startswith("constant:"):
            overrides["step_rule"] = "constant"
            overrides["eta"] = float(raw.split(":", 1)[1])
        else:
            overrides["step_rule"] = raw
    if "eta" in exp and "eta" not in overrides:
        overrides["eta"] = exp.getfloat("eta")

    presets = get_presets(name, **overrides)
    if "network" in cp:
        net = cp["network"]
        kind = net.get("kind", "ring")
        if kind == "file":
            sched_path = net.get("file", "")
            presets = [(tag, p) for tag, p in presets]
            issues.extend(_check_schedule_file(sched_path, presets[0][1].m))
        elif kind in ("ring", "matching-cycle"):
            presets = [(tag, dataclasses.replace(p, schedule_kind=kind)) for tag, p in presets]
        else:
            issues.append(f"[network] unknown kind {kind!r}")
        if "zeta" in net:
            zeta = net.getfloat("zeta")
            if not 0 < zeta < 1:
                issues.append(f"[network] entry-floor: zeta must lie in (0,1), got {zeta:g}")
    return presets, tgrid, seed, issues


def _check_schedule_file(path, m):
    try:
        sched = load_schedule(path)
    except (DfoError, OSError) as exc:
        return [f"[network] schedule file: {exc}"]
    if sched.m != m:
        return [f"[network] schedule has m={sched.m}, experiment has m={m}"]
    return []


def validate_config(path):
    """Full validation pass; returns (passed, messages).

    Failures fail validation; lines prefixed "warning:" and "resolved:" are
    informational.
    """
    failures = []
    info = []
    try:
        presets, tgrid, seed, issues = parse_config(path)
    except DfoError as exc:
        return False, [str(exc)]
    failures.extend(issues)
    for tag, preset in presets:
        try:
            schedule = make_schedule(preset)
        except DfoError as exc:
            failures.append(f"{tag}: {exc}")
            continue
        horizon = max(min(max(tgrid), 200), schedule.B)
        report = validate_assumption1(schedule, horizon)
        if not report.passed:
            failures.extend(f"{tag}: {msg}" for msg in report.issues[:5])
        if preset.engine == "dfgd" and preset.step_rule == "constant" and preset.lam > 0:
            data = make_data(preset, seed)
            risk = make_global_risk(preset, data)
            mu = preset.lam * preset.resolved_scale()
            L = risk.smoothness_constant()
            limit = min(2.0 * preset.m / mu, 1.0 / (4.0 * L))
            if preset.eta is not None and preset.eta >= limit:
                info.append(
                    f"warning: {tag}: constant step {preset.eta:g} outside the sufficient "
                    f"range (0, {limit:.4g}) for the linear-rate regime"
                )
        info.append(f"resolved: {tag}: {dataclasses.asdict(preset)}")
    return not failures, failures + info
