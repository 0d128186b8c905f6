"""Experiment drivers with deterministic, hash-stamped file outputs.

Each run_* function takes a plain config dict (usually parsed from JSON),
validates it strictly (unknown keys are errors), executes the experiment,
and returns a result dict with rows, a summary, and an optional check
verdict.  emit_outputs writes the result as CSV (rows), JSON (everything),
and optionally a field archive.

Outputs are byte-stable: floats are serialised by repr, rows are ordered,
no timestamps are written, files land via atomic replace, and every row
carries a short hash of the resolved config so mixed-up files can be
traced to their parameters.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import hashlib
import io
import json
import math
import os
import tempfile
import zipfile

import numpy as np

from . import exponents, testfunc
from .bump import check_conditions, mollifier_samples, power as bump_power
from .bump import required_power, self_convolve
from .dispersion import propagate_linear
from .errors import ConfigError
from .grid import Grid, SpectralField, forward_transform
from .norms import hdotneg_norm, hs_norm, lp_norm, seminorm_hs
from .profiles import (
    DataPair,
    assemble_pair,
    laplacian_gaussian,
    log_profile,
    power_profile,
)
from .solver import SimConfig, measure_lifespan, run

__all__ = [
    "SCHEMA_VERSION",
    "config_hash",
    "load_config",
    "FitResult",
    "fit_powerlaw",
    "run_decay",
    "run_lifespan",
    "run_simulate",
    "run_atlas",
    "run_classify",
    "run_bump_check",
    "run_testfunc",
    "run_sweep",
    "emit_outputs",
    "RUNNERS",
]

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------
# config plumbing


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def config_hash(cfg: dict) -> str:
    """Short stable fingerprint of a resolved config dict."""
    return hashlib.sha256(canonical_json(cfg).encode("utf-8")).hexdigest()[:12]


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return cfg


def _take(cfg: dict, where: str, required: tuple, optional: dict) -> dict:
    if not isinstance(cfg, dict):
        raise ConfigError(f"{where} must be an object, got {type(cfg).__name__}")
    unknown = set(cfg) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = [k for k in required if k not in cfg]
    if missing:
        raise ConfigError(f"missing keys in {where}: {missing}")
    out = dict(optional)
    out.update(cfg)
    return out


def build_grid(cfg: dict) -> Grid:
    c = _take(cfg, "grid", ("dim", "size", "half_length"), {})
    return Grid(int(c["dim"]), int(c["size"]), float(c["half_length"]))


_PROFILE_KEYS = {
    "power": (("gamma",), {"r0": 0.5, "scale": 1.0}),
    "log": (("gamma",), {"r0": 0.5, "scale": 1.0}),
    "laplacian_gaussian": (("k",), {"scale": 1.0}),
}


def build_profile(grid: Grid, cfg: dict) -> tuple[SpectralField, dict]:
    """Build a profile field; returns it plus the fully resolved sub-config."""
    if "family" not in cfg:
        raise ConfigError("profile config needs a 'family' key")
    family = cfg["family"]
    if family not in _PROFILE_KEYS:
        raise ConfigError(
            f"unknown profile family {family!r}; expected one of "
            f"{sorted(_PROFILE_KEYS)}"
        )
    req, opt = _PROFILE_KEYS[family]
    c = _take(
        {k: v for k, v in cfg.items() if k != "family"}, f"profile[{family}]", req, opt
    )
    if family == "power":
        fld = power_profile(grid, float(c["gamma"]), float(c["r0"]), float(c["scale"]))
    elif family == "log":
        fld = log_profile(grid, float(c["gamma"]), float(c["r0"]), float(c["scale"]))
    else:
        fld = laplacian_gaussian(grid, int(c["k"]), float(c["scale"]))
    return fld, {"family": family, **c}


def build_pair(grid: Grid, profile_cfg: dict, eps: float) -> tuple[DataPair, dict]:
    fld, resolved = build_profile(grid, profile_cfg)
    return assemble_pair(fld, eps, family=resolved["family"]), resolved


# ---------------------------------------------------------------------
# fitting


class FitResult:
    """Least-squares power law y = C x^slope, fitted in log-log."""

    def __init__(self, slope: float, intercept: float, r2: float, count: int):
        self.slope = slope
        self.intercept = intercept
        self.r2 = r2
        self.count = count

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r2,
            "count": self.count,
        }


def fit_powerlaw(x, y) -> FitResult:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size or x.size < 3:
        raise ConfigError(f"power-law fit needs >= 3 paired points, got {x.size}")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise ConfigError("power-law fit needs strictly positive data")
    lx, ly = np.log(x), np.log(y)
    lx0 = lx - lx.mean()
    slope = float(np.dot(lx0, ly - ly.mean()) / np.dot(lx0, lx0))
    intercept = float(ly.mean() - slope * lx.mean())
    resid = ly - (slope * lx + intercept)
    sst = float(np.dot(ly - ly.mean(), ly - ly.mean()))
    r2 = 1.0 - float(np.dot(resid, resid)) / sst if sst > 0.0 else 1.0
    return FitResult(slope, intercept, r2, int(x.size))


# ---------------------------------------------------------------------
# experiment runners


def _result(kind: str, config: dict, columns, rows, summary, check, arrays=None):
    return {
        "kind": kind,
        "config": config,
        "config_hash": config_hash(config),
        "columns": columns,
        "rows": rows,
        "summary": summary,
        "check": check,
        "arrays": arrays,
    }


def _ladder_times(cfg) -> list[float]:
    if isinstance(cfg, list):
        times = [float(t) for t in cfg]
        if len(times) < 3 or any(b <= a for a, b in zip(times, times[1:])):
            raise ConfigError("times must be >= 3 strictly increasing values")
        return times
    c = _take(cfg, "times", ("start", "ratio", "count"), {})
    start, ratio, count = float(c["start"]), float(c["ratio"]), int(c["count"])
    if start <= 0.0 or ratio <= 1.0 or count < 3:
        raise ConfigError("times ladder needs start > 0, ratio > 1, count >= 3")
    return [start * ratio**j for j in range(count)]


def run_decay(cfg: dict) -> dict:
    """Norm decay of the linear flow from a low-frequency profile.

    Propagates u0 = u1 = profile exactly to each ladder time and fits
    power laws to the L2 norm and the order-s homogeneous seminorm.  The
    expected slopes are -gamma/2 and -(s + gamma)/2.
    """
    c = _take(
        cfg,
        "decay config",
        ("grid", "profile", "times"),
        {"s": 1.0, "weight_gamma": None, "policy": "exclude", "check": None},
    )
    grid = build_grid(c["grid"])
    profile, prof_resolved = build_profile(grid, c["profile"])
    times = _ladder_times(c["times"])
    s = float(c["s"])
    gamma = float(
        c["weight_gamma"]
        if c["weight_gamma"] is not None
        else prof_resolved.get("gamma", 0.5)
    )
    resolved = {
        "kind": "decay",
        "grid": {"dim": grid.dim, "size": grid.size, "half_length": grid.half_length},
        "profile": prof_resolved,
        "times": times,
        "s": s,
        "weight_gamma": gamma,
        "policy": c["policy"],
    }

    rows = []
    for t in times:
        uh, _ = propagate_linear(profile, profile, t)
        rows.append(
            {
                "t": t,
                "l2": lp_norm(uh, 2.0),
                "linf": lp_norm(uh, math.inf),
                "hs": hs_norm(uh, s),
                "hdotneg": hdotneg_norm(uh, gamma, c["policy"]),
                "seminorm": seminorm_hs(uh, s),
            }
        )

    tarr = [r["t"] for r in rows]
    l2_fit = fit_powerlaw(tarr, [r["l2"] for r in rows])
    semi_fit = fit_powerlaw(tarr, [r["seminorm"] for r in rows])
    expected_l2 = -gamma / 2.0
    expected_semi = -(s + gamma) / 2.0
    summary = {
        "l2_fit": l2_fit.as_dict(),
        "seminorm_fit": semi_fit.as_dict(),
        "expected_l2_slope": expected_l2,
        "expected_seminorm_slope": expected_semi,
        "hdotneg_first": rows[0]["hdotneg"],
        "hdotneg_last": rows[-1]["hdotneg"],
    }

    check = None
    if c["check"] is not None:
        cc = _take(c["check"], "decay check", (), {"l2_tol": 0.05, "seminorm_tol": 0.1})
        ok_l2 = abs(l2_fit.slope - expected_l2) <= float(cc["l2_tol"])
        ok_semi = abs(semi_fit.slope - expected_semi) <= float(cc["seminorm_tol"])
        check = {
            "passed": bool(ok_l2 and ok_semi),
            "details": {
                "l2_slope": l2_fit.slope,
                "l2_band": [expected_l2 - cc["l2_tol"], expected_l2 + cc["l2_tol"]],
                "seminorm_slope": semi_fit.slope,
                "seminorm_band": [
                    expected_semi - cc["seminorm_tol"],
                    expected_semi + cc["seminorm_tol"],
                ],
            },
        }
        resolved["check"] = cc

    columns = ["t", "l2", "linf", "hs", "hdotneg", "seminorm"]
    return _result("decay", resolved, columns, rows, summary, check)


def run_lifespan(cfg: dict) -> dict:
    """Blow-up time versus data amplitude, with power-law fit.

    Runs the full nonlinear solver for each eps at two step sizes and
    extrapolates the threshold-crossing time.  Censored rows (survived the
    horizon) are excluded from the fit and reported.
    """
    c = _take(
        cfg,
        "lifespan config",
        ("grid", "profile", "p", "eps_values", "dt", "t_cap"),
        {"blowup_threshold": 1e6, "dealias": True, "check": None},
    )
    grid = build_grid(c["grid"])
    profile, prof_resolved = build_profile(grid, c["profile"])
    p = float(c["p"])
    eps_values = [float(e) for e in c["eps_values"]]
    if len(eps_values) < 3:
        raise ConfigError("need >= 3 eps values for a lifespan fit")
    resolved = {
        "kind": "lifespan",
        "grid": {"dim": grid.dim, "size": grid.size, "half_length": grid.half_length},
        "profile": prof_resolved,
        "p": p,
        "eps_values": eps_values,
        "dt": float(c["dt"]),
        "t_cap": float(c["t_cap"]),
        "blowup_threshold": float(c["blowup_threshold"]),
        "dealias": bool(c["dealias"]),
    }

    rows = []
    for eps in eps_values:
        pair = assemble_pair(profile, eps, family=prof_resolved["family"])
        sim = SimConfig(
            data=pair,
            p=p,
            dt=float(c["dt"]),
            t_max=float(c["t_cap"]),
            blowup_threshold=float(c["blowup_threshold"]),
            dealias=bool(c["dealias"]),
        )
        res = measure_lifespan(sim)
        rows.append(
            {
                "eps": eps,
                "t_b": res.t_blowup,
                "t_b_err": res.error,
                "censored": res.censored,
            }
        )

    fitted = [r for r in rows if not r["censored"]]
    gamma = prof_resolved.get("gamma")
    n = grid.dim
    predicted = (
        dataclasses.asdict(exponents.lifespan_exponents(n, float(gamma), p))
        if gamma is not None
        else None
    )
    summary: dict = {
        "n_censored": sum(1 for r in rows if r["censored"]),
        "predicted": predicted,
    }
    fit = None
    if len(fitted) >= 3:
        fit = fit_powerlaw(
            [1.0 / r["eps"] for r in fitted], [r["t_b"] for r in fitted]
        )
        summary["fit"] = fit.as_dict()
        summary["measured_exponent"] = fit.slope

    check = None
    if c["check"] is not None:
        cc = _take(
            c["check"],
            "lifespan check",
            (),
            {"rel_tol": None, "max_slope": None, "min_uncensored": 3},
        )
        details: dict = {"n_fitted": len(fitted)}
        passed = len(fitted) >= int(cc["min_uncensored"]) and fit is not None
        if passed and cc["rel_tol"] is not None:
            target = predicted["a_combined"] if predicted else None
            if target is None:
                raise ConfigError("rel_tol check needs a profile gamma")
            passed = abs(fit.slope - target) <= float(cc["rel_tol"]) * abs(target)
            details.update(measured=fit.slope, target=target, rel_tol=cc["rel_tol"])
        if passed and cc["max_slope"] is not None:
            passed = fit.slope <= float(cc["max_slope"])
            details.update(measured=fit.slope, max_slope=cc["max_slope"])
        check = {"passed": bool(passed), "details": details}
        resolved["check"] = {k: v for k, v in cc.items()}

    columns = ["eps", "t_b", "t_b_err", "censored"]
    return _result("lifespan", resolved, columns, rows, summary, check)


def run_simulate(cfg: dict) -> dict:
    """One nonlinear (or linear) run with recorded norms and fields."""
    c = _take(
        cfg,
        "simulate config",
        ("grid", "profile", "eps", "p", "dt", "t_max"),
        {
            "blowup_threshold": 1e6,
            "dealias": True,
            "nonlinear": True,
            "record_every": 1,
            "record_fields_every": 0,
            "s": 1.0,
            "weight_gamma": None,
            "policy": "exclude",
            "check": None,
        },
    )
    grid = build_grid(c["grid"])
    pair, prof_resolved = build_pair(grid, c["profile"], float(c["eps"]))
    gamma = float(
        c["weight_gamma"]
        if c["weight_gamma"] is not None
        else prof_resolved.get("gamma", 0.5)
    )
    sim = SimConfig(
        data=pair,
        p=float(c["p"]),
        dt=float(c["dt"]),
        t_max=float(c["t_max"]),
        blowup_threshold=float(c["blowup_threshold"]),
        dealias=bool(c["dealias"]),
        nonlinear=bool(c["nonlinear"]),
        record_every=int(c["record_every"]),
        record_fields_every=int(c["record_fields_every"]),
        s=float(c["s"]),
        gamma=gamma,
        norm_policy=c["policy"],
    )
    resolved = {
        "kind": "simulate",
        "grid": {"dim": grid.dim, "size": grid.size, "half_length": grid.half_length},
        "profile": prof_resolved,
        "eps": float(c["eps"]),
        "p": float(c["p"]),
        "dt": float(c["dt"]),
        "t_max": float(c["t_max"]),
        "blowup_threshold": float(c["blowup_threshold"]),
        "dealias": bool(c["dealias"]),
        "nonlinear": bool(c["nonlinear"]),
        "record_every": int(c["record_every"]),
        "record_fields_every": int(c["record_fields_every"]),
        "s": float(c["s"]),
        "weight_gamma": gamma,
        "policy": c["policy"],
    }

    traj = run(sim)
    rows = [
        {
            "t": float(traj.times[i]),
            "l2": float(traj.l2[i]),
            "linf": float(traj.linf[i]),
            "hs": float(traj.hs[i]),
            "hdotneg": float(traj.hdotneg[i]),
        }
        for i in range(traj.times.size)
    ]
    summary = {
        "outcome": traj.outcome,
        "t_blowup": traj.t_blowup,
        "steps_taken": traj.steps_taken,
        "boundary_ratio": traj.boundary_ratio,
        "boundary_flagged": traj.boundary_flagged,
    }

    arrays = None
    if traj.field_snapshots is not None:
        arrays = {
            "times": traj.field_times,
            "snapshots": traj.field_snapshots,
            "u0_coeffs": pair.u0.coeffs,
            "u1_coeffs": pair.u1.coeffs,
            "eps": np.array(pair.eps),
            "p": np.array(sim.p),
            "dim": np.array(grid.dim),
            "size": np.array(grid.size),
            "half_length": np.array(grid.half_length),
        }

    check = None
    if c["check"] is not None:
        cc = _take(
            c["check"],
            "simulate check",
            (),
            {"expect_outcome": None, "l2_decreasing_factor": None},
        )
        passed = True
        details: dict = {"outcome": traj.outcome}
        if cc["expect_outcome"] is not None:
            passed = passed and traj.outcome == cc["expect_outcome"]
        if cc["l2_decreasing_factor"] is not None:
            factor = float(traj.l2[-1]) / float(traj.l2[0])
            details["l2_last_over_first"] = factor
            passed = passed and factor <= float(cc["l2_decreasing_factor"])
        check = {"passed": bool(passed), "details": details}
        resolved["check"] = cc

    columns = ["t", "l2", "linf", "hs", "hdotneg"]
    return _result("simulate", resolved, columns, rows, summary, check, arrays)


def run_atlas(cfg: dict) -> dict:
    """Classify a rectangular raster in the (gamma, p) plane."""
    c = _take(cfg, "atlas config", ("n", "gamma", "p"), {"s": 1.0})
    gc = _take(c["gamma"], "atlas gamma", ("min", "max", "count"), {})
    pc = _take(c["p"], "atlas p", ("min", "max", "count"), {})
    n, s = int(c["n"]), float(c["s"])
    gammas = np.linspace(float(gc["min"]), float(gc["max"]), int(gc["count"]))
    ps = np.linspace(float(pc["min"]), float(pc["max"]), int(pc["count"]))
    resolved = {
        "kind": "atlas",
        "n": n,
        "s": s,
        "gamma": {k: float(v) if k != "count" else int(v) for k, v in gc.items()},
        "p": {k: float(v) if k != "count" else int(v) for k, v in pc.items()},
    }
    rows = [
        {"gamma": float(g), "p": float(p), "verdict": exponents.classify(n, g, p, s).verdict}
        for g in gammas
        for p in ps
    ]
    counts: dict = {}
    for r in rows:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    summary = {
        "counts": dict(sorted(counts.items())),
        "thresholds": dataclasses.asdict(exponents.thm_thresholds(n)),
        "fujita": exponents.fujita(n),
    }
    return _result("atlas", resolved, ["gamma", "p", "verdict"], rows, summary, None)


def run_classify(cfg: dict) -> dict:
    """Classify one parameter point and report every nearby threshold."""
    c = _take(cfg, "classify config", ("n", "gamma", "p"), {"s": 1.0})
    n, gamma, p, s = int(c["n"]), float(c["gamma"]), float(c["p"]), float(c["s"])
    resolved = {"kind": "classify", "n": n, "gamma": gamma, "p": p, "s": s}
    verdict = exponents.classify(n, gamma, p, s)
    th = exponents.thm_thresholds(n)
    life = exponents.lifespan_exponents(n, gamma, p)
    summary = {
        "verdict": verdict.verdict,
        "blowup_tags": list(verdict.blowup_tags),
        "p_crit": exponents.crit(n, gamma),
        "p_fujita": exponents.fujita(n),
        "gamma_min": th.gamma_min,
        "p_min": th.p_min,
        "lifespan": {
            "a_subcritical": life.a_subcritical,
            "a_fujita": life.a_fujita,
            "a_combined": life.a_combined,
            "switch_p": life.switch_p,
        },
    }
    rows = [{"gamma": gamma, "p": p, "verdict": verdict.verdict}]
    return _result("classify", resolved, ["gamma", "p", "verdict"], rows, summary, None)


def run_bump_check(cfg: dict) -> dict:
    """Certify the convolved bump and optional shifted counterexample."""
    c = _take(
        cfg,
        "bump-check config",
        (),
        {
            "grid": {"dim": 1, "size": 512, "half_length": 4.0},
            "exponents": [3, 5, 7],
            "tol": 1e-8,
            "shifted_center": None,
        },
    )
    grid = build_grid(c["grid"])
    tol = float(c["tol"])
    exps = [int(l) for l in c["exponents"]]
    resolved = {
        "kind": "bump-check",
        "grid": {"dim": grid.dim, "size": grid.size, "half_length": grid.half_length},
        "exponents": exps,
        "tol": tol,
        "shifted_center": c["shifted_center"],
    }

    base = self_convolve(grid)
    rep = check_conditions(base, tol=tol)
    vol = grid.dx**grid.dim
    refold = forward_transform(grid, base.samples)
    transform_residual = float(np.max(np.abs(refold.coeffs - base.coeffs.coeffs)))

    rows = []
    for l in exps:
        b = bump_power(base, l)
        rows.append(
            {
                "exponent": l,
                "integral": float(b.power_samples.sum() * vol),
                "max": float(b.power_samples.max()),
                "min": float(b.power_samples.min()),
            }
        )

    summary: dict = {
        "base": {
            "nonneg_ok": rep.nonneg_ok,
            "fourier_ok": rep.fourier_ok,
            "monotone_ok": rep.monotone_ok,
            "worst_negative": rep.worst_negative,
            "worst_fourier": rep.worst_fourier,
            "worst_monotone": rep.worst_monotone,
        },
        "transform_identity_residual": transform_residual,
        "base_integral": float(base.samples.sum() * vol),
    }
    passed = rep.passed and transform_residual < 1e-10

    if c["shifted_center"] is not None:
        shifted = self_convolve(grid, mollifier_samples(grid, float(c["shifted_center"])))
        srep = check_conditions(shifted, tol=tol)
        summary["shifted"] = {
            "monotone_ok": srep.monotone_ok,
            "worst_monotone": srep.worst_monotone,
        }
        passed = passed and not srep.monotone_ok

    check = {"passed": bool(passed), "details": summary["base"]}
    return _result("bump-check", resolved, ["exponent", "integral", "max", "min"], rows, summary, check)


def run_testfunc(cfg: dict) -> dict:
    """Evaluate the weak-solution inequalities on stored fields."""
    c = _take(
        cfg,
        "testfunc config",
        ("fields",),
        {
            "R_values": [2.0, 4.0, 8.0],
            "exponent": None,
            "bump_grid": {"dim": 1, "size": 512, "half_length": 4.0},
            "time_points": 513,
            "check": None,
        },
    )
    data = _load_fields(c["fields"])
    grid: Grid = data["grid"]
    p = data["p"]
    l = int(c["exponent"]) if c["exponent"] is not None else required_power(p)
    bgrid = build_grid(c["bump_grid"])
    resolved = {
        "kind": "testfunc",
        "fields": c["fields"],
        "R_values": [float(r) for r in c["R_values"]],
        "exponent": l,
        "bump_grid": {
            "dim": bgrid.dim,
            "size": bgrid.size,
            "half_length": bgrid.half_length,
        },
        "time_points": int(c["time_points"]),
    }

    bump = bump_power(self_convolve(bgrid), l)
    weight = testfunc.weight_constant(
        p, l, dim=grid.dim, size=bgrid.size, half_length=bgrid.half_length,
        time_points=int(c["time_points"]),
    )
    rows = []
    for R in resolved["R_values"]:
        pair = testfunc.TestPair(bump=bump, R=float(R))
        rep = testfunc.check_bounds(
            data["times"], data["snapshots"], grid, data["pair"], p, pair, weight
        )
        rows.append(
            {
                "R": rep.R,
                "i_value": rep.i_value,
                "data_term": rep.data_term,
                "holder_rhs": rep.holder_rhs,
                "absorbed_rhs": rep.absorbed_rhs,
                "margin_holder": rep.margin_holder,
                "margin_absorbed": rep.margin_absorbed,
                "identity_rel": (
                    abs(rep.identity_residual) / rep.identity_scale
                    if rep.identity_scale > 0.0
                    else 0.0
                ),
            }
        )
    summary = {
        "p": p,
        "exponent": l,
        "weight_dominating": weight.dominating,
        "weight_literal": weight.literal,
        "weight_rel_change": weight.rel_change_dominating,
    }

    check = None
    if c["check"] is not None:
        cc = _take(
            c["check"],
            "testfunc check",
            (),
            {"min_margin": 0.0, "max_identity_rel": 0.05},
        )
        passed = all(
            r["margin_holder"] >= float(cc["min_margin"])
            and r["margin_absorbed"] >= float(cc["min_margin"])
            and r["identity_rel"] <= float(cc["max_identity_rel"])
            for r in rows
        )
        check = {"passed": bool(passed), "details": {"rows": len(rows)}}
        resolved["check"] = cc

    columns = [
        "R",
        "i_value",
        "data_term",
        "holder_rhs",
        "absorbed_rhs",
        "margin_holder",
        "margin_absorbed",
        "identity_rel",
    ]
    return _result("testfunc", resolved, columns, rows, summary, check)


def _load_fields(path: str) -> dict:
    try:
        with np.load(path) as z:
            grid = Grid(int(z["dim"]), int(z["size"]), float(z["half_length"]))
            u0 = SpectralField(grid, np.ascontiguousarray(z["u0_coeffs"]))
            u1 = SpectralField(grid, np.ascontiguousarray(z["u1_coeffs"]))
            pair = DataPair(
                u0=u0, u1=u1, eps=float(z["eps"]), family="stored"
            )
            return {
                "grid": grid,
                "pair": pair,
                "times": np.asarray(z["times"], dtype=np.float64),
                "snapshots": np.asarray(z["snapshots"]),
                "p": float(z["p"]),
            }
    except OSError as exc:
        raise ConfigError(f"cannot read fields archive {path}: {exc}") from exc
    except KeyError as exc:
        raise ConfigError(f"fields archive {path} is missing array {exc}") from exc


RUNNERS = {
    "decay": run_decay,
    "lifespan": run_lifespan,
    "simulate": run_simulate,
    "atlas": run_atlas,
    "classify": run_classify,
    "bump-check": run_bump_check,
    "testfunc": run_testfunc,
}


def run_sweep(cfg: dict, out_dir: str, threads: int = 1) -> dict:
    """Run a list of named jobs, each into its own subdirectory."""
    c = _take(cfg, "sweep config", ("jobs",), {})
    jobs = c["jobs"]
    if not isinstance(jobs, list) or not jobs:
        raise ConfigError("sweep needs a non-empty 'jobs' list")
    seen = set()
    parsed = []
    for j, job in enumerate(jobs):
        jc = _take(job, f"jobs[{j}]", ("name", "kind", "config"), {})
        name, kind = str(jc["name"]), str(jc["kind"])
        if kind not in RUNNERS or kind == "sweep":
            raise ConfigError(f"jobs[{j}]: unknown kind {kind!r}")
        if name in seen or not name or "/" in name or name.startswith("."):
            raise ConfigError(f"jobs[{j}]: bad or duplicate name {name!r}")
        seen.add(name)
        parsed.append((name, kind, jc["config"]))

    resolved = {
        "kind": "sweep",
        "jobs": [{"name": n, "kind": k} for n, k, _ in parsed],
        "threads": int(threads),
    }

    def _one(item):
        name, kind, sub = item
        result = RUNNERS[kind](sub)
        emit_outputs(result, os.path.join(out_dir, name))
        return name, kind, result

    rows = []
    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_one, parsed))
    else:
        results = [_one(item) for item in parsed]
    for name, kind, result in results:
        rows.append(
            {
                "name": name,
                "kind": kind,
                "config_hash": result["config_hash"],
                "passed": result["check"]["passed"] if result["check"] else True,
            }
        )
    all_passed = all(r["passed"] for r in rows)
    summary = {"jobs": len(rows), "all_passed": all_passed}
    check = {"passed": all_passed, "details": {"jobs": len(rows)}}
    return _result("sweep", resolved, ["name", "kind", "config_hash", "passed"], rows, summary, check)


# ---------------------------------------------------------------------
# output emission


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return repr(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if v is None:
        return ""
    return str(v)


def _atomic_write_bytes(path: str, blob: bytes) -> None:
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(blob)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.bool_,)):
        return bool(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def write_csv(path: str, columns: list, rows: list, cfg_hash: str) -> None:
    lines = [",".join(columns + ["config_hash"])]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in columns) + "," + cfg_hash)
    _atomic_write_bytes(path, ("\n".join(lines) + "\n").encode("utf-8"))


def _sanitize(obj):
    """Non-finite floats become strings so the JSON stays standard."""
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else repr(f)
    return obj


def write_json(path: str, payload: dict) -> None:
    text = json.dumps(
        _sanitize(payload), sort_keys=True, indent=2, default=_json_default
    )
    _atomic_write_bytes(path, (text + "\n").encode("utf-8"))


def write_field_archive(path: str, arrays: dict) -> None:
    """NPZ-compatible archive with fixed zip metadata for byte-stable output."""
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_STORED) as zf:
        for name in sorted(arrays):
            payload = io.BytesIO()
            np.lib.format.write_array(payload, np.asarray(arrays[name]))
            info = zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
            zf.writestr(info, payload.getvalue())
    _atomic_write_bytes(path, buf.getvalue())


def emit_outputs(result: dict, out_dir: str) -> list:
    """Write CSV + JSON (+ field archive) for one result; returns paths."""
    os.makedirs(out_dir, exist_ok=True)
    kind = result["kind"]
    paths = []
    if result["columns"]:
        csv_path = os.path.join(out_dir, f"{kind}.csv")
        write_csv(csv_path, result["columns"], result["rows"], result["config_hash"])
        paths.append(csv_path)
    payload = {
        "schema": SCHEMA_VERSION,
        "kind": kind,
        "config": result["config"],
        "config_hash": result["config_hash"],
        "summary": result["summary"],
        "rows": result["rows"],
        "check": result["check"],
    }
    json_path = os.path.join(out_dir, f"{kind}.json")
    write_json(json_path, payload)
    paths.append(json_path)
    if result.get("arrays"):
        npz_path = os.path.join(out_dir, "fields.npz")
        write_field_archive(npz_path, result["arrays"])
        paths.append(npz_path)
    return paths
