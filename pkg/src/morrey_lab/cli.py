"""Command-line front end: parse a flat key=value configuration, run, write CSV and summary.

Exit codes: 0 when every verdict with a prediction matches it, 2 on any
mismatch, 3 when some verdict is inconclusive (and nothing mismatches),
1 on any error.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import experiments as ex
from .curves import FAMILIES, arc_chord_trend, diagnostics, generate
from .errors import (
    ConfigParseError,
    ConfigValidationError,
    EmptyReportListError,
    MorreyLabError,
)
from .morrey import MorreyParams, diagnose_membership
from .numerics import GrowthFit, classify_growth, make_grid, sample
from .operators import HardyParams
from .weights import (
    admissible_window,
    check_admissible,
    estimate_indices,
    load_weight_table,
    power,
    power_log,
)

COMMANDS = (
    "probe-hardy",
    "probe-singular",
    "threshold-sweep",
    "verify-inequality",
    "curve-diagnostics",
    "morrey-norm",
    "weight-indices",
)
INEQUALITIES = ("alvarez", "fefferman-stein", "maximal")
DEFAULT_OUT = "morrey_lab_report.csv"


def _float(text):
    return float(text)


def _int(text):
    value = float(text)
    if value != int(value):
        raise ValueError("not an integer")
    return int(value)


def _floats(text):
    return [float(t) for t in str(text).replace(";", ",").split(",") if t.strip()]


# key -> (parser, check, constraint text)
_KEYS = {
    "command": (str, lambda v: v in COMMANDS, f"one of {', '.join(COMMANDS)}"),
    "p": (_float, lambda v: 1.0 <= v < np.inf, "1 <= p < inf"),
    "lambda": (_float, lambda v: 0.0 <= v < 1.0, "lambda must be in [0, 1)"),
    "beta": (_float, np.isfinite, "finite real"),
    "alpha": (_float, np.isfinite, "finite real"),
    "alphas": (_floats, lambda v: len(v) >= 2 and all(np.isfinite(v)), "comma list of at least 2 reals"),
    "weight": (str, lambda v: v.split(":")[0] in ("power", "power_log", "table"), "power:a, power_log:a:b[:A] or table:PATH"),
    "direction": (str, lambda v: v in ("lower", "upper"), "lower or upper"),
    "x0": (_float, lambda v: 0.0 <= v <= 1.0, "0 <= x0 <= 1"),
    "curve": (str, lambda v: v in FAMILIES, f"one of {', '.join(FAMILIES)}"),
    "inequality": (str, lambda v: v in INEQUALITIES, f"one of {', '.join(INEQUALITIES)}"),
    "n": (_int, lambda v: v >= 32, "integer >= 32"),
    "n0": (_int, lambda v: v >= 16, "integer >= 16"),
    "levels": (_int, lambda v: 4 <= v <= 10, "integer in [4, 10]"),
    "s": (_float, lambda v: 0.0 < v < 1.0, "0 < s < 1"),
    "gamma": (_float, np.isfinite, "finite real"),
    "seed": (_int, lambda v: v >= 0, "nonnegative integer"),
    "out": (str, lambda v: len(v) > 0, "nonempty path"),
}

_REQUIRED = {
    "probe-hardy": ("p", "lambda"),
    "probe-singular": ("p", "lambda"),
    "threshold-sweep": ("p", "lambda"),
    "verify-inequality": ("inequality",),
    "curve-diagnostics": ("curve",),
    "morrey-norm": ("p", "lambda", "gamma"),
    "weight-indices": ("weight", "p", "lambda"),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)

    def get(self, key, default=None):
        return self.params.get(key, default)


def _coerce(key, raw):
    parser, check, constraint = _KEYS[key]
    try:
        value = parser(raw)
    except (TypeError, ValueError):
        raise ConfigValidationError(key, constraint) from None
    if not check(value):
        raise ConfigValidationError(key, constraint)
    return value


def parse_config(source: str = "", overrides: dict | None = None) -> RunConfig:
    """Parse ``key = value`` lines (``#`` starts a comment) and apply overrides.

    ``overrides`` (typically command-line flags) replace file values. All
    keys are validated before the config is returned.

    Raises
    ------
    ConfigParseError
        Malformed line, unknown or duplicate key; carries the line number.
    ConfigValidationError
        Value out of range, or a key required by the command is missing.
    """
    raw = {}
    for lineno, line in enumerate(source.splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise ConfigParseError(lineno, "expected key = value")
        key, value = (part.strip() for part in text.split("=", 1))
        if key not in _KEYS:
            raise ConfigParseError(lineno, f"unknown key {key!r}")
        if key in raw:
            raise ConfigParseError(lineno, f"duplicate key {key!r}")
        if not value:
            raise ConfigParseError(lineno, f"empty value for {key!r}")
        raw[key] = value
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _KEYS:
            raise ConfigParseError(0, f"unknown key {key!r}")
        raw[key] = value
    params = {key: _coerce(key, value) for key, value in raw.items()}
    command = params.pop("command", None)
    if command is None:
        raise ConfigValidationError("command", "required")
    for key in _REQUIRED[command]:
        if key not in params:
            raise ConfigValidationError(key, f"required for {command}")
    if command == "probe-hardy" and ("beta" in params) == ("weight" in params):
        raise ConfigValidationError("beta", "set exactly one of beta and weight")
    if command == "probe-singular" and ("alpha" in params) == ("weight" in params):
        raise ConfigValidationError("alpha", "set exactly one of alpha and weight")
    if command == "verify-inequality" and params["inequality"] != "alvarez":
        for key in ("p", "lambda"):
            if key not in params:
                raise ConfigValidationError(key, f"required for {params['inequality']}")
        if params["p"] <= 1.0:
            raise ConfigValidationError("p", "p > 1 for maximal and singular operators")
    if "weight" in params:
        _parse_weight(params["weight"])
    return RunConfig(command, params)


def _parse_weight(text: str):
    kind, *rest = text.split(":")
    try:
        if kind == "power" and len(rest) == 1:
            return power(float(rest[0]))
        if kind == "power_log" and len(rest) in (2, 3):
            A = float(rest[2]) if len(rest) == 3 else None
            return power_log(float(rest[0]), float(rest[1]), A)
        if kind == "table" and len(rest) >= 1:
            return load_weight_table(":".join(rest))
    except MorreyLabError as exc:
        raise ConfigValidationError("weight", str(exc)) from None
    except ValueError:
        pass
    raise ConfigValidationError("weight", "power:a, power_log:a:b[:A] or table:PATH")


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("MORREY_LAB_THREADS", "1")))
    except ValueError:
        return 1


def default_alphas(p: float, lam: float) -> list[float]:
    """Grid of step 0.1 from just below to just above the window, plus both ends."""
    lo, hi = admissible_window(p, lam)
    grid = [round(x, 10) for x in np.arange(-3.0, 3.0001, 0.1) if lo - 0.2 < x < hi + 0.1]
    return sorted(set(grid) | {round(lo, 10), round(hi, 10)})


# ---------------------------------------------------------------------------
# commands


def _levels(cfg, default=5):
    return cfg.get("levels", default)


def _run_probe_hardy(cfg):
    if "beta" in cfg.params:
        hp = HardyParams(beta=cfg.get("beta"), direction=cfg.get("direction", "lower"))
    else:
        hp = HardyParams(weight=_parse_weight(cfg.get("weight")), direction=cfg.get("direction", "lower"))
    return [ex.probe_hardy(cfg.get("p"), cfg.get("lambda"), hp, None, _levels(cfg), cfg.get("n0", 256))]


def _run_probe_singular(cfg):
    w = _parse_weight(cfg.get("weight")) if "weight" in cfg.params else power(cfg.get("alpha"))
    fam = ex.interval_family(cfg.get("p"), cfg.get("lambda"), seed=cfg.get("seed", ex.DEFAULT_SEED))
    return [
        ex.probe_weighted_singular(
            cfg.get("p"), cfg.get("lambda"), w, cfg.get("x0", 0.0), fam, _levels(cfg), cfg.get("n0", 256)
        )
    ]


def _run_threshold_sweep(cfg):
    p, lam = cfg.get("p"), cfg.get("lambda")
    alphas = cfg.get("alphas") or default_alphas(p, lam)
    return ex.threshold_sweep(p, lam, alphas, _levels(cfg), cfg.get("n0", 256), workers=_threads())


def _run_verify(cfg):
    kind = cfg.get("curve", "circle")
    n = cfg.get("n", 1024)
    levels = (n // 4, n // 2, n)
    seed = cfg.get("seed", ex.DEFAULT_SEED)
    which = cfg.get("inequality")
    if which == "alvarez":
        fam = ex.circle_harmonics(seed=seed) if kind == "circle" else ex.jump_family(seed)
        return [ex.verify_alvarez_perez(kind, cfg.get("s", 0.5), fam, levels)]
    p, lam = cfg.get("p"), cfg.get("lambda")
    if which == "fefferman-stein":
        return [ex.verify_fefferman_stein(kind, p, lam, ex.jump_family(seed), levels)]
    return ex.verify_morrey_boundedness_maximal(kind, p, lam, ex.jump_family(seed), levels)


def _run_curve_diagnostics(cfg):
    kind = cfg.get("curve")
    n = cfg.get("n", 1024)
    ns = [n // 8, n // 4, n // 2, n]
    consts, fit = arc_chord_trend(kind, None, ns)
    d = diagnostics(generate(kind, None, n))
    verdict = classify_growth(fit)
    return [
        ex.ExperimentReport(
            name=f"curve_{kind}",
            params={"carleson": d.carleson_constant, "cusp_order": d.cusp_order_estimate},
            per_level=list(zip(ns, consts)),
            growth=fit,
            verdict=verdict,
            constant_estimate=d.arc_chord_constant,
            notes="ratio column is the arc-chord constant; verdict refers to it",
        )
    ]


def _run_morrey_norm(cfg):
    p, lam, gamma = cfg.get("p"), cfg.get("lambda"), cfg.get("gamma")
    mp = MorreyParams(p, lam)
    n0 = cfg.get("n0", 128)
    v = diagnose_membership(lambda n: sample(make_grid(0.0, 1.0, n), lambda x: x**gamma), mp, _levels(cfg), n0)
    ns = [n0 * 2**k for k in range(len(v.norm_estimates))]
    verdict = {"yes": "bounded", "no": "unbounded"}.get(v.member, "inconclusive")
    member = gamma >= (lam - 1.0) / p
    return [
        ex.ExperimentReport(
            name="morrey_norm",
            params={"p": p, "lambda": lam, "gamma": gamma},
            per_level=list(zip(ns, v.norm_estimates)),
            growth=v.growth,
            verdict=verdict,
            constant_estimate=float(v.norm_estimates[-1]),
            prediction="bounded" if member else "unbounded",
            notes="ratio column is the norm; exponent is against the smallest radius",
        )
    ]


def _run_weight_indices(cfg):
    w = _parse_weight(cfg.get("weight"))
    p, lam = cfg.get("p"), cfg.get("lambda")
    rows = []
    for h in (120, 240, 480):
        est = estimate_indices(w, h_levels=h)
        rows.append((h, est.M_upper))
    est = estimate_indices(w)
    ok, margin = check_admissible(w, p, lam, est)
    return [
        ex.ExperimentReport(
            name="weight_indices",
            params={"p": p, "lambda": lam, "m": est.m_lower, "M": est.M_upper, "margin": margin},
            per_level=rows,
            growth=GrowthFit(0.0, 0.0, 0.0),
            verdict="bounded" if ok else "unbounded",
            constant_estimate=est.M_upper,
            notes="level is the number of dyadic scale levels; ratio column is M; verdict is the admissibility prediction",
        )
    ]


_RUNNERS = {
    "probe-hardy": _run_probe_hardy,
    "probe-singular": _run_probe_singular,
    "threshold-sweep": _run_threshold_sweep,
    "verify-inequality": _run_verify,
    "curve-diagnostics": _run_curve_diagnostics,
    "morrey-norm": _run_morrey_norm,
    "weight-indices": _run_weight_indices,
}


def execute(cfg: RunConfig) -> list:
    """Run the configured experiment and return its reports."""
    return _RUNNERS[cfg.command](cfg)


def exit_code(reports) -> int:
    if any(r.matches_prediction is False for r in reports):
        return 2
    if any(r.verdict == "inconclusive" for r in reports):
        return 3
    return 0


# ---------------------------------------------------------------------------
# output


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, float, np.integer, np.floating)):
        return f"{float(value):.9g}" if not isinstance(value, (int, np.integer)) else str(int(value))
    return str(value)


def render_csv(reports) -> str:
    """CSV text: name, sorted parameter keys, then per-level columns."""
    if not reports:
        raise EmptyReportListError("no reports to emit")
    ordered = sorted(reports, key=lambda r: r.name)
    keys = sorted({k for r in ordered for k in r.params})
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", *keys, "level", "ratio", "exponent", "residual", "verdict", "constant_estimate", "paper_bound"])
    for r in ordered:
        for level, ratio in r.per_level:
            writer.writerow(
                [
                    r.name,
                    *(_fmt(r.params.get(k)) for k in keys),
                    _fmt(level),
                    _fmt(float(ratio)),
                    _fmt(float(r.growth.exponent)),
                    _fmt(float(r.growth.residual)),
                    r.verdict,
                    _fmt(float(r.constant_estimate)),
                    _fmt(r.paper_bound),
                ]
            )
    return buf.getvalue()


def render_summary(reports) -> str:
    lines = []
    for r in sorted(reports, key=lambda r: r.name):
        match = {True: "match", False: "MISMATCH", None: "no prediction"}[r.matches_prediction]
        line = (
            f"{r.name}: verdict={r.verdict} prediction={r.prediction or '-'} ({match}); "
            f"constant={r.constant_estimate:.6g}; exponent={r.growth.exponent:.4g}"
        )
        if r.paper_bound is not None:
            line += f"; bound={r.paper_bound:.6g}"
        if r.seed is not None:
            line += f"; seed={r.seed}"
        if r.notes:
            line += f"; {r.notes}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def summary_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".summary.txt")


def emit_report(reports, path) -> None:
    """Write the CSV to ``path`` and the verdict summary next to it.

    Raises
    ------
    EmptyReportListError
        If ``reports`` is empty.
    """
    text = render_csv(reports)
    path = Path(path)
    path.write_text(text)
    summary_path(path).write_text(render_summary(reports))


def _check_writable(path: Path):
    parent = path.resolve().parent
    if not parent.is_dir():
        raise OSError(f"output directory does not exist: {parent}")
    if not os.access(parent, os.W_OK) or (path.exists() and not os.access(path, os.W_OK)):
        raise OSError(f"output path is not writable: {path}")


def run(cfg: RunConfig) -> int:
    """Execute ``cfg``, write the outputs and return the exit code."""
    out = Path(cfg.get("out", DEFAULT_OUT))
    try:
        _check_writable(out)
        reports = execute(cfg)
        emit_report(reports, out)
    except OSError as exc:
        print(f"error: {out}: {exc}", file=sys.stderr)
        return 1
    except MorreyLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write(render_summary(reports))
    return exit_code(reports)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="morrey-lab",
        description="Numerical experiments for Hardy, singular and maximal operators in Morrey spaces.",
    )
    ap.add_argument("command", nargs="?", choices=COMMANDS)
    ap.add_argument("--config", help="flat key = value file; flags override it")
    for key in _KEYS:
        if key != "command":
            ap.add_argument(f"--{key}", dest=key, metavar=key.upper())
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    source = ""
    try:
        if args.config:
            source = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: {args.config}: {exc}", file=sys.stderr)
        return 1
    overrides = {k: v for k, v in vars(args).items() if k != "config" and v is not None}
    try:
        cfg = parse_config(source, overrides)
    except MorreyLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
