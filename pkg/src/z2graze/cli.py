"""Command-line entry point.

Subcommands write their artifacts into the configured output directory and
print a JSON summary on stdout. Configuration errors exit with status 1 and
numerical failures with status 2; in both cases a JSON error object is
written to stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import re
import sys

import numpy as np

from . import __version__
from .config import RunConfig
from .errors import ConfigError, NumericalError, Z2GrazeError

COMMANDS = ("simulate", "tangencies", "quantities", "portrait", "boundary", "diagram", "example")

# flags whose values may start with a minus sign
_VALUE_FLAGS = ("--from", "--alpha", "--beta", "--interval", "--a", "--b", "--grid")
_NEGATIVE = re.compile(r"^-[\d.]")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"usage: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="z2graze", description="Grazing figure-eight analysis for symmetric Filippov systems.")
    p.add_argument("--version", action="version", version=f"z2graze {__version__}")
    sub = p.add_subparsers(dest="command")
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="INI file with [section] key = value entries")
        s.add_argument("--print-config", action="store_true",
                       help="print the resolved configuration and exit")
        s.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE")
        s.add_argument("--system", dest="system.id")
        s.add_argument("--a", dest="system.a")
        s.add_argument("--b", dest="system.b")
        s.add_argument("--alpha", dest="parameters.alpha")
        s.add_argument("--beta", dest="parameters.beta")
        s.add_argument("--jobs", dest="run.jobs")
        s.add_argument("--out", dest="run.output_dir")
        if name == "simulate":
            s.add_argument("--from", dest="simulate.from")
            s.add_argument("--t", dest="simulate.t")
            s.add_argument("--side", dest="simulate.side")
        elif name == "tangencies":
            s.add_argument("--interval", dest="tangencies.interval")
        elif name == "portrait":
            s.add_argument("--trajectories", action="store_const", const="true",
                           dest="portrait.trajectories")
        elif name == "boundary":
            s.add_argument("--kind", dest="boundary.kind")
            s.add_argument("--grid", dest="boundary.grid")
        elif name == "diagram":
            s.add_argument("--grid", dest="diagram.grid")
    return p


def _normalize(argv):
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_FLAGS and i + 1 < len(argv) and _NEGATIVE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _clean(obj):
    """JSON-ready copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False, ensure_ascii=False)


class _Run:
    def __init__(self, cfg: RunConfig, command: str):
        self.cfg = cfg
        self.command = command
        self.out = cfg.get("run", "output_dir")
        self.files = []

    def envelope(self, payload: dict) -> dict:
        return {"command": self.command, "version": __version__, "config": self.cfg.to_dict(),
                "result": payload}

    def write(self, name: str, text: str) -> str:
        os.makedirs(self.out, exist_ok=True)
        path = os.path.join(self.out, name)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        self.files.append(path)
        return path

    def write_json(self, name: str, payload: dict) -> str:
        return self.write(name, dumps(self.envelope(payload)) + "\n")

    def write_csv(self, name: str, text: str) -> str:
        """CSV plus a sidecar ``.meta.json`` holding the config and version."""
        path = self.write(name, text)
        self.write(name + ".meta.json", dumps(self.envelope({"csv": name})) + "\n")
        return path


# -- subcommands -------------------------------------------------------------

def _simulate(run: _Run) -> dict:
    from .hybrid import flow

    cfg = run.cfg
    sys_ = cfg.system()
    x0, y0 = (float(v) for v in cfg.get("simulate", "from").split(","))
    t = float(cfg.get("simulate", "t"))
    tr = flow(sys_, (x0, y0), cfg.get("simulate", "side") or None, t, cfg.alpha(), cfg.options())
    run.write_csv("trajectory.csv", tr.to_csv())
    return {"events": [e.__dict__ for e in tr.events], "arcs": tr.kinds(),
            "stopped": tr.stopped, "total_time": tr.total_time,
            "end": [float(v) for v in tr.arcs[-1].xy[-1]]}


def _tangencies(run: _Run) -> dict:
    from .boundary import find_tangencies, pseudo_equilibria, sliding_segments

    cfg = run.cfg
    sys_ = cfg.system()
    lo, hi = (float(v) for v in cfg.get("tangencies", "interval").split(","))
    n = int(cfg.get("tangencies", "n_scan"))
    alpha = cfg.alpha()
    tang = find_tangencies(sys_, (lo, hi), alpha, n_scan=n)
    segs = sliding_segments(sys_, (lo, hi), alpha)
    peqs = []
    for a, b, _ in segs:
        peqs.extend(pseudo_equilibria(sys_, (a, b), alpha))
    payload = {"tangencies": [t.to_dict() for t in tang],
               "sliding_segments": [{"lo": a, "hi": b, "stable": st} for a, b, st in segs],
               "pseudo_equilibria": [p.to_dict() for p in peqs]}
    run.write_json("tangencies.json", payload)
    return payload


def _quantities_payload(sys_, opts):
    from .atlas import predicted_coefficients
    from .quantities import beta_jacobian, grazing_cycle, intrinsic_quantities

    gcd = grazing_cycle(sys_, (0.0, 0.0), opts)
    q = intrinsic_quantities(gcd, sys_, error_estimate=True)
    payload = {"cycle": gcd.summary(), "quantities": q.to_dict(),
               "identity_residuals": q.identity_residuals(), "sign_checks": q.sign_checks()}
    try:
        payload["jacobian"] = beta_jacobian(q, sys_).tolist()
        payload["predicted_coefficients"] = predicted_coefficients(q)
    except NumericalError as exc:
        payload["jacobian_error"] = exc.to_dict()
    return payload


def _quantities(run: _Run) -> dict:
    payload = _quantities_payload(run.cfg.system(), run.cfg.options())
    run.write_json("quantities.json", payload)
    return payload


def _portrait(run: _Run) -> dict:
    from .atlas import Unfolding, beta_to_alpha, to_beta_form
    from .cycles import classify_portrait, object_trajectory

    cfg = run.cfg
    sys_ = cfg.system()
    u = Unfolding(sys_, cfg.options())
    beta = cfg.beta()
    seed = 0.0
    if beta is not None:
        alpha = beta_to_alpha(sys_, beta, u)
        seed = beta[1]
    else:
        alpha = np.array(cfg.alpha())
    bs = to_beta_form(sys_, alpha, u, seed)
    inv = classify_portrait(bs, certify=True, n_scan=int(cfg.get("portrait", "n_scan")))
    payload = inv.to_dict()
    if cfg.flag("portrait", "trajectories"):
        names = []
        for i, obj in enumerate(inv.objects):
            tr = object_trajectory(bs, obj)
            name = f"object_{i:02d}_{obj.type}_{obj.zone}.csv"
            run.write_csv(name, tr.to_csv())
            names.append(name)
        payload["trajectory_files"] = names
    run.write_json("portrait.json", payload)
    return payload


def _grid(cfg, section, u):
    from .atlas import default_grid

    g = cfg.grid(section)
    if g is None:
        return default_grid(u, n=int(cfg.get(section, "n_grid")))
    return np.abs(np.asarray(g, dtype=float))


def _boundary(run: _Run) -> dict:
    from .atlas import NEGATIVE_SIDE, Unfolding, fit_quadratic, trace_boundary
    from .errors import IllConditioned

    cfg = run.cfg
    u = Unfolding(cfg.system(), cfg.options())
    kind = cfg.get("boundary", "kind")
    mags = np.sort(_grid(cfg, "boundary", u))
    grid = -mags if kind in NEGATIVE_SIDE else mags
    curve = trace_boundary(u, kind, grid, jobs=cfg.jobs())
    run.write_csv(f"{kind}.csv", curve.to_csv())
    report = {"kind": kind, "predicted": curve.predicted_coeff, "n_samples": len(curve.samples),
              "skipped": curve.skipped, "residuals": curve.residuals}
    try:
        fit = fit_quadratic(curve.samples)
        report.update(fitted=fit.coeff, fit_residual=fit.residual, linear_term=fit.linear,
                      relative_error=abs(fit.coeff - curve.predicted_coeff) / abs(curve.predicted_coeff))
    except IllConditioned as exc:
        report["fit_error"] = exc.to_dict()
    run.write_json(f"{kind}_fit.json", report)
    return report


PLOT_SCRIPT = '''"""Plot the traced boundaries and region samples from the CSV files beside this script."""
import csv
import os

import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))
KINDS = ["psi1", "psi2", "psi3", "psi4", "psi5"]


def read(name):
    with open(os.path.join(HERE, name), newline="") as fh:
        return list(csv.DictReader(fh))


fig, axes = plt.subplots(1, 3, figsize=(15, 4.5))
for ax, (title, sel) in zip(axes, [("overview", None), ("beta1 < 0", -1), ("beta1 > 0", 1)]):
    for kind in KINDS:
        path = os.path.join(HERE, kind + ".csv")
        if not os.path.exists(path):
            continue
        rows = read(kind + ".csv")
        pts = sorted((float(r["beta1"]), float(r["beta2"])) for r in rows)
        if sel is not None:
            pts = [p for p in pts if p[0] * sel > 0]
        if pts:
            ax.plot([p[0] for p in pts], [p[1] for p in pts], ".-", label=kind)
    if os.path.exists(os.path.join(HERE, "regions.csv")):
        for r in read("regions.csv"):
            b1, b2 = float(r["beta1"]), float(r["beta2"])
            if sel is None or b1 * sel > 0:
                ax.plot(b1, b2, "o" if r["matches"] == "true" else "x", color="k", ms=4)
                ax.annotate(r["label"], (b1, b2), fontsize=7)
    ax.axhline(0.0, color="0.6", lw=0.5)
    ax.axvline(0.0, color="0.6", lw=0.5)
    ax.set_xlabel("beta1")
    ax.set_ylabel("beta2")
    ax.set_title(title)
axes[0].legend()
fig.tight_layout()
fig.savefig(os.path.join(HERE, "diagram.png"), dpi=150)
'''


def _diagram_artifacts(run: _Run, d) -> dict:
    for kind, curve in d.curves.items():
        run.write_csv(f"{kind}.csv", curve.to_csv())
    lines = ["label,beta1,beta2,matches"]
    for r in d.regions:
        lines.append(f"{r.label},{r.beta[0]!r},{r.beta[1]!r},{'true' if r.matches else 'false'}")
    run.write_csv("regions.csv", "\r\n".join(lines) + "\r\n")
    run.write("plot_diagram.py", PLOT_SCRIPT)
    payload = d.to_dict()
    run.write_json("diagram.json", payload)
    return payload


def _diagram(run: _Run) -> dict:
    from .atlas import Unfolding, build_diagram

    cfg = run.cfg
    u = Unfolding(cfg.system(), cfg.options())
    rb = cfg.get("diagram", "region_beta1")
    d = build_diagram(u, grid=_grid(cfg, "diagram", u), jobs=cfg.jobs(),
                      region_beta1=float(rb) if rb else None)
    payload = _diagram_artifacts(run, d)
    return {"comparison": payload["comparison"], "mismatches": payload["mismatches"],
            "ordering_violations": payload["ordering_violations"], "files": run.files}


def _example(run: _Run) -> dict:
    from .atlas import Unfolding, build_diagram
    from .models import find_theta, thompson_hunt

    cfg = run.cfg
    a = float(cfg.get("example", "a"))
    opts = cfg.options()
    theta = find_theta(a, opts=opts, jobs=cfg.jobs())
    sys_ = thompson_hunt(a, theta.b)
    quant = _quantities_payload(sys_, opts)
    u = Unfolding(sys_, opts)
    d = build_diagram(u, grid=_grid(cfg, "diagram", u), jobs=cfg.jobs())
    diagram = _diagram_artifacts(run, d)
    report = {"a": a, "theta": theta.b, "theta_offset": theta.offset,
              "theta_iterations": theta.iterations, "quantities": quant,
              "comparison": diagram["comparison"], "mismatches": diagram["mismatches"],
              "ordering_violations": diagram["ordering_violations"],
              "regions": {r.label: bool(r.matches) for r in d.regions}}
    run.write_json("example_report.json", report)
    lines = [f"a = {a!r}", f"theta(a) = {theta.b!r} (offset {theta.offset:.3e})",
             f"lambda(0) = {quant['quantities']['lambda0']!r}",
             f"kappa2 = {quant['quantities']['kappa2']!r}", "", "curve  predicted  fitted  rel.err"]
    for k, c in diagram["comparison"].items():
        lines.append(f"{k}  {c['predicted']:.6g}  {c['fitted']:.6g}  {c['relative_error']:.3e}")
    lines.append("")
    lines += [f"region {r.label}: {'ok' if r.matches else 'MISMATCH ' + r.note}" for r in d.regions]
    run.write("example_report.txt", "\n".join(lines) + "\n")
    return report


HANDLERS = {"simulate": _simulate, "tangencies": _tangencies, "quantities": _quantities,
            "portrait": _portrait, "boundary": _boundary, "diagram": _diagram, "example": _example}


def run(argv=None, stdout=None, stderr=None) -> int:
    """Execute one subcommand; returns the process exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ns = _parser().parse_args(_normalize(argv))
        if ns.command is None:
            raise ConfigError("a subcommand is required", choices=list(COMMANDS))
        overrides = {k: v for k, v in vars(ns).items() if "." in k and v is not None}
        for item in ns.set:
            key, sep, val = item.partition("=")
            if not sep or "." not in key:
                raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
            overrides[key.strip()] = val
        cfg = RunConfig.load(ns.config, overrides)
        if ns.print_config:
            stdout.write(cfg.to_ini())
            return 0
        r = _Run(cfg, ns.command)
        payload = HANDLERS[ns.command](r)
        payload = dict(payload)
        payload.setdefault("files", r.files)
        stdout.write(dumps(r.envelope(payload)) + "\n")
        return 0
    except ConfigError as exc:
        stderr.write(dumps(exc.to_dict()) + "\n")
        return 1
    except (NumericalError, Z2GrazeError) as exc:
        stderr.write(dumps(exc.to_dict()) + "\n")
        return 2
    except (ValueError, KeyError) as exc:
        stderr.write(dumps({"error": "ConfigError", "message": str(exc), "details": {}}) + "\n")
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
