"""Command-line front end.

Subcommands
-----------
``run``      one method, one CSV.
``compare``  several methods on a common time grid plus a ``#`` summary block.
``fig2``     presets for the three panels of the conditional-occupation figure.
``sweep``    one key over a value list, one CSV per (value, method).

Every CSV has the header ``t,p1,p2,null_prob,method`` followed by data rows and
then ``#`` metadata lines.  Output is byte-for-byte deterministic.

Exit codes: 0 success, 2 configuration error, 3 numeric breakdown, 4 I/O error.
"""

from __future__ import annotations

import argparse
import itertools
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .analytic import measured_trace_analytic, scaling_trace
from .config import CONTINUOUS, KEYS, METHODS, STEPWISE, RunConfig, SweepSpec, parse_config
from .engine import run_protocol, run_unmeasured
from .errors import ConfigError, NumericBreakdown, ParameterError
from .model import DotAmplitudes, MeasurementProtocol, PhysParams
from .oracle import run_protocol_oracle
from .perturbative import perturbative_trace
from .trace import ConditionalTrace

__all__ = ["HEADER", "compute_trace", "format_csv", "cmd_run", "cmd_compare", "cmd_fig2",
           "cmd_sweep", "main"]

HEADER = "t,p1,p2,null_prob,method"
FIG2_T_MAX = 6.0
FIG2_SAMPLES = 300
FIG2_X_LIST = (2.0, 0.2, 0.02)
FIG2_METHODS = ("scaling", "analytic-stepwise", "pseudomode", "oracle")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _num(v) -> str:
    return f"{float(v):.12g}"


def _tag(v: float) -> str:
    return f"{v:g}"


# ---------------------------------------------------------------------------
# computation

def compute_trace(cfg: RunConfig, times=None) -> ConditionalTrace:
    """Run the configured method.

    ``times`` overrides the sampling grid of the continuous methods (``scaling``,
    ``unmeasured``); stepwise methods always report at the projection instants.
    """
    p, ini = cfg.params, cfg.initial
    if cfg.method in CONTINUOUS and times is None:
        times = np.linspace(0.0, cfg.t_max, cfg.samples + 1)
    if cfg.method == "scaling":
        return scaling_trace(p, cfg.scaling_x, times, ini)
    if cfg.method == "unmeasured":
        return run_unmeasured(p, times, ini)
    pr = cfg.protocol
    if cfg.method == "analytic-stepwise":
        return measured_trace_analytic(pr, p, ini)
    if cfg.method == "pseudomode":
        return run_protocol(p, pr, ini)
    e_max = cfg.oracle_e_max_over_lambda * p.bandwidth
    if cfg.method == "oracle":
        return run_protocol_oracle(p, pr, ini, cfg.oracle_n_modes, e_max)
    return perturbative_trace(p, pr, ini, n_modes=cfg.oracle_n_modes, e_max=e_max)


def format_csv(traces, comments=()) -> str:
    """CSV text for one or more traces, metadata comments last."""
    lines = [HEADER]
    for tr in traces:
        for row in zip(tr.times, tr.p1, tr.p2, tr.null_prob):
            lines.append(",".join(_num(v) for v in row) + "," + tr.method)
    lines.extend("# " + c for c in comments)
    return "\n".join(lines) + "\n"


def _meta_comments(tr: ConditionalTrace) -> list[str]:
    out = []
    for k in sorted(tr.meta):
        v = tr.meta[k]
        v = _num(v) if isinstance(v, (float, np.floating)) else str(v)
        out.append(f"meta {tr.method} {k}={v}")
    return out


def _config_comments(cfg: RunConfig) -> list[str]:
    p = cfg.params
    items = [("e1", p.e1), ("e2", p.e2), ("gamma1", p.gamma1), ("gamma2", p.gamma2),
             ("lambda", p.bandwidth), ("c", p.band_offset), ("t_max", cfg.t_max)]
    items += [(k, getattr(cfg, k)) for k in ("x", "tau", "n") if getattr(cfg, k) is not None]
    items += [("initial_b1", cfg.initial.b1), ("initial_b2", cfg.initial.b2)]
    out = []
    for k, v in items:
        if isinstance(v, complex):
            v = f"{_num(v.real)}{'+' if v.imag >= 0 else '-'}{_num(abs(v.imag))}j"
        elif isinstance(v, float):
            v = _num(v)
        out.append(f"config {k}={v}")
    return out


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def gnuplot_stub(csv_path: Path, methods, title: str = "") -> str:
    """Companion gnuplot script plotting p1 against t for each method in a CSV."""
    name = Path(csv_path).name
    curves = ", \\\n     ".join(
        f"'{name}' using 1:(strcol(5) eq '{m}' ? $2 : NaN) with linespoints title '{m}'"
        for m in methods)
    return (f"# p1(t) from {name}\n"
            "set datafile separator ','\n"
            "set datafile commentschars '#'\n"
            f"set title '{title or name}'\n"
            "set xlabel 't'\nset ylabel 'p1'\nset yrange [0:1.05]\n"
            f"plot {curves}\n")


def _emit(text: str, out: str | Path | None, methods, gnuplot: bool, title: str = "") -> None:
    if out is None:
        if gnuplot:
            raise ConfigError("--gnuplot-stub needs --out", "out")
        sys.stdout.write(text)
        return
    path = _write(Path(out), text)
    if gnuplot:
        _write(path.with_suffix(".gp"), gnuplot_stub(path, methods, title))


# ---------------------------------------------------------------------------
# commands

def cmd_run(cfg: RunConfig, out: str | Path | None = None,
            gnuplot: bool = False) -> ConditionalTrace:
    """Compute one trace and write it (to stdout when no path is given)."""
    tr = compute_trace(cfg)
    text = format_csv([tr], _config_comments(cfg) + _meta_comments(tr))
    _emit(text, out if out is not None else cfg.out, [tr.method], gnuplot)
    return tr


def compare_traces(traces) -> list[tuple[str, str, float, float]]:
    """Pairwise ``(method_a, method_b, max |dP1|, rms |dP1|)`` on a shared grid."""
    out = []
    for a, b in itertools.combinations(traces, 2):
        d = np.abs(a.p1 - b.p1)
        out.append((a.method, b.method, float(d.max()), float(np.sqrt(np.mean(d**2)))))
    return out


def cmd_compare(cfg: RunConfig, methods, out: str | Path | None = None,
                gnuplot: bool = False):
    """Run several methods on one time grid and summarize their disagreement.

    The grid is the projection instants when any stepwise method is present,
    otherwise ``n`` uniform intervals on ``[0, t_max]``.  The scaling formula is
    evaluated at the realised ``x = lambda * t_max / n``.

    Returns
    -------
    traces : list of ConditionalTrace
    summary : list of (method_a, method_b, max_dp1, rms_dp1)
    """
    methods = list(dict.fromkeys(methods))
    if len(methods) < 2:
        raise ConfigError("compare needs at least two distinct methods", "method")
    cfgs = [cfg.with_method(m) for m in methods]
    if any(m in STEPWISE for m in methods):
        pr = cfgs[[m in STEPWISE for m in methods].index(True)].protocol
        times = pr.times
        cfgs = [c if c.method != "scaling" else _with_x(c, pr.x) for c in cfgs]
    else:
        times = np.linspace(0.0, cfg.t_max, cfg.samples + 1)
    traces = [compute_trace(c, times) for c in cfgs]
    summary = compare_traces(traces)
    comments = _config_comments(cfg)
    comments += [f"compare {a}:{b} max_abs_dp1={_num(mx)} rms_dp1={_num(rms)}"
                 for a, b, mx, rms in summary]
    for tr in traces:
        comments += _meta_comments(tr)
    _emit(format_csv(traces, comments), out if out is not None else cfg.out, methods, gnuplot)
    return traces, summary


def _with_x(cfg: RunConfig, x: float) -> RunConfig:
    return replace(cfg, x=x, tau=None)


def _fig2_params(panel: str, lam: float) -> PhysParams:
    if panel == "a":
        return PhysParams.aligned(0.0, 1.0, lam)
    if panel == "b":
        return PhysParams(0.05, -0.05, 1.0, 1.0, lam)
    return PhysParams(3 * lam, 3 * lam, 1.0, 1.0, lam, c=3.0)


def cmd_fig2(panel: str, lambda_over_gamma: float = 3.0, x_list=FIG2_X_LIST,
             out_dir: str | Path = ".", methods=None, lambda_ref: float = 20.0,
             t_max: float = FIG2_T_MAX, samples: int = FIG2_SAMPLES, gnuplot: bool = False,
             oracle_n_modes: int = 4001, oracle_e_max_over_lambda: float = 50.0):
    """Write the CSV bundle for one panel of the conditional-occupation figure.

    Panel ``a``: E1 = E2 = 0.  Panel ``b``: E1 = -E2 = 0.05 (stepwise only, at
    ``lambda_over_gamma`` and ``lambda_ref``).  Panel ``c``: E1 = E2 = 3 lambda,
    scaling curve with c = 3.  Gamma = 1 throughout, so ``t`` is in units of
    1/Gamma.

    Returns
    -------
    files : dict
        ``(x, label) -> Path``; labels look like ``scaling`` or ``pseudomode_L3``.
    summary : list of str
        One line per comparison, also printed by the CLI.
    """
    if panel not in ("a", "b", "c"):
        raise ConfigError(f"panel must be a, b or c, got {panel!r}", "panel")
    if methods is None:
        methods = ("pseudomode",) if panel == "b" else ("scaling", "pseudomode")
    for m in methods:
        if m not in FIG2_METHODS:
            raise ConfigError(f"fig2 supports {', '.join(FIG2_METHODS)}; got {m!r}", "method")
    if panel == "b" and "scaling" in methods:
        raise ConfigError("panel b: no simple analytical expression exists for misaligned "
                          "levels; use a stepwise method", "method")
    if not x_list or any(not x > 0 for x in x_list):
        raise ConfigError("x must be positive", "x")
    lams = (lambda_over_gamma, lambda_ref) if panel == "b" else (lambda_over_gamma,)
    out_dir = Path(out_dir)
    ini = DotAmplitudes(1.0, 0.0)
    grid = np.linspace(0.0, t_max, samples + 1)
    files, summary = {}, []
    for x in x_list:
        traces = {}
        for m in methods:
            if m == "scaling":
                p = _fig2_params(panel, lambda_over_gamma)
                traces["scaling"] = scaling_trace(p, x, grid, ini)
                continue
            for lam in lams:
                p = _fig2_params(panel, lam)
                pr = MeasurementProtocol.from_x(x, t_max, lam)
                if m == "pseudomode":
                    tr = run_protocol(p, pr, ini)
                elif m == "analytic-stepwise":
                    tr = measured_trace_analytic(pr, p, ini)
                else:
                    tr = run_protocol_oracle(p, pr, ini, oracle_n_modes,
                                             oracle_e_max_over_lambda * lam)
                traces[f"{m}_L{_tag(lam)}"] = tr
        for label, tr in traces.items():
            path = out_dir / f"fig2{panel}_x{_tag(x)}_{label}.csv"
            comments = [f"fig2 panel={panel} x={_num(x)} label={label}"] + _meta_comments(tr)
            _emit(format_csv([tr], comments), path, [tr.method], gnuplot,
                  f"panel {panel}, x={_tag(x)}, {label}")
            files[(x, label)] = path
        summary += _fig2_summary(panel, x, traces, lambda_over_gamma, ini)
    return files, summary


def _fig2_summary(panel, x, traces, lam, ini) -> list[str]:
    lines = []
    labels = list(traces)
    if "scaling" in traces:
        p = _fig2_params(panel, lam)
        for lb in labels:
            if lb == "scaling":
                continue
            tr = traces[lb]
            ref = scaling_trace(p, x, tr.times, ini)
            d = float(np.max(np.abs(ref.p1 - tr.p1)))
            lines.append(f"fig2{panel} x={_tag(x)} scaling vs {lb}: max_abs_dp1={_num(d)}")
    stepwise = [lb for lb in labels if lb != "scaling"]
    for a, b in itertools.combinations(stepwise, 2):
        d = traces[a].max_abs_diff(traces[b])
        lines.append(f"fig2{panel} x={_tag(x)} {a} vs {b}: max_abs_dp1={_num(d)}")
    return lines


def _sweep_point(cfg: RunConfig) -> ConditionalTrace:
    return compute_trace(cfg)


def cmd_sweep(spec: SweepSpec, out_dir: str | Path = ".", workers: int = 1,
              gnuplot: bool = False) -> list[Path]:
    """Run every (value, method) point; files are written in config order."""
    if workers < 1:
        raise ConfigError("workers must be at least 1", "workers")
    points = spec.points()
    cfgs = [c for _, c in points]
    if workers == 1 or len(cfgs) == 1:
        traces = [_sweep_point(c) for c in cfgs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            traces = list(pool.map(_sweep_point, cfgs))
    out_dir = Path(out_dir)
    paths = []
    for (v, cfg), tr in zip(points, traces):
        path = out_dir / f"sweep_{spec.key}{_tag(v)}_{cfg.method}.csv"
        comments = [f"sweep {spec.key}={_num(v)}"] + _config_comments(cfg) + _meta_comments(tr)
        _emit(format_csv([tr], comments), path, [tr.method], gnuplot,
              f"{spec.key}={_tag(v)}, {cfg.method}")
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# argument parsing

def _csv_list(kind):
    def parse(text: str):
        try:
            return tuple(kind(s) for s in text.split(",") if s.strip())
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    return parse


def _add_globals(p: argparse.ArgumentParser, default) -> None:
    p.add_argument("--config", default=default, help="flat TOML configuration file")
    p.add_argument("--out", default=default, help="output file (run, compare) or directory")
    p.add_argument("--seedless", action="store_true", default=default,
                   help="reserved; the computation uses no RNG, so setting it is an error")
    p.add_argument("--gnuplot-stub", action="store_true", default=default,
                   help="also write a .gp script next to each CSV")


def _add_keys(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("config overrides")
    for key, kind in KEYS.items():
        if key == "out":
            continue
        g.add_argument("--" + key.replace("_", "-"), dest=key, type=kind,
                       default=argparse.SUPPRESS, metavar=key.upper())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zenotransfer",
        description="Conditional two-dot dynamics under repeated null-result measurement.")
    _add_globals(parser, None)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one method, one CSV")
    _add_globals(run, argparse.SUPPRESS)
    _add_keys(run)

    cmp_ = sub.add_parser("compare", help="several methods on a common grid")
    _add_globals(cmp_, argparse.SUPPRESS)
    cmp_.add_argument("--methods", type=_csv_list(str), required=True,
                      help="comma-separated, e.g. pseudomode,oracle")
    _add_keys(cmp_)

    fig = sub.add_parser("fig2", help="figure presets, one CSV per (x, method)")
    _add_globals(fig, argparse.SUPPRESS)
    fig.add_argument("panel", choices=("a", "b", "c"))
    fig.add_argument("--lambda", dest="lam", type=float, default=3.0,
                     help="bandwidth in units of Gamma (default 3)")
    fig.add_argument("--lambda-ref", type=float, default=20.0,
                     help="second bandwidth for panel b (default 20)")
    fig.add_argument("--x-list", type=_csv_list(float), default=FIG2_X_LIST)
    fig.add_argument("--methods", type=_csv_list(str), default=None)
    fig.add_argument("--t-max", type=float, default=FIG2_T_MAX)
    fig.add_argument("--samples", type=int, default=FIG2_SAMPLES)

    sw = sub.add_parser("sweep", help="one key over a list of values")
    _add_globals(sw, argparse.SUPPRESS)
    sw.add_argument("--key", required=True, help="x, lambda, e1, e2 or gamma_ratio")
    sw.add_argument("--values", type=_csv_list(float), required=True)
    sw.add_argument("--methods", type=_csv_list(str), default=None,
                    help="defaults to the configured method")
    sw.add_argument("--workers", type=int, default=1)
    _add_keys(sw)
    return parser


def _overrides(ns: argparse.Namespace) -> dict:
    return {k: getattr(ns, k) for k in KEYS if k != "out" and hasattr(ns, k)}


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        if ns.seedless:
            raise ConfigError("--seedless is reserved: no random numbers are used, "
                              "output is deterministic without it", "seedless")
        if ns.command == "fig2":
            if ns.config is not None:
                raise ConfigError("fig2 presets do not read a config file", "config")
            _, summary = cmd_fig2(ns.panel, ns.lam, ns.x_list, ns.out or ".", ns.methods,
                                  ns.lambda_ref, ns.t_max, ns.samples, ns.gnuplot_stub)
            print("\n".join(summary))
        elif ns.command == "sweep":
            base = parse_config(ns.config, _overrides(ns))
            spec = SweepSpec(base, ns.key, ns.values, ns.methods or (base.method,))
            for path in cmd_sweep(spec, ns.out or base.out or ".", ns.workers, ns.gnuplot_stub):
                print(path)
        else:
            cfg = parse_config(ns.config, _overrides(ns))
            if ns.command == "run":
                cmd_run(cfg, ns.out, ns.gnuplot_stub)
            else:
                for m in ns.methods:
                    if m not in METHODS:
                        raise ConfigError(f"unknown method {m!r}", "method")
                _, summary = cmd_compare(cfg, ns.methods, ns.out, ns.gnuplot_stub)
                if ns.out is not None or cfg.out is not None:
                    for a, b, mx, rms in summary:
                        print(f"{a} vs {b}: max_abs_dp1={_num(mx)} rms_dp1={_num(rms)}")
    except (ConfigError, ParameterError) as exc:
        print(f"zenotransfer: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericBreakdown as exc:
        print(f"zenotransfer: numeric breakdown: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"zenotransfer: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
