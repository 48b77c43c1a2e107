"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import g2
from .exactcore import ParseError, parse_expr, parse_rational, parse_rational_list
from .extremal import (
    ExtremalError,
    admissible_cone_covector,
    classify,
    compare_paths,
    integrate_cone_extremal,
    lift_d_path,
    lift_extremal,
    singular_d_path,
)
from .geometry import VectorField, derived_flag, generic_growth, lie_bracket
from .hamilton import build_chain, control_hamiltonian, CotangentChart, format_chain
from .modelfile import Model, load_model
from .prolong import GrowthError, PROLONGED_BIG, PROLONGED_SMALL, prolong

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str
    command: str
    step: float
    horizon: float
    tol: float
    seed: int
    samples: int
    fmt: str
    out: str | None

    def __post_init__(self):
        if self.step <= 0:
            raise UsageError("--step must be positive")
        if self.horizon < 0:
            raise UsageError("--horizon must be non-negative")
        if self.tol <= 0:
            raise UsageError("--tol must be positive")
        if self.samples < 0:
            raise UsageError("--samples must be non-negative")


def g2_as_model() -> Model:
    m = g2.build_g2()
    return Model(
        "g2",
        charts={"Y": m.y, "Z": m.z, "X": m.x},
        fields={"xi1": m.xi1, "xi2": m.xi2, "eta1": m.eta1, "eta2": m.eta2},
        maps={"pi_Y": m.pi_y, "pi_X": m.pi_x},
        distributions={"D": m.d, "E": m.e},
    )


def resolve_model(name: str) -> Model:
    if name == "g2":
        return g2_as_model()
    path = Path(name)
    if not path.exists():
        raise UsageError(f"no built-in model or file named {name!r}")
    return load_model(path)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _fmt_vec(v) -> str:
    return "(" + ", ".join(str(x) for x in v) + ")"


def _growth_entry(d, kind: str, samples: int, seed: int) -> dict:
    report = generic_growth(derived_flag(d, kind), max(samples, 1), seed)
    return {
        "growth": list(report.generic),
        "constant_rank": report.constant_rank,
        "singular_candidates": [[str(c) for c in p] for p in report.singular_candidates],
    }


def cmd_analyze(cfg: RunConfig, args) -> int:
    model = resolve_model(cfg.model)
    names = [args.dist] if args.dist else list(model.distributions)
    if not names:
        raise UsageError("model declares no distribution")
    result = {}
    for name in names:
        d = model.distribution(name)
        entry = {"chart": d.chart.name, "rank": d.rank,
                 "small": _growth_entry(d, "small", cfg.samples, cfg.seed),
                 "big": _growth_entry(d, "big", cfg.samples, cfg.seed)}
        if args.prolong:
            p = prolong(d, samples=max(cfg.samples, 1), seed=cfg.seed)
            entry["prolongation"] = {"small": _growth_entry(p.e, "small", cfg.samples, cfg.seed),
                                     "big": _growth_entry(p.e, "big", cfg.samples, cfg.seed)}
        result[name] = entry
    for name, entry in result.items():
        for kind in ("small", "big"):
            if not entry[kind]["constant_rank"]:
                print(f"warning: {name} {kind} growth is not constant on the samples", file=sys.stderr)
    if cfg.fmt == "json":
        _emit(_json({"model": model.name, "distributions": result}), cfg.out)
    else:
        lines = []
        for name, entry in result.items():
            lines.append(f"{name} on {entry['chart']} (rank {entry['rank']})")
            for kind in ("small", "big"):
                lines.append(f"  {kind} growth: {_fmt_vec(entry[kind]['growth'])}")
                for p in entry[kind]["singular_candidates"]:
                    lines.append(f"    singular candidate: {_fmt_vec(p)}")
            if "prolongation" in entry:
                pe = entry["prolongation"]
                lines.append(f"  prolongation small growth: {_fmt_vec(pe['small']['growth'])}")
                lines.append(f"  prolongation big growth: {_fmt_vec(pe['big']['growth'])}")
        _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_prolong(cfg: RunConfig, args) -> int:
    model = resolve_model(cfg.model)
    d = model.distribution(args.dist)
    p = prolong(d, fiber_var=args.fiber, samples=max(cfg.samples, 1), seed=cfg.seed)
    small = _growth_entry(p.e, "small", cfg.samples, cfg.seed)
    big = _growth_entry(p.e, "big", cfg.samples, cfg.seed)
    frame = [[str(c) for c in f.coefficients] for f in p.e.frame]
    ok = tuple(small["growth"]) == PROLONGED_SMALL and tuple(big["growth"]) == PROLONGED_BIG
    if cfg.fmt == "json":
        _emit(_json({"chart": list(p.z_chart.variables), "frame": frame,
                     "small": small, "big": big, "expected_growth": ok}), cfg.out)
    else:
        lines = [f"chart {p.z_chart.name}: {' '.join(p.z_chart.variables)}"]
        for name, f in zip(("zeta", "eta1 + z*eta2"), frame):
            lines.append(f"  {name} = [{', '.join(f)}]")
        lines.append(f"small growth: {_fmt_vec(small['growth'])}")
        lines.append(f"big growth: {_fmt_vec(big['growth'])}")
        _emit("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK if ok else EXIT_FAIL


def _field_arg(model: Model, text: str, chart_name: str | None) -> VectorField:
    if text in model.fields:
        return model.fields[text]
    if not text.strip().startswith("["):
        raise UsageError(f"unknown field {text!r}")
    if chart_name is None:
        raise UsageError("a literal field needs --chart")
    if chart_name not in model.charts:
        raise UsageError(f"unknown chart {chart_name!r}")
    chart = model.charts[chart_name]
    body = text.strip()[1:-1]
    comps = [parse_expr(c.strip(), chart.variables) for c in _split_top(body)]
    if len(comps) != chart.dim:
        raise UsageError(f"field literal needs {chart.dim} components")
    return VectorField(chart, comps)


def _split_top(body: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        depth += ch == "("
        depth -= ch == ")"
        if ch == "," and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    parts.append(body[start:])
    return parts


def cmd_bracket(cfg: RunConfig, args) -> int:
    model = resolve_model(cfg.model)
    a = _field_arg(model, args.a, args.chart)
    b = _field_arg(model, args.b, args.chart or a.chart.name)
    if a.chart != b.chart:
        raise UsageError("fields live on different charts")
    c = lie_bracket(a, b)
    coeffs = {v: str(p) for v, p in zip(c.chart.variables, c.coefficients)}
    if cfg.fmt == "json":
        _emit(_json({"chart": c.chart.name, "bracket": coeffs}), cfg.out)
    else:
        _emit("".join(f"{v}: {p}\n" for v, p in coeffs.items()), cfg.out)
    return EXIT_OK


def _summary(cfg: RunConfig, start, direction, trace, classification, comparisons) -> dict:
    return {
        "model": cfg.model,
        "start": [str(c) for c in start],
        "direction": direction,
        "step": trace.step,
        "T": cfg.horizon,
        "max_residuals": trace.max_residuals(),
        "classification": classification,
        "comparisons": comparisons,
    }


def cmd_extremal(cfg: RunConfig, args) -> int:
    if args.space == "X":
        if cfg.model != "g2":
            raise UsageError("--space X needs the built-in g2 cone system")
        if args.lambda0 is None:
            raise UsageError("--space X needs --lambda0")
        m = g2.build_g2()
        lam0 = parse_rational(args.lambda0)
        start = parse_rational_list(args.start) if args.start else (Fraction(0),) * 5
        if len(start) != 5:
            raise UsageError("--from needs 5 coordinates on X")
        q0 = admissible_cone_covector(m.cone, start, lam0, seed=cfg.seed)
        qf = np.array([float(c) for c in q0])
        trace = integrate_cone_extremal(m.cone, start, lam0, qf / np.linalg.norm(qf), cfg.horizon, cfg.step)
        classification, comparisons = None, {}
        if len(trace) >= 3:
            lifted = lift_extremal(m.cone, trace)
            classification = classify(lifted, m.e).verdict
            comparisons["monge"] = compare_paths(trace, g2.monge_line(lam0, start, cfg.horizon, len(trace)),
                                                 args.mode, 2)
        direction = {"lambda0": str(lam0)}
    else:
        model = resolve_model(cfg.model)
        d = g2.build_g2().d if cfg.model == "g2" else model.distribution(args.dist)
        start = parse_rational_list(args.start) if args.start else d.base_point
        direction_v = parse_rational_list(args.dir)
        if len(direction_v) != 2:
            raise UsageError("--dir needs two frame coefficients (u1,u2)")
        trace = singular_d_path(d, start, direction_v, cfg.horizon, cfg.step)
        classification, comparisons = None, {}
        if len(trace) >= 3 and direction_v[0] != 0:
            p = prolong(d, samples=max(cfg.samples, 1), seed=cfg.seed)
            classification = classify(lift_d_path(p, trace), p.e).verdict
        if cfg.model == "g2" and len(trace) >= 2 and direction_v[0] != 0:
            z0 = direction_v[1] / direction_v[0]
            x0 = g2.z_point_over(start, z0)[1:]
            lam = trace.column("lam")
            line = g2.cartan_line(x0, (Fraction(float(lam[0])), Fraction(float(lam[-1]))), 101)
            comparisons["cartan"] = compare_paths(trace, line, args.mode, 0)
        direction = [str(c) for c in direction_v]
    summary = _summary(cfg, start, direction, trace, classification, comparisons)
    ok = trace.max_residual() < cfg.tol and all(v < args.tol_compare for v in comparisons.values())
    summary["pass"] = bool(ok)
    if cfg.out:
        Path(cfg.out).write_text(trace.to_csv())
        Path(cfg.out).with_suffix(".json").write_text(_json(summary))
    if cfg.fmt == "csv":
        if not cfg.out:
            sys.stdout.write(trace.to_csv())
    elif cfg.fmt == "json":
        sys.stdout.write(_json(summary))
    else:
        lines = [f"samples: {len(trace)}", f"max residual: {trace.max_residual():.3e}",
                 f"classification: {classification}"]
        lines += [f"deviation from {k}: {v:.3e}" for k, v in comparisons.items()]
        lines.append("PASS" if ok else "FAIL")
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_duality(cfg: RunConfig, args) -> int:
    if cfg.model != "g2":
        model = resolve_model(cfg.model)
        raise UsageError(f"model {model.name!r} has no splitting data (L and K frames, pi_X); "
                         "duality is available for the built-in g2 model")
    if cfg.samples < 1:
        raise UsageError("--samples must be at least 1")
    report = g2.duality_report(cfg.samples, cfg.tol, cfg.step, cfg.seed, horizon=cfg.horizon,
                               tol_cartan=args.tol_cartan, jobs=args.jobs)
    if cfg.fmt == "text":
        lines = [f"sample {s['index']}: lambda0={s['lambda0']} {'pass' if s['pass'] else 'FAIL'} "
                 f"monge={s['deviations']['monge']:.2e} fiber={s['deviations']['fiber_image']:.2e} "
                 f"cartan={s['deviations']['cartan']:.2e} {s['classification']}" for s in report["samples"]]
        lines.append(f"all_pass: {report['all_pass']}")
        _emit("\n".join(lines) + "\n", cfg.out)
    else:
        _emit(_json(report), cfg.out)
    return EXIT_OK if report["all_pass"] else EXIT_FAIL


def cmd_chain(cfg: RunConfig, args) -> int:
    if cfg.model == "g2":
        if args.system not in ("X", "Y", "Z"):
            raise UsageError("--system must be X, Y or Z")
        chain = g2.chain_g2(args.system)
    else:
        model = resolve_model(cfg.model)
        d = model.distribution(args.dist)
        controls = [f"u{i + 1}" for i in range(d.rank)]
        h = control_hamiltonian(list(d.frame), controls, CotangentChart.default(d.chart))
        chain = build_chain(h, label=f"{model.name}: {d.name}")
    if cfg.fmt == "json":
        links = [{"kind": l.kind, "constraint": str(l.constraint),
                  "derivative": None if l.derivative is None else str(l.derivative),
                  "factor": None if l.factor is None else str(l.factor),
                  "successor": None if l.successor is None else str(l.successor),
                  "case": l.case} for l in chain.links]
        _emit(_json({"label": chain.label, "hamiltonian": str(chain.system.poly), "links": links,
                     "conclusion": chain.conclusion}), cfg.out)
    else:
        _emit(format_chain(chain), cfg.out)
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "prolong": cmd_prolong,
    "bracket": cmd_bracket,
    "extremal": cmd_extremal,
    "duality": cmd_duality,
    "chain": cmd_chain,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default="g2", help="built-in model name (g2) or model file path")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", dest="fmt", choices=("text", "json", "csv"), default="text")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--step", type=float, default=1e-3)
    common.add_argument("--horizon", type=float, default=1.0)
    common.add_argument("--samples", type=int, default=20)
    common.add_argument("--jobs", type=int, default=1)

    parser = argparse.ArgumentParser(prog="singpaths", description="Singular paths of (2,3,5) distributions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="growth vectors of distributions")
    p.add_argument("--dist")
    p.add_argument("--prolong", action="store_true", help="also analyze the prolongation")

    p = sub.add_parser("prolong", parents=[common], help="prolongation frame and growth")
    p.add_argument("--dist")
    p.add_argument("--fiber", default="z", help="name of the fiber coordinate")

    p = sub.add_parser("bracket", parents=[common], help="Lie bracket of two fields")
    p.add_argument("a", help="field name or literal [expr, ...]")
    p.add_argument("b", help="field name or literal [expr, ...]")
    p.add_argument("--chart")

    p = sub.add_parser("extremal", parents=[common], help="integrate a singular extremal")
    p.add_argument("--space", choices=("X", "Y"), default="Y")
    p.add_argument("--dist")
    p.add_argument("--lambda0")
    p.add_argument("--from", dest="start")
    p.add_argument("--dir", default="1,0")
    p.add_argument("--mode", choices=("coordinate", "arclength"), default="coordinate")
    p.add_argument("--tol-compare", type=float, default=1e-6)

    p = sub.add_parser("duality", parents=[common], help="duality verification on the g2 model")
    p.add_argument("--tol-cartan", type=float, default=1e-6)

    p = sub.add_parser("chain", parents=[common], help="constraint elimination chain")
    p.add_argument("--system", default="X")
    p.add_argument("--dist")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(args.model, args.command, args.step, args.horizon, args.tol, args.seed,
                        args.samples, args.fmt, args.out)
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        return COMMANDS[args.command](cfg, args)
    except (UsageError, ParseError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (GrowthError, ExtremalError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
