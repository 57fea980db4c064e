"""Command-line front end: ``schlicht <command> [options]``.

Exit status: 0 all checks passed, 1 a mathematical check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import bounds as bounds_mod
from . import harness, kernels
from .classes import ClassSpec
from .errors import SchlichtError

log = logging.getLogger("schlicht")

COMMANDS = ("bounds", "verify-inverse", "identities", "sample", "search", "report")


@dataclass
class RunConfig:
    command: str
    m: float = 2.0
    beta: float = 0.0
    alpha: complex | None = None
    kernel: str = "koebe"
    kernel_coeffs: list[complex] | None = None
    n: int = 1000
    seed: int = 0
    budget: int = 10000
    target: str = "a2"
    order: int | None = None
    jobs: int = field(default_factory=harness.default_jobs)
    table: bool = False
    points: int = 21
    rel_tol: float | None = None
    input: str | None = None
    out: str | None = None
    summary_csv: str | None = None
    format: str = "text"

    @property
    def work_order(self) -> int:
        return self.order or harness.DEFAULT_ORDER

    def spec(self) -> ClassSpec:
        order = self.work_order
        if self.kernel_coeffs:
            k = kernels.from_coeffs(self.kernel_coeffs, order)
        else:
            k = kernels.by_name(self.kernel, order)
        return ClassSpec(self.m, self.beta, k, self.alpha)


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, complex):
        return f"{x.real:.6g}{x.imag:+.6g}j"
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


def _complex(text: str) -> complex:
    return complex(text.replace(" ", "").replace("i", "j"))


def _complex_list(text: str) -> list[complex]:
    return [_complex(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schlicht", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def spec_args(p):
        p.add_argument("--m", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--alpha", type=_complex, help="omit for the BR class; e.g. 1 or 0.5+0.5j")
        p.add_argument("--kernel", choices=sorted(kernels.KERNELS))
        p.add_argument("--kernel-coeffs", type=_complex_list, help="k2,k3,... (overrides --kernel)")
        p.add_argument("--order", type=int)

    def common(p):
        p.add_argument("--config", help="JSON file with option defaults")
        p.add_argument("--json", dest="format", action="store_const", const="json")
        p.add_argument("--csv", dest="format", action="store_const", const="csv")
        p.add_argument("--out", help="output file")

    p = sub.add_parser("bounds", help="evaluate the coefficient bounds")
    spec_args(p)
    common(p)
    p.add_argument("--table", action="store_true", help="sweep beta (Koebe kernel, m = 2)")
    p.add_argument("--points", type=int)

    p = sub.add_parser("verify-inverse", help="series reversion against closed forms")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--order", type=int)

    p = sub.add_parser("identities", help="randomized closure of the coefficient algebra")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("sample", help="sample class members and check the bounds")
    spec_args(p)
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--summary-csv")

    p = sub.add_parser("search", help="search for near-extremal accepted samples")
    spec_args(p)
    common(p)
    p.add_argument("--target", choices=harness.TARGETS)
    p.add_argument("--budget", type=int)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("report", help="summarize (and optionally re-grade) a JSON-lines batch")
    common(p)
    p.add_argument("--input", required=False)
    p.add_argument("--rel-tol", type=float)
    return parser


def make_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    values = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            values.update({k.replace("-", "_"): v for k, v in json.load(fh).items()})
    for key, val in vars(args).items():
        if key in ("config", "verbose") or val is None:
            continue
        values[key] = val
    if "alpha" in values and isinstance(values["alpha"], (str, int, float)):
        values["alpha"] = _complex(str(values["alpha"]))
    if "kernel_coeffs" in values and isinstance(values["kernel_coeffs"], str):
        values["kernel_coeffs"] = _complex_list(values["kernel_coeffs"])
    env_seed = os.environ.get("SCHLICHT_SEED")
    if env_seed is not None:
        values["seed"] = int(env_seed)
    known = RunConfig.__dataclass_fields__
    unknown = set(values) - set(known)
    if unknown:
        raise SchlichtError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(**values)
    if args.verbose:
        logging.basicConfig(level=logging.INFO)
    return cfg


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out and cfg.command in ("bounds", "verify-inverse", "identities", "search", "report"):
        with open(cfg.out, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def cmd_bounds(cfg: RunConfig) -> int:
    if cfg.table:
        betas = np.linspace(0.0, 1.0, cfg.points, endpoint=False)
        reports = [bounds_mod.bound_BR(2, float(b), 2, 3) for b in betas]
        piecewise = [bounds_mod.bound_BR_koebe_piecewise(2, float(b)) for b in betas]
        if cfg.format == "json":
            _emit(cfg, json.dumps([r.to_dict() for r in reports], indent=2))
        elif cfg.format == "csv":
            _emit(cfg, bounds_mod.to_csv(reports))
        else:
            lines = [f"{'beta':>8} {'a2':>10} {'a3':>10} {'branch':>10} {'piecewise':>10}"]
            for b, r, pw in zip(betas, reports, piecewise):
                lines.append(
                    f"{b:8.4g} {_fmt(r.a2_bound):>10} {_fmt(r.a3_bound):>10} "
                    f"{r.active_branch_a2:>10} {_fmt(pw.a2_bound):>10}"
                )
            _emit(cfg, "\n".join(lines))
        return 0

    spec = cfg.spec()
    report = bounds_mod.bound_for_spec(spec)
    if cfg.format == "json":
        _emit(cfg, json.dumps(report.to_dict(), indent=2))
    elif cfg.format == "csv":
        _emit(cfg, bounds_mod.to_csv([report]))
    else:
        cls = "BR" if spec.alpha is None else f"BV (alpha = {_fmt(spec.alpha)})"
        lines = [
            f"class {cls}, m = {_fmt(spec.m)}, beta = {_fmt(spec.beta)}, "
            f"k2 = {_fmt(spec.k2)}, k3 = {_fmt(spec.k3)}",
            f"|a2| <= {_fmt(report.a2_bound)}   [{report.active_branch_a2}]",
            f"|a3| <= {_fmt(report.a3_bound)}   [{report.active_branch_a3 or 'unavailable'}]",
        ]
        if report.combo_bound is not None:
            lines.append(f"|2a2^2 - a3| <= {_fmt(report.combo_bound)}")
        _emit(cfg, "\n".join(lines))
    return 0


def cmd_verify_inverse(cfg: RunConfig) -> int:
    order = cfg.order or 4
    res = harness.run_inverse_check(cfg.seed, cfg.n, order=order)
    if cfg.format == "json":
        _emit(cfg, json.dumps(res, indent=2))
    else:
        status = "PASS" if res["passed"] else "FAIL"
        _emit(
            cfg,
            f"{status}: {res['n']} instances, order {res['order']}; "
            f"closed-form deviation {_fmt(res['closed_form_deviation'])}, "
            f"compose deviation {_fmt(res['compose_deviation'])}",
        )
    return 0 if res["passed"] else 1


def cmd_identities(cfg: RunConfig) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = harness.run_identity_regression(cfg.seed, cfg.n)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    if cfg.format == "json":
        _emit(cfg, json.dumps(res, indent=2))
    else:
        status = "PASS" if res["passed"] else "FAIL"
        lines = [f"{status}: {res['n']} instances, max deviation {_fmt(res['max_deviation'])}"]
        lines += [f"  {k:<28} {_fmt(v)}" for k, v in res["deviations"].items()]
        _emit(cfg, "\n".join(lines))
    return 0 if res["passed"] else 1


def _write_summary_csv(path, summary: dict, cfg: RunConfig) -> None:
    row = {"m": cfg.m, "beta": cfg.beta, "alpha": "" if cfg.alpha is None else repr(cfg.alpha),
           "kernel": cfg.kernel if not cfg.kernel_coeffs else "custom", "seed": cfg.seed, **summary}
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(row), lineterminator="\n")
        writer.writeheader()
        writer.writerow(row)


def cmd_sample(cfg: RunConfig) -> int:
    spec = cfg.spec()
    settings = harness.Settings(order=cfg.work_order)
    records = harness.sample(spec, cfg.n, cfg.seed, settings, jobs=cfg.jobs)
    summary = harness.summarize(records)
    if cfg.out:
        harness.write_jsonl(records, cfg.out)
    if cfg.summary_csv:
        _write_summary_csv(cfg.summary_csv, summary, cfg)
    if cfg.format == "json":
        print(json.dumps(summary, indent=2))
    else:
        status = "PASS" if summary["violations"] == 0 else "FAIL"
        print(
            f"{status}: {summary['trials']} trials, {summary['accepted']} accepted, "
            f"{summary['violations']} violations, {summary['errors']} construction errors"
        )
        for t in harness.TARGETS:
            print(f"  min margin {t:<6} {_fmt(summary[f'min_margin_{t}'])}")
    return 0 if summary["violations"] == 0 else 1


def cmd_search(cfg: RunConfig) -> int:
    spec = cfg.spec()
    res = harness.tightness_search(spec, cfg.target, cfg.budget, cfg.seed, harness.Settings(order=cfg.work_order))
    bad = res.ratio > 1 + harness.MARGIN_TOL
    if cfg.format == "json":
        _emit(cfg, json.dumps(res.to_dict(), indent=2))
    else:
        note = " (no accepted sample found)" if res.empty else ""
        _emit(
            cfg,
            f"{'FAIL' if bad else 'PASS'}: best |{cfg.target}| = {_fmt(res.best_value)}, "
            f"bound {_fmt(res.bound)}, ratio {_fmt(res.ratio)} after {res.evaluations} evaluations "
            f"({res.full_evaluations} full){note}",
        )
    return 1 if bad else 0


def cmd_report(cfg: RunConfig) -> int:
    if not cfg.input:
        raise SchlichtError("report needs --input <batch.jsonl>")
    with open(cfg.input) as fh:
        rows = [json.loads(line) for line in fh if line.strip()]
    rel_tol = cfg.rel_tol if cfg.rel_tol is not None else harness.classes.DEFAULT_REL_TOL
    res = harness.regrade(rows, rel_tol)
    res["rel_tol"] = rel_tol
    if cfg.format == "json":
        _emit(cfg, json.dumps(res, indent=2))
    else:
        _emit(
            cfg,
            f"{res['trials']} records; accepted {res['accepted_before']} as stored, "
            f"{res['accepted_after']} at rel_tol {_fmt(rel_tol)}; "
            f"{res['violations_after']} violations",
        )
    return 1 if res["violations_after"] else 0


DISPATCH = {
    "bounds": cmd_bounds,
    "verify-inverse": cmd_verify_inverse,
    "identities": cmd_identities,
    "sample": cmd_sample,
    "search": cmd_search,
    "report": cmd_report,
}


def main(argv=None) -> int:
    try:
        cfg = make_config(argv)
        return DISPATCH[cfg.command](cfg)
    except SchlichtError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
