"""Experiment harness: subcommand dispatch, config validation, result files.

Every output file embeds the hash of its effective configuration and the
library version; runs with identical configuration and seed are
byte-identical apart from the timestamp line.  Files are written to a
temporary sibling and renamed into place, so partial outputs never appear
under the final name.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .arith import coefficients_from_euler
from .engine import ShiftGrid, shifted_grid_values
from .kernel import MellinTransform, SmoothingKernel
from .metrics import ExhaustionFamily, ProductPoint, StripDomain
from .randmodel import angle_matrix, random_smoothed_value, sample_omega_up_to
from .scanner import hybrid_scan
from .specio import ConfigError, load_spec, load_target, preset_names
from .stats import (FamilyEvaluator, empirical_vs_model, mean_square_ratio,
                    support_hit_rate, weyl_average)

THREADS_ENV = "ZETALAB_THREADS"

USAGE_EXIT = 2
VALIDATION_EXIT = 1


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest round-trip decimal
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _atomic_write(path: str, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    tmp = p.with_name(p.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, p)


def write_csv(path: str, header: list[str], rows, config: dict) -> None:
    lines = [
        f"# version={__version__}",
        f"# config_hash={_config_hash(config)}",
        f"# generated_at={datetime.now(timezone.utc).isoformat()}",
        ",".join(header),
    ]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, payload: dict, config: dict) -> None:
    payload = dict(payload)
    payload["version"] = __version__
    payload["config_hash"] = _config_hash(config)
    payload["generated_at"] = datetime.now(timezone.utc).isoformat()
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_jsonl(path: str, records, config: dict) -> None:
    head = {
        "version": __version__,
        "config_hash": _config_hash(config),
        "generated_at": datetime.now(timezone.utc).isoformat(),
    }
    lines = [json.dumps(head, sort_keys=True)]
    lines += [json.dumps(r, sort_keys=True) for r in records]
    _atomic_write(path, "\n".join(lines) + "\n")


def _apply_config_file(args: argparse.Namespace, parser_options: set[str]) -> None:
    """Merge --config JSON into unset flags; unknown keys are rejected."""
    if not getattr(args, "config", None):
        return
    with open(args.config) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("config", "expected a JSON object of option values")
    for key, value in doc.items():
        attr = key.replace("-", "_")
        if attr not in parser_options:
            raise ConfigError(f"config.{key}", "unknown key")
        setattr(args, attr, value)


def _effective_config(args: argparse.Namespace, skip=("config", "func", "options")) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _threads(args) -> int:
    env = os.environ.get(THREADS_ENV)
    if getattr(args, "threads", None):
        return int(args.threads)
    if env:
        return int(env)
    return 1


def _spec_table(name: str, kernel: SmoothingKernel, truncation: float):
    limit = max(kernel.required_terms(truncation), 1)
    spec = load_spec(name, prime_bound=limit + 1)
    return spec, coefficients_from_euler(spec, limit)


# ---------------------------------------------------------------------------
# subcommands

def cmd_kernel_probe(args) -> int:
    kern = SmoothingKernel(args.support_bound)
    mt = MellinTransform(kern, quad_tol=args.quad_tol)
    points = [complex(re, im) for re, im in args.s]
    vals = mt.values(points)
    rows = [(s.real, s.imag, v.real, v.imag, abs(v)) for s, v in zip(points, vals)]
    cfg = _effective_config(args)
    write_csv(args.out, ["re_s", "im_s", "re_transform", "im_transform", "abs_transform"],
              rows, cfg)
    print(f"wrote {len(rows)} transform values to {args.out}")
    return 0


def cmd_coeffs(args) -> int:
    spec = load_spec(args.spec, prime_bound=args.limit + 1)
    table = coefficients_from_euler(spec, args.limit)
    rows = [(n, table.a[n].real, table.a[n].imag) for n in range(1, args.limit + 1)]
    cfg = _effective_config(args)
    write_csv(args.out, ["n", "re_a", "im_a"], rows, cfg)
    print(f"wrote {len(rows)} coefficients of '{args.spec}' to {args.out}")
    return 0


def cmd_eval(args) -> int:
    kern = SmoothingKernel(args.support_bound)
    spec, table = _spec_table(args.spec, kern, args.truncation)
    grid = ShiftGrid(sigma=args.sigma, tau_start=args.tau_start, dtau=args.dtau,
                     count=args.count, truncation=args.truncation)
    vals = shifted_grid_values(table, kern, grid, threads=_threads(args))
    taus = grid.taus()
    rows = [(t, v.real, v.imag, abs(v)) for t, v in zip(taus, vals)]
    cfg = _effective_config(args)
    write_csv(args.out, ["tau", "re", "im", "abs"], rows, cfg)
    print(f"wrote {len(rows)} samples of '{args.spec}' at sigma={args.sigma} to {args.out}")
    return 0


def cmd_scan(args) -> int:
    kern = SmoothingKernel(args.support_bound)
    limit = max(kern.required_terms(args.truncation), 1)
    target = load_target(args.target, prime_bound=limit + 1)
    report = hybrid_scan(target, horizon=args.horizon, dtau=args.dtau,
                         truncation=args.truncation, kernel=kern,
                         threads=_threads(args))
    cfg = _effective_config(args)
    payload = {
        "qualifying_taus": [float(t) for t in report.qualifying_taus],
        "qualifying_count": report.qualifying_count(),
        "candidate_count": int(report.candidate_taus.size),
        "density": report.density,
        "phase_measure": report.phase_measure,
        "phase_windows_empty": report.phase_windows_empty,
        "epsilon": report.epsilon,
        "horizon": report.horizon,
        "dtau": report.dtau,
        "truncation": report.truncation,
        "lipschitz_bounds": list(report.lipschitz_bounds),
        "scan_config": report.config,
        "note": "density is a grid estimate; the Lipschitz bounds gauge what "
                "resolution dtau can miss",
    }
    write_json(args.out_json, payload, cfg)
    r = report.distances.shape[1]
    header = ["tau"] + [f"distance_{j + 1}" for j in range(r)]
    rows = [(float(t), *(float(d) for d in drow))
            for t, drow in zip(report.candidate_taus, report.distances)]
    write_csv(args.out_csv, header, rows, cfg)
    print(f"scan: {report.qualifying_count()} qualifying shifts, "
          f"density ~ {report.density:.4g} (phase measure {report.phase_measure:.4g}); "
          f"report in {args.out_json}, distances in {args.out_csv}")
    return 0


def cmd_meansquare(args) -> int:
    kern = SmoothingKernel(args.support_bound)
    spec, table = _spec_table(args.spec, kern, args.truncation)
    rep = mean_square_ratio(table, kern, args.sigma, args.horizon, args.dt,
                            args.truncation, threads=_threads(args))
    cfg = _effective_config(args)
    write_csv(args.out,
              ["sigma", "horizon", "dt", "truncation", "ratio", "estimate", "target"],
              [(rep.sigma, rep.horizon, rep.dt, rep.truncation, rep.ratio,
                rep.estimate, rep.target)], cfg)
    print(f"mean-square ratio {rep.ratio:.6f} "
          f"(estimate {rep.estimate:.6g} / target {rep.target:.6g}) -> {args.out}")
    return 0


def cmd_weyl(args) -> int:
    rows = []
    for p in args.prime:
        for horizon in args.horizon:
            w = weyl_average(p, horizon)
            rows.append((p, horizon, w.closed_form.real, w.closed_form.imag,
                         w.quadrature.real, w.quadrature.imag, w.bound,
                         abs(w.closed_form - w.quadrature)))
    cfg = _effective_config(args)
    write_csv(args.out,
              ["prime", "horizon", "re_closed", "im_closed", "re_quad", "im_quad",
               "bound", "closed_vs_quad"], rows, cfg)
    print(f"wrote {len(rows)} rotation averages to {args.out}")
    return 0


def cmd_distcompare(args) -> int:
    kern = SmoothingKernel(args.support_bound)
    spec, table = _spec_table(args.spec, kern, args.truncation)
    s0 = complex(args.s0[0], args.s0[1])
    rep = empirical_vs_model(table, kern, s0, args.horizon, args.count,
                             args.truncation, args.seed)
    cfg = _effective_config(args)
    write_json(args.out, {
        "ks": rep.ks,
        "shift_moments": rep.shift_moments,
        "model_moments": rep.model_moments,
        "count": rep.count,
        "comparison_config": rep.config,
    }, cfg)
    print(f"KS statistic {rep.ks:.4f} over {rep.count} samples -> {args.out}")
    return 0


def cmd_supporthit(args) -> int:
    kern = SmoothingKernel(args.support_bound)
    spec, table = _spec_table(args.spec, kern, args.truncation)
    primes = [int(p) for p in args.primes]
    family = ExhaustionFamily(StripDomain(spec.sigma_phi))
    fam_eval = FamilyEvaluator(table, kern, family, args.level, args.truncation)
    # the probe target is a recorded model draw; with target-stream < count it is
    # one of the scanned draws, so the rate is at least 1/count
    target_funcs = fam_eval.at_omegas(args.seed, np.array([args.target_stream]))[0]
    angles = angle_matrix(np.array(primes), args.seed,
                          np.array([args.target_stream]))[:, 0]
    target = ProductPoint.build([target_funcs], np.exp(2j * np.pi * angles))
    rep = support_hit_rate(target, [table], kern, primes, args.delta, args.count,
                           args.truncation, args.seed, level=args.level)
    cfg = _effective_config(args)
    write_json(args.out, {
        "rate": rep.rate, "hits": rep.hits, "count": rep.count,
        "delta": rep.delta, "note": rep.note,
    }, cfg)
    print(f"hit rate {rep.rate:.4g} ({rep.hits}/{rep.count} within delta={rep.delta}) "
          f"-> {args.out}")
    return 0


def cmd_model_sample(args) -> int:
    kern = SmoothingKernel(args.support_bound)
    spec, table = _spec_table(args.spec, kern, args.truncation)
    s = complex(args.s[0], args.s[1])
    bound = max(kern.required_terms(args.truncation), 2)
    records = []
    for m in range(args.count):
        omega = sample_omega_up_to(bound, args.seed, stream=m)
        val = random_smoothed_value(table, kern, omega, s, args.truncation)
        records.append({"stream": m, "s": [s.real, s.imag],
                        "value": [val.real, val.imag]})
    cfg = _effective_config(args)
    write_jsonl(args.out, records, cfg)
    print(f"wrote {len(records)} model samples to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_common(sp, *, seed=True):
    sp.add_argument("--config", help="JSON file of option values (flags win)")
    sp.add_argument("--threads", type=int, default=None,
                    help=f"worker threads (or ${THREADS_ENV})")
    sp.add_argument("--support-bound", type=float, default=2.0,
                    help="cutoff support bound C (default 2)")
    if seed:
        sp.add_argument("--seed", type=int, default=20250810)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="zetalab",
        description="numerical experiments with smoothed Dirichlet series, "
                    "random Euler products, and phase-constrained shift hunts",
        epilog=f"spec presets: {', '.join(preset_names())}",
    )
    sub = ap.add_subparsers(dest="command")

    kg = sub.add_parser("kernel", help="cutoff/transform utilities")
    ksub = kg.add_subparsers(dest="kernel_command")
    kp = ksub.add_parser("probe", help="evaluate the Mellin transform at points")
    kp.add_argument("--s", nargs=2, type=float, action="append", required=True,
                    metavar=("RE", "IM"), help="point, repeatable")
    kp.add_argument("--quad-tol", type=float, default=1e-10)
    kp.add_argument("--out", default="kernel_probe.csv")
    _add_common(kp, seed=False)
    kp.set_defaults(func=cmd_kernel_probe)

    co = sub.add_parser("coeffs", help="dump Dirichlet coefficients")
    co.add_argument("--spec", required=True)
    co.add_argument("--limit", type=int, required=True)
    co.add_argument("--out", default="coeffs.csv")
    _add_common(co, seed=False)
    co.set_defaults(func=cmd_coeffs)

    ev = sub.add_parser("eval", help="smoothed values along a shift grid")
    ev.add_argument("--spec", required=True)
    ev.add_argument("--sigma", type=float, required=True)
    ev.add_argument("--tau-start", type=float, default=0.0)
    ev.add_argument("--dtau", type=float, default=0.05)
    ev.add_argument("--count", type=int, default=1000)
    ev.add_argument("--truncation", type=float, required=True, help="cutoff scale X")
    ev.add_argument("--out", default="eval.csv")
    _add_common(ev, seed=False)
    ev.set_defaults(func=cmd_eval)

    sc = sub.add_parser("scan", help="phase-window constrained target hunt")
    sc.add_argument("--target", required=True, help="target JSON file")
    sc.add_argument("--horizon", type=float, required=True)
    sc.add_argument("--dtau", type=float, default=0.01)
    sc.add_argument("--truncation", type=float, required=True)
    sc.add_argument("--out-json", default="scan.json")
    sc.add_argument("--out-csv", default="scan_distances.csv")
    _add_common(sc, seed=False)
    sc.set_defaults(func=cmd_scan)

    ms = sub.add_parser("meansquare", help="vertical mean square vs weighted sum")
    ms.add_argument("--spec", required=True)
    ms.add_argument("--sigma", type=float, required=True)
    ms.add_argument("--horizon", type=float, required=True)
    ms.add_argument("--dt", type=float, default=0.05)
    ms.add_argument("--truncation", type=float, required=True)
    ms.add_argument("--out", default="meansquare.csv")
    _add_common(ms, seed=False)
    ms.set_defaults(func=cmd_meansquare)

    wy = sub.add_parser("weyl", help="rotation averages: closed form vs quadrature")
    wy.add_argument("--prime", type=int, nargs="+", default=[2, 3, 5])
    wy.add_argument("--horizon", type=float, nargs="+", default=[1e2, 1e4, 1e6])
    wy.add_argument("--out", default="weyl.csv")
    _add_common(wy, seed=False)
    wy.set_defaults(func=cmd_weyl)

    dc = sub.add_parser("distcompare", help="shift ensemble vs random model at a point")
    dc.add_argument("--spec", required=True)
    dc.add_argument("--s0", nargs=2, type=float, required=True, metavar=("RE", "IM"))
    dc.add_argument("--horizon", type=float, required=True)
    dc.add_argument("--count", type=int, default=2000)
    dc.add_argument("--truncation", type=float, required=True)
    dc.add_argument("--out", default="distcompare.json")
    _add_common(dc)
    dc.set_defaults(func=cmd_distcompare)

    sh = sub.add_parser("supporthit", help="model mass near a recorded draw")
    sh.add_argument("--spec", required=True)
    sh.add_argument("--primes", type=int, nargs="+", default=[2])
    sh.add_argument("--delta", type=float, required=True)
    sh.add_argument("--count", type=int, default=1000)
    sh.add_argument("--truncation", type=float, required=True)
    sh.add_argument("--level", type=int, default=8)
    sh.add_argument("--target-stream", type=int, default=0)
    sh.add_argument("--out", default="supporthit.json")
    _add_common(sh)
    sh.set_defaults(func=cmd_supporthit)

    mo = sub.add_parser("model", help="random-model utilities")
    msub = mo.add_subparsers(dest="model_command")
    ms2 = msub.add_parser("sample", help="dump randomized smoothed values")
    ms2.add_argument("--spec", required=True)
    ms2.add_argument("--s", nargs=2, type=float, required=True, metavar=("RE", "IM"))
    ms2.add_argument("--count", type=int, default=1000)
    ms2.add_argument("--truncation", type=float, required=True)
    ms2.add_argument("--out", default="model_samples.jsonl")
    _add_common(ms2)
    ms2.set_defaults(func=cmd_model_sample)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if not hasattr(args, "func"):
        ap.print_help()
        return USAGE_EXIT
    try:
        _apply_config_file(args, set(vars(args)))
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT
    except ValueError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
