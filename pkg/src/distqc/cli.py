"""Command-line front end.

Subcommands map onto the library surfaces: ``rates``, ``bell-sim``,
``hidden-orthog``, ``erasure-check``, ``verify`` and ``plot``.  Every emitted
report embeds the tool version, the seed and the fully resolved configuration,
and identical inputs produce byte-identical outputs regardless of parallelism.

Exit codes: 0 success, 1 verification failure, 2 contract error, 3 capacity
error, 4 parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import CapacityError, ContractError, InputParseError
from .ensembles import (
    BUILTIN_NAMES,
    builtin,
    ensemble_from_json,
    erasure_code_vectors,
    parse_probability,
)
from .hashing import (
    ABSTRACT,
    COMPILED,
    MaskSchedule,
    McConfig,
    McReport,
    MODES,
    run_monte_carlo,
)
from .oracles import brute_force_reducible, exhaustive_ml_decode
from .rates import all_bounds, region_export
from .simulate import (
    erasure_correctable,
    hidden_orthogonality_asymptotic_rates,
    hidden_orthogonality_fidelity,
    verify_channel_view_agreement,
    verify_label_oracles,
)

_SVG_W, _SVG_H = 640, 480
_MARGIN = 56


def _parse_number(text: str) -> float:
    return parse_probability(text)


def _parse_prob_list(text: str, count: int) -> tuple[float, ...]:
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != count:
        raise InputParseError(f"expected {count} comma-separated values, got {len(parts)}")
    vals = tuple(_parse_number(p) for p in parts)
    total = sum(vals)
    if abs(total - 1.0) > 1e-6:
        raise InputParseError(f"probabilities sum to {total}, not 1 within 1e-6")
    return tuple(v / total for v in vals)


def load_ensemble(spec: str):
    """A path to an ensemble JSON file, or builtin:name(arg,arg,...)."""
    if spec.startswith("builtin:"):
        body = spec[len("builtin:"):]
        if "(" in body:
            if not body.endswith(")"):
                raise InputParseError(f"malformed builtin spec {spec!r}")
            name, _, arglist = body[:-1].partition("(")
            args = [_parse_number(a) for a in arglist.split(",") if a.strip()]
        else:
            name, args = body, []
        if name not in BUILTIN_NAMES:
            raise InputParseError(f"unknown builtin {name!r}; choose from {BUILTIN_NAMES}")
        return builtin(name, args)
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputParseError(f"cannot read ensemble file {spec!r}: {exc}") from exc
    return ensemble_from_json(text)


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _envelope(seed, config: dict, result) -> str:
    doc = {
        "tool": "distqc",
        "version": __version__,
        "seed": seed,
        "config": config,
        "result": result,
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _bounds_json(bounds) -> list[dict]:
    out = []
    for b in bounds:
        out.append(
            {
                "family": b.family,
                "ra_lb": b.ra_lb,
                "rb_lb": b.rb_lb,
                "sum_lb": b.sum_lb,
                "applicability": {
                    "is_product": b.applicability.is_product,
                    "is_irreducible_joint": b.applicability.is_irreducible_joint,
                    "is_bell_form": b.applicability.is_bell_form,
                },
                "note": b.note,
                "corners": [list(c) for c in b.corners],
            }
        )
    return out


def cmd_rates(args) -> int:
    ens = load_ensemble(args.ensemble)
    bounds = all_bounds(ens)
    config = {"ensemble": args.ensemble, "format": args.format}
    if args.format == "csv":
        _emit(region_export(bounds, resolution=args.resolution), args.out)
    else:
        result = {
            "dA": ens.d_a,
            "dB": ens.d_b,
            "states": ens.size,
            "bounds": _bounds_json(bounds),
        }
        _emit(_envelope(args.seed, config, result), args.out)
    return 0


def cmd_bell_sim(args) -> int:
    p = _parse_prob_list(args.p, 4)
    h = float(-sum(x * math.log2(x) for x in p if x > 0))
    if args.m is None:
        if args.delta is None:
            raise InputParseError("provide either --m or --delta")
        m = math.ceil(args.n * (h + 2 * args.delta) / 2)
    else:
        m = args.m
    if not (1 <= m <= args.n):
        raise ContractError(f"derived m={m} outside 1..n={args.n}")
    cfg = McConfig(
        p=p, n=args.n, m=m, trials=args.trials, delta=args.delta,
        mode=args.mode, seed=args.seed, parallelism=args.parallelism,
    )
    report = run_monte_carlo(cfg)
    if args.format == "csv":
        _emit(McReport.CSV_HEADER + "\n" + report.csv_row() + "\n", args.out)
    else:
        config = {
            "p": list(p), "n": args.n, "m": m, "delta": args.delta,
            "trials": args.trials, "mode": args.mode, "parallelism": args.parallelism,
        }
        _emit(_envelope(args.seed, config, report.to_json_dict()), args.out)
    return 0


def cmd_hidden_orthog(args) -> int:
    if not (0.0 < args.alpha < 1.0 and 0.0 < args.beta < 1.0):
        raise ContractError("alpha and beta must lie strictly inside (0, 1)")
    ns = [int(x) for x in str(args.n).split(",") if x.strip()]
    reports = [
        hidden_orthogonality_fidelity(args.alpha, args.beta, n, args.delta,
                                      full_rate=args.full_rate)
        for n in ns
    ]
    config = {
        "alpha": args.alpha, "beta": args.beta, "n": ns, "delta": args.delta,
        "full_rate": args.full_rate,
    }
    if args.format == "csv":
        lines = ["n,fidelity,rate_a,rate_b"]
        for n, rep in zip(ns, reports):
            lines.append(
                f"{n},{rep.average_fidelity:.9g},{rep.rate_a:.9g},{rep.rate_b:.9g}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        result = {
            "asymptotic": hidden_orthogonality_asymptotic_rates(args.alpha, args.beta),
            "blocks": [rep.to_json_dict() for rep in reports],
        }
        _emit(_envelope(args.seed, config, result), args.out)
    return 0


def _load_basis(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputParseError(f"cannot read basis file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputParseError(f"invalid JSON in basis file: {exc}") from exc
    try:
        vectors = [
            np.array([complex(re, im) for re, im in vec]) for vec in doc["vectors"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputParseError(f"basis file needs a 'vectors' array of [re,im] pairs: {exc}")
    return vectors


def cmd_erasure_check(args) -> int:
    basis = _load_basis(args.basis) if args.basis else list(erasure_code_vectors())
    n_qubits = int(math.log2(len(basis[0])))
    positions = {}
    all_ok = True
    for q in range(1, n_qubits + 1):
        ok, residuals = erasure_correctable(basis, q)
        all_ok &= ok
        positions[str(q)] = {
            "correctable": ok,
            "residuals": {k: float(v) for k, v in residuals.items()},
        }
    config = {"basis": args.basis or "builtin", "qubits": n_qubits}
    result = {"all_positions_correctable": all_ok, "positions": positions}
    _emit(_envelope(args.seed, config, result), args.out)
    return 0


def _verify_decoder_suite(seed: int, instances: int = 40):
    from .hashing import compile_protocol, decode, observe, sample_label_string
    from .oracles import OracleReport

    rng = np.random.default_rng([seed, 0xDEC0DE])
    report = OracleReport(name="decoder_vs_exhaustive", cases=instances)
    for k in range(instances):
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, n + 1))
        mode = COMPILED if k % 2 else ABSTRACT
        p = rng.dirichlet(np.ones(4) * 0.8)
        x = sample_label_string(p, n, rng)
        sys_ = compile_protocol(n, m, MaskSchedule.random(n, m, mode, rng))
        obs = observe(x, sys_)
        got = decode(obs, sys_, p)
        winners, _ = exhaustive_ml_decode(obs, sys_, p)
        ok = (len(winners) >= 2) if got.tie else (winners == [got.label.bits])
        if not ok or got.best.bits != winners[0]:
            report.mismatches.append(f"instance {k}: n={n} m={m} mode={mode}")
    return report


def _verify_reducibility_suite(seed: int, instances: int = 60):
    from .ensembles import is_reducible
    from .oracles import OracleReport

    rng = np.random.default_rng([seed, 0x2ED0CE])
    report = OracleReport(name="reducibility_vs_bruteforce", cases=instances)
    for k in range(instances):
        dim = int(rng.integers(2, 5))
        count = int(rng.integers(2, 6))
        vecs = []
        for _ in range(count):
            v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            if vecs and rng.random() < 0.5:
                for u in vecs:
                    v = v - np.vdot(u, v) * u
                if np.linalg.norm(v) < 1e-9:
                    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
            vecs.append(v / np.linalg.norm(v))
        got, _ = is_reducible(vecs, 1e-8)
        want = brute_force_reducible(vecs, 1e-8)
        if got != want:
            report.mismatches.append(f"instance {k}: fast {got} vs brute {want}")
    return report


def _verify_channel_view_suite(seed: int):
    rng = np.random.default_rng([seed, 0xC4A77E1])
    p = (7 / 17, 5 / 17, 3 / 17, 2 / 17)
    reports = []
    for n, m in ((2, 1), (3, 2)):
        schedules = [MaskSchedule.random(n, m, COMPILED, rng) for _ in range(3)]
        rep = verify_channel_view_agreement(p, n, m, schedules)
        rep.name = f"channel_view_agreement(n={n},m={m})"
        reports.append(rep)
    return reports


def cmd_verify(args) -> int:
    suites = []
    if args.suite in ("all", "labels"):
        suites.extend(verify_label_oracles(raise_on_failure=False))
    if args.suite in ("all", "decoder"):
        suites.append(_verify_decoder_suite(args.seed))
    if args.suite in ("all", "reducibility"):
        suites.append(_verify_reducibility_suite(args.seed))
    if args.suite in ("all", "channel-view"):
        suites.extend(_verify_channel_view_suite(args.seed))
    lines = []
    failed = False
    for rep in suites:
        status = "PASS" if rep.passed else "FAIL"
        failed |= not rep.passed
        lines.append(f"{status} {rep.name} ({rep.cases} cases)")
        lines.extend(f"    {msg}" for msg in rep.mismatches)
    _emit("\n".join(lines) + "\n", args.out)
    return 1 if failed else 0


# ---------------------------------------------------------------------------
# Plotting
# ---------------------------------------------------------------------------

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _svg_header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_SVG_W}" height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<text x="{_SVG_W / 2:.1f}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
    ]


def _axis_lines(x_label: str, y_label: str) -> list[str]:
    x0, y0 = _MARGIN, _SVG_H - _MARGIN
    x1, y1 = _SVG_W - _MARGIN, _MARGIN
    return [
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) / 2:.1f}" y="{_SVG_H - 16}" text-anchor="middle" '
        f'font-family="monospace" font-size="12">{x_label}</text>',
        f'<text x="16" y="{(y0 + y1) / 2:.1f}" text-anchor="middle" '
        f'font-family="monospace" font-size="12" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2:.1f})">{y_label}</text>',
    ]


def _scale(vals, lo, hi, out_lo, out_hi):
    span = hi - lo if hi > lo else 1.0
    return [(out_lo + (v - lo) / span * (out_hi - out_lo)) for v in vals]


def _read_csv(path: str) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise InputParseError(f"cannot read CSV {path!r}: {exc}") from exc
    if len(lines) < 2:
        raise InputParseError("CSV has no data rows; nothing to plot")
    header = lines[0].split(",")
    return header, [ln.split(",") for ln in lines[1:]]


def _plot_region(path: str) -> str:
    header, rows = _read_csv(path)
    if header[:4] != ["family", "vertex_index", "RA", "RB"]:
        raise InputParseError("region CSV must have header family,vertex_index,RA,RB")
    families: dict[str, list[tuple[float, float]]] = {}
    for fam, _, ra, rb in (r[:4] for r in rows):
        families.setdefault(fam, []).append((float(ra), float(rb)))
    all_pts = [p for pts in families.values() for p in pts]
    hi = max(max(x for x, _ in all_pts), max(y for _, y in all_pts)) * 1.05 + 1e-9
    svg = _svg_header("rate region lower bounds")
    svg += _axis_lines("R_A (qubits/signal)", "R_B (qubits/signal)")
    for idx, (fam, pts) in enumerate(sorted(families.items())):
        xs = _scale([p[0] for p in pts], 0, hi, _MARGIN, _SVG_W - _MARGIN)
        ys = _scale([p[1] for p in pts], 0, hi, _SVG_H - _MARGIN, _MARGIN)
        path_d = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
        color = _COLORS[idx % len(_COLORS)]
        svg.append(
            f'<polyline points="{path_d}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        svg.append(
            f'<text x="{_SVG_W - _MARGIN - 4}" y="{_MARGIN + 16 * (idx + 1)}" '
            f'text-anchor="end" font-family="monospace" font-size="11" '
            f'fill="{color}">{fam}</text>'
        )
    svg.append("</svg>")
    return "\n".join(svg) + "\n"


def _plot_failure_curve(path: str) -> str:
    header, rows = _read_csv(path)
    want = McReport.CSV_HEADER.split(",")
    if header != want:
        raise InputParseError(f"failure-curve CSV must have header {McReport.CSV_HEADER}")
    series: dict[str, list[tuple[float, float, float]]] = {}
    for r in rows:
        rec = dict(zip(header, r))
        series.setdefault(rec["mode"], []).append(
            (float(rec["m"]), max(float(rec["empirical"]), 0.0), float(rec["bound"]))
        )
    floor = 1e-4
    all_y = [max(y, floor) for pts in series.values() for _, y, b in pts
             for y in (y, b)]
    lo, hi = math.log10(min(all_y)) - 0.2, math.log10(max(all_y)) + 0.2
    ms = [m for pts in series.values() for m, _, _ in pts]
    m_lo, m_hi = min(ms) - 0.5, max(ms) + 0.5
    svg = _svg_header("hashing failure rate vs channel pairs (log scale)")
    svg += _axis_lines("m (pairs sent)", "log10 failure rate")
    for idx, (mode, pts) in enumerate(sorted(series.items())):
        pts = sorted(pts)
        xs = _scale([p[0] for p in pts], m_lo, m_hi, _MARGIN, _SVG_W - _MARGIN)
        ys = _scale([math.log10(max(p[1], floor)) for p in pts], lo, hi,
                    _SVG_H - _MARGIN, _MARGIN)
        bs = _scale([math.log10(max(p[2], floor)) for p in pts], lo, hi,
                    _SVG_H - _MARGIN, _MARGIN)
        color = _COLORS[idx % len(_COLORS)]
        svg.append(
            '<polyline points="'
            + " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, ys))
            + f'" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        svg.append(
            '<polyline points="'
            + " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(xs, bs))
            + f'" fill="none" stroke="{color}" stroke-width="1" stroke-dasharray="4 3"/>'
        )
        svg.append(
            f'<text x="{_SVG_W - _MARGIN - 4}" y="{_MARGIN + 16 * (idx + 1)}" '
            f'text-anchor="end" font-family="monospace" font-size="11" '
            f'fill="{color}">{mode} (dashed: bound)</text>'
        )
    svg.append("</svg>")
    return "\n".join(svg) + "\n"


def cmd_plot(args) -> int:
    if args.kind == "region":
        svg = _plot_region(args.csv)
    elif args.kind == "failure_curve":
        svg = _plot_failure_curve(args.csv)
    else:
        raise InputParseError(f"unknown plot kind {args.kind!r}")
    _emit(svg, args.out)
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="distqc",
        description="Distributed compression of correlated quantum sources: "
        "rate bounds, Bell-pair hashing, protocol simulation.",
    )
    ap.add_argument("--version", action="version", version=f"distqc {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="base RNG seed")
        p.add_argument("--out", default=None, help="output file (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("rates", help="rate-region bounds for an ensemble")
    p.add_argument("ensemble", help="ensemble JSON path or builtin:name(args)")
    p.add_argument("--resolution", type=int, default=8, help="diagonal subdivision for csv")
    common(p)
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("bell-sim", help="Monte Carlo hashing failure statistics")
    p.add_argument("--p", required=True, help="four probabilities, e.g. 1/2,1/2,0,0")
    p.add_argument("--n", type=int, required=True, help="source block length in pairs")
    p.add_argument("--m", type=int, default=None, help="pairs sent to the decoder")
    p.add_argument("--delta", type=float, default=None,
                   help="typicality slack; sets m = ceil(n(H+2 delta)/2) when --m absent")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--mode", choices=MODES, default=ABSTRACT)
    p.add_argument("--parallelism", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_bell_sim)

    p = sub.add_parser("hidden-orthog", help="hidden-orthogonality protocol fidelity")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--n", required=True, help="block length, or comma list for csv")
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--full-rate", action="store_true", dest="full_rate",
                   help="disable the typicality truncation")
    common(p)
    p.set_defaults(func=cmd_hidden_orthog)

    p = sub.add_parser("erasure-check", help="known-position erasure correctability")
    p.add_argument("--basis", default=None, help="JSON file with a 'vectors' array")
    common(p)
    p.set_defaults(func=cmd_erasure_check)

    p = sub.add_parser("verify", help="run the independent oracle suites")
    p.add_argument("--suite", default="all",
                   choices=("all", "labels", "decoder", "reducibility", "channel-view"))
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plot", help="render a CSV report to SVG")
    p.add_argument("csv", help="input CSV produced by rates or bell-sim")
    p.add_argument("--kind", choices=("region", "failure_curve"), required=True)
    common(p)
    p.set_defaults(func=cmd_plot)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 4
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 3
    except ContractError as exc:
        print(f"contract error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
