"""Command-line front end: ``mine``, ``eval`` and ``synth``.

Exit codes: 0 success, 1 I/O or validation failure, 2 no rules found.
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .evaluation import EvaluationError, evaluate_rule, gen_synthetic, overlay
from .miner import MinerConfig, find_top_rules, rule_from_dict, rule_to_dict
from .series import SeriesError, TimeSeries, load_csv, resample, save_csv

log = logging.getLogger("motifrules")

MANIFEST = "manifest.json"


class UsageError(Exception):
    """Bad flag value; the message names the flag."""


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _dump(obj, path: Path):
    path.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n", encoding="utf-8")


def _manifest(argv, config, inputs, seed, timings, outputs) -> dict:
    return {
        "tool": "motifrules",
        "version": __version__,
        "argv": list(argv),
        "config": config,
        "inputs": [{"path": str(p), "sha256": _sha256(p)} for p in inputs],
        "seed": seed,
        "timings_s": {k: round(v, 4) for k, v in timings.items()},
        "outputs": outputs,
    }


def _load(flag, spec, args, name=None):
    path = Path(spec)
    try:
        ts = load_csv(path, column=args.column, timestamp_column=args.timestamp_column, name=name)
        if getattr(args, "resample", None):
            ts = resample(ts, args.resample)
    except SeriesError as exc:
        raise UsageError(f"{flag}: {exc}") from None
    return ts, path


def _positive(flag, value):
    if value is None or not value > 0:
        raise UsageError(f"{flag}: must be positive, got {value}")
    return value


def _config(args) -> MinerConfig:
    try:
        lengths = [int(v) for v in str(args.motif_lengths).split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"--motif-lengths: expected comma-separated integers, got {args.motif_lengths!r}") from None
    if not lengths or min(lengths) < 2:
        raise UsageError("--motif-lengths: need at least one length >= 2")
    if args.k_motifs < 1:
        raise UsageError("--k-motifs: must be >= 1")
    if args.k_rules < 0:
        raise UsageError("--k-rules: must be >= 0")
    _positive("--tau", args.tau)
    _positive("--theta", args.theta)
    if args.theta_b is not None:
        _positive("--theta-b", args.theta_b)
    if not 2 <= args.bits <= 16:
        raise UsageError("--bits: must be in [2, 16]")
    if args.jobs < 1:
        raise UsageError("--jobs: must be >= 1")
    return MinerConfig(lengths, args.k_motifs, args.k_rules, args.tau, args.theta, args.bits,
                       args.normalize, args.theta_b, args.motif_pool, args.jobs)


def _mine_pair(T_A, T_B, cfg):
    try:
        return find_top_rules(T_A, T_B, cfg)
    except SeriesError as exc:
        raise UsageError(f"--motif-lengths: {exc}") from None


def cmd_mine(args, argv) -> int:
    cfg = _config(args)
    out = Path(args.out)
    timings = {}
    t0 = time.perf_counter()
    if args.pairs_dir:
        files = sorted(Path(args.pairs_dir).glob("*.csv"))
        if len(files) < 2:
            raise UsageError(f"--pairs-dir: need at least two CSV files in {args.pairs_dir}")
        series = {p.stem: _load("--pairs-dir", p, args)[0] for p in files}
        inputs = files
    else:
        if not args.series_a:
            raise UsageError("--series-a: required unless --pairs-dir is given")
        T_A, pa = _load("--series-a", args.series_a, args)
        inputs = [pa]
        T_B = T_A
        if args.series_b:
            T_B, pb = _load("--series-b", args.series_b, args)
            inputs.append(pb)
    timings["load"] = time.perf_counter() - t0

    out.mkdir(parents=True, exist_ok=True)
    outputs = []
    total = 0
    t0 = time.perf_counter()
    if args.pairs_dir:
        for a, b in itertools.permutations(sorted(series), 2):
            rules = _mine_pair(series[a], series[b], cfg)
            name = f"rules__{a}__{b}.json"
            _dump(_rules_doc(rules, cfg), out / name)
            outputs.append(name)
            total += len(rules)
            log.info("%s -> %s: %d rules", a, b, len(rules))
    else:
        rules = _mine_pair(T_A, T_B, cfg)
        _dump(_rules_doc(rules, cfg), out / "rules.json")
        outputs.append("rules.json")
        total = len(rules)
    timings["mine"] = time.perf_counter() - t0
    _dump(_manifest(argv, cfg.to_dict(), inputs, None, timings, outputs), out / MANIFEST)
    print(f"wrote {total} rule(s) to {out}")
    return 0 if total else 2


def _rules_doc(rules, cfg) -> dict:
    return {"manifest": MANIFEST, "config": cfg.to_dict(),
            "rules": [dict(rank=k + 1, **rule_to_dict(r)) for k, r in enumerate(rules)]}


def _named(flag, spec, args, default_name):
    name, sep, path = str(spec).partition("=")
    if sep and name and not Path(spec).exists():
        return (*_load(flag, path, args, name=name), True)
    return (*_load(flag, spec, args, name=default_name), False)


def cmd_eval(args, argv) -> int:
    rules_path = Path(args.rules)
    try:
        doc = json.loads(rules_path.read_text(encoding="utf-8"))
        entries = doc["rules"]
        rules = [rule_from_dict(d) for d in entries]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"--rules: cannot read rule file: {exc}") from None
    if args.repetitions < 1:
        raise UsageError("--repetitions: must be >= 1")
    normalize = args.normalize or bool(doc.get("config", {}).get("normalize", False))

    names_a = {r.m_A.source.name for r in rules}
    names_b = {r.m_B.source.name for r in rules}
    default_a = names_a.pop() if len(names_a) == 1 else None
    default_b = names_b.pop() if len(names_b) == 1 else None
    test_a, pa, explicit_a = _named("--test-a", args.test_a, args, default_a)
    inputs = [rules_path, pa]
    if args.test_b:
        test_b, pb, explicit_b = _named("--test-b", args.test_b, args, default_b)
        inputs.append(pb)
    else:
        test_b, explicit_b = test_a, explicit_a
        if default_b is not None and not explicit_a:
            test_b = TimeSeries(test_a.values, test_a.start_time, test_a.period, default_b)
    available = {test_a.name, test_b.name}
    for k, r in enumerate(rules):
        for role, sub in (("antecedent", r.m_A), ("consequent", r.m_B)):
            if sub.source.name not in available:
                raise UsageError(f"--rules: rule {k + 1} {role} references series "
                                 f"{sub.source.name!r}, not among test inputs {sorted(available)}")

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    reports = []
    overlays = []
    for k, r in enumerate(rules):
        series_a = test_a if r.m_A.source.name == test_a.name else test_b
        series_b = test_b if r.m_B.source.name == test_b.name else test_a
        try:
            rep = evaluate_rule(r, series_a, series_b, args.repetitions, args.seed, normalize)
        except EvaluationError as exc:
            rep = {"Q": None, "N_firings": 0, "firings": [], "error": str(exc)}
        reports.append({"rank": entries[k].get("rank", k + 1), **rep})
        if args.overlay_csv and rep["firings"]:
            starts = [f["predicted_index"] for f in rep["firings"]]
            overlays.append((k, series_b, overlay(r, series_b, starts)))
    timings = {"eval": time.perf_counter() - t0}

    top = [rep["Q"] for rep in reports[:5] if rep["Q"] is not None]
    report = {
        "manifest": MANIFEST,
        "repetitions": args.repetitions,
        "seed": args.seed,
        "rules": reports,
        "top5_mean_Q": float(np.mean(top)) if top else None,
    }
    _dump(report, out / "report.json")
    outputs = ["report.json"]
    for k, series_b, ov in overlays:
        name = f"overlay_rule{k + 1}.csv"
        with open(out / name, "w", encoding="utf-8") as fh:
            fh.write("index,actual,predicted_overlay\n")
            for i, (v, p) in enumerate(zip(series_b.values, ov)):
                fh.write(f"{i},{v!r},{'' if np.isnan(p) else repr(float(p))}\n")
        outputs.append(name)
    _dump(_manifest(argv, {"normalize": normalize}, inputs, args.seed, timings, outputs), out / MANIFEST)
    q = report["top5_mean_Q"]
    print(f"evaluated {len(rules)} rule(s); top-5 mean Q = {'n/a' if q is None else f'{q:.4f}'}")
    return 0


def cmd_synth(args, argv) -> int:
    if args.length < 1 or args.instances < 1:
        raise UsageError("--length/--instances: must be positive")
    if args.noise < 0:
        raise UsageError("--noise: must be >= 0")
    t0 = time.perf_counter()
    try:
        planted = gen_synthetic(args.length, args.instances, (args.gap_lo, args.gap_hi), args.noise,
                                args.seed, args.len_a, args.len_b, args.amplitude)
    except ValueError as exc:
        raise UsageError(f"--instances/--length/--gap-hi: {exc}") from None
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_csv(planted.series_a, out / "T_A.csv")
    save_csv(planted.series_b, out / "T_B.csv")
    _dump({"manifest": MANIFEST, **planted.truth()}, out / "truth.json")
    timings = {"synth": time.perf_counter() - t0}
    config = {k: getattr(args, k) for k in ("length", "instances", "gap_lo", "gap_hi", "noise",
                                            "amplitude", "len_a", "len_b")}
    _dump(_manifest(argv, config, [], args.seed, timings, ["T_A.csv", "T_B.csv", "truth.json"]),
          out / MANIFEST)
    print(f"wrote T_A.csv, T_B.csv, truth.json to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="motifrules", description="Motif-based rule discovery for time series")
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def csv_flags(p):
        p.add_argument("--column", default=None, help="value column (name or index; default last)")
        p.add_argument("--timestamp-column", default=None, help="timestamp column (name or index)")
        p.add_argument("--normalize", action="store_true", help="z-normalize windows before comparing")

    m = sub.add_parser("mine", help="discover top-K rules")
    m.add_argument("--series-a")
    m.add_argument("--series-b", help="consequent series (default: same as --series-a)")
    m.add_argument("--pairs-dir", help="mine every ordered pair of CSVs in this directory")
    m.add_argument("--motif-lengths", default="50,30")
    m.add_argument("--k-motifs", type=int, default=5)
    m.add_argument("--k-rules", type=int, default=5)
    m.add_argument("--motif-pool", type=int, default=None,
                   help="motifs found per length before roughness ranking (default 2*k-motifs)")
    m.add_argument("--tau", type=float, default=300.0, help="max interval, seconds")
    m.add_argument("--theta", type=float, default=5.0)
    m.add_argument("--theta-b", type=float, default=None, help="separate consequent scan threshold")
    m.add_argument("--bits", type=int, default=6)
    m.add_argument("--resample", type=float, default=None, help="resample to this period (seconds)")
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--out", required=True)
    csv_flags(m)

    e = sub.add_parser("eval", help="evaluate rules on held-out data (Q metric)")
    e.add_argument("--rules", required=True)
    e.add_argument("--test-a", required=True, help="[NAME=]PATH")
    e.add_argument("--test-b", help="[NAME=]PATH (default: --test-a)")
    e.add_argument("--repetitions", type=int, default=1000)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--overlay-csv", action="store_true")
    e.add_argument("--resample", type=float, default=None)
    e.add_argument("--out", required=True)
    csv_flags(e)

    s = sub.add_parser("synth", help="generate a planted-rule series pair")
    s.add_argument("--length", type=int, default=10000)
    s.add_argument("--instances", type=int, default=20)
    s.add_argument("--gap-lo", type=int, default=10)
    s.add_argument("--gap-hi", type=int, default=100)
    s.add_argument("--noise", type=float, default=0.5)
    s.add_argument("--amplitude", type=float, default=10.0)
    s.add_argument("--len-a", type=int, default=50)
    s.add_argument("--len-b", type=int, default=30)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out-dir", required=True)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for bad flags; 2 is reserved for "no rules found"
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"mine": cmd_mine, "eval": cmd_eval, "synth": cmd_synth}[args.cmd]
    try:
        return handler(args, argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
