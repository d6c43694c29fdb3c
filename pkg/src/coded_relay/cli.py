"""Command line driver: constants, single runs, sweeps, probes and audits."""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, metrics, mobility, scheduler
from .sim import ConfigError, SimConfig, probe_run, run_output, write_event_log

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_UNSTABLE = 0, 1, 2, 3
WORKERS_ENV = "CODED_RELAY_WORKERS"

RUN_COLUMNS = (
    "scheme", "n", "delta_param", "p_s", "delta_ratio", "m", "seed", "horizon", "warmup",
    "mean_delay_slots", "p50_delay", "p95_delay", "throughput_pkts_per_slot_per_pair",
    "send_span_mean", "relay_wait_mean", "collect_span_mean", "unstable_flag",
)
SUMMARY_COLUMNS = (
    "scheme", "n", "delta_param", "p_s", "delta_ratio", "m", "seeds",
    "mean_delay_slots", "delay_ci95", "throughput_pkts_per_slot_per_pair", "throughput_ci95",
    "send_span_mean", "relay_wait_mean", "collect_span_mean", "unstable_seeds",
)
PROBE_CSV_COLUMNS = ("pair", "gen", "t1", "M", "phi", "eta", "M_relays", "holders_t2", "eta_hold")

# (flag, SimConfig field, parser)
RUN_OPTIONS = (
    ("scheme", "scheme", str),
    ("n", "n", int),
    ("ps", "p_s", float),
    ("delta", "delta", float),
    ("delta-ratio", "gen_ratio", float),
    ("horizon", "horizon", int),
    ("warmup", "warmup", int),
    ("c0", "c0", float),
    ("relay-policy", "relay_policy", str),
    ("ragged", "ragged", None),
    ("drain", "drain", int),
    ("backend", "backend", str),
)

FIG_GRIDS = {
    "fig5": ("ps", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]),
    "fig6": ("delta-ratio", [0.1, 0.2, 0.3, 0.4, 0.5, 0.8, 0.9]),
    "fig7": ("n", [49, 121, 225, 441]),
}


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return f"{x:.10g}"
    return str(x)


def _bool(v) -> bool:
    if isinstance(v, bool):
        return v
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"not a boolean: {v!r}")


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; keys are flag names, '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        k, v = (x.strip() for x in line.split("=", 1))
        out[k.lstrip("-").replace("_", "-")] = v
    return out


def parse_seeds(text: str) -> list[int]:
    """'1,2,5' or '1-5' or a mix."""
    seeds = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            seeds.extend(range(int(a), int(b) + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise ConfigError("empty seed list")
    return seeds


def _values(text: str, cast) -> list:
    vals = [cast(x) for x in str(text).split(",") if x.strip()]
    if not vals:
        raise ConfigError("empty value list")
    return vals


def build_config(args, overrides: dict | None = None) -> tuple[SimConfig, list[int]]:
    """Resolve defaults < config file < flags (< sweep overrides)."""
    file_vals = read_config_file(args.config) if getattr(args, "config", None) else {}
    known = {f for f, _, _ in RUN_OPTIONS} | {"seed", "seeds", "event-log", "out", "samples"}
    unknown = set(file_vals) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    kw = {}
    for flag, fld, cast in RUN_OPTIONS:
        v = getattr(args, fld, None)
        if v is None and flag in file_vals:
            v = file_vals[flag]
        if v is None:
            continue
        try:
            kw[fld] = _bool(v) if cast is None else cast(v)
        except ValueError as exc:
            raise ConfigError(f"bad value for {flag}: {v!r}") from exc
    kw.update(overrides or {})
    seeds_text = getattr(args, "seeds", None) or file_vals.get("seeds") or file_vals.get("seed") or "1"
    seeds = parse_seeds(seeds_text)
    kw["seed"] = seeds[0]
    try:
        cfg = SimConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg, seeds


def add_run_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("run parameters")
    g.add_argument("--config", help="key=value file; flags override it")
    g.add_argument("--scheme", choices=("2hrrsc", "2hop"), default=None)
    g.add_argument("--n", type=int, default=None, help="node count, a perfect square")
    g.add_argument("--ps", dest="p_s", type=float, default=None, help="source-role probability")
    g.add_argument("--delta", type=float, default=None, help="interference guard factor")
    g.add_argument("--delta-ratio", dest="gen_ratio", type=float, default=None, help="m/n")
    g.add_argument("--horizon", type=int, default=None, help="slots (default 400 n)")
    g.add_argument("--warmup", type=int, default=None, help="slots (default 40 n)")
    g.add_argument("--c0", type=float, default=None)
    g.add_argument("--relay-policy", dest="relay_policy", choices=("scan", "strict"), default=None)
    g.add_argument("--ragged", action="store_const", const=True, default=None,
                   help="allow side lengths that are not a multiple of the lattice spacing")
    g.add_argument("--drain", type=int, default=None, help="max extra slots to finish measured generations")
    g.add_argument("--backend", choices=("auto", "python", "compiled"), default=None)
    g.add_argument("--seeds", default=None, help="e.g. 1,2,3 or 1-5")


def add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="CSV path (default stdout)")
    p.add_argument("--manifest", help="manifest path (default <out>.manifest)")
    p.add_argument("--force", action="store_true", help="overwrite existing outputs")


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


# -- execution --------------------------------------------------------------


def _one_run(cfg: SimConfig):
    """Worker body: returns a small picklable result."""
    out = run_output(cfg)
    rm = metrics.summarize(out)
    dec = rm.decomposition.means() if rm.decomposition else (math.nan,) * 3
    row = {
        "scheme": cfg.scheme,
        "n": cfg.n,
        "delta_param": cfg.delta,
        "p_s": cfg.p_s,
        "delta_ratio": cfg.gen_ratio,
        "m": out.m,
        "seed": cfg.seed,
        "horizon": cfg.horizon_slots,
        "warmup": cfg.warmup_slots,
        "mean_delay_slots": rm.mean_delay,
        "p50_delay": rm.delay.p50 if rm.delay else math.nan,
        "p95_delay": rm.delay.p95 if rm.delay else math.nan,
        "throughput_pkts_per_slot_per_pair": rm.throughput.mean,
        "send_span_mean": dec[0],
        "relay_wait_mean": dec[1],
        "collect_span_mean": dec[2],
        "unstable_flag": rm.unstable,
    }
    diag = {"censored": rm.censored, "mismatches": rm.mismatches, "buffered": rm.buffered,
            "decoded_generations": rm.decoded_generations, "backend": out.backend}
    log = out.events if cfg.event_log else None
    return row, diag, log


def run_many(cfgs: list[SimConfig], workers: int):
    if workers <= 1 or len(cfgs) <= 1:
        return [_one_run(c) for c in cfgs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_one_run, cfgs))


def rows_to_csv(rows: list[dict], columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


class OutputError(Exception):
    pass


def _check_paths(paths: list[str | None], force: bool) -> None:
    for p in paths:
        if p and Path(p).exists() and not force:
            raise OutputError(f"refusing to overwrite {p} (use --force)")


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def write_manifest(path: str, cfg: SimConfig, seeds: list[int], started: float, flags: list,
                   outputs: list[str], extra: dict | None = None) -> None:
    lines = [f"artifact_version={__version__}"]
    resolved = {"horizon": cfg.horizon_slots, "warmup": cfg.warmup_slots, "drain": cfg.drain_slots,
                "probe_window": cfg.probe_window_slots}
    for k, v in cfg.as_dict().items():
        if k != "seed":
            lines.append(f"config.{k}={_fmt(resolved.get(k, v))}")
    lines.append(f"config.m={cfg.m}")
    lines.append("seeds=" + ",".join(str(s) for s in seeds))
    lines.append(f"start_wallclock={time.strftime('%Y-%m-%dT%H:%M:%S', time.localtime(started))}")
    lines.append(f"end_wallclock={time.strftime('%Y-%m-%dT%H:%M:%S')}")
    for key, flag in flags:
        lines.append(f"unstable.{key}={_fmt(bool(flag))}")
    for k, v in (extra or {}).items():
        lines.append(f"{k}={_fmt(v)}")
    lines.append("outputs=" + ",".join(outputs))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# -- subcommands --------------------------------------------------------------


def cmd_constants(args) -> int:
    try:
        rc = scheduler.rate_constants(args.n, args.p_s, args.delta, args.c0)
        lo_r, hi_r = scheduler.delta_bound_range(args.p_s, args.delta, args.c0, rounded=True)
        at_c1 = None
        if args.c1 is not None:
            at_c1 = (scheduler.delta_bound(args.p_s, args.delta, args.c1, args.c0),
                     scheduler.delta_bound(args.p_s, args.delta, args.c1, args.c0, rounded=True))
    except (scheduler.ScheduleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows = [
        ("n", rc.n),
        ("p_s", rc.p_s),
        ("delta_param", rc.delta),
        ("spacing_k", rc.spacing),
        ("theta_prime", rc.theta_prime),
        ("p1_n", rc.p1),
        ("expected_theta_n", rc.expected_theta),
        ("theta0", rc.theta0),
        ("theta0_4dp", round(rc.theta0, 4)),
        ("p2_n", rc.p2_n),
        ("p2", rc.p2),
        ("p2_4dp", round(rc.p2, 4)),
        ("t_s_slots", rc.t_s),
        ("c1_low", rc.c1_window[0]),
        ("c1_high", rc.c1_window[1]),
        ("delta_bound_low", rc.delta_bound_range[0]),
        ("delta_bound_high", rc.delta_bound_range[1]),
        ("delta_bound_low_4dp_inputs", lo_r),
        ("delta_bound_high_4dp_inputs", hi_r),
    ]
    if at_c1 is not None:
        rows += [("c1", args.c1), ("delta_bound_at_c1", at_c1[0]), ("delta_bound_at_c1_4dp_inputs", at_c1[1])]
    w = max(len(k) for k, _ in rows)
    for k, v in rows:
        print(f"{k:<{w}}  {_fmt(v)}")
    return EXIT_OK


def cmd_run(args) -> int:
    started = time.time()
    try:
        cfg, seeds = build_config(args)
        if args.event_log:
            cfg = cfg.replace(event_log=True)
        manifest = args.manifest or (args.out + ".manifest" if args.out else None)
        _check_paths([args.out, manifest, args.event_log], args.force)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfgs = [cfg.replace(seed=s) for s in seeds]
    results = run_many(cfgs, args.workers)
    rows = [r for r, _, _ in results]
    _emit(rows_to_csv(rows, RUN_COLUMNS), args.out)
    if args.event_log:
        with open(args.event_log, "w", encoding="utf-8", newline="\n") as fh:
            for (_, _, log), s in zip(results, seeds):
                fh.write(f"# seed {s}\n")
                write_event_log(log, fh)
    for (_, d, _), s in zip(results, seeds):
        if d["mismatches"]:
            print(f"warning: seed {s}: {d['mismatches']} decoded payload mismatches", file=sys.stderr)
    if manifest:
        extra = {f"censored.seed{s}": d["censored"] for (_, d, _), s in zip(results, seeds)}
        write_manifest(manifest, cfg, seeds, started, [(f"seed{r['seed']}", r["unstable_flag"]) for r in rows],
                       [p for p in (args.out, args.event_log) if p], extra)
    if all(r["unstable_flag"] for r in rows):
        return EXIT_UNSTABLE
    return EXIT_OK


def aggregate(rows: list[dict]) -> list[dict]:
    keys = []
    groups: dict[tuple, list[dict]] = {}
    for r in rows:
        k = (r["scheme"], r["n"], r["delta_param"], r["p_s"], r["delta_ratio"])
        if k not in groups:
            keys.append(k)
            groups[k] = []
        groups[k].append(r)
    out = []
    for k in keys:
        g = groups[k]
        d, dci = metrics.mean_ci([r["mean_delay_slots"] for r in g])
        th, tci = metrics.mean_ci([r["throughput_pkts_per_slot_per_pair"] for r in g])
        out.append({
            "scheme": k[0], "n": k[1], "delta_param": k[2], "p_s": k[3], "delta_ratio": k[4],
            "m": g[0]["m"], "seeds": len(g), "mean_delay_slots": d, "delay_ci95": dci,
            "throughput_pkts_per_slot_per_pair": th, "throughput_ci95": tci,
            "send_span_mean": metrics.mean_ci([r["send_span_mean"] for r in g])[0],
            "relay_wait_mean": metrics.mean_ci([r["relay_wait_mean"] for r in g])[0],
            "collect_span_mean": metrics.mean_ci([r["collect_span_mean"] for r in g])[0],
            "unstable_seeds": sum(bool(r["unstable_flag"]) for r in g),
        })
    return out


def sweep_configs(args) -> tuple[SimConfig, list[int], list[SimConfig]]:
    param, values = FIG_GRIDS.get(args.kind, (args.param, None))
    if args.kind == "generic" and not args.param:
        raise ConfigError("generic sweep needs --param")
    if args.values:
        values = args.values
    if values is None:
        raise ConfigError("sweep needs --values")
    cast = int if param == "n" else float
    values = _values(",".join(str(v) for v in values) if isinstance(values, list) else values, cast)
    field = {"n": "n", "ps": "p_s", "delta-ratio": "gen_ratio", "delta": "delta"}.get(param)
    if field is None:
        raise ConfigError(f"cannot sweep {param!r}")
    base, seeds = build_config(args)
    schemes = ("2hrrsc", "2hop") if args.kind == "fig7" else (base.scheme,)
    overrides = {}
    if args.kind == "fig7" and args.ragged is None:
        overrides["ragged"] = True
    cfgs = []
    for v in values:
        for sch in schemes:
            for s in seeds:
                d = base.as_dict()
                d.update(overrides)
                d.update({field: v, "scheme": sch, "seed": s})
                if args.horizon_per_n is not None:
                    d["horizon"] = int(round(args.horizon_per_n * d["n"]))
                if args.warmup_per_n is not None:
                    d["warmup"] = int(round(args.warmup_per_n * d["n"]))
                cfgs.append(SimConfig(**d))
    return base, seeds, cfgs


def cmd_sweep(args) -> int:
    started = time.time()
    try:
        base, seeds, cfgs = sweep_configs(args)
        summary = args.summary or (str(Path(args.out).with_suffix("")) + ".summary.csv" if args.out else None)
        manifest = args.manifest or (args.out + ".manifest" if args.out else None)
        _check_paths([args.out, summary, manifest], args.force)
    except (ConfigError, OSError, OutputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    results = run_many(cfgs, args.workers)
    rows = [r for r, _, _ in results]
    agg = aggregate(rows)
    _emit(rows_to_csv(rows, RUN_COLUMNS), args.out)
    if summary:
        _emit(rows_to_csv(agg, SUMMARY_COLUMNS), summary)
    extra = {}
    coded = [(a["n"], a["mean_delay_slots"]) for a in agg if a["scheme"] == "2hrrsc"]
    if args.kind == "fig7" or (args.param == "n" and len(coded) >= 3):
        try:
            fit = metrics.fit_scaling(coded)
            extra = {"fit.preferred": fit.preferred, "fit.a_n": fit.coef["n"], "fit.r2_n": fit.r2["n"],
                     "fit.a_nlogn": fit.coef["n_log_n"], "fit.r2_nlogn": fit.r2["n_log_n"]}
        except metrics.MetricsError as exc:
            extra = {"fit.error": str(exc)}
        for k, v in extra.items():
            print(f"{k}={_fmt(v)}", file=sys.stderr)
    if manifest:
        flags = [(f"{r['scheme']}.n{r['n']}.ps{r['p_s']}.dr{r['delta_ratio']}.seed{r['seed']}", r["unstable_flag"])
                 for r in rows]
        write_manifest(manifest, base, seeds, started, flags, [p for p in (args.out, summary) if p], extra)
    if rows and all(r["unstable_flag"] for r in rows):
        return EXIT_UNSTABLE
    return EXIT_OK


def cmd_selftest(args) -> int:
    from . import selftest

    results = selftest.run_all()
    for r in results:
        state = "PASS" if r.ok else "FAIL"
        print(f"{state} {r.name}: {r.checks} checks, {r.failures} failures ({r.note})")
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def cmd_probes(args) -> int:
    try:
        cfg, _ = build_config(args)
        if cfg.scheme != "2hrrsc":
            raise ConfigError("probes need --scheme 2hrrsc")
        if args.samples < 0:
            raise ConfigError("--samples must be >= 0")
        _check_paths([args.out], args.force)
    except (ConfigError, OSError, OutputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    rows, skipped = [], 0
    if args.samples > 0:
        res, skipped = probe_run(cfg, args.samples)
        rows = [{"pair": r.pair, "gen": r.gen, "t1": r.t1, "M": r.M, "phi": r.phi, "eta": r.eta,
                 "M_relays": r.M_relays, "holders_t2": r.holders, "eta_hold": r.eta_hold} for r in res]
    _emit(rows_to_csv(rows, PROBE_CSV_COLUMNS), args.out)
    if rows:
        phi = float(np.mean([r["phi"] for r in rows]))
        eta = float(np.nanmean([r["eta"] for r in rows]))
        print(f"samples={len(rows)} skipped={skipped} mean_phi={phi:.6f} mean_eta={eta:.6f}", file=sys.stderr)
    elif skipped:
        print(f"samples=0 skipped={skipped}", file=sys.stderr)
    return EXIT_OK


def mixing_report(sides) -> list[dict]:
    out = []
    for L in sides:
        n = L * L
        P = mobility.transition_matrix(L)
        lo, hi = mobility.claimed_mixing_interval(n)
        row = {"L": L, "n": n, "eps": 1.0 / n ** 2, "claimed_low": lo, "claimed_high": hi}
        try:
            t = mobility.mixing_time(P, 1.0 / n ** 2)
            row["t_mix"] = t
            row["agrees"] = lo <= t <= hi
        except mobility.PeriodicChainError:
            row["t_mix"] = -1
            row["agrees"] = False
        out.append(row)
    return out


def cmd_mixing(args) -> int:
    try:
        sides = _values(args.L, int)
    except (ValueError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cols = ("L", "n", "eps", "t_mix", "claimed_low", "claimed_high", "agrees")
    rows = mixing_report(sides)
    sys.stdout.write(rows_to_csv(rows, cols))
    for r in rows:
        if r["t_mix"] < 0:
            print(f"note: L={r['L']} gives a periodic chain; no mixing time", file=sys.stderr)
        elif not r["agrees"]:
            print(f"FLAG: L={r['L']} measured T_mix={r['t_mix']} outside claimed interval "
                  f"[{r['claimed_low']:.4g}, {r['claimed_high']:.4g}]", file=sys.stderr)
    return EXIT_OK


def cmd_mobility_stats(args) -> int:
    try:
        sides = _values(args.L, int)
    except (ValueError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cols = ("L", "n", "meetings", "mean_gap", "stderr", "rel_err_vs_n", "doubly_stochastic")
    rows = []
    for L in sides:
        n = L * L
        st = mobility.meeting_stats(L, args.meetings, seed=args.seed)
        ds = ""
        if L <= 16:
            P = mobility.transition_matrix(L)
            ds = bool(np.allclose(P.sum(0), 1) and np.allclose(P.sum(1), 1))
        rows.append({"L": L, "n": n, "meetings": st.samples, "mean_gap": st.mean, "stderr": st.stderr,
                     "rel_err_vs_n": st.mean / n - 1, "doubly_stochastic": ds})
    sys.stdout.write(rows_to_csv(rows, cols))
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coded-relay", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("constants", help="closed-form scheduling and coding constants")
    c.add_argument("--n", type=int, default=225)
    c.add_argument("--ps", dest="p_s", type=float, default=0.5)
    c.add_argument("--delta", type=float, default=scheduler.DEFAULT_DELTA)
    c.add_argument("--c0", type=float, default=scheduler.DEFAULT_C0)
    c.add_argument("--c1", type=float, default=None, help="evaluate the generation-ratio bound here")
    c.set_defaults(func=cmd_constants)

    r = sub.add_parser("run", help="simulate one configuration over a seed list")
    add_run_flags(r)
    add_output_flags(r)
    r.add_argument("--event-log", help="write the transmission log here")
    r.add_argument("--workers", type=int, default=default_workers())
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="parameter sweeps (fig5, fig6, fig7 or generic)")
    s.add_argument("kind", choices=("fig5", "fig6", "fig7", "generic"))
    s.add_argument("--param", choices=("n", "ps", "delta-ratio", "delta"))
    s.add_argument("--values", help="comma separated grid")
    add_run_flags(s)
    add_output_flags(s)
    s.add_argument("--horizon-per-n", type=float, default=None, help="horizon as a multiple of n per point")
    s.add_argument("--warmup-per-n", type=float, default=None, help="warmup as a multiple of n per point")
    s.add_argument("--summary", help="aggregated CSV path (default <out>.summary.csv)")
    s.add_argument("--workers", type=int, default=default_workers())
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("selftest", help="exhaustive field, code, mobility and lattice checks")
    t.set_defaults(func=cmd_selftest)

    pr = sub.add_parser("probes", help="per-generation spreading probes")
    add_run_flags(pr)
    pr.add_argument("--samples", type=int, default=100)
    pr.add_argument("--out")
    pr.add_argument("--force", action="store_true")
    pr.set_defaults(func=cmd_probes)

    mx = sub.add_parser("mixing", help="exact mixing-time audit")
    mx.add_argument("--L", default="3,5,7", help="torus sides")
    mx.set_defaults(func=cmd_mixing)

    ms = sub.add_parser("mobility-stats", help="inter-meeting time statistics")
    ms.add_argument("--L", default="3,8,15", help="torus sides")
    ms.add_argument("--meetings", type=int, default=100_000)
    ms.add_argument("--seed", type=int, default=1)
    ms.set_defaults(func=cmd_mobility_stats)
    return p


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
