"""Command line front end: ``ccnsim run | sweep | plot``.

Exit codes: 0 success, 1 usage error, 2 configuration error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from collections import defaultdict
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .config import CONFIG_ENV, ConfigError, SimConfig, load_config
from .engine import CSV_COLUMNS, MetricsReport, Simulation, aggregate, sweep

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

AXIS_NAMES = {"density": "node_density", "cache_pct": "cache_size_pct"}
SPREAD_COLUMNS = ("hit_ratio_std", "messages_total_std", "energy_total_std")

FIGURES = {
    "overhead": ("density", "Node density", "Message overhead (messages)",
                 "Message Overhead for Different Node Densities"),
    "savings": ("density", "Node density", "Power savings ratio",
                "Power Savings Ratio for Different Node Densities"),
    "hitratio": ("cache_pct", "Cache size (% of database)", "Cache hit ratio",
                 "Cache Hit Ratio for Different Cache Sizes"),
}
REQUIRED_COLUMNS = ("scheme", "seed", "density", "cache_pct", "hit_ratio", "messages_total",
                    "energy_tx", "energy_rx", "energy_idle")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config_echo(cfg: SimConfig, extra: Sequence[str] = ()) -> list[str]:
    return [f"# {line}" for line in cfg.to_lines()] + [f"# {line}" for line in extra]


def format_run(report: MetricsReport, cfg: SimConfig) -> str:
    out = io.StringIO()
    out.write("\n".join(_config_echo(cfg)) + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerow(report.csv_row())
    return out.getvalue()


def parse_values(text: str, step: Optional[float] = None) -> list[float]:
    """``"20,30,40"`` or ``"20..70"`` (with ``step``, default 10)."""
    text = text.strip()
    if not text:
        raise UsageError("empty value list")
    try:
        if ".." in text:
            lo, hi = (float(x) for x in text.split("..", 1))
            step = step or 10.0
            if step <= 0:
                raise UsageError("step must be positive")
            n = int(math.floor((hi - lo) / step + 1e-9)) + 1
            vals = [lo + i * step for i in range(max(n, 0))]
        else:
            vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"cannot parse values {text!r}") from None
    if not vals:
        raise UsageError("empty value list")
    return vals


def format_sweep(reports: Sequence[MetricsReport], cfg: SimConfig, axis: str,
                 n_seeds: int) -> str:
    key = "density" if axis == "density" else "cache_pct"
    spread = n_seeds > 1
    header = list(CSV_COLUMNS) + (list(SPREAD_COLUMNS) if spread else [])
    out = io.StringIO()
    out.write("\n".join(_config_echo(cfg, [f"axis = {axis}", f"seeds = {n_seeds}"])) + "\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    pad = [""] * len(SPREAD_COLUMNS) if spread else []
    for r in sorted(reports, key=lambda r: (getattr(r, key), r.seed, r.scheme)):
        w.writerow(r.csv_row() + pad)
    by = defaultdict(list)
    for r in reports:
        by[(getattr(r, key), r.scheme)].append(r)
    aggs = {(a.value, a.scheme): a for a in aggregate(reports, AXIS_NAMES[axis])}
    for (value, scheme), rs in sorted(by.items()):
        a = aggs[(value, scheme)]
        mean = lambda xs: repr(sum(xs) / len(xs))  # noqa: E731
        lat = [r.mean_latency for r in rs if r.mean_latency is not None]
        row = [
            scheme, "mean", str(rs[0].density), repr(float(rs[0].cache_pct)),
            repr(float(rs[0].zipf_theta)), mean([r.requests_total for r in rs]),
            repr(a.hit_ratio), repr(a.messages_total),
            mean([r.energy_tx for r in rs]), mean([r.energy_rx for r in rs]),
            mean([r.energy_idle for r in rs]),
            repr(1000 * sum(lat) / len(lat)) if lat else "",
        ]
        if spread:
            row += [repr(a.hit_ratio_std), repr(a.messages_total_std), repr(a.energy_total_std)]
        w.writerow(row)
    return out.getvalue()


def read_sweep_csv(path) -> list[dict]:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: no CSV rows")
    reader = csv.DictReader(lines)
    missing = [c for c in REQUIRED_COLUMNS if c not in (reader.fieldnames or [])]
    if missing:
        raise ValueError(f"{path}: missing required column {missing[0]!r}")
    return list(reader)


def figure_series(rows: list[dict], figure: str) -> dict[str, list[tuple[float, float]]]:
    """Curves for ``figure``: scheme name (or ``"ratio"``) -> sorted (x, y) points."""
    xkey = FIGURES[figure][0]
    runs = [r for r in rows if r["seed"] != "mean"]
    if figure == "savings":
        energy = {}
        for r in runs:
            e = float(r["energy_tx"]) + float(r["energy_rx"]) + float(r["energy_idle"])
            energy[(float(r[xkey]), r["seed"], r["scheme"])] = e
        ratios = defaultdict(list)
        for (x, seed, scheme), e in energy.items():
            if scheme == "ccn" and (x, seed, "nc") in energy:
                ratios[x].append((energy[(x, seed, "nc")] - e) / e)
        return {"ratio": sorted((x, sum(v) / len(v)) for x, v in ratios.items())}
    ykey = "messages_total" if figure == "overhead" else "hit_ratio"
    source = [r for r in rows if r["seed"] == "mean"] or runs
    acc = defaultdict(lambda: defaultdict(list))
    for r in source:
        if r[ykey] != "":
            acc[r["scheme"]][float(r[xkey])].append(float(r[ykey]))
    return {s: sorted((x, sum(v) / len(v)) for x, v in pts.items()) for s, pts in acc.items()}


def plot_figure(rows: list[dict], figure: str, out_path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    _, xlabel, ylabel, title = FIGURES[figure]
    series = figure_series(rows, figure)
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = {"ccn": "CCN", "nc": "NC", "ratio": "CCN vs NC"}
    markers = {"ccn": "o", "nc": "s", "ratio": "^"}
    for name, pts in sorted(series.items()):
        if not pts:
            continue
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker=markers.get(name, "o"), label=labels.get(name, name))
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    out = Path(out_path)
    fig.savefig(out, format=out.suffix.lstrip(".") or "svg")
    plt.close(fig)
    return out


def cmd_run(args, stdout: TextIO) -> int:
    cfg = load_config(args.config)
    changes = {}
    if args.scheme:
        changes["scheme"] = args.scheme
    if args.seed is not None:
        changes["seed"] = args.seed
    cfg = cfg.replace(**changes)
    sim = Simulation(cfg, keep_log=bool(args.transmission_log), trace=bool(args.lookup_trace))
    report = sim.run()
    if args.transmission_log:
        from .radio import write_transmission_log

        write_transmission_log(args.transmission_log, sim.radio.log)
    if args.lookup_trace and cfg.scheme == "ccn":
        from .ccn import write_traces

        write_traces(args.lookup_trace, sim.protocol.traces)
    stdout.write(format_run(report, cfg))
    return EXIT_OK


def cmd_sweep(args, stdout: TextIO) -> int:
    cfg = load_config(args.config)
    values = parse_values(args.values, args.step)
    if args.seeds < 1:
        raise UsageError("--seeds must be >= 1")
    seeds = list(range(args.first_seed, args.first_seed + args.seeds))
    reports = sweep(cfg, AXIS_NAMES[args.axis], values, seeds, workers=args.workers)
    text = format_sweep(reports, cfg, args.axis, len(seeds))
    if args.out:
        Path(args.out).write_text(text)
    else:
        stdout.write(text)
    return EXIT_OK


def cmd_plot(args, stdout: TextIO) -> int:
    rows = read_sweep_csv(args.csv)
    out = args.out or str(Path(args.csv).with_suffix("")) + f"_{args.figure}.svg"
    plot_figure(rows, args.figure, out)
    stdout.write(f"{out}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ccnsim", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    cfg_help = f"key = value config file (default: ${CONFIG_ENV}, else built-in defaults)"

    r = sub.add_parser("run", help="simulate one scheme and print a metrics CSV row")
    r.add_argument("config", nargs="?", help=cfg_help)
    r.add_argument("--scheme", choices=("ccn", "nc"))
    r.add_argument("--seed", type=int)
    r.add_argument("--transmission-log", metavar="CSV", help="write every transmission")
    r.add_argument("--lookup-trace", metavar="CSV", help="write per-lookup records (ccn)")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="paired ccn/nc runs over one parameter")
    s.add_argument("config", nargs="?", help=cfg_help)
    s.add_argument("--axis", choices=sorted(AXIS_NAMES), required=True)
    s.add_argument("--values", required=True, help="comma list, or LO..HI with --step")
    s.add_argument("--step", type=float)
    s.add_argument("--seeds", type=int, default=5, help="number of seeds (default 5)")
    s.add_argument("--first-seed", type=int, default=1)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out", help="output CSV (default stdout)")
    s.set_defaults(func=cmd_sweep)

    pl = sub.add_parser("plot", help="draw one figure from a sweep CSV")
    pl.add_argument("csv")
    pl.add_argument("--figure", choices=sorted(FIGURES), required=True)
    pl.add_argument("--out", help="output file (default <csv>_<figure>.svg)")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv: Optional[Sequence[str]] = None, stdout: TextIO = None, stderr: TextIO = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, stdout)
    except UsageError as exc:
        stderr.write(f"ccnsim: error: {exc}\n")
        return EXIT_USAGE
    except ConfigError as exc:
        stderr.write(f"ccnsim: config error: {exc}\n")
        return EXIT_CONFIG
    except ValueError as exc:
        if args.command == "plot":
            stderr.write(f"ccnsim: error: {exc}\n")
            return EXIT_USAGE
        stderr.write(f"ccnsim: runtime failure: {exc}\n")
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001
        stderr.write(f"ccnsim: runtime failure: {exc}\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
