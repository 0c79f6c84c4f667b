"""Command-line frontend: sweeps, complexity table, N* search, dumps.

Exit codes: 0 success, 2 usage or configuration error, 3 infeasible run.
Progress goes to standard error; results go to CSV (``--out``, default
stdout). Floats are printed with 9 significant digits and no locale
formatting, so reruns with the same seed are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .channel import draw_visibility, place_users, realize_channel
from .config import (ConfigError, FrameError, SystemConfig, derive_frame,
                     load_config_file, parse_overrides, serialize_config,
                     with_overrides)
from .costs import flops_total, gflops_rounded
from .engine import (SweepSpec, coarse_grid, find_optimal_n, run_sweep,
                     substream)
from .selection import SCHEMES, ZfInfeasibleError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3

RESULT_COLUMNS = (
    "sweep_variable", "value", "scheme", "as_enabled", "realizations",
    "se_ul", "se_dl", "throughput_bps", "ee_bits_per_joule", "p_total_w",
    "flops_per_s", "n_act_mean", "s_ul_dbm", "i_ul_dbm", "n_ul_dbm",
    "s_dl_dbm", "i_dl_dbm", "n_dl_dbm", "skipped")

TABLE3_SCENARIOS = ((32, 4, 2), (128, 16, 8), (512, 64, 32), (2048, 256, 128))


def _fmt(x) -> str:
    return f"{x:.9g}"


def _result_row(res) -> list:
    return [res.variable, res.value, res.scheme,
            "true" if res.as_enabled else "false", res.realizations,
            _fmt(res.se_ul), _fmt(res.se_dl), _fmt(res.throughput_bps),
            _fmt(res.ee), _fmt(res.p_total), _fmt(res.flops_per_second),
            _fmt(res.n_act_mean)] + [_fmt(v) for v in res.stats_dbm] + \
        [res.skipped]


def _write_csv(out: str, header, rows) -> None:
    if out == "-":
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="configuration file path")
    parser.add_argument("--set", action="append", default=[],
                        metavar="KEY=VALUE", dest="overrides",
                        help="override one configuration key")
    parser.add_argument("--workers", type=int, default=None,
                        help="parallel workers (capped by XLMIMO_THREADS)")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--realizations", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default="-", help="output CSV path")


def _load(args) -> SystemConfig:
    overrides = parse_overrides(args.overrides)
    if args.config:
        cfg = load_config_file(args.config, overrides)
    else:
        cfg = SystemConfig(**overrides).validate()
    if getattr(args, "realizations", None):
        cfg = with_overrides(cfg, realizations=args.realizations)
    if getattr(args, "seed", None) is not None:
        cfg = with_overrides(cfg, seed=args.seed)
    return cfg


def _parse_k_list(raw: str) -> tuple:
    values = tuple(int(v) for v in raw.split(",") if v.strip())
    if not values:
        raise ConfigError("--k-list must contain at least one value")
    return values


def cmd_sweep_n(args) -> int:
    cfg = _load(args)
    if args.k is not None:
        cfg = with_overrides(cfg, K=args.k)
    values = tuple(range(args.n_min, args.n_max + 1))
    spec = SweepSpec(variable="N", values=values, scheme=args.scheme,
                     as_enabled=not args.no_as)
    results = run_sweep(cfg, spec, workers=args.workers)
    _write_csv(args.out, RESULT_COLUMNS, [_result_row(r) for r in results])
    return EXIT_OK


def cmd_sweep_k(args) -> int:
    cfg = _load(args)
    spec = SweepSpec(variable="K", values=_parse_k_list(args.k_list),
                     scheme=args.scheme, as_enabled=not args.no_as,
                     n_fixed=args.n)
    results = run_sweep(cfg, spec, workers=args.workers)
    _write_csv(args.out, RESULT_COLUMNS, [_result_row(r) for r in results])
    return EXIT_OK


def cmd_table3(args) -> int:
    cfg = _load(args)
    header = f"{'M':>5} {'N':>4} {'K':>4} | {'no-AS MR':>9} {'AS MR':>7} " \
             f"{'no-AS ZF':>9} {'AS ZF':>8}"
    print(header)
    print("-" * len(header))
    for m, n, k in TABLE3_SCENARIOS:
        scen = with_overrides(cfg, M=m, K=k)
        frame = derive_frame(scen)
        cells = []
        for scheme in ("mr", "zf"):
            for as_enabled in (False, True):
                rep = flops_total(m, n, k, frame, scheme, as_enabled, scen.B)
                cells.append(gflops_rounded(rep))
        print(f"{m:>5} {n:>4} {k:>4} | {cells[0]:>9,} {cells[1]:>7,} "
              f"{cells[2]:>9,} {cells[3]:>8,}")
    return EXIT_OK


def cmd_optimal_n(args) -> int:
    cfg = _load(args)
    schemes = SCHEMES if args.scheme == "both" else (args.scheme,)
    rows = []
    for k in _parse_k_list(args.k_list):
        for scheme in schemes:
            candidates = coarse_grid(cfg.M) if args.coarse else None
            n_star, results = find_optimal_n(cfg, scheme, k=k,
                                             candidates=candidates,
                                             workers=args.workers)
            best = next(r for r in results if r.value == n_star)
            rows.append([k, scheme, n_star, _fmt(best.ee)])
            logging.getLogger("xlmimo").info(
                "K=%d %s: N*=%d (EE %.6g)", k, scheme, n_star, best.ee)
    _write_csv(args.out, ("k", "scheme", "n_star", "ee_bits_per_joule"), rows)
    return EXIT_OK


def cmd_validate_config(args) -> int:
    cfg = _load(args)
    derive_frame(cfg)
    sys.stdout.write(serialize_config(cfg))
    return EXIT_OK


def cmd_dump_realization(args) -> int:
    cfg = _load(args)
    rng = substream(cfg.seed, args.index)
    layout = place_users(cfg, rng)
    mask = draw_visibility(cfg, rng)
    chan = realize_channel(cfg, layout, mask, rng)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    _write_csv(str(outdir / "users.csv"), ("user", "x_m", "y_m"),
               [[k + 1, _fmt(x), _fmt(y)]
                for k, (x, y) in enumerate(layout.positions)])
    _write_csv(str(outdir / "antennas.csv"), ("antenna", "x_m"),
               [[m + 1, _fmt(x)] for m, x in enumerate(layout.antenna_x)])
    _write_csv(str(outdir / "mask.csv"),
               ("antenna",) + tuple(f"user{k+1}" for k in range(cfg.K)),
               [[m + 1] + [int(v) for v in mask.mask[m]]
                for m in range(cfg.M)])
    _write_csv(str(outdir / "channel.csv"),
               ("antenna", "user", "h_re", "h_im"),
               [[m + 1, k + 1, _fmt(chan.H[m, k].real), _fmt(chan.H[m, k].imag)]
                for m in range(cfg.M) for k in range(cfg.K)])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="xlmimo",
        description="Link-level Monte Carlo simulator for antenna selection "
                    "in extra-large MIMO arrays")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-n", help="sweep the per-user antenna count")
    _add_common(p)
    _add_run_flags(p)
    p.add_argument("--k", type=int, default=None, help="override user count")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=None, required=True)
    p.add_argument("--scheme", choices=("mr", "zf", "both"), default="both")
    p.add_argument("--no-as", action="store_true",
                   help="full-array processing (no antenna selection)")
    p.set_defaults(func=cmd_sweep_n)

    p = sub.add_parser("sweep-k", help="sweep the user count at fixed N")
    _add_common(p)
    _add_run_flags(p)
    p.add_argument("--k-list", required=True,
                   help="comma-separated user counts")
    p.add_argument("--n", type=int, default=None,
                   help="antennas per user (default M)")
    p.add_argument("--scheme", choices=("mr", "zf", "both"), default="both")
    p.add_argument("--no-as", action="store_true")
    p.set_defaults(func=cmd_sweep_k)

    p = sub.add_parser("table3",
                       help="print the complexity table of the four "
                            "reference scenarios [Gflop/s]")
    _add_common(p)
    p.set_defaults(func=cmd_table3)

    p = sub.add_parser("optimal-n", help="search the EE-maximizing N per K")
    _add_common(p)
    _add_run_flags(p)
    p.add_argument("--k-list", required=True)
    p.add_argument("--scheme", choices=("mr", "zf", "both"), default="both")
    p.add_argument("--coarse", action="store_true",
                   help="use the coarse candidate grid instead of 1..M")
    p.set_defaults(func=cmd_optimal_n)

    p = sub.add_parser("validate-config",
                       help="load, validate and echo the configuration")
    _add_common(p)
    p.set_defaults(func=cmd_validate_config)

    p = sub.add_parser("dump-realization",
                       help="dump one seeded realization to a CSV bundle")
    _add_common(p)
    p.add_argument("--index", type=int, default=0,
                   help="realization index within the seeded run")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_dump_realization)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FrameError, ZfInfeasibleError) as exc:
        print(f"infeasible run: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"infeasible run: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
