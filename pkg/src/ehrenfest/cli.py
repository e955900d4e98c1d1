"""Command-line interface.

Subcommands:

* ``price``     price a zero-coupon bond for the configured model (JSON to stdout)
* ``simulate``  write simulated short-rate paths as CSV
* ``converge``  run a convergence sweep against the Vasicek closed form
* ``lowrate``   run the 30-year low-rate case study

Model and run parameters come from a JSON config file (``--config``); the
flags ``--seed``, ``--out``, ``--format``, ``--M`` and ``--H`` override the
matching config entries.  All rates are decimals (0.05, never "5%").

Exit codes: 0 success, 2 usage or config error, 3 initial rate off the model
grid (pass ``--snap`` to round to the nearest grid point), 4 output I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import report
from .chain import EhrenfestParams, simulate_path
from .experiments import (
    DEFAULT_NS,
    atomic_write_text,
    run_convergence,
    run_lowrate_study,
    simulate_vasicek_paths,
    write_convergence_csv,
    write_curve_csv,
    write_path_csv,
)
from .pricing import (
    Truncation,
    VasicekParams,
    price_fk_oracle,
    price_general,
    price_mc_oracle,
    price_symmetric,
    price_vasicek,
)
from .shortrate import (
    OffGridRateError,
    ShortRateModel,
    mean_reversion_level,
    rate_to_state,
    snap_rate,
)

__all__ = ["main", "console_main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_OFF_GRID = 3
EXIT_IO = 4

_MC_ORACLE_PATHS = 50_000


class ConfigError(ValueError):
    """Config file violation; the message names the offending field."""


@dataclass
class RunConfig:
    model: ShortRateModel | VasicekParams
    t: float = 0.0
    T: float | None = None
    r: float | None = None
    trunc: Truncation = Truncation()
    horizon: float | None = None
    paths: int = 1
    seed: int | None = None
    out: Path = Path(".")
    out_given: bool = False
    format: str = "csv"


def _section(data: dict, name: str) -> dict:
    sec = data.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: must be an object, got {type(sec).__name__}")
    return sec


def _number(sec: dict, section: str, key: str, *, required: bool = False, default=None):
    if key not in sec:
        if required:
            raise ConfigError(f"{section}.{key}: required field is missing")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{section}.{key}: must be a number, got {v!r}")
    return float(v)


def _integer(sec: dict, section: str, key: str, *, required: bool = False, default=None):
    if key not in sec:
        if required:
            raise ConfigError(f"{section}.{key}: required field is missing")
        return default
    v = sec[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{section}.{key}: must be an integer, got {v!r}")
    return int(v)


def _parse_model(data: dict) -> ShortRateModel | VasicekParams:
    model_sec = _section(data, "model")
    kinds = [k for k in ("ehrenfest", "vasicek") if k in model_sec]
    if len(kinds) != 1:
        raise ConfigError(
            "model: exactly one of 'ehrenfest' or 'vasicek' must be present, "
            f"found {kinds or 'neither'}"
        )
    kind = kinds[0]
    sec = model_sec[kind]
    if not isinstance(sec, dict):
        raise ConfigError(f"model.{kind}: must be an object")
    where = f"model.{kind}"
    if kind == "vasicek":
        k = _number(sec, where, "k", required=True)
        theta = _number(sec, where, "theta", required=True)
        sigma = _number(sec, where, "sigma", required=True)
        r0 = _number(sec, where, "r0", required=True)
        try:
            return VasicekParams(k=k, theta=theta, sigma=sigma, r0=r0)
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    N = _integer(sec, where, "N", required=True)
    lam = _number(sec, where, "lambda", required=True)
    alpha = _number(sec, where, "alpha", required=True)
    beta = _number(sec, where, "beta", required=True)
    r_m = _number(sec, where, "r_m", required=True)
    r_M = _number(sec, where, "r_M", required=True)
    try:
        chain = EhrenfestParams(N=N, lam=lam, alpha=alpha, beta=beta)
        return ShortRateModel(chain, r_m, r_M)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_config(path: str | Path) -> RunConfig:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    model = _parse_model(data)
    pricing = _section(data, "pricing")
    sim = _section(data, "simulation")
    output = _section(data, "output")
    M = _integer(pricing, "pricing", "M", default=Truncation().M)
    H = _integer(pricing, "pricing", "H", default=Truncation().H)
    try:
        trunc = Truncation(M=M, H=H)
    except ValueError as exc:
        raise ConfigError(f"pricing: {exc}") from exc
    paths = _integer(sim, "simulation", "paths", default=1)
    if paths < 1:
        raise ConfigError(f"simulation.paths: must be >= 1, got {paths}")
    fmt = output.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"output.format: must be 'csv' or 'json', got {fmt!r}")
    return RunConfig(
        model=model,
        t=_number(pricing, "pricing", "t", default=0.0),
        T=_number(pricing, "pricing", "T"),
        r=_number(pricing, "pricing", "r"),
        trunc=trunc,
        horizon=_number(sim, "simulation", "horizon"),
        paths=paths,
        seed=_integer(sim, "simulation", "seed"),
        out=Path(output.get("path", ".")),
        out_given="path" in output,
        format=fmt,
    )


def _apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.M is not None or args.H is not None:
        cfg.trunc = Truncation(
            M=args.M if args.M is not None else cfg.trunc.M,
            H=args.H if args.H is not None else cfg.trunc.H,
        )
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = Path(args.out)
        cfg.out_given = True
    if args.format is not None:
        cfg.format = args.format
    return cfg


def _resolve_rate(cfg: RunConfig, args: argparse.Namespace) -> float:
    """Initial rate for a chain model, honouring --snap."""
    assert isinstance(cfg.model, ShortRateModel)
    r = cfg.r
    if r is None:
        raise ConfigError("pricing.r: required field is missing")
    if args.snap:
        _, r = snap_rate(r, cfg.model)
    return r


def _write_artifact(path: Path, text: str) -> None:
    atomic_write_text(path, text)


def _rows_to_json(header: tuple[str, ...], rows) -> str:
    return json.dumps([dict(zip(header, row)) for row in rows], indent=2) + "\n"


def cmd_price(cfg: RunConfig, args: argparse.Namespace) -> int:
    if cfg.T is None:
        raise ConfigError("pricing.T: required field is missing")
    if isinstance(cfg.model, VasicekParams):
        if args.oracle != "none":
            raise ConfigError("oracle: cross-checks apply to ehrenfest models only")
        t0 = time.perf_counter()
        price = price_vasicek(cfg.model, cfg.t, cfg.T, cfg.r if cfg.r is not None else cfg.model.r0)
        payload = {
            "price": price,
            "error_estimate": 0.0,
            "M": None,
            "H": None,
            "wall_time_s": time.perf_counter() - t0,
        }
    else:
        r = _resolve_rate(cfg, args)
        chain = cfg.model.chain
        pricer = price_symmetric if chain.alpha == 1.0 and chain.beta == 1.0 else price_general
        result = pricer(cfg.model, cfg.t, cfg.T, r, cfg.trunc)
        payload = {
            "price": result.price,
            "error_estimate": result.error_estimate,
            "M": result.trunc.M,
            "H": result.trunc.H,
            "wall_time_s": result.wall_time_s,
        }
        if args.oracle == "fk":
            ref = price_fk_oracle(cfg.model, cfg.t, cfg.T, r)
            payload["oracle_method"] = "fk"
            payload["oracle_price"] = ref
            payload["oracle_rel_gap"] = abs(result.price - ref) / ref
        elif args.oracle == "mc":
            seed = cfg.seed if cfg.seed is not None else 0
            est, se = price_mc_oracle(cfg.model, cfg.t, cfg.T, r, _MC_ORACLE_PATHS, seed)
            payload["oracle_method"] = "mc"
            payload["oracle_price"] = est
            payload["oracle_std_error"] = se
            payload["oracle_rel_gap"] = abs(result.price - est) / est
    text = json.dumps(payload) + "\n"
    sys.stdout.write(text)
    if cfg.out_given:
        cfg.out.mkdir(parents=True, exist_ok=True)
        if cfg.format == "json":
            _write_artifact(cfg.out / "price.json", text)
        else:
            keys = list(payload)
            row = ",".join("" if payload[k] is None else repr(payload[k]) for k in keys)
            _write_artifact(cfg.out / "price.csv", ",".join(keys) + "\n" + row + "\n")
    return EXIT_OK


def _simulate_chain_rows(cfg: RunConfig, args: argparse.Namespace):
    assert isinstance(cfg.model, ShortRateModel)
    if cfg.horizon is None:
        raise ConfigError("simulation.horizon: required field is missing")
    if cfg.r is not None:
        k0 = rate_to_state(_resolve_rate(cfg, args), cfg.model)
    else:
        k0, _ = snap_rate(mean_reversion_level(cfg.model), cfg.model)
    seed = cfg.seed if cfg.seed is not None else 0
    seeds = np.random.SeedSequence(seed).spawn(cfg.paths)
    for idx, child in enumerate(seeds):
        sample = simulate_path(k0, cfg.horizon, cfg.model.chain, child)
        for t, s in zip(sample.times, sample.states):
            yield idx, float(t), int(s)


def _simulate_vasicek_rows(cfg: RunConfig):
    assert isinstance(cfg.model, VasicekParams)
    if cfg.horizon is None:
        raise ConfigError("simulation.horizon: required field is missing")
    seed = cfg.seed if cfg.seed is not None else 0
    paths = simulate_vasicek_paths(cfg.model, cfg.horizon, cfg.paths, seed)
    for idx, (times, rates) in enumerate(paths):
        for t, r in zip(times, rates):
            yield idx, float(t), float(r)


def cmd_simulate(cfg: RunConfig, args: argparse.Namespace) -> int:
    if isinstance(cfg.model, ShortRateModel):
        rows = list(_simulate_chain_rows(cfg, args))
        value_col = "state"

        def fmt_value(v):
            return str(v)

    else:
        rows = list(_simulate_vasicek_rows(cfg))
        value_col = "rate"

        def fmt_value(v):
            return repr(float(v))

    cfg.out.mkdir(parents=True, exist_ok=True)
    multi = cfg.paths > 1
    header = (("path",) if multi else ()) + ("time", value_col)
    if cfg.format == "json":
        payload = [
            dict(zip(header, ((idx,) if multi else ()) + (t, v))) for idx, t, v in rows
        ]
        _write_artifact(cfg.out / "paths.json", json.dumps(payload, indent=2) + "\n")
    else:
        lines = [",".join(header)]
        for idx, t, v in rows:
            cells = ([str(idx)] if multi else []) + [repr(t), fmt_value(v)]
            lines.append(",".join(cells))
        _write_artifact(cfg.out / "paths.csv", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_converge(cfg: RunConfig | None, args: argparse.Namespace) -> int:
    if cfg is not None:
        trunc = cfg.trunc  # flag overrides already folded in
    else:
        trunc = Truncation(
            M=args.M if args.M is not None else Truncation().M,
            H=args.H if args.H is not None else Truncation().H,
        )
    out = Path(args.out) if args.out is not None else (cfg.out if cfg else Path("."))
    rows = run_convergence(args.scenario, tuple(args.Ns), trunc)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"convergence_{args.scenario}.csv"
    fmt = args.format if args.format is not None else (cfg.format if cfg else "csv")
    if fmt == "json":
        header = ("N", "price_ehrenfest", "price_vasicek", "rel_error", "wall_time_s")
        data = [(r.N, r.price_ehrenfest, r.price_vasicek, r.rel_error, r.wall_time_s) for r in rows]
        _write_artifact(out / f"convergence_{args.scenario}.json", _rows_to_json(header, data))
    else:
        write_convergence_csv(rows, csv_path)
    if not args.no_plot:
        report.plot_convergence(rows, args.scenario, out / f"convergence_{args.scenario}.png")
    return EXIT_OK


def cmd_lowrate(cfg: RunConfig | None, args: argparse.Namespace) -> int:
    out = Path(args.out) if args.out is not None else (cfg.out if cfg else Path("."))
    seed = args.seed if args.seed is not None else (cfg.seed if cfg is not None else None)
    study = run_lowrate_study(seed) if seed is not None else run_lowrate_study()
    out.mkdir(parents=True, exist_ok=True)
    write_curve_csv(study.vasicek_curve, out / "lowrate_vasicek.csv")
    write_curve_csv(study.ehrenfest_curve, out / "lowrate_ehrenfest.csv")
    for i, (times, rates) in enumerate(study.vasicek_paths):
        write_path_csv(times, rates, out / f"paths_vasicek_{i}.csv")
    write_path_csv(study.ehrenfest_path.times, study.ehrenfest_rates, out / "paths_ehrenfest.csv")
    if not args.no_plot:
        report.plot_curve(study.vasicek_curve, out / "lowrate_vasicek.png", "ZCB prices, Gaussian model")
        report.plot_curve(study.ehrenfest_curve, out / "lowrate_ehrenfest.png", "ZCB prices, bounded-rate model")
        report.plot_rate_paths(study.vasicek_paths, out / "paths_vasicek.png", "Gaussian short-rate paths")
        report.plot_rate_paths(
            [(study.ehrenfest_path.times, study.ehrenfest_rates)],
            out / "paths_ehrenfest.png",
            "Bounded short-rate path",
        )
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--seed", type=int, metavar="INT", help="override simulation.seed")
    common.add_argument("--out", metavar="PATH", help="output directory (default '.')")
    common.add_argument("--format", choices=("csv", "json"), help="artifact format")
    common.add_argument("--snap", action="store_true", help="round off-grid rates to the nearest grid point")
    common.add_argument("--oracle", choices=("none", "fk", "mc"), default="none",
                        help="cross-check the price against an independent oracle")
    common.add_argument("--M", type=int, metavar="INT", help="override outer series order")
    common.add_argument("--H", type=int, metavar="INT", help="override hypergeometric truncation order")
    common.add_argument("--no-plot", action="store_true", help="skip PNG figure rendering")

    parser = argparse.ArgumentParser(
        prog="ehrenfest",
        description="Bounded mean-reverting short-rate model: pricing, simulation, experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("price", parents=[common], help="price a zero-coupon bond")
    sub.add_parser("simulate", parents=[common], help="simulate short-rate paths to CSV")
    conv = sub.add_parser("converge", parents=[common], help="convergence sweep against Vasicek")
    conv.add_argument("scenario", choices=("favourable", "unfavourable"))
    conv.add_argument("--Ns", type=int, nargs="+", default=list(DEFAULT_NS),
                      help=f"chain sizes to sweep (default {list(DEFAULT_NS)})")
    sub.add_parser("lowrate", parents=[common], help="30-year low-rate case study")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = None
        if args.config is not None:
            cfg = _apply_overrides(load_config(args.config), args)
        if args.command in ("price", "simulate"):
            if cfg is None:
                raise ConfigError("config: --config is required for this command")
            return cmd_price(cfg, args) if args.command == "price" else cmd_simulate(cfg, args)
        if args.command == "converge":
            return cmd_converge(cfg, args)
        return cmd_lowrate(cfg, args)
    except OffGridRateError as exc:
        print(f"error: {exc} (use --snap to round)", file=sys.stderr)
        return EXIT_OFF_GRID
    except ValueError as exc:
        # ConfigError and any domain violation surfaced by the library
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
