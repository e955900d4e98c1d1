"""Numerical studies: convergence to the Vasicek price and a low-rate case study.

Two canned experiments with machine-readable CSV output:

* `run_convergence`: for a fixed Vasicek parameter set, map each N onto the
  symmetric chain model, price the bond both ways, and report the relative
  gap.  Two scenarios are built in, a benign one (low volatility, short
  maturity) and a stressed one (20% volatility, 10 years).
* `run_lowrate_study`: a near-zero-rate regime where the Gaussian model
  misbehaves (bond prices above par, non-monotone in maturity) while the
  bounded-rate chain model stays monotone inside (0, 1]; emits both price
  curves plus sample short-rate paths.

CSV artifacts use LF newlines, UTF-8, and shortest round-trip float
formatting, so identical inputs reproduce identical bytes.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .chain import EhrenfestParams, PathSample, simulate_path
from .pricing import (
    Truncation,
    VasicekParams,
    price_general,
    price_symmetric,
    price_vasicek,
    vasicek_to_ehrenfest,
)
from .shortrate import ShortRateModel, rate_to_state, snap_rate

__all__ = [
    "ConvergenceRow",
    "ScenarioCurve",
    "LowRateStudy",
    "SCENARIOS",
    "DEFAULT_NS",
    "LOWRATE_VASICEK",
    "LOWRATE_MODEL",
    "LOWRATE_R0",
    "LOWRATE_TRUNCATION",
    "run_convergence",
    "run_lowrate_study",
    "simulate_vasicek_paths",
    "write_convergence_csv",
    "write_curve_csv",
    "write_path_csv",
    "atomic_write_text",
]

# Convergence scenarios: (Vasicek parameters, maturity in years).
SCENARIOS: dict[str, tuple[VasicekParams, float]] = {
    "favourable": (VasicekParams(k=0.2, theta=0.08, sigma=0.05, r0=0.05), 1.0),
    "unfavourable": (VasicekParams(k=0.2, theta=0.08, sigma=0.2, r0=0.05), 10.0),
}

DEFAULT_NS: tuple[int, ...] = (4, 8, 16, 32, 64, 128, 200)

# Low-rate case study: Gaussian benchmark and the bounded-rate chain model
# with matching 4% mean-reversion level, started at 1%.
LOWRATE_VASICEK = VasicekParams(k=0.1, theta=0.04, sigma=0.05, r0=0.01)
LOWRATE_MODEL = ShortRateModel(
    EhrenfestParams(N=160, lam=1.0, alpha=0.1, beta=0.3), 0.0, 0.16
)
LOWRATE_R0 = 0.01
LOWRATE_MATURITIES = tuple(range(1, 31))
# Maturities up to 30 years push speed*(T-t) to 12; the hypergeometric
# truncation must comfortably exceed that, hence the deeper default here.
LOWRATE_TRUNCATION = Truncation(M=12, H=64)
LOWRATE_SEED = 20160
_VASICEK_PATH_STEPS = 3000


@dataclass(frozen=True)
class ConvergenceRow:
    """One sweep entry; `r0_snapped` is the grid rate both models were priced at."""

    N: int
    price_ehrenfest: float
    price_vasicek: float
    rel_error: float
    wall_time_s: float
    r0_snapped: float


@dataclass(frozen=True)
class ScenarioCurve:
    """Bond prices over a maturity grid for one model."""

    maturities: np.ndarray
    prices: np.ndarray
    model: str  # "vasicek" | "ehrenfest"


@dataclass(frozen=True)
class LowRateStudy:
    vasicek_curve: ScenarioCurve
    ehrenfest_curve: ScenarioCurve
    vasicek_paths: list[tuple[np.ndarray, np.ndarray]]
    ehrenfest_path: PathSample
    ehrenfest_rates: np.ndarray  # ehrenfest_path.states mapped onto the rate grid


def run_convergence(
    scenario: str,
    Ns: tuple[int, ...] | list[int] = DEFAULT_NS,
    trunc: Truncation = Truncation(),
) -> list[ConvergenceRow]:
    """Price the scenario bond on the mapped chain model for each N and compare
    with the Vasicek closed form.

    The initial rate is snapped to the nearest grid state of each mapped model
    and *both* prices are evaluated at that snapped rate, so the reported gap
    measures model convergence rather than grid placement of r0.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}; expected one of {sorted(SCENARIOS)}")
    if not Ns:
        raise ValueError("Ns must be a non-empty list of chain sizes")
    vp, T = SCENARIOS[scenario]
    rows = []
    for N in sorted(int(n) for n in Ns):
        model = vasicek_to_ehrenfest(vp, N)
        _, r_snap = snap_rate(vp.r0, model)
        t0 = time.perf_counter()
        pe = price_symmetric(model, 0.0, T, r_snap, trunc).price
        wall = time.perf_counter() - t0
        pv = price_vasicek(vp, 0.0, T, r_snap)
        rows.append(
            ConvergenceRow(
                N=N,
                price_ehrenfest=pe,
                price_vasicek=pv,
                rel_error=abs(pe - pv) / pv,
                wall_time_s=wall,
                r0_snapped=r_snap,
            )
        )
    return rows


def simulate_vasicek_paths(
    params: VasicekParams,
    horizon: float,
    n_paths: int,
    seed: int,
    steps: int = _VASICEK_PATH_STEPS,
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Euler paths of the Vasicek rate on a fine uniform grid."""
    rng = np.random.default_rng(seed)
    dt = horizon / steps
    times = np.linspace(0.0, horizon, steps + 1)
    out = []
    for _ in range(n_paths):
        r = np.empty(steps + 1)
        r[0] = params.r0
        shocks = rng.standard_normal(steps)
        for j in range(steps):
            r[j + 1] = r[j] + params.k * (params.theta - r[j]) * dt + params.sigma * np.sqrt(dt) * shocks[j]
        out.append((times.copy(), r))
    return out


def run_lowrate_study(seed: int = LOWRATE_SEED) -> LowRateStudy:
    """Thirty-year price curves for both models plus sample rate paths
    (three Euler paths for the Gaussian model, one exact path for the chain)."""
    maturities = np.asarray(LOWRATE_MATURITIES, dtype=float)
    pv = np.array([price_vasicek(LOWRATE_VASICEK, 0.0, T, LOWRATE_VASICEK.r0) for T in maturities])
    pe = np.array(
        [
            price_general(LOWRATE_MODEL, 0.0, float(T), LOWRATE_R0, LOWRATE_TRUNCATION).price
            for T in maturities
        ]
    )
    vas_paths = simulate_vasicek_paths(LOWRATE_VASICEK, 30.0, 3, seed)
    k0 = rate_to_state(LOWRATE_R0, LOWRATE_MODEL)
    path = simulate_path(k0, 30.0, LOWRATE_MODEL.chain, seed)
    rates = LOWRATE_MODEL.r_min + LOWRATE_MODEL.h * path.states
    return LowRateStudy(
        vasicek_curve=ScenarioCurve(maturities, pv, "vasicek"),
        ehrenfest_curve=ScenarioCurve(maturities, pe, "ehrenfest"),
        vasicek_paths=vas_paths,
        ehrenfest_path=path,
        ehrenfest_rates=rates,
    )


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see partials."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


def _write_rows(path: str | Path, header: tuple[str, ...], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_convergence_csv(rows: list[ConvergenceRow], path: str | Path) -> None:
    _write_rows(
        path,
        ("N", "price_ehrenfest", "price_vasicek", "rel_error", "wall_time_s"),
        ((r.N, r.price_ehrenfest, r.price_vasicek, r.rel_error, r.wall_time_s) for r in rows),
    )


def write_curve_csv(curve: ScenarioCurve, path: str | Path) -> None:
    _write_rows(path, ("T_years", "price"), zip(curve.maturities, curve.prices))


def write_path_csv(
    times: np.ndarray, values: np.ndarray, path: str | Path, header: tuple[str, str] = ("time", "rate")
) -> None:
    _write_rows(path, header, zip(times, values))
