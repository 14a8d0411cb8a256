"""Command-line front end: decompose, validate, sweep, export, bench.

Every flag mirrors a config key (section.key) with config-file values as
defaults; unknown keys in the file are hard errors.  Artifact files are
reproducible: identical configs yield bit-identical bytes, and each file
carries the sha256 hash of the canonical config.

Exit codes: 0 success, 2 config error, 3 domain error, 4 numerical
error, 5 invariant failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .biphoton import WINDOW_WARN_RATIO, boundary_ratio, build_wavefunction, marginal_intensity
from .config import RunConfig
from .container import load_arrays, save_arrays
from .errors import ConfigError, InvariantError, StsmError
from .schmidt import (
    SchmidtResult,
    decompose,
    g1_from_psi,
    parseval_residual,
    schmidt_number_g1,
)

#: invariant tolerances enforced on every decompose run
TOL_SUM = 1e-10
TOL_GRAM = 1e-8
TOL_ALIGN = 1e-8
TOL_PARSEVAL = 1e-10


def _fmt(x: float) -> str:
    """17 significant digits, '.' decimal, no locale: round-trips binary64."""
    return format(float(x), ".17g")


def _add_config_flags(parser: argparse.ArgumentParser):
    parser.add_argument("-c", "--config", metavar="FILE", help="run configuration file")
    for section, keys in RunConfig._SECTIONS.items():
        for key in keys:
            parser.add_argument(
                f"--{section}.{key}", dest=f"__cfg__{key}", metavar="V",
                help=f"override [{section}] {key}",
            )


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {}
    for section, keys in RunConfig._SECTIONS.items():
        for key, conv in keys.items():
            raw = getattr(args, f"__cfg__{key}", None)
            if raw is None:
                continue
            try:
                val = conv(raw)
            except ConfigError:
                raise
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc
            overrides[key] = tuple(val) if isinstance(val, list) else val
    return cfg.with_overrides(overrides)


# ---------------------------------------------------------------------------
# decompose

def _invariant_report(result: SchmidtResult, psi) -> dict:
    g = result.grid
    w_pair = g.pair_weights().reshape(g.n_q, g.n_omega)
    sum_residual = abs(float(np.sum(result.degeneracy * result.lambdas)) - 1.0)

    gram_dev = 0.0
    for l in np.unique(result.ls):
        idx = np.flatnonzero(result.ls == l)
        flat = np.stack([(result.modes[k] * np.sqrt(w_pair)).ravel() for k in idx])
        gram = flat @ flat.conj().T
        gram_dev = max(gram_dev, float(np.abs(gram - np.eye(len(idx))).max()))
    align_dev = result.alignment_residual
    even_exact = bool(np.array_equal(psi.values, psi.phi_reflected())) if psi else None
    exch_exact = bool(np.array_equal(psi.values, psi.exchange_transposed())) if psi else None
    report = {
        "sum_residual": sum_residual,
        "gram_deviation": gram_dev,
        "alignment_residual": align_dev,
        "parseval_residual": parseval_residual(psi) if psi is not None else None,
        "psi_even_exact": even_exact,
        "psi_exchange_exact": exch_exact,
    }
    report["pass"] = bool(
        sum_residual < TOL_SUM
        and gram_dev < TOL_GRAM
        and align_dev < TOL_ALIGN
        and (report["parseval_residual"] is None or report["parseval_residual"] < TOL_PARSEVAL)
        and even_exact in (None, True)
        and exch_exact in (None, True)
    )
    return report


def _result_arrays(result: SchmidtResult, extra: dict | None = None) -> dict:
    g = result.grid
    arrays = {
        "ls": result.ls.astype(float),
        "ms": result.ms.astype(float),
        "degeneracy": result.degeneracy.astype(float),
        "lambdas": result.lambdas,
        "betas": result.betas,
        "modes": result.modes,
        "K": np.array([result.K]),
        "total_weight": np.array([result.total_weight]),
        "grid_q": g.q,
        "grid_omega": g.omega,
        "grid_q_weights": g.q_weights,
        "grid_omega_weights": g.omega_weights,
        "grid_n_phi": np.array([float(g.n_phi)]),
    }
    if extra:
        arrays.update(extra)
    return arrays


def _hash_bytes(hexdigest: str) -> np.ndarray:
    return np.frombuffer(bytes.fromhex(hexdigest), dtype=np.uint8).astype(float)


def cmd_decompose(args) -> int:
    cfg = _load_config(args)
    out = cfg.output if args.output is None else args.output
    os.makedirs(out, exist_ok=True)
    chash = cfg.config_hash()

    if cfg.regime == "low-gain":
        psi = build_wavefunction(cfg.make_grid(), cfg.make_pump(), cfg.make_crystal())
        ratio = boundary_ratio(psi)
        if ratio > WINDOW_WARN_RATIO:
            print(
                f"warning: |Psi|^2 at the window boundary is {ratio:.2e} of the peak "
                "(> 1e-4); the grid window truncates the state and K is window-limited",
                file=sys.stderr,
            )
        result = decompose(psi, cfg.l_max, cfg.m_max, cfg.tol, workers=cfg.workers)
        report = _invariant_report(result, psi)
        report["boundary_ratio"] = ratio
        g1 = g1_from_psi(psi)
        report["K_correlation_route"] = schmidt_number_g1(g1)
        report["K_route_agreement"] = abs(result.K - report["K_correlation_route"]) / result.K
        intensity = marginal_intensity(psi)
    else:
        from .highgain import build_g1, coherent_modes

        g1 = build_g1(cfg.make_grid(), cfg.make_highgain_pump(), cfg.make_crystal(),
                      cfg.make_calibration(), n_rho=cfg.n_rho, n_t=cfg.n_t,
                      normalize=True)
        result = coherent_modes(g1, cfg.l_max, cfg.m_max, cfg.tol)
        report = _invariant_report(result, None)
        report["K_correlation_route"] = schmidt_number_g1(g1)
        report["K_route_agreement"] = abs(result.K - report["K_correlation_route"]) / result.K
        report["total_intensity"] = g1.total_intensity
        p = result.grid.n_q * result.grid.n_omega
        intensity = np.einsum(
            "aam->am", g1.values.reshape(p, p, result.grid.n_phi)
        )[:, 0].real.reshape(result.grid.n_q, result.grid.n_omega)

    from .analysis import nonseparability

    coupling = np.array([nonseparability(result.modes[k], result.grid)
                         for k in range(len(result))])

    spectrum_path = os.path.join(out, "spectrum.csv")
    with open(spectrum_path, "w", encoding="utf-8") as fh:
        fh.write(f"# config_hash={chash}\n")
        fh.write("l,m,degeneracy,lambda,beta\n")
        for k in range(len(result)):
            fh.write(
                f"{result.ls[k]},{result.ms[k]},{result.degeneracy[k]},"
                f"{_fmt(result.lambdas[k])},{_fmt(result.betas[k])}\n"
            )

    arrays = _result_arrays(result, {
        "nonseparability": coupling,
        "intensity": intensity,
        "config_hash": _hash_bytes(chash),
    })
    save_arrays(os.path.join(out, "modes.stsm"), arrays)

    summary = {
        "config_hash": chash,
        "regime": cfg.regime,
        "K": result.K,
        "n_modes": int(len(result)),
        "sum_degeneracy_lambda": float(np.sum(result.degeneracy * result.lambdas)),
        "invariants": report,
    }
    if cfg.regime == "high-gain":
        summary["g"] = cfg.g
    with open(os.path.join(out, "summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    print(f"K = {_fmt(result.K)}  modes = {len(result)}  invariants "
          f"{'PASS' if report['pass'] else 'FAIL'}  -> {out}")
    if not report["pass"]:
        raise InvariantError(f"invariant check failed: {report}")
    return 0


# ---------------------------------------------------------------------------
# validate

def cmd_validate(args) -> int:
    from . import oracle

    cfg = _load_config(args)
    psi = build_wavefunction(cfg.make_grid(), cfg.make_pump(), cfg.make_crystal())
    result = decompose(psi, cfg.l_max, cfg.m_max, cfg.tol, workers=cfg.workers)
    lam_oracle = oracle.brute_force_spectrum(psi, corrupt_weights=args.corrupt_weights)
    lam_reduced = result.expanded_spectrum()

    n_top = min(args.top, len(lam_reduced), len(lam_oracle))
    dev = np.abs(lam_reduced[:n_top] - lam_oracle[:n_top]) / lam_oracle[:n_top]
    max_dev = float(dev.max())

    k_spec = result.K
    k_g1 = schmidt_number_g1(g1_from_psi(psi))
    k_brute = oracle.brute_force_K(psi)
    k_dev = max(
        abs(k_spec - k_g1) / k_g1,
        abs(k_spec - k_brute) / k_brute,
        abs(k_g1 - k_brute) / k_brute,
    )

    ok = max_dev < args.tolerance and k_dev < 0.01
    print(f"spectrum: top-{n_top} max relative deviation = {max_dev:.3e} "
          f"(tolerance {args.tolerance:.1e})")
    print(f"K routes: spectrum={_fmt(k_spec)} correlation={_fmt(k_g1)} "
          f"brute-force={_fmt(k_brute)}  max pairwise dev = {k_dev:.3e}")
    print("PASS" if ok else "FAIL")
    if not ok:
        raise InvariantError("oracle validation failed")
    return 0


# ---------------------------------------------------------------------------
# sweep

def cmd_sweep(args) -> int:
    from .analysis import sweep as run_sweep

    cfg = _load_config(args)
    if not cfg.values:
        raise ConfigError("sweep requires [sweep] values")
    out = cfg.output if args.output is None else args.output
    os.makedirs(out, exist_ok=True)
    rows = run_sweep(cfg.axis, cfg.values, cfg, fast=cfg.fast)
    path = os.path.join(out, "sweep.csv")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# config_hash={cfg.config_hash()}\n")
        fh.write(f"{cfg.axis},K\n")
        for r in rows:
            fh.write(f"{_fmt(r['value'])},{_fmt(r['K'])}\n")
    print(f"{cfg.axis} ramp over {len(rows)} points: K trend {rows[0]['trend']} -> {path}")
    return 0


# ---------------------------------------------------------------------------
# export

def cmd_export(args) -> int:
    artifact = os.path.join(args.artifact, "modes.stsm")
    if not os.path.exists(artifact):
        raise ConfigError(f"no artifact found at {artifact}; run decompose first")
    arrays = load_arrays(artifact)
    chash = bytes(arrays["config_hash"].astype(np.uint8)).hex() if "config_hash" in arrays else ""

    if args.what == "spectrum":
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(f"# config_hash={chash}\n")
            fh.write("l,m,degeneracy,lambda,beta\n")
            for l, m, d, lam, beta in zip(
                arrays["ls"], arrays["ms"], arrays["degeneracy"],
                arrays["lambdas"], arrays["betas"],
            ):
                fh.write(f"{int(l)},{int(m)},{int(d)},{_fmt(lam)},{_fmt(beta)}\n")
    elif args.what == "mode":
        if args.l is None or args.m is None:
            raise ConfigError("export mode requires --l and --m")
        hit = np.flatnonzero((arrays["ls"] == args.l) & (arrays["ms"] == args.m))
        if len(hit) == 0:
            raise ConfigError(f"mode (l={args.l}, m={args.m}) not present in the artifact")
        k = int(hit[0])
        save_arrays(args.out, {
            "mode": arrays["modes"][k],
            "l": np.array([float(args.l)]),
            "m": np.array([float(args.m)]),
            "lambda": arrays["lambdas"][k: k + 1],
            "beta": arrays["betas"][k: k + 1],
            "grid_q": arrays["grid_q"],
            "grid_omega": arrays["grid_omega"],
            "config_hash": arrays.get("config_hash", np.zeros(0)),
        })
    elif args.what == "intensity":
        save_arrays(args.out, {
            "intensity": arrays["intensity"],
            "grid_q": arrays["grid_q"],
            "grid_omega": arrays["grid_omega"],
            "config_hash": arrays.get("config_hash", np.zeros(0)),
        })
    elif args.what == "sweep":
        src = os.path.join(args.artifact, "sweep.csv")
        if not os.path.exists(src):
            raise ConfigError(f"no sweep table at {src}; run sweep first")
        with open(src, "r", encoding="utf-8") as fh, open(args.out, "w", encoding="utf-8") as dst:
            dst.write(fh.read())
    else:
        raise ConfigError(f"unknown export kind {args.what!r}")
    print(f"exported {args.what} -> {args.out}")
    return 0


# ---------------------------------------------------------------------------
# bench

def cmd_bench(args) -> int:
    from .schmidt import benchmark

    sizes = [int(s) for s in args.sizes.split(",")]
    rows = benchmark(sizes, repeats=args.repeats)
    print(f"{'n':>4} {'reduced [s]':>12} {'oracle [s]':>12} {'ratio':>10}")
    for r in rows:
        print(f"{r['n']:>4} {r['t_reduced']:>12.4f} {r['t_oracle']:>12.4f} {r['ratio']:>10.1f}")
    ratios = [r["ratio"] for r in rows]
    if all(r > 1 for r in ratios) and all(b > a for a, b in zip(ratios, ratios[1:])):
        print("speedup grows with n: PASS")
    else:
        print("speedup pattern not confirmed on this machine")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stsm",
        description="Spatiotemporal Schmidt decomposition of down-conversion states",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="build the state and write spectrum/modes/summary")
    _add_config_flags(p)
    p.add_argument("-o", "--output", help="output directory (default from config)")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("validate", help="compare the reduced pipeline against the dense oracle")
    _add_config_flags(p)
    p.add_argument("--top", type=int, default=50, help="number of leading weights to compare")
    p.add_argument("--tolerance", type=float, default=1e-8, help="max relative deviation")
    p.add_argument("--corrupt-weights", action="store_true",
                   help="negative control: deliberately corrupt the oracle measure")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("sweep", help="K across a parameter ramp")
    _add_config_flags(p)
    p.add_argument("-o", "--output", help="output directory (default from config)")
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("export", help="re-emit artifacts as tables or containers")
    p.add_argument("--artifact", required=True, help="directory written by decompose/sweep")
    p.add_argument("--what", required=True, choices=["spectrum", "mode", "intensity", "sweep"])
    p.add_argument("--l", type=int, help="OAM index for --what mode")
    p.add_argument("--m", type=int, help="radial-spectral index for --what mode")
    p.add_argument("--out", required=True, help="output file")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("bench", help="time the reduced pipeline against the oracle")
    p.add_argument("--sizes", default="8,12,16", help="comma-separated per-axis sizes")
    p.add_argument("--repeats", type=int, default=2, help="best-of repeats per timing")
    p.set_defaults(fn=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except StsmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
