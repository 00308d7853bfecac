"""Command-line pipeline: synthesize -> reconstruct -> errmap, plus the
identity/oracle self-checks.

Progress goes to stderr; results go to files (synthesize, reconstruct,
errmap) or, for the self-check commands, to a table on stdout.  Exit codes:
0 success, 1 usage problem, 2 data/domain problem.
"""

import argparse
import os
import sys
import time

from . import reconstruct as rec
from . import sources, verify
from .errors import DomainError, ParseError, PreconditionError, UsageError
from .forward import (
    NoiseSpec,
    QuadratureSpec,
    add_noise,
    disk_field_closed_form,
    scattered_field,
    synthesize,
)
from .io_config import (
    parse_config,
    read_field_tensor,
    read_grid,
    write_error_stats,
    write_field_tensor,
    write_grid,
    write_heatmap,
)
from .parallel import resolve_threads

FIELD_FILE = "field.csv"
INDICATOR_FILE = "indicator.csv"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits with 2; we reserve 2 for data errors
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="radonsource", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", help="plain-text key = value config file")
        sp.add_argument("--example", type=int, choices=(1, 2, 3), help="builtin source id")
        sp.add_argument("--source-file", dest="source_file", help="raster-mask grid CSV")
        sp.add_argument("--R", type=float, help="sensor circle radius")
        sp.add_argument("--L", type=int, help="number of sensors")
        sp.add_argument("--kmin", type=float, help="smallest wavenumber")
        sp.add_argument("--kmax", type=float, help="largest wavenumber")
        sp.add_argument("--dk", type=float, help="wavenumber spacing")
        sp.add_argument("--delta", type=float, help="relative noise level")
        sp.add_argument("--seed", type=int, help="noise seed")
        sp.add_argument("--grid", help="sampling grid as x0,x1,y0,y1,nx,ny")
        sp.add_argument("--nq", type=int, help="source quadrature cells per axis")
        sp.add_argument("--threads", type=int, help="worker threads (default: all cores)")
        sp.add_argument("-i", "--input", help="input file or directory")
        sp.add_argument("-o", "--output", help="output directory")

    for name, text in (
        ("synthesize", "compute the scattered-field tensor (optionally noisy)"),
        ("reconstruct", "evaluate the indicator over the sampling grid"),
        ("errmap", "compare an indicator grid against the true source"),
        ("verify", "run the identity self-checks and print a residual table"),
        ("oracle", "compare the forward solver against the disk closed form"),
    ):
        add_common(sub.add_parser(name, help=text))
    return p


def _config_from_args(args):
    overrides = {
        "example": args.example,
        "source-file": args.source_file,
        "R": args.R,
        "L": args.L,
        "kmin": args.kmin,
        "kmax": args.kmax,
        "dk": args.dk,
        "delta": args.delta,
        "seed": args.seed,
        "grid": args.grid,
        "nq": args.nq,
        "output": args.output,
    }
    return parse_config(args.config, overrides)


def _outdir(cfg) -> str:
    out = cfg.output_dir or "."
    os.makedirs(out, exist_ok=True)
    return out


def _resolve_input(arg, default_name: str) -> str:
    if arg is None:
        raise UsageError(f"-i/--input is required (file or directory with {default_name})")
    if os.path.isdir(arg):
        return os.path.join(arg, default_name)
    return arg


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------
def _cmd_synthesize(args) -> int:
    cfg = _config_from_args(args)
    threads = resolve_threads(args.threads)
    model = cfg.source_model()
    t0 = time.perf_counter()
    tensor = synthesize(model, cfg.sensors(), cfg.kgrid(), cfg.quadrature(), threads=threads)
    if cfg.delta > 0.0:
        tensor = add_noise(tensor, NoiseSpec(cfg.delta, cfg.seed))
    out = _outdir(cfg)
    path = os.path.join(out, FIELD_FILE)
    write_field_tensor(tensor, path)
    _log(
        f"synthesize: L={cfg.L} M={tensor.wavenumbers.count} delta={cfg.delta} "
        f"-> {path} ({time.perf_counter() - t0:.1f}s, {threads} threads)"
    )
    return 0


def _cmd_reconstruct(args) -> int:
    cfg = _config_from_args(args)
    threads = resolve_threads(args.threads)
    tensor = read_field_tensor(_resolve_input(args.input, FIELD_FILE))
    grid = cfg.sampling_grid()
    t0 = time.perf_counter()
    indicator = rec.indicator_grid(tensor, grid, threads=threads)
    out = _outdir(cfg)
    write_grid(indicator, os.path.join(out, INDICATOR_FILE))
    write_heatmap(indicator, os.path.join(out, "indicator.ppm"))
    _log(
        f"reconstruct: {grid.nx}x{grid.ny} nodes -> {out} "
        f"({time.perf_counter() - t0:.1f}s, {threads} threads)"
    )
    return 0


def _cmd_errmap(args) -> int:
    cfg = _config_from_args(args)
    indicator = read_grid(_resolve_input(args.input, INDICATOR_FILE))
    model = cfg.source_model()
    truth = sources.rasterize(model, indicator.grid)
    stats = verify.error_stats(indicator, truth)
    out = _outdir(cfg)
    write_error_stats(stats, os.path.join(out, "error_stats.json"))
    write_grid(stats.error_grid, os.path.join(out, "error.csv"))
    write_heatmap(stats.error_grid, os.path.join(out, "error.ppm"))
    _log(
        f"errmap: l_inf={stats.l_inf:.3e} p95={stats.percentile_95:.3e} "
        f"l2_rel={stats.l2_relative:.3e} -> {out}"
    )
    return 0


def _cmd_verify(args) -> int:
    cfg = _config_from_args(args)
    R = cfg.R
    ok = True
    print("identity check                                 residual      bound    status")
    pairs = [((0.5, 0.0), (-0.5, 0.0)), ((1.2, -0.7), (0.3, 1.1)), ((0.0, 0.0), (0.0, 0.0))]
    for k in (1.0, 5.0, 10.0):
        worst = max(verify.check_disk_identity(k, z, y, R, 512) for z, y in pairs)
        good = worst <= 1e-8
        ok &= good
        print(f"boundary-integral identity,  k={k:<4g} n=512   {worst:.3e}   1.0e-08   {'ok' if good else 'FAIL'}")
    coarse = max(verify.check_disk_identity(10.0, z, y, R, 32) for z, y in pairs)
    fine = max(verify.check_disk_identity(10.0, z, y, R, 512) for z, y in pairs)
    decay = coarse / max(fine, 1e-300)
    good = decay >= 1e3
    ok &= good
    print(f"spectral decay n=32 -> n=512 at k=10         {decay:9.3e}   1.0e+03   {'ok' if good else 'FAIL'}")
    model = sources.AnalyticPeaks()
    res = verify.check_inversion_identity(model, (0.0, 0.0), k_max=30.0, dk=0.05, n_q=256)
    good = res <= 5e-3
    ok &= good
    print(f"frequency-inversion identity at the origin    {res:.3e}   5.0e-03   {'ok' if good else 'FAIL'}")
    return 0 if ok else 2


def _cmd_oracle(args) -> int:
    cfg = _config_from_args(args)
    model = sources.ShapeSum(((sources.Disk((0.0, 0.0), 1.0), 1.0),))
    spec = QuadratureSpec(n_q=cfg.n_q, rule="refined")
    x = (cfg.R, 0.0)
    ok = True
    print("k       closed form              solver                   rel err     status")
    for k in (0.5, 1.0, 2.0, 5.0, 10.0, 20.0):
        exact = disk_field_closed_form(k, 1.0, 1.0, cfg.R)
        got = scattered_field(model, x, k, spec)
        rel = abs(got - exact) / abs(exact)
        good = rel <= 1e-6
        ok &= good
        print(f"{k:<6g}  {exact.real:+.6e}{exact.imag:+.6e}j  {got.real:+.6e}{got.imag:+.6e}j  {rel:.2e}   {'ok' if good else 'FAIL'}")
    return 0 if ok else 2


_COMMANDS = {
    "synthesize": _cmd_synthesize,
    "reconstruct": _cmd_reconstruct,
    "errmap": _cmd_errmap,
    "verify": _cmd_verify,
    "oracle": _cmd_oracle,
}


def run(argv) -> int:
    """Parse argv (excluding the program name) and execute one subcommand."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DomainError, PreconditionError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
