"""Command-line entry point: ``nblpdec {decode,simulate,verify}``.

Every subcommand first echoes its full configuration (defaults included) to
standard error as ``# key = value`` lines; results go to standard output.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import basic, subgradient
from .channel import llr_matrix, psk, sigma_from_snr_db
from .code import MatrixFormatError, read_matrix
from .dual import ERASED, prepare
from .oracle import OracleSizeError, exhaustive_ml
from .sim import SimConfig, load_config, parse_config, run_sweep, write_csv
from .verify import run_all

__all__ = ["main", "build_parser"]


def _kappa(text: str) -> float:
    t = text.strip().lower()
    if t in ("inf", "infinity"):
        return math.inf
    try:
        k = float(t)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'inf' or a positive number, got {text!r}") from None
    if not k > 0:
        raise argparse.ArgumentTypeError("kappa must be positive")
    return k


def _decoder_flags(p: argparse.ArgumentParser, defaults: bool) -> None:
    """Decoder options; with ``defaults=False`` unset flags stay ``None``."""
    d = (lambda v: v) if defaults else (lambda v: None)
    p.add_argument("--decoder", choices=("basic", "subgrad", "ml"), default=d("basic"))
    p.add_argument("--kappa", type=_kappa, default=d(math.inf),
                   help="smoothing parameter of the basic decoder ('inf' for min-sum)")
    p.add_argument("--max-iters", type=int, default=d(100))
    p.add_argument("--schedule", choices=("edge", "row"), default=d("edge"),
                   help="basic decoder: recompute each row per edge or once per row pass")
    p.add_argument("--edge-mode", choices=("block", "sequential", "simultaneous"), default=d("block"))
    p.add_argument("--step-rule", choices=("constant", "staircase"), default=d("staircase"))
    p.add_argument("--theta1", type=float, default=None,
                   help="initial subgradient step (default 0.15 staircase, 0.08 constant)")
    p.add_argument("--early-stop-eps", type=float, default=d(0.0))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nblpdec", description="Dual LP decoders for nonbinary LDPC codes")
    sub = ap.add_subparsers(dest="command", required=True)

    dec = sub.add_parser("decode", help="decode one received word")
    dec.add_argument("--matrix", required=True, help="parity-check matrix file")
    src = dec.add_mutually_exclusive_group(required=True)
    src.add_argument("--llr", help="file with one line of q-1 LLRs per symbol")
    src.add_argument("--received", help="file with one 're im' line per symbol (PSK channel output)")
    dec.add_argument("--snr-db", type=float, default=None, help="channel SNR for --received (Es/N0)")
    dec.add_argument("--sigma", type=float, default=None, help="noise std per dimension for --received")
    _decoder_flags(dec, defaults=True)

    sim = sub.add_parser("simulate", help="Monte-Carlo FER/SER sweep, CSV output")
    sim.add_argument("--config", help="key = value configuration file; flags override it")
    sim.add_argument("--matrix")
    _decoder_flags(sim, defaults=False)
    sim.add_argument("--snr-db", help="comma separated SNR list in dB (Es/N0)")
    sim.add_argument("--frames", type=int, help="maximum frames per point")
    sim.add_argument("--target-fe", help="frame errors per point at which to stop (one or a list; 'none' disables)")
    sim.add_argument("--seed", type=int)
    sim.add_argument("--workers", type=int)
    sim.add_argument("--source", choices=("zero", "random"))
    sim.add_argument("--codewords", help="file of transmitted codewords for --source random")
    sim.add_argument("--timing", action="store_true", default=None,
                     help="fill the seconds column with wall-clock time (output no longer reproducible)")
    sim.add_argument("--out", help="CSV path (default: standard output)")

    ver = sub.add_parser("verify", help="check the trellis and both decoders against the exhaustive oracle")
    ver.add_argument("--instances", type=int, default=1000)
    ver.add_argument("--seed", type=int, default=0)
    return ap


def _echo(items: dict) -> None:
    for k, v in items.items():
        print(f"# {k} = {v}", file=sys.stderr)


def _read_table(path: str, width: int | None, what: str) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                vals = [float(x) for x in line.replace(",", " ").split()]
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric {what} entry") from None
            if width is not None and len(vals) != width:
                raise ValueError(f"{path}:{lineno}: expected {width} values, found {len(vals)}")
            rows.append(vals)
    return np.array(rows, dtype=float)


def _schedule(args) -> subgradient.StepSchedule:
    sched = subgradient.default_schedule(args.step_rule)
    if args.theta1 is not None:
        sched = subgradient.StepSchedule(rule=args.step_rule, theta1=args.theta1)
    return sched


def _cmd_decode(args) -> int:
    H = read_matrix(args.matrix)
    q = H.ring.q
    echo = {"matrix": args.matrix, "decoder": args.decoder}
    if args.llr:
        llr = _read_table(args.llr, q - 1, "LLR")
        echo["llr"] = args.llr
    else:
        if (args.snr_db is None) == (args.sigma is None):
            raise ValueError("--received needs exactly one of --snr-db or --sigma")
        sigma = args.sigma if args.sigma is not None else sigma_from_snr_db(args.snr_db)
        y = _read_table(args.received, 2, "received")
        llr = llr_matrix(psk(H.ring), y[:, 0] + 1j * y[:, 1], sigma)
        echo.update(received=args.received, sigma=repr(sigma))
    if llr.shape[0] != H.n:
        raise ValueError(f"input has {llr.shape[0]} symbols, the code has length {H.n}")
    if args.decoder == "basic":
        cfg = basic.BasicConfig(kappa=args.kappa, max_iters=args.max_iters, schedule=args.schedule,
                                edge_mode=args.edge_mode)
        echo.update(kappa=cfg.kappa, max_iters=cfg.max_iters, schedule=cfg.schedule,
                    edge_mode=cfg.edge_mode, interval_pick=cfg.interval_pick)
        _echo(echo)
        res = basic.decode(prepare(H), llr, cfg)
        symbols, status, iters = res.symbols, res.status.value, res.iterations
    elif args.decoder == "subgrad":
        cfg = subgradient.SubgradConfig(_schedule(args), args.max_iters, args.early_stop_eps)
        s = cfg.schedule
        echo.update(step_rule=s.rule, theta1=s.theta1, factor=s.factor, period=s.period,
                    max_iters=cfg.max_iters, early_stop_eps=cfg.early_stop_eps)
        _echo(echo)
        res = subgradient.decode(prepare(H), llr, cfg)
        symbols, status, iters = res.symbols, res.status.value, res.iterations
    else:
        _echo(echo)
        symbols, status, iters = exhaustive_ml(H, llr), "CODEWORD", 0
    print("symbols: " + " ".join("?" if s == ERASED else str(int(s)) for s in symbols))
    print(f"status: {status}")
    print(f"iterations: {iters}")
    return 0


def _cmd_simulate(args) -> int:
    base = load_config(args.config) if args.config else None
    flags = {
        "matrix": args.matrix, "decoder": args.decoder, "kappa": args.kappa, "max_iters": args.max_iters,
        "schedule": args.schedule, "edge_mode": args.edge_mode, "step_rule": args.step_rule,
        "theta1": args.theta1, "early_stop_eps": args.early_stop_eps, "snr_db": args.snr_db,
        "frames": args.frames, "target_fe": args.target_fe, "seed": args.seed, "workers": args.workers,
        "source": args.source, "codewords": args.codewords, "timing": args.timing,
    }
    pairs = {k: v for k, v in flags.items() if v is not None}
    if base is None and "matrix" not in pairs:
        raise ValueError("simulate needs --matrix or a config file naming one")
    cfg: SimConfig = parse_config(pairs, base)
    _echo({**cfg.describe(), "out": args.out or "-"})
    text = write_csv(run_sweep(cfg), args.out)
    if not args.out:
        sys.stdout.write(text)
    return 0


def _cmd_verify(args) -> int:
    _echo({"instances": args.instances, "seed": args.seed})
    if args.instances < 1:
        raise ValueError("--instances must be at least 1")
    results = run_all(args.instances, args.seed)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("all checks passed" if ok else "verification FAILED")
    return 0 if ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"decode": _cmd_decode, "simulate": _cmd_simulate, "verify": _cmd_verify}
    try:
        return handlers[args.command](args)
    except (OSError, ValueError, MatrixFormatError, OracleSizeError) as exc:
        print(f"nblpdec {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
