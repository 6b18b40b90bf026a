"""Monte-Carlo frame/symbol error simulation over the AWGN channel.

Every frame draws its noise (and, for random codewords, its transmitted
word) from a private generator seeded by ``(seed, snr, frame index)``.
Frames are decoded in fixed-size chunks, possibly in worker processes, and
the outcomes are folded in frame order; a point stops at the frame on which
the frame-error target is reached.  The counters therefore do not depend on
the number of workers.
"""

from __future__ import annotations

import csv
import io
import math
import os
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import basic, subgradient
from .channel import Modulation, llr_matrix, psk, sigma_from_snr_db, transmit_awgn
from .code import ParityCheckMatrix, is_codeword, read_matrix
from .dual import ERASED, prepare
from .oracle import enumerate_code, exhaustive_ml

__all__ = [
    "SimConfig",
    "SimPoint",
    "FrameOutcome",
    "load_config",
    "parse_config",
    "frame_rng",
    "simulate_frame",
    "run_point",
    "run_sweep",
    "write_csv",
    "CSV_COLUMNS",
]

DECODERS = ("basic", "subgrad", "ml")
SOURCES = ("zero", "random")
CSV_COLUMNS = ("snr_db", "frames", "frame_errors", "symbol_errors", "erasures",
               "fer", "ser", "avg_iters", "seconds")


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines a simulation run.

    ``target_frame_errors`` is either one number for every point or a
    sequence aligned with ``snr_db``; ``None`` disables the target.
    ``codewords`` optionally names a file with one transmitted word per line
    for ``source="random"``; without it the code is enumerated.
    ``record_time`` fills the ``seconds`` column with wall-clock time, which
    makes the CSV differ between otherwise identical runs.
    """

    matrix: str | ParityCheckMatrix
    decoder: str = "basic"
    basic: basic.BasicConfig = field(default_factory=basic.BasicConfig)
    subgrad: subgradient.SubgradConfig = field(default_factory=subgradient.SubgradConfig)
    snr_db: tuple[float, ...] = (4.0, 6.0, 8.0)
    max_frames: int = 10_000
    target_frame_errors: int | tuple[int, ...] | None = 100
    seed: int = 0
    source: str = "zero"
    codewords: str | None = None
    workers: int = 1
    chunk: int = 256
    labeling: tuple[int, ...] | None = None
    record_time: bool = False

    def __post_init__(self):
        object.__setattr__(self, "snr_db", tuple(float(s) for s in np.atleast_1d(self.snr_db)))
        if not self.snr_db:
            raise ValueError("snr_db needs at least one value")
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}, got {self.decoder!r}")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")
        if int(self.max_frames) < 1:
            raise ValueError("max_frames must be at least 1")
        if int(self.workers) < 1 or int(self.chunk) < 1:
            raise ValueError("workers and chunk must be at least 1")
        if int(self.seed) < 0:
            raise ValueError("seed must be nonnegative")
        t = self.target_frame_errors
        if isinstance(t, (list, tuple)):
            if len(t) != len(self.snr_db):
                raise ValueError("one frame-error target per SNR point is required")
            if any(int(x) < 1 for x in t):
                raise ValueError("frame-error targets must be at least 1")
            object.__setattr__(self, "target_frame_errors", tuple(int(x) for x in t))
        elif t is not None and int(t) < 1:
            raise ValueError("target_frame_errors must be at least 1")

    def target_for(self, k: int) -> int | None:
        t = self.target_frame_errors
        return t[k] if isinstance(t, tuple) else t

    @property
    def max_iters(self) -> int:
        if self.decoder == "basic":
            return self.basic.max_iters
        if self.decoder == "subgrad":
            return self.subgrad.max_iters
        return 1

    def describe(self) -> dict:
        """Flat view of every setting, defaults included."""
        m = self.matrix if isinstance(self.matrix, str) else "<in-memory>"
        out = {
            "matrix": m,
            "decoder": self.decoder,
            "snr_db": ",".join(f"{s:g}" for s in self.snr_db),
            "frames": self.max_frames,
            "target_fe": self.target_frame_errors if not isinstance(self.target_frame_errors, tuple)
            else ",".join(map(str, self.target_frame_errors)),
            "seed": self.seed,
            "source": self.source,
            "codewords": self.codewords,
            "workers": self.workers,
            "chunk": self.chunk,
            "labeling": None if self.labeling is None else ",".join(map(str, self.labeling)),
            "timing": self.record_time,
        }
        if self.decoder == "basic":
            b = self.basic
            out.update(kappa=b.kappa, max_iters=b.max_iters, schedule=b.schedule,
                       edge_mode=b.edge_mode, interval_pick=b.interval_pick)
        elif self.decoder == "subgrad":
            s = self.subgrad
            out.update(step_rule=s.schedule.rule, theta1=s.schedule.theta1,
                       factor=s.schedule.factor, period=s.schedule.period,
                       max_iters=s.max_iters, early_stop_eps=s.early_stop_eps)
        return out


@dataclass
class SimPoint:
    snr_db: float
    frames: int = 0
    frame_errors: int = 0
    symbol_errors: int = 0
    symbols_total: int = 0
    erasures: int = 0
    iterations: int = 0
    wall_time: float = math.nan

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else math.nan

    @property
    def ser(self) -> float:
        return self.symbol_errors / self.symbols_total if self.symbols_total else math.nan

    @property
    def avg_iterations(self) -> float:
        return self.iterations / self.frames if self.frames else math.nan

    def add(self, o: "FrameOutcome", n: int) -> None:
        self.frames += 1
        self.frame_errors += o.frame_error
        self.symbol_errors += o.symbol_errors
        self.symbols_total += n
        self.erasures += o.erasures
        self.iterations += o.iterations


@dataclass(frozen=True)
class FrameOutcome:
    frame_error: bool
    symbol_errors: int  # erased symbols count as errors
    erasures: int
    iterations: int


# ---------------------------------------------------------------- config file

_BOOL = {"1": True, "true": True, "yes": True, "on": True,
         "0": False, "false": False, "no": False, "off": False}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.replace(",", " ").split())


def _kappa(text) -> float:
    return math.inf if str(text).strip().lower() in ("inf", "infinity") else float(text)


def parse_config(pairs: dict, base: SimConfig | None = None) -> SimConfig:
    """Build a :class:`SimConfig` from string ``key -> value`` pairs.

    Keys use the command-line flag names with ``-`` or ``_`` interchangeably.
    Keys that are absent keep their value from ``base`` (or the defaults).
    """
    p = {k.strip().lower().replace("-", "_"): str(v).strip() for k, v in pairs.items()}
    known = {"matrix", "decoder", "kappa", "max_iters", "schedule", "edge_mode", "interval_pick",
             "step_rule", "theta1", "factor", "period", "early_stop_eps", "snr_db", "frames",
             "target_fe", "seed", "source", "codewords", "workers", "chunk", "labeling", "timing"}
    unknown = sorted(set(p) - known)
    if unknown:
        raise ValueError(f"unknown configuration keys: {', '.join(unknown)}")
    if base is None:
        if "matrix" not in p:
            raise ValueError("configuration needs a matrix")
        base = SimConfig(matrix=p["matrix"])
    b, s = base.basic, base.subgrad
    bk = {}
    if "kappa" in p:
        bk["kappa"] = _kappa(p["kappa"])
    for key in ("schedule", "edge_mode", "interval_pick"):
        if key in p:
            bk[key] = p[key]
    sk = {}
    if "early_stop_eps" in p:
        sk["early_stop_eps"] = float(p["early_stop_eps"])
    if "max_iters" in p:
        bk["max_iters"] = sk["max_iters"] = int(p["max_iters"])
    sched = s.schedule
    if "step_rule" in p and p["step_rule"] != sched.rule:
        sched = subgradient.default_schedule(p["step_rule"])
    sched_kw = {}
    if "theta1" in p:
        sched_kw["theta1"] = float(p["theta1"])
    if "factor" in p:
        sched_kw["factor"] = float(p["factor"])
    if "period" in p:
        sched_kw["period"] = int(p["period"])
    sched = replace(sched, **sched_kw)
    kw = dict(basic=replace(b, **bk), subgrad=replace(s, schedule=sched, **sk))
    for key, conv in (("matrix", str), ("decoder", str), ("source", str), ("codewords", str),
                      ("seed", int), ("workers", int), ("chunk", int)):
        if key in p:
            kw[key] = conv(p[key])
    if "frames" in p:
        kw["max_frames"] = int(p["frames"])
    if "snr_db" in p:
        kw["snr_db"] = _floats(p["snr_db"])
    if "target_fe" in p:
        t = p["target_fe"].lower()
        if t in ("none", "off", "0"):
            kw["target_frame_errors"] = None
        else:
            vals = tuple(int(x) for x in t.replace(",", " ").split())
            kw["target_frame_errors"] = vals[0] if len(vals) == 1 else vals
    if "labeling" in p:
        kw["labeling"] = tuple(int(x) for x in p["labeling"].replace(",", " ").split())
    if "timing" in p:
        try:
            kw["record_time"] = _BOOL[p["timing"].lower()]
        except KeyError:
            raise ValueError(f"timing must be a boolean, got {p['timing']!r}") from None
    return replace(base, **kw)


def load_config(path, base: SimConfig | None = None) -> SimConfig:
    """Read a flat ``key = value`` file (``#`` starts a comment)."""
    pairs = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            k, v = line.split("=", 1)
            pairs[k.strip()] = v.strip()
    if "matrix" in pairs and base is None:
        # relative matrix paths are taken relative to the config file
        mp = pairs["matrix"]
        if not os.path.isabs(mp):
            pairs["matrix"] = os.path.join(os.path.dirname(os.path.abspath(path)), mp)
    return parse_config(pairs, base)


# ------------------------------------------------------------------- frames

def _snr_key(snr_db: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(snr_db)))[0]


def frame_rng(seed: int, snr_db: float, frame: int) -> np.random.Generator:
    """Generator private to one frame of one SNR point."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(_snr_key(snr_db), int(frame)))
    return np.random.default_rng(ss)


@dataclass
class _Context:
    cfg: SimConfig
    H: ParityCheckMatrix
    graph: object
    mod: Modulation
    words: np.ndarray | None  # transmitted-word pool for random sources
    ml_words: np.ndarray | None  # full code for the ML decoder


def _read_codewords(path, H: ParityCheckMatrix) -> np.ndarray:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            w = [int(x) for x in line.replace(",", " ").split()]
            if len(w) != H.n or not is_codeword(H, w):
                raise ValueError(f"{path}:{lineno}: not a codeword of the configured code")
            rows.append(w)
    if not rows:
        raise ValueError(f"{path}: no codewords")
    return np.array(rows, dtype=np.int64)


def _build_context(cfg: SimConfig) -> _Context:
    H = read_matrix(cfg.matrix) if isinstance(cfg.matrix, str) else cfg.matrix
    graph = prepare(H)
    if cfg.decoder == "basic" and graph.blocked:
        j, i = graph.blocked[0]
        raise ValueError(f"basic decoder cannot run on this matrix (row {j + 1}, column {i + 1})")
    mod = psk(H.ring, cfg.labeling)
    ml_words = np.array(enumerate_code(H), dtype=np.int64) if cfg.decoder == "ml" else None
    words = None
    if cfg.source == "random":
        if cfg.codewords:
            words = _read_codewords(cfg.codewords, H)
        else:
            words = ml_words if ml_words is not None else np.array(enumerate_code(H), dtype=np.int64)
    return _Context(cfg, H, graph, mod, words, ml_words)


def simulate_frame(ctx: _Context, snr_db: float, frame: int) -> FrameOutcome:
    cfg = ctx.cfg
    rng = frame_rng(cfg.seed, snr_db, frame)
    if ctx.words is None:
        c = np.zeros(ctx.H.n, dtype=np.int64)
    else:
        c = ctx.words[rng.integers(len(ctx.words))]
    sigma = sigma_from_snr_db(snr_db)
    y = transmit_awgn(ctx.mod.points[c], sigma, rng)
    llr = llr_matrix(ctx.mod, y, sigma)
    if cfg.decoder == "basic":
        res = basic.decode(ctx.graph, llr, cfg.basic)
        est, iters = res.symbols, res.iterations
    elif cfg.decoder == "subgrad":
        res = subgradient.decode(ctx.graph, llr, cfg.subgrad)
        est, iters = res.symbols, res.iterations
    else:
        est, iters = exhaustive_ml(ctx.H, llr, ctx.ml_words), 1
    wrong = est != c
    return FrameOutcome(bool(wrong.any()), int(wrong.sum()), int((est == ERASED).sum()), int(iters))


# worker-process state, built once per process
_WORKER: _Context | None = None


def _init_worker(cfg: SimConfig) -> None:
    global _WORKER
    _WORKER = _build_context(cfg)


def _run_chunk(snr_db: float, start: int, stop: int) -> list[FrameOutcome]:
    return [simulate_frame(_WORKER, snr_db, f) for f in range(start, stop)]


# ------------------------------------------------------------------- points

def _chunks(cfg: SimConfig):
    for start in range(0, cfg.max_frames, cfg.chunk):
        yield start, min(start + cfg.chunk, cfg.max_frames)


def _fold(point: SimPoint, outcomes, n: int, target: int | None) -> bool:
    """Add outcomes in order; True once the frame-error target is met."""
    for o in outcomes:
        point.add(o, n)
        if target is not None and point.frame_errors >= target:
            return True
    return False


def _run_point(cfg, ctx, pool, snr_db, target) -> SimPoint:
    t0 = time.perf_counter()
    point = SimPoint(float(snr_db))
    n = ctx.H.n
    chunks = list(_chunks(cfg))
    if pool is None:
        for a, b in chunks:
            if _fold(point, (simulate_frame(ctx, snr_db, f) for f in range(a, b)), n, target):
                break
    else:
        # keep a window of chunks in flight and fold them strictly in order
        window = 2 * cfg.workers
        pending = [pool.submit(_run_chunk, snr_db, a, b) for a, b in chunks[:window]]
        nxt = len(pending)
        while pending:
            outcomes = pending.pop(0).result()
            if _fold(point, outcomes, n, target):
                for f in pending:
                    f.cancel()
                break
            if nxt < len(chunks):
                pending.append(pool.submit(_run_chunk, snr_db, *chunks[nxt]))
                nxt += 1
    if cfg.record_time:
        point.wall_time = time.perf_counter() - t0
    return point


def run_point(cfg: SimConfig, snr_db: float, target: int | None = None) -> SimPoint:
    """Simulate one SNR point (``target`` defaults to the configured one)."""
    if target is None:
        k = cfg.snr_db.index(float(snr_db)) if float(snr_db) in cfg.snr_db else 0
        target = cfg.target_for(k)
    return run_sweep(replace(cfg, snr_db=(float(snr_db),), target_frame_errors=target))[0]


def run_sweep(cfg: SimConfig) -> list[SimPoint]:
    ctx = _build_context(cfg)
    if cfg.workers == 1:
        return [_run_point(cfg, ctx, None, s, cfg.target_for(k)) for k, s in enumerate(cfg.snr_db)]
    with ProcessPoolExecutor(max_workers=cfg.workers, initializer=_init_worker,
                             initargs=(cfg,)) as pool:
        return [_run_point(cfg, ctx, pool, s, cfg.target_for(k)) for k, s in enumerate(cfg.snr_db)]


# ---------------------------------------------------------------------- csv

def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def write_csv(points: Sequence[SimPoint], sink=None) -> str:
    """Write the points as CSV to ``sink`` (path, file object or None) and return the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for p in points:
        w.writerow([repr(float(p.snr_db)), p.frames, p.frame_errors, p.symbol_errors, p.erasures,
                    _fmt(p.fer), _fmt(p.ser), _fmt(p.avg_iterations), _fmt(p.wall_time)])
    text = buf.getvalue()
    if isinstance(sink, (str, os.PathLike)):
        with open(sink, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    elif sink is not None:
        sink.write(text)
    return text
