"""Monte-Carlo BER sweeps for user 1 of the two-user interference channel.

Per trial: draw ``H1, G1``, both users' symbols and noise; form
``y = sqrt(rho/mu) (H_eq s + G_eq c) + n``; cancel the interference with the
configured receiver; decode exhaustively; count bit errors.  Trials are
processed in blocks of :data:`~ic_stbc.channel.TRIAL_BLOCK`.  The trial
index fixes every random draw, so the same trials (common random numbers)
are reused at every SNR point and across receivers.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
import csv
import io
import logging
import math
import time

import numpy as np

from . import channel, kernels
from .codebook import CODE_KINDS, CodeSpec, GuardExceededError, encode_matrix, lift_batch
from .modulation import Constellation, make_qam
from .receiver import RECEIVERS, batch_front_end

log = logging.getLogger(__name__)

CSV_HEADER = ["snr_db", "receiver", "code", "M", "N", "L", "trials", "bit_errors", "ber", "seed"]


class ConfigError(ValueError):
    """Invalid simulation configuration."""


@dataclass
class SimConfig:
    M: int
    N: int
    L: int
    constellation_order: int = 4
    code: str = "proposed"
    receiver: str = "zf"
    snr_db_grid: list = field(default_factory=list)
    trials_per_point: int | None = None
    target_bit_errors: int | None = 200
    max_trials: int = 10**7
    master_seed: int = 0
    output_path: str | None = None
    workers: int = 1

    def validate(self) -> "SimConfig":
        if min(self.M, self.N, self.L) < 1:
            raise ConfigError("M, N and L must be positive")
        if self.code not in CODE_KINDS:
            raise ConfigError(f"code must be one of {CODE_KINDS}")
        if self.receiver not in RECEIVERS:
            raise ConfigError(f"receiver must be one of {RECEIVERS}")
        if self.constellation_order not in (4, 16, 64):
            raise ConfigError("constellation order must be 4, 16 or 64")
        grid = list(self.snr_db_grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("SNR grid must be strictly increasing")
        if self.trials_per_point is None and self.target_bit_errors is None:
            raise ConfigError("set trials_per_point and/or target_bit_errors")
        if self.trials_per_point is not None and self.trials_per_point < 1:
            raise ConfigError("trials_per_point must be >= 1")
        if self.target_bit_errors is not None and self.target_bit_errors < 1:
            raise ConfigError("target_bit_errors must be >= 1")
        if self.max_trials < 1 or self.workers < 1:
            raise ConfigError("max_trials and workers must be >= 1")
        spec = self.spec
        K = self.constellation_order**spec.n_symbols
        if K > kernels.MAX_CANDIDATES:
            raise GuardExceededError(f"{K} ML candidates exceed the guard {kernels.MAX_CANDIDATES}")
        k = spec.interference_rank(self.N)
        if self.receiver != "genie" and spec.T * self.N <= k:
            raise ConfigError(
                f"interference occupies {k} of {spec.T * self.N} dimensions; nothing left after cancellation"
            )
        return self

    @property
    def spec(self) -> CodeSpec:
        return CodeSpec(self.M, self.L, self.code)


@dataclass
class BerRecord:
    snr_db: float
    receiver: str
    code: str
    M: int
    N: int
    L: int
    trials: int
    bit_errors: int
    ber: float
    seed: int
    wallclock_seconds: float = 0.0


class _Context:
    """Per-configuration constants shared by all blocks."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.spec = cfg.spec
        self.const: Constellation = make_qam(cfg.constellation_order)
        self.basis1 = encode_matrix(self.spec, np.eye(self.spec.n_symbols), 1)
        self.basis2 = encode_matrix(self.spec, np.eye(self.spec.n_symbols), 2)
        self.TN = self.spec.T * cfg.N
        self.bits_per_trial = self.spec.n_symbols * self.const.bits_per_symbol
        self.powers = self.const.order ** np.arange(self.spec.n_symbols - 1, -1, -1)
        self.interference_rank = self.spec.interference_rank(cfg.N)


def snr_to_rho(snr_db: float) -> float:
    return math.inf if snr_db == math.inf else 10.0 ** (snr_db / 10.0)


def _block_errors(ctx: _Context, rho: float, block: int, rows: slice = slice(None),
                  desired_gain: float = 1.0) -> np.ndarray:
    """Bit errors per trial for the selected rows of one block."""
    cfg, spec = ctx.cfg, ctx.spec
    seed = cfg.master_seed
    ch = channel.draw_channel_block(cfg.M, cfg.N, seed, block)[rows].copy()
    noise = channel.draw_noise_block(ctx.TN, seed, block)[rows]
    labels = channel.draw_symbol_block(ctx.const.order, spec.n_symbols, seed, block)[rows]
    first = block * channel.TRIAL_BLOCK + (rows.start or 0) if isinstance(rows, slice) else None
    noise_var = 0.0 if math.isinf(rho) else spec.mu / rho
    s = ctx.const.points[labels[:, 0]]
    c = ctx.const.points[labels[:, 1]]
    if cfg.receiver == "genie":
        c = np.zeros_like(c)

    attempt = 0
    while True:
        Hq = lift_batch(spec, ch[:, 0], 1, ctx.basis1)
        Gq = lift_batch(spec, ch[:, 1], 2, ctx.basis2)
        y = desired_gain * np.einsum("btk,bk->bt", Hq, s) + np.einsum("btk,bk->bt", Gq, c)
        if noise_var:
            y = y + np.sqrt(noise_var) * noise
        R, b, degenerate = batch_front_end(cfg.receiver, Hq, Gq, y, noise_var, rank=ctx.interference_rank)
        if not degenerate.any():
            break
        attempt += 1
        for i in np.flatnonzero(degenerate):
            index = first + i if first is not None else i
            log.warning("degenerate interferer channel in trial %d; redraw %d", index, attempt)
            ch[i] = channel.redraw_channel(cfg.M, cfg.N, seed, index, attempt)

    idx, _ = kernels.ml_search(R, b, ctx.const.points)
    decided = (idx[:, None] // ctx.powers) % ctx.const.order
    x = np.bitwise_xor(decided, labels[:, 0])
    return ctx.const.label_bits(x).reshape(len(x), -1).sum(axis=1)


def run_trial(cfg: SimConfig, rho: float, trial_index: int, desired_gain: float = 1.0) -> int:
    """Bit errors of user 1 in one trial; a pure function of its arguments.

    ``desired_gain`` scales user 1's signal (0 leaves interference and noise only).
    """
    cfg.validate()
    block, row = divmod(trial_index, channel.TRIAL_BLOCK)
    return int(_block_errors(_Context(cfg), rho, block, slice(row, row + 1), desired_gain)[0])


def _point(ctx: _Context, snr_db: float, pool) -> BerRecord:
    cfg = ctx.cfg
    rho = snr_to_rho(snr_db)
    cap = cfg.max_trials if cfg.trials_per_point is None else min(cfg.trials_per_point, cfg.max_trials)
    n_blocks = -(-cap // channel.TRIAL_BLOCK)
    wave = cfg.workers if pool is not None else 1
    t0 = time.perf_counter()
    trials = errors = 0
    block = 0
    done = False
    while not done and block < n_blocks:
        ids = range(block, min(block + wave, n_blocks))
        jobs = []
        for blk in ids:
            take = min(channel.TRIAL_BLOCK, cap - blk * channel.TRIAL_BLOCK)
            args = (ctx, rho, blk, slice(0, take))
            jobs.append(pool.submit(_block_errors, *args) if pool is not None else args)
        # blocks are consumed in index order so the stopping point is worker-independent
        for job in jobs:
            errs = job.result() if pool is not None else _block_errors(*job)
            trials += errs.size
            errors += int(errs.sum())
            if cfg.target_bit_errors is not None and errors >= cfg.target_bit_errors:
                done = True
                break
        block = ids.stop
    if cfg.target_bit_errors is not None and errors < cfg.target_bit_errors:
        log.info("SNR %.2f dB: only %d bit errors in %d trials", snr_db, errors, trials)
    return BerRecord(
        snr_db=float(snr_db), receiver=cfg.receiver, code=cfg.code, M=cfg.M, N=cfg.N, L=cfg.L,
        trials=trials, bit_errors=errors, ber=errors / (trials * ctx.bits_per_trial), seed=cfg.master_seed,
        wallclock_seconds=time.perf_counter() - t0,
    )


def run_sweep(cfg: SimConfig) -> list[BerRecord]:
    """One :class:`BerRecord` per SNR grid point, in grid order."""
    cfg.validate()
    ctx = _Context(cfg)
    records = []
    pool = ThreadPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for snr_db in cfg.snr_db_grid:
            rec = _point(ctx, snr_db, pool)
            log.info("%s %s SNR %5.1f dB: %d errors / %d trials, BER %.3e",
                     cfg.code, cfg.receiver, snr_db, rec.bit_errors, rec.trials, rec.ber)
            records.append(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    return records


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, float) else str(v)


def format_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])
    return buf.getvalue()


def emit_csv(records, path) -> None:
    text = format_csv(records)
    try:
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc


def parse_csv(text: str) -> list[BerRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError("missing or unexpected CSV header")
    types = {f.name: f.type for f in fields(BerRecord)}
    out = []
    for row in rows[1:]:
        values = dict(zip(CSV_HEADER, row))
        kw = {}
        for k, v in values.items():
            t = types[k]
            kw[k] = float(v) if t in (float, "float") else int(v) if t in (int, "int") else v
        out.append(BerRecord(**kw))
    return out


def read_csv(path) -> list[BerRecord]:
    with open(path, encoding="ascii") as fh:
        return parse_csv(fh.read())


def emit_gnuplot(records, path) -> None:
    """Whitespace-separated ``snr_db ber`` columns with a comment header."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("# snr_db ber bit_errors trials\n")
        for r in records:
            fh.write(f"{r.snr_db!r} {r.ber!r} {r.bit_errors} {r.trials}\n")
