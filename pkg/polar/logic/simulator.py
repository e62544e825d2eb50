"""Seeded Monte Carlo FER / complexity campaigns over SC, LSC and LCLSC.

Frame i of rate cell r always draws its info word and channel noise from
``frame_seed(master, r, i)``, so every decoder in a campaign sees the same
frames and results do not depend on the worker count: frames run in fixed
batches and the early stop is applied afterwards, in frame order.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np
from loguru import logger

from polar.logic.channels import ChannelModel, channel_llr, transmit
from polar.logic.codec import DecoderKind, decode_frame, encode, estimate_complexity
from polar.logic.construction import (
    CodeSpec,
    ReliabilityMode,
    construct_code,
    k_for_rate,
    ml_fer_lower_bound,
    sc_fer_upper_bound,
)

Z_95 = 1.96
LOW_CONFIDENCE_ERRORS = 20
BATCH_FRAMES_PER_WORKER = 16

# 1/16 to 1/2 in steps of 1/16.
DEFAULT_RATES = tuple(step / 16 for step in range(1, 9))


class CampaignGridError(ValueError):
    """Two result sets that do not come from the same campaign grid."""


@dataclass(frozen=True)
class CampaignConfig:
    channel: ChannelModel
    N: int
    ks: tuple[int, ...]
    decoders: tuple[DecoderKind, ...]
    list_size: int = 16
    reliability: ReliabilityMode = field(default_factory=ReliabilityMode)
    trials: int = 10_000
    min_errors: int = 100
    seed: int = 0
    workers: int = 1
    keep_traces: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.min_errors < 0:
            raise ValueError("min_errors must be non-negative")
        if not self.decoders:
            raise ValueError("at least one decoder is required")
        if self.list_size < 1:
            raise ValueError("list_size must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not self.ks:
            raise ValueError("at least one code dimension is required")
        for k in self.ks:
            if not 1 <= k <= self.N:
                raise ValueError(f"k={k} outside [1, {self.N}]")

    @classmethod
    def from_rates(cls, channel: ChannelModel, N: int, rates: Sequence[float], **kwargs) -> CampaignConfig:
        return cls(channel=channel, N=N, ks=tuple(k_for_rate(r, N) for r in rates), **kwargs)


@dataclass(frozen=True, slots=True)
class TrialResult:
    frame_index: int
    frame_error: bool
    lr_calls: int
    sc_mode_bits: int
    mode_trace: str = ""


@dataclass(frozen=True)
class CellStats:
    """Aggregate of one (decoder, rate) cell."""

    decoder: DecoderKind
    channel: str
    N: int
    k: int
    list_size: int
    frames: int
    errors: int
    fer: float
    fer_ci: float
    mean_lr_calls: float
    lr_calls_std: float
    mean_m: float
    predicted_lr_calls: float
    prediction_gap: float
    ml_lower: float
    union_upper: float
    seed: int

    @property
    def rate(self) -> float:
        return self.k / self.N


@dataclass(frozen=True)
class CampaignStats:
    config: CampaignConfig
    cells: tuple[CellStats, ...]
    traces: dict[tuple[DecoderKind, int], tuple[TrialResult, ...]] = field(default_factory=dict)

    def for_decoder(self, decoder: DecoderKind | str) -> tuple[CellStats, ...]:
        decoder = DecoderKind(decoder)
        return tuple(cell for cell in self.cells if cell.decoder is decoder)


@dataclass(frozen=True)
class DeltaRow:
    """Paired comparison of decoder A against decoder B at one rate."""

    decoder_a: DecoderKind
    decoder_b: DecoderKind
    k: int
    N: int
    fer_ratio: float
    fer_ratio_low: float
    fer_ratio_high: float
    complexity_ratio: float
    complexity_low: float
    complexity_high: float
    low_confidence: bool


def frame_seed(master_seed: int, rate_index: int, frame_index: int) -> np.random.SeedSequence:
    """Counter-based split of the master seed; independent of decoder and worker."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(rate_index, frame_index))


def frame_rng(master_seed: int, rate_index: int, frame_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(frame_seed(master_seed, rate_index, frame_index)))


def draw_frame(code: CodeSpec, channel: ChannelModel, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Random info word and the channel LLRs of its codeword."""
    info = rng.integers(0, 2, size=code.k, dtype=np.uint8)
    u = np.zeros(code.N, dtype=np.uint8)
    u[code.info_set] = info
    received = transmit(encode(u), channel, rng)
    return info, channel_llr(received, channel)


def run_trial(
    code: CodeSpec,
    channel: ChannelModel,
    decoder: DecoderKind | str,
    list_size: int,
    trial_seed: np.random.SeedSequence,
    frame_index: int = 0,
    keep_trace: bool = False,
) -> TrialResult:
    rng = np.random.Generator(np.random.Philox(trial_seed))
    info, llr = draw_frame(code, channel, rng)
    outcome = decode_frame(decoder, llr, code, list_size)
    return TrialResult(
        frame_index=frame_index,
        frame_error=not np.array_equal(outcome.info_bits, info),
        lr_calls=outcome.lr_calls,
        sc_mode_bits=outcome.sc_mode_bits,
        mode_trace=outcome.mode_trace if keep_trace else "",
    )


def _run_frames(args) -> list[TrialResult]:
    code, channel, decoder, list_size, master_seed, rate_index, frames, keep_trace = args
    return [
        run_trial(
            code,
            channel,
            decoder,
            list_size,
            frame_seed(master_seed, rate_index, frame),
            frame_index=frame,
            keep_trace=keep_trace,
        )
        for frame in frames
    ]


@dataclass
class _CellAccumulator:
    frames: int = 0
    errors: int = 0
    lr_sum: float = 0.0
    lr_sq_sum: float = 0.0
    m_sum: float = 0.0
    kept: list[TrialResult] = field(default_factory=list)

    def add(self, result: TrialResult, keep: bool) -> None:
        self.frames += 1
        self.errors += int(result.frame_error)
        self.lr_sum += result.lr_calls
        self.lr_sq_sum += float(result.lr_calls) ** 2
        self.m_sum += result.sc_mode_bits
        if keep:
            self.kept.append(result)

    def finish(self, cfg: CampaignConfig, code: CodeSpec, decoder: DecoderKind) -> CellStats:
        frames = self.frames
        fer = self.errors / frames
        mean_lr = self.lr_sum / frames
        variance = max(self.lr_sq_sum / frames - mean_lr**2, 0.0)
        mean_m = self.m_sum / frames
        estimate = estimate_complexity(min(mean_m, code.k), code.k, code.N, cfg.list_size)
        return CellStats(
            decoder=decoder,
            channel=cfg.channel.label,
            N=code.N,
            k=code.k,
            list_size=cfg.list_size,
            frames=frames,
            errors=self.errors,
            fer=fer,
            fer_ci=Z_95 * math.sqrt(fer * (1.0 - fer) / frames),
            mean_lr_calls=mean_lr,
            lr_calls_std=math.sqrt(variance),
            mean_m=mean_m,
            predicted_lr_calls=estimate,
            prediction_gap=abs(mean_lr - estimate) / estimate,
            ml_lower=ml_fer_lower_bound(code.z_info),
            union_upper=sc_fer_upper_bound(code.z_info),
            seed=cfg.seed,
        )


MapFn = Callable[[Callable, list], list]


def _run_cell(
    cfg: CampaignConfig,
    code: CodeSpec,
    rate_index: int,
    decoder: DecoderKind,
    map_fn: MapFn,
) -> tuple[CellStats, tuple[TrialResult, ...]]:
    acc = _CellAccumulator()
    batch = BATCH_FRAMES_PER_WORKER * max(cfg.workers, 1)
    next_frame = 0
    done = False
    while not done and next_frame < cfg.trials:
        stop = min(next_frame + batch, cfg.trials)
        chunks = [
            range(start, min(start + BATCH_FRAMES_PER_WORKER, stop))
            for start in range(next_frame, stop, BATCH_FRAMES_PER_WORKER)
        ]
        jobs = [
            (code, cfg.channel, decoder, cfg.list_size, cfg.seed, rate_index, chunk, cfg.keep_traces)
            for chunk in chunks
        ]
        for results in map_fn(_run_frames, jobs):
            for result in results:
                if done:
                    break
                acc.add(result, cfg.keep_traces)
                done = cfg.min_errors > 0 and acc.errors >= cfg.min_errors
        next_frame = stop
    stats = acc.finish(cfg, code, decoder)
    logger.info(
        "cell_done decoder={} k={} frames={} errors={} fer={} mean_lr_calls={}",
        decoder.value,
        code.k,
        stats.frames,
        stats.errors,
        stats.fer,
        stats.mean_lr_calls,
    )
    return stats, tuple(acc.kept)


def build_codes(cfg: CampaignConfig) -> list[CodeSpec]:
    return [construct_code(cfg.channel, cfg.N, k, cfg.reliability) for k in cfg.ks]


def run_campaign(cfg: CampaignConfig) -> CampaignStats:
    """Run every (decoder, rate) cell until ``trials`` or ``min_errors`` is reached."""
    codes = build_codes(cfg)
    logger.info(
        "campaign_start channel={} N={} ks={} decoders={} L={} seed={} workers={}",
        cfg.channel.label,
        cfg.N,
        list(cfg.ks),
        [d.value for d in cfg.decoders],
        cfg.list_size,
        cfg.seed,
        cfg.workers,
    )
    cells: list[CellStats] = []
    traces: dict[tuple[DecoderKind, int], tuple[TrialResult, ...]] = {}

    def run_all(map_fn: MapFn) -> None:
        for rate_index, code in enumerate(codes):
            for decoder in cfg.decoders:
                stats, kept = _run_cell(cfg, code, rate_index, DecoderKind(decoder), map_fn)
                cells.append(stats)
                if cfg.keep_traces:
                    traces[(stats.decoder, code.k)] = kept

    if cfg.workers > 1:
        with Pool(processes=cfg.workers) as pool:
            run_all(pool.map)
    else:
        run_all(lambda fn, jobs: map(fn, jobs))
    return CampaignStats(config=cfg, cells=tuple(cells), traces=traces)


def _log_ratio_interval(ratio: float, variance: float) -> tuple[float, float]:
    if not math.isfinite(ratio) or ratio <= 0.0 or not math.isfinite(variance):
        return (math.nan, math.nan)
    spread = Z_95 * math.sqrt(variance)
    return (ratio * math.exp(-spread), ratio * math.exp(spread))


def _fer_ratio(a: CellStats, b: CellStats) -> tuple[float, float, float]:
    if b.fer == 0.0:
        ratio = 1.0 if a.fer == 0.0 else math.inf
        return ratio, math.nan, math.nan
    ratio = a.fer / b.fer
    if a.fer == 0.0:
        return ratio, math.nan, math.nan
    variance = (1.0 - a.fer) / (a.frames * a.fer) + (1.0 - b.fer) / (b.frames * b.fer)
    low, high = _log_ratio_interval(ratio, variance)
    return ratio, low, high


def _complexity_ratio(a: CellStats, b: CellStats) -> tuple[float, float, float]:
    ratio = a.mean_lr_calls / b.mean_lr_calls
    variance = (a.lr_calls_std / a.mean_lr_calls) ** 2 / a.frames + (b.lr_calls_std / b.mean_lr_calls) ** 2 / b.frames
    low, high = _log_ratio_interval(ratio, variance)
    return ratio, low, high


def paired_delta(cells_a: Sequence[CellStats], cells_b: Sequence[CellStats]) -> list[DeltaRow]:
    """FER and complexity ratios A/B per rate, with 95% log-normal intervals."""
    if len(cells_a) != len(cells_b):
        raise CampaignGridError("the two result sets cover different numbers of rates")
    rows = []
    for a, b in zip(cells_a, cells_b):
        if (a.N, a.k, a.channel, a.seed, a.list_size) != (b.N, b.k, b.channel, b.seed, b.list_size):
            raise CampaignGridError(f"cells differ: {a.channel} N={a.N} k={a.k} vs {b.channel} N={b.N} k={b.k}")
        fer_ratio, fer_low, fer_high = _fer_ratio(a, b)
        cx_ratio, cx_low, cx_high = _complexity_ratio(a, b)
        rows.append(
            DeltaRow(
                decoder_a=a.decoder,
                decoder_b=b.decoder,
                k=a.k,
                N=a.N,
                fer_ratio=fer_ratio,
                fer_ratio_low=fer_low,
                fer_ratio_high=fer_high,
                complexity_ratio=cx_ratio,
                complexity_low=cx_low,
                complexity_high=cx_high,
                low_confidence=min(a.errors, b.errors) < LOW_CONFIDENCE_ERRORS,
            )
        )
    return rows
