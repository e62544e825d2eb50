"""Embedded oracle suite run by ``manage.py selftest``.

Each check compares the decoders against exhaustive references on short
codes, or checks an exact counting identity. ``fault="f_combine"`` swaps the
exact f-combine for min-sum so the suite can prove that it catches a broken
kernel.
"""

from __future__ import annotations

import time
from collections.abc import Callable
from contextlib import nullcontext
from dataclasses import dataclass, field
from unittest import mock

import numpy as np
from loguru import logger

from polar.logic import codec
from polar.logic.channels import ChannelModel, channel_llr, transmit
from polar.logic.codec import decode_sc_prefix, encode, lclsc_decode, lsc_decode, sc_decode
from polar.logic.construction import CodeSpec, construct_code, evolve_bhattacharyya, verify_split
from polar.logic.oracles import (
    PosteriorTable,
    all_inputs,
    brute_force_sc,
    genie_erasure_probabilities,
    log_transition,
    ml_decode,
)

SELFTEST_SEED = 20140601
FAULTS = ("f_combine",)


@dataclass(frozen=True, slots=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


@dataclass
class SelftestReport:
    fault: str | None = None
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [check for check in self.checks if not check.passed]


def min_sum_f(l1, l2, counter=None):
    """Approximate f-combine; exact only on the BEC."""
    a = np.asarray(l1, dtype=float)
    b = np.asarray(l2, dtype=float)
    out = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    if counter is not None:
        counter.charge(out.size)
    return float(out) if out.ndim == 0 else out


def _frame(code: CodeSpec, channel: ChannelModel, rng: np.random.Generator):
    u = np.zeros(code.N, dtype=np.uint8)
    u[code.info_set] = rng.integers(0, 2, size=code.k, dtype=np.uint8)
    y = transmit(encode(u), channel, rng)
    return u, y, channel_llr(y, channel)


def _close(x: float, y: float, tol: float = 1e-9) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def check_involution() -> str | None:
    for N in (2, 4, 8, 16):
        inputs = all_inputs(N)
        if not np.array_equal(encode(encode(inputs)), inputs):
            return f"encode is not an involution at N={N}"
    return None


def check_bec_construction() -> str | None:
    expected = genie_erasure_probabilities(0.4, 3)
    z = evolve_bhattacharyya(0.4, 3)
    if not np.allclose(z, expected, rtol=1e-12, atol=0.0):
        return f"Z={z.tolist()} but genie erasure probabilities are {expected.tolist()}"
    return None


def check_sc_counts(rng: np.random.Generator) -> str | None:
    channel = ChannelModel.bec(0.4)
    code = construct_code(channel, 512, 256)
    for frame in range(20):
        _, _, llr = _frame(code, channel, rng)
        calls = sc_decode(llr, code).lr_calls
        if calls != 5120:
            return f"frame {frame}: SC reported {calls} LR calculations, expected 5120"
    for frame in range(3):
        _, _, llr = _frame(code, channel, rng)
        calls = lsc_decode(llr, code, 16).lr_calls
        if calls > 16 * 5120:
            return f"frame {frame}: LSC(16) reported {calls} LR calculations, above {16 * 5120}"
    return None


def check_sc_posterior(rng: np.random.Generator) -> str | None:
    for channel in (ChannelModel.bec(0.4), ChannelModel.bawgn(0.97865)):
        code = construct_code(channel, 8, 4)
        for frame in range(40):
            _, y, llr = _frame(code, channel, rng)
            decoded = sc_decode(llr, code).info_bits
            u = np.zeros(code.N, dtype=np.uint8)
            u[code.info_set] = decoded
            if log_transition(u, y, channel) == -np.inf:
                # a wrong erasure guess made a later frozen bit impossible
                continue
            reference = brute_force_sc(y, channel, code)
            if not np.array_equal(decoded, reference):
                return f"{channel.label} frame {frame}: SC gave {decoded.tolist()}, exhaustive SC {reference.tolist()}"
    return None


def check_ml_metric(rng: np.random.Generator) -> str | None:
    channel = ChannelModel.bsc(0.11)
    code = construct_code(channel, 8, 4)
    for frame in range(100):
        _, y, llr = _frame(code, channel, rng)
        outcome = lsc_decode(llr, code, 1 << code.k)
        _, best = ml_decode(y, channel, code)
        if not _close(outcome.path_metric, best):
            return f"frame {frame}: best path metric {outcome.path_metric!r}, ML maximum {best!r}"
    return None


def check_path_scores(rng: np.random.Generator) -> str | None:
    for channel in (ChannelModel.bawgn(0.97865), ChannelModel.bsc(0.11)):
        code = construct_code(channel, 8, 4)
        for frame in range(20):
            _, y, llr = _frame(code, channel, rng)
            table = PosteriorTable(y, channel)
            outcome = lsc_decode(llr, code, 1 << code.k)
            for bits, metric in zip(outcome.list_info_bits, outcome.list_metrics):
                u = np.zeros(code.N, dtype=np.uint8)
                u[code.info_set] = bits
                exact = table.prefix_log_probability(u)
                if not _close(float(metric), exact):
                    return f"{channel.label} frame {frame}: path score {float(metric)!r}, exact {exact!r}"
    return None


def _mixed_codes() -> list[tuple[CodeSpec, ChannelModel]]:
    cases = []
    for channel in (ChannelModel.bec(0.4), ChannelModel.bsc(0.11), ChannelModel.bawgn(0.97865)):
        for N, k in ((16, 8), (64, 16), (64, 40)):
            cases.append((construct_code(channel, N, k), channel))
    return cases


def check_lclsc_dichotomy(rng: np.random.Generator, list_size: int = 4) -> str | None:
    for code, channel in _mixed_codes():
        problems = verify_split(code)
        if problems:
            return f"{channel.label} N={code.N} k={code.k}: {problems[0]}"
        for frame in range(15):
            _, _, llr = _frame(code, channel, rng)
            outcome = lclsc_decode(llr, code, list_size)
            m = outcome.sc_mode_bits
            if m == code.k:
                replay = sc_decode(llr, code)
            else:
                replay = lsc_decode(llr, code, list_size, start=decode_sc_prefix(llr, code, m))
            if not np.array_equal(outcome.info_bits, replay.info_bits) or outcome.lr_calls != replay.lr_calls:
                return f"{channel.label} N={code.N} k={code.k} frame {frame}: trace replay disagrees"
    return None


def check_complexity_sandwich(rng: np.random.Generator, list_size: int = 4) -> str | None:
    for code, channel in _mixed_codes():
        for frame in range(10):
            _, _, llr = _frame(code, channel, rng)
            sc = sc_decode(llr, code).lr_calls
            lc = lclsc_decode(llr, code, list_size).lr_calls
            ls = lsc_decode(llr, code, list_size).lr_calls
            if not sc <= lc <= ls:
                return f"{channel.label} N={code.N} k={code.k} frame {frame}: SC={sc} LCLSC={lc} LSC={ls}"
    return None


def _checks(rng: np.random.Generator) -> list[tuple[str, Callable[[], str | None]]]:
    return [
        ("encoder_involution", check_involution),
        ("bec_construction_oracle", check_bec_construction),
        ("sc_count_exactness", lambda: check_sc_counts(rng)),
        ("sc_posterior_oracle", lambda: check_sc_posterior(rng)),
        ("ml_metric_oracle", lambda: check_ml_metric(rng)),
        ("path_score_correctness", lambda: check_path_scores(rng)),
        ("lclsc_dichotomy", lambda: check_lclsc_dichotomy(rng)),
        ("complexity_sandwich", lambda: check_complexity_sandwich(rng)),
    ]


def run_selftest(fault: str | None = None, seed: int = SELFTEST_SEED) -> SelftestReport:
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {', '.join(FAULTS)}")
    report = SelftestReport(fault=fault)
    patch = mock.patch.object(codec, "f_combine", min_sum_f) if fault == "f_combine" else nullcontext()
    rng = np.random.default_rng(seed)
    with patch:
        for name, check in _checks(rng):
            started = time.perf_counter()
            try:
                problem = check()
            except Exception as exc:
                logger.exception(f"Selftest check {name} raised")
                problem = f"raised {type(exc).__name__}: {exc}"
            elapsed = time.perf_counter() - started
            report.checks.append(CheckResult(name, problem is None, problem or "ok", elapsed))
            logger.info("selftest_check name={} passed={} seconds={:.3f}", name, problem is None, elapsed)
    return report
