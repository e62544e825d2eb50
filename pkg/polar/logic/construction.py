"""Polar code construction: Bhattacharyya evolution, information set and thresholds.

Subchannels are indexed 0..N-1 in natural order, matching the
``G_2^{(x)n}`` encoder without bit reversal; the first level of the
recursion acts on the most significant index bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property

import numpy as np
from loguru import logger

from polar.logic.channels import ChannelModel, initial_bhattacharyya

# Largest p_i used in lower-bound mode; keeps tau_i finite for Z_i = 0.
MAX_TARGET = 1.0 - 1e-12


class CodeConstructionError(ValueError):
    """Invalid code dimensions or threshold parameters."""


class TargetMode(StrEnum):
    LOWER_BOUND = "lower_bound"
    FIXED = "fixed"


@dataclass(frozen=True, slots=True)
class ReliabilityMode:
    """How the per-bit correct-decoding targets p_i are chosen."""

    mode: TargetMode = TargetMode.FIXED
    value: float | None = 0.9

    def __post_init__(self):
        mode = TargetMode(self.mode)
        object.__setattr__(self, "mode", mode)
        if mode is TargetMode.FIXED:
            if self.value is None or not 0.5 < float(self.value) < 1.0:
                raise CodeConstructionError(f"fixed target must lie in (1/2, 1), got {self.value}")
            object.__setattr__(self, "value", float(self.value))
        else:
            object.__setattr__(self, "value", None)

    @classmethod
    def lower_bound(cls) -> ReliabilityMode:
        return cls(TargetMode.LOWER_BOUND, None)

    @classmethod
    def fixed(cls, value: float) -> ReliabilityMode:
        return cls(TargetMode.FIXED, value)

    @property
    def label(self) -> str:
        if self.mode is TargetMode.FIXED:
            return f"fixed({self.value!r})"
        return self.mode.value


@dataclass(frozen=True, eq=False)
class CodeSpec:
    """An (N, k) polar code together with its LCLSC thresholds.

    ``info_set`` is in decoding order (ascending index); ``a`` counts the
    "bad" information bits, which occupy decoding positions 1..a.
    """

    N: int
    k: int
    z: np.ndarray
    info_set: np.ndarray
    frozen_mask: np.ndarray
    z_th: float
    a: int
    p: np.ndarray
    tau: np.ndarray
    channel: ChannelModel | None = None
    reliability: ReliabilityMode = field(default_factory=ReliabilityMode)

    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    @property
    def rate(self) -> float:
        return self.k / self.N

    @cached_property
    def z_info(self) -> np.ndarray:
        return self.z[self.info_set]

    @cached_property
    def decoding_position(self) -> np.ndarray:
        """Per subchannel: 0-based position among info bits, -1 when frozen."""
        positions = np.full(self.N, -1, dtype=np.int64)
        positions[self.info_set] = np.arange(self.k)
        return positions


def _check_length(N: int) -> int:
    if isinstance(N, bool) or int(N) != N or N < 2 or (int(N) & (int(N) - 1)) != 0:
        raise CodeConstructionError("N must be a power of two")
    return int(N)


def evolve_bhattacharyya(z0: float, n: int) -> np.ndarray:
    """Z values of all 2**n synthetic subchannels (exact for the BEC)."""
    if not 0.0 <= z0 <= 1.0:
        raise CodeConstructionError(f"initial Z must lie in [0, 1], got {z0}")
    if n < 1:
        raise CodeConstructionError("n must be at least 1")
    z = np.array([float(z0)])
    for _ in range(n):
        evolved = np.empty(2 * z.size)
        # Child 2j is the degraded (minus) channel, 2j+1 the upgraded one.
        evolved[0::2] = 2.0 * z - z * z
        evolved[1::2] = z * z
        z = np.clip(evolved, 0.0, 1.0)
    return z


def select_information_set(z, k: int) -> tuple[np.ndarray, np.ndarray]:
    """The k smallest-Z indices (ties to the lower index), plus the frozen mask."""
    z = np.asarray(z, dtype=float)
    if not 1 <= k <= z.size:
        raise CodeConstructionError(f"k must lie in [1, {z.size}], got {k}")
    order = np.argsort(z, kind="stable")
    info_set = np.sort(order[:k])
    frozen_mask = np.ones(z.size, dtype=bool)
    frozen_mask[info_set] = False
    return info_set, frozen_mask


def bit_error_bounds(z) -> tuple[np.ndarray, np.ndarray]:
    """ML bit error probability bounds ½(1 − √(1 − Z²)) ≤ Pe ≤ ½Z."""
    z = np.asarray(z, dtype=float)
    lower = 0.5 * (1.0 - np.sqrt(np.clip(1.0 - z * z, 0.0, 1.0)))
    return lower, 0.5 * z


def ml_fer_lower_bound(z_info) -> float:
    lower, _ = bit_error_bounds(z_info)
    return float(-np.expm1(np.sum(np.log1p(-lower))))


def sc_fer_upper_bound(z_info) -> float:
    # Union bound; may exceed 1.
    return float(np.sum(np.asarray(z_info, dtype=float)))


def compute_z_threshold(z_info) -> float:
    z_info = np.asarray(z_info, dtype=float)
    if z_info.size < 1:
        raise CodeConstructionError("at least one information bit is required")
    return ml_fer_lower_bound(z_info) / z_info.size


def compute_split_index(z_info_in_decoding_order, z_th: float) -> int:
    """Largest 1-based decoding position whose Z exceeds z_th (at least 1)."""
    z = np.asarray(z_info_in_decoding_order, dtype=float)
    if z.size < 1:
        raise CodeConstructionError("at least one information bit is required")
    above = np.flatnonzero(z > z_th)
    if above.size == 0:
        return 1
    return int(above[-1]) + 1


def reliability_targets(z_info, mode: ReliabilityMode) -> np.ndarray:
    z_info = np.asarray(z_info, dtype=float)
    if mode.mode is TargetMode.FIXED:
        return np.full(z_info.size, mode.value)
    return np.minimum(1.0 - z_info / 2.0, MAX_TARGET)


def llr_threshold(p_i) -> np.ndarray | float:
    """tau_i = ln(p_i / (1 - p_i))."""
    p = np.asarray(p_i, dtype=float)
    if np.any(p < 0.5) or np.any(p >= 1.0):
        raise CodeConstructionError("p_i must lie in [1/2, 1)")
    tau = np.log(p) - np.log1p(-p)
    # p = 1/2 must give exactly 0
    tau = np.where(p == 0.5, 0.0, tau)
    return float(tau) if tau.ndim == 0 else tau


def lr_is_reliable(lr: float, p_i: float) -> bool:
    """Two-branch LR-domain reliability rule."""
    if lr > 1.0:
        return lr > p_i / (1.0 - p_i)
    if lr < 1.0:
        return lr < (1.0 - p_i) / p_i
    return False


def llr_is_reliable(llr: float, tau_i: float) -> bool:
    return abs(llr) > tau_i


def classify_subchannels(code: CodeSpec) -> tuple[bool, ...]:
    """Per info bit in decoding order: True for a "good" subchannel.

    A subchannel is good when its Z and the Z of every later information bit
    are at most z_th.
    """
    good = []
    tail_ok = True
    for value in code.z_info[::-1]:
        tail_ok = tail_ok and value <= code.z_th
        good.append(tail_ok)
    return tuple(reversed(good))


def verify_split(code: CodeSpec) -> list[str]:
    """Return every violated split / threshold invariant (empty when consistent)."""
    problems = []
    z_info = code.z_info
    if not 1 <= code.a <= code.k:
        problems.append(f"a={code.a} outside [1, {code.k}]")
    if np.any(z_info[code.a:] > code.z_th):
        problems.append("an info bit after position a has Z above z_th")
    if np.any(z_info > code.z_th) and not z_info[code.a - 1] > code.z_th:
        problems.append("Z at position a does not exceed z_th")
    if sc_fer_upper_bound(z_info) < ml_fer_lower_bound(z_info):
        problems.append("union bound below the ML lower bound")
    if np.any(code.p < 0.5) or np.any(code.p >= 1.0):
        problems.append("a reliability target lies outside [1/2, 1)")
    if not np.all(np.isfinite(code.tau)) or np.any(code.tau < 0.0):
        problems.append("an LLR threshold is negative or infinite")
    return problems


def construct_code(
    channel: ChannelModel,
    N: int,
    k: int,
    reliability: ReliabilityMode | None = None,
) -> CodeSpec:
    """Build the (N, k) code for ``channel`` with every LCLSC threshold filled in."""
    N = _check_length(N)
    if isinstance(k, bool) or int(k) != k or not 1 <= k <= N:
        raise CodeConstructionError(f"k must lie in [1, {N}], got {k}")
    k = int(k)
    reliability = reliability or ReliabilityMode()

    z = evolve_bhattacharyya(initial_bhattacharyya(channel), N.bit_length() - 1)
    info_set, frozen_mask = select_information_set(z, k)
    z_info = z[info_set]
    z_th = compute_z_threshold(z_info)
    a = compute_split_index(z_info, z_th)
    p = reliability_targets(z_info, reliability)
    tau = np.asarray(llr_threshold(p), dtype=float).reshape(k)

    code = CodeSpec(
        N=N,
        k=k,
        z=z,
        info_set=info_set,
        frozen_mask=frozen_mask,
        z_th=z_th,
        a=a,
        p=p,
        tau=tau,
        channel=channel,
        reliability=reliability,
    )
    logger.debug(
        "code_constructed channel={} N={} k={} z_th={} a={} union={}",
        channel.label,
        N,
        k,
        z_th,
        a,
        sc_fer_upper_bound(z_info),
    )
    return code


def k_for_rate(rate: float, N: int) -> int:
    """k = round(rate * N), rejected when it falls outside [1, N]."""
    k = int(round(rate * N))
    if not 1 <= k <= N:
        raise CodeConstructionError(f"rate {rate} gives k={k} outside [1, {N}]")
    return k
