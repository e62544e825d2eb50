"""Binary-input channel models: transmission, LLR mapping and reliability figures.

LLR sign convention everywhere: ``ln W(y|0) / W(y|1)``, positive favors bit 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from loguru import logger
from scipy import integrate

ERASURE = 2


class ChannelParameterError(ValueError):
    """Channel parameter outside the open interval its kind allows."""


class ChannelAlphabetError(ValueError):
    """Channel output does not belong to the channel's symbol alphabet."""


class ChannelKind(StrEnum):
    BEC = "bec"
    BSC = "bsc"
    BAWGN = "bawgn"


# Config key that carries each kind's parameter.
PARAMETER_KEYS = {
    ChannelKind.BEC: "epsilon",
    ChannelKind.BSC: "p",
    ChannelKind.BAWGN: "sigma",
}

_NOISELESS_SIGMA = 1e-3


@dataclass(frozen=True, slots=True)
class ChannelModel:
    """A BEC(epsilon), BSC(p) or BPSK-BAWGN(sigma) channel.

    ``noiseless`` marks the closed-interval limit (epsilon = 0, p = 0) that the
    public constructors reject; only :meth:`noiseless_limit` builds it.
    """

    kind: ChannelKind
    param: float
    noiseless: bool = False

    def __post_init__(self):
        kind = ChannelKind(self.kind)
        object.__setattr__(self, "kind", kind)
        param = float(self.param)
        object.__setattr__(self, "param", param)
        if self.noiseless:
            return
        if math.isnan(param):
            raise ChannelParameterError(f"{kind.value} parameter must be a number")
        if kind is ChannelKind.BEC and not 0.0 < param < 1.0:
            raise ChannelParameterError(f"bec epsilon must lie in (0, 1), got {param}")
        if kind is ChannelKind.BSC and not 0.0 < param < 0.5:
            raise ChannelParameterError(f"bsc p must lie in (0, 1/2), got {param}")
        if kind is ChannelKind.BAWGN and not (param > 0.0 and math.isfinite(param)):
            raise ChannelParameterError(f"bawgn sigma must be positive, got {param}")

    @classmethod
    def bec(cls, epsilon: float) -> ChannelModel:
        return cls(ChannelKind.BEC, epsilon)

    @classmethod
    def bsc(cls, p: float) -> ChannelModel:
        return cls(ChannelKind.BSC, p)

    @classmethod
    def bawgn(cls, sigma: float) -> ChannelModel:
        return cls(ChannelKind.BAWGN, sigma)

    @classmethod
    def noiseless_limit(cls, kind: ChannelKind | str) -> ChannelModel:
        """Error-free member of a family (BAWGN uses a tiny sigma instead of 0)."""
        kind = ChannelKind(kind)
        if kind is ChannelKind.BAWGN:
            return cls(kind, _NOISELESS_SIGMA)
        return cls(kind, 0.0, noiseless=True)

    @property
    def label(self) -> str:
        return f"{self.kind.value}({self.param!r})"

    def as_config(self) -> dict:
        return {"kind": self.kind.value, PARAMETER_KEYS[self.kind]: self.param}


@dataclass(frozen=True, slots=True)
class ChannelOutput:
    """Received symbols tagged with the channel kind that produced them.

    BEC symbols are 0, 1 or ``ERASURE``; BSC symbols are 0 or 1; BAWGN
    symbols are real samples of ``1 - 2x + noise``.
    """

    kind: ChannelKind
    symbols: np.ndarray

    def __len__(self):
        return len(self.symbols)


def _as_bits(x) -> np.ndarray:
    bits = np.asarray(x)
    if bits.ndim != 1:
        raise ValueError("codeword must be a one-dimensional bit vector")
    if bits.size and not np.isin(bits, (0, 1)).all():
        raise ValueError("codeword must contain only 0 and 1")
    return bits.astype(np.uint8)


def transmit(x, ch: ChannelModel, rng: np.random.Generator) -> ChannelOutput:
    """Send ``x`` through ``ch``, one independent channel use per bit."""
    bits = _as_bits(x)
    n = bits.size
    if ch.kind is ChannelKind.BEC:
        erased = rng.random(n) < ch.param
        symbols = np.where(erased, ERASURE, bits).astype(np.uint8)
    elif ch.kind is ChannelKind.BSC:
        flipped = rng.random(n) < ch.param
        symbols = bits ^ flipped.astype(np.uint8)
    else:
        signal = 1.0 - 2.0 * bits
        symbols = signal + ch.param * rng.standard_normal(n)
    return ChannelOutput(ch.kind, symbols)


def _check_alphabet(y: ChannelOutput, ch: ChannelModel) -> np.ndarray:
    if ChannelKind(y.kind) is not ch.kind:
        raise ChannelAlphabetError(f"{y.kind} output cannot be read as {ch.kind.value}")
    symbols = np.asarray(y.symbols)
    if ch.kind is ChannelKind.BAWGN:
        if symbols.size and not np.isfinite(symbols).all():
            raise ChannelAlphabetError("bawgn output must be finite real samples")
        return symbols.astype(float)
    allowed = (0, 1, ERASURE) if ch.kind is ChannelKind.BEC else (0, 1)
    if symbols.size and not np.isin(symbols, allowed).all():
        raise ChannelAlphabetError(f"{ch.kind.value} output holds symbols outside {allowed}")
    return symbols.astype(np.uint8)


def bsc_reliability(p: float) -> float:
    """ln((1-p)/p), infinite at the noiseless limit."""
    if p == 0.0:
        return math.inf
    return math.log((1.0 - p) / p)


def channel_llr(y: ChannelOutput, ch: ChannelModel) -> np.ndarray:
    """Map received symbols to channel LLRs (extended reals, never NaN)."""
    symbols = _check_alphabet(y, ch)
    if ch.kind is ChannelKind.BEC:
        llr = np.zeros(symbols.size)
        llr[symbols == 0] = math.inf
        llr[symbols == 1] = -math.inf
        return llr
    if ch.kind is ChannelKind.BSC:
        magnitude = bsc_reliability(ch.param)
        return np.where(symbols == 0, magnitude, -magnitude)
    return 2.0 * symbols / ch.param**2


def channel_log_likelihood(y: ChannelOutput, ch: ChannelModel) -> np.ndarray:
    """Per-symbol ``[ln W(y|0), ln W(y|1)]`` rows; impossible outputs give -inf."""
    symbols = _check_alphabet(y, ch)
    table = np.empty((symbols.size, 2))
    with np.errstate(divide="ignore"):
        if ch.kind is ChannelKind.BEC:
            for bit in (0, 1):
                table[:, bit] = np.where(
                    symbols == ERASURE,
                    np.log(ch.param),
                    np.where(symbols == bit, np.log1p(-ch.param), -np.inf),
                )
        elif ch.kind is ChannelKind.BSC:
            for bit in (0, 1):
                table[:, bit] = np.where(symbols == bit, np.log1p(-ch.param), np.log(ch.param))
        else:
            norm = -0.5 * math.log(2.0 * math.pi * ch.param**2)
            for bit in (0, 1):
                table[:, bit] = norm - (symbols - (1.0 - 2.0 * bit)) ** 2 / (2.0 * ch.param**2)
    return table


def initial_bhattacharyya(ch: ChannelModel) -> float:
    """Bhattacharyya parameter Z(W) of the physical channel."""
    if ch.kind is ChannelKind.BEC:
        return ch.param
    if ch.kind is ChannelKind.BSC:
        return 2.0 * math.sqrt(ch.param * (1.0 - ch.param))
    return math.exp(-1.0 / (2.0 * ch.param**2))


def _binary_entropy(p: float) -> float:
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def capacity(ch: ChannelModel) -> float:
    """Capacity in bits per channel use (uniform input for BAWGN)."""
    if ch.kind is ChannelKind.BEC:
        return 1.0 - ch.param
    if ch.kind is ChannelKind.BSC:
        return 1.0 - _binary_entropy(ch.param)

    sigma = ch.param
    scale = 2.0 / sigma**2

    # Given x = +1: C = 1 - E[log2(1 + exp(-2y/sigma^2))], y ~ N(1, sigma^2).
    def integrand(y: float) -> float:
        density = math.exp(-((y - 1.0) ** 2) / (2.0 * sigma**2)) / (sigma * math.sqrt(2.0 * math.pi))
        return density * np.logaddexp(0.0, -scale * y) / math.log(2.0)

    span = 12.0 * sigma
    loss, abserr = integrate.quad(integrand, 1.0 - span, 1.0 + span, limit=200)
    logger.debug("bawgn_capacity sigma={} loss={} abserr={}", sigma, loss, abserr)
    return 1.0 - loss
