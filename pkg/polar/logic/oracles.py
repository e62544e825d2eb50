"""Exhaustive reference computations for short codes (N <= 16).

Everything here enumerates codewords or erasure patterns directly from the
channel law and the generator matrix, independently of the decoder's
LLR recursions.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.special import logsumexp

from polar.logic.channels import ChannelModel, ChannelOutput, channel_log_likelihood
from polar.logic.codec import encode
from polar.logic.construction import CodeSpec

MAX_EXHAUSTIVE_LENGTH = 16


def all_inputs(N: int) -> np.ndarray:
    """Every u in {0,1}^N as rows, u_0 as the most significant bit."""
    if N > MAX_EXHAUSTIVE_LENGTH:
        raise ValueError(f"exhaustive enumeration is limited to N <= {MAX_EXHAUSTIVE_LENGTH}")
    return np.array(list(itertools.product((0, 1), repeat=N)), dtype=np.uint8)


def _support_masks(codewords: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(codewords.shape[1], dtype=np.int64)
    return codewords.astype(np.int64) @ weights


def genie_erasure_probabilities(epsilon: float, n: int) -> np.ndarray:
    """Exact genie-aided SC erasure probability of each BEC subchannel.

    With the all-zero codeword sent and u_0..u_{i-1} revealed, u_i stays
    erased exactly when some u with that prefix and u_i = 1 encodes to a
    codeword supported inside the erased positions.
    """
    N = 1 << n
    if N > 8:
        raise ValueError("erasure-pattern enumeration is limited to N <= 8")
    inputs = all_inputs(N)
    supports = _support_masks(encode(inputs))
    patterns = np.arange(1 << N, dtype=np.int64)
    erased_count = np.array([bin(int(p)).count("1") for p in patterns])
    weight = epsilon**erased_count * (1.0 - epsilon) ** (N - erased_count)

    probabilities = np.empty(N)
    for i in range(N):
        prefix_zero = ~inputs[:, :i].any(axis=1) if i else np.ones(len(inputs), dtype=bool)
        witnesses = supports[prefix_zero & (inputs[:, i] == 1)]
        hidden = ((witnesses[None, :] & ~patterns[:, None]) == 0).any(axis=1)
        probabilities[i] = float(weight[hidden].sum())
    return probabilities


def _codebook_log_likelihood(y: ChannelOutput, ch: ChannelModel, inputs: np.ndarray) -> np.ndarray:
    table = channel_log_likelihood(y, ch)
    codewords = encode(inputs)
    columns = np.arange(table.shape[0])
    return table[columns, codewords].sum(axis=1)


def log_transition(u, y: ChannelOutput, ch: ChannelModel) -> float:
    """ln W_N(y | u), the product of per-use channel likelihoods."""
    u = np.asarray(u, dtype=np.uint8).reshape(1, -1)
    return float(_codebook_log_likelihood(y, ch, u)[0])


def ml_decode(y: ChannelOutput, ch: ChannelModel, code: CodeSpec) -> tuple[np.ndarray, float]:
    """Exhaustive ML over the 2^k info words; returns (best info bits, max ln W_N)."""
    if code.k > MAX_EXHAUSTIVE_LENGTH:
        raise ValueError(f"exhaustive ML is limited to k <= {MAX_EXHAUSTIVE_LENGTH}")
    words = all_inputs(code.k)
    inputs = np.zeros((len(words), code.N), dtype=np.uint8)
    inputs[:, code.info_set] = words
    scores = _codebook_log_likelihood(y, ch, inputs)
    best = int(np.argmax(scores))
    return words[best], float(scores[best])


class PosteriorTable:
    """ln W_N(y|u) for every u in {0,1}^N, for prefix posteriors by summation."""

    def __init__(self, y: ChannelOutput, ch: ChannelModel):
        self.inputs = all_inputs(len(y))
        self.log_likelihood = _codebook_log_likelihood(y, ch, self.inputs)
        self.log_evidence = float(logsumexp(self.log_likelihood))

    def _matching(self, prefix) -> np.ndarray:
        prefix = np.asarray(prefix, dtype=np.uint8)
        if prefix.size == 0:
            return np.ones(len(self.inputs), dtype=bool)
        return (self.inputs[:, : prefix.size] == prefix).all(axis=1)

    def prefix_log_probability(self, prefix) -> float:
        """ln P(u_0..u_{i} = prefix | y) under a uniform prior on all of u."""
        selected = self.log_likelihood[self._matching(prefix)]
        return float(logsumexp(selected)) - self.log_evidence

    def leaf_llr(self, prefix) -> float:
        """Exact LLR of the next bit given the decided prefix."""
        prefix = list(np.asarray(prefix, dtype=np.uint8))
        zero = float(logsumexp(self.log_likelihood[self._matching(prefix + [0])]))
        one = float(logsumexp(self.log_likelihood[self._matching(prefix + [1])]))
        if zero == one:
            return 0.0
        return zero - one


def prefix_log_probability(prefix, y: ChannelOutput, ch: ChannelModel) -> float:
    return PosteriorTable(y, ch).prefix_log_probability(prefix)


def brute_force_sc(y: ChannelOutput, ch: ChannelModel, code: CodeSpec, tie_tolerance: float = 1e-9) -> np.ndarray:
    """SC whose every decision comes from summing W_N over all completions."""
    table = PosteriorTable(y, ch)
    decided: list[int] = []
    for i in range(code.N):
        if code.frozen_mask[i]:
            decided.append(0)
            continue
        llr = table.leaf_llr(decided)
        decided.append(0 if llr >= -tie_tolerance else 1)
    return np.array(decided, dtype=np.uint8)[code.info_set]
