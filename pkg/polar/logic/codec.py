"""Polar encoder and the SC, list-SC and low-complexity list-SC decoders.

Decoders work on channel LLRs (extended reals) and charge one LR
calculation per channel LLR plus one per f/g evaluation, per path. The
list decoder copies path memory physically but charges only what a
lazy-copy implementation would compute, so with a single path every
decoder costs exactly ``N + N log2 N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from loguru import logger

from polar.logic.construction import CodeSpec

SC_MODE = "S"
LIST_MODE = "L"


class PathStateError(ValueError):
    """A list-decoding start path that does not fit the frame being decoded."""


class DecoderKind(StrEnum):
    SC = "sc"
    LSC = "lsc"
    LCLSC = "lclsc"


@dataclass
class LrCounter:
    """LR-calculation tally plus the count of +inf/-inf clashes folded to 0."""

    calls: int = 0
    contradictions: int = 0

    def charge(self, evaluations: int) -> None:
        self.calls += int(evaluations)


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def encode(u) -> np.ndarray:
    """x = u G_2^{(x)n} over GF(2), by butterflies, without bit reversal.

    Leading axes are batch axes; the last axis is the codeword.
    """
    x = np.array(u, dtype=np.uint8)
    if x.ndim < 1 or not _is_power_of_two(x.shape[-1]):
        raise ValueError("input length must be a power of two")
    lead = x.shape[:-1]
    half = 1
    while half < x.shape[-1]:
        blocks = x.reshape(lead + (-1, 2, half))
        # (a, b) -> (a xor b, b) on every block of width 2*half
        blocks[..., 0, :] ^= blocks[..., 1, :]
        half *= 2
    return x


def f_combine(l1, l2, counter: LrCounter | None = None):
    """Exact boxplus of two LLRs (elementwise for arrays)."""
    a = np.asarray(l1, dtype=float)
    b = np.asarray(l2, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        hard = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        finite = np.isfinite(a) & np.isfinite(b)
        total = np.where(finite, a + b, 0.0)
        diff = np.where(finite, a - b, 0.0)
        correction = np.log1p(np.exp(-np.abs(total))) - np.log1p(np.exp(-np.abs(diff)))
    out = hard + correction
    if counter is not None:
        counter.charge(out.size)
    return out if out.ndim else float(out)


def g_combine(l1, l2, b, counter: LrCounter | None = None):
    """l2 + (1 - 2b) l1, with +inf + -inf taken as 0."""
    a = np.asarray(l1, dtype=float)
    signed = np.where(np.asarray(b, dtype=bool), -a, a)
    with np.errstate(invalid="ignore"):
        out = np.asarray(l2, dtype=float) + signed
    clashes = np.isnan(out)
    if clashes.any():
        out = np.where(clashes, 0.0, out)
        clash_count = int(clashes.sum())
        if counter is not None:
            counter.contradictions += clash_count
        logger.debug("g_combine folded {} contradictory infinities to 0", clash_count)
    if counter is not None:
        counter.charge(out.size)
    return out if out.ndim else float(out)


def branch_log_probability(llr, bit):
    """ln P(u = bit) for a leaf LLR: -ln(1 + exp(-+llr))."""
    llr = np.asarray(llr, dtype=float)
    sign = 1.0 - 2.0 * np.asarray(bit, dtype=float)
    return -np.logaddexp(0.0, -sign * llr)


def hard_decision(llr):
    # LLR >= 0 decides 0, including the erasure tie at exactly 0.
    return (np.asarray(llr) < 0).astype(np.uint8)


def _trailing_zeros(i: int) -> int:
    return (i & -i).bit_length() - 1


@dataclass
class DecoderPath:
    """A single decoding hypothesis paused before leaf ``position``.

    ``llr_memory[d]`` holds the LLRs of the current node at depth d
    (depth 0 is the channel layer), ``partial_sums[d]`` the re-encoded bits
    of the last finished left sibling at depth d. ``leaf_ready`` says whether
    ``llr_memory[-1]`` already holds the LLR of leaf ``position``.
    """

    estimates: np.ndarray
    score: float
    llr_memory: list[np.ndarray]
    partial_sums: list[np.ndarray]
    position: int
    leaf_ready: bool = False
    score_offset: float = 0.0
    lr_calls: int = 0
    contradictions: int = 0
    mode_trace: str = ""


@dataclass(frozen=True, eq=False)
class DecodeOutcome:
    info_bits: np.ndarray
    lr_calls: int
    sc_mode_bits: int
    mode_trace: str
    path_metric: float
    list_info_bits: np.ndarray
    list_metrics: np.ndarray
    contradictions: int = 0


def count_lr_calls(outcome: DecodeOutcome) -> int:
    return outcome.lr_calls


def estimate_complexity(m: float, k: int, N: int, L: int) -> float:
    """Average LR calculations when m of k info bits are SC-decoded."""
    if not 0 <= m <= k:
        raise ValueError(f"m must lie in [0, {k}], got {m}")
    single = N + N * math.log2(N)
    return (m / k) * single + ((k - m) / k) * L * single


@dataclass
class _PathList:
    """Working memory of P decoding paths stacked along axis 0."""

    code: CodeSpec
    alpha: list[np.ndarray]
    beta: list[np.ndarray]
    estimates: np.ndarray
    scores: np.ndarray
    counter: LrCounter
    offset: float = 0.0
    trace: list[str] = field(default_factory=list)

    @classmethod
    def fresh(cls, code: CodeSpec, llr: np.ndarray, counter: LrCounter) -> _PathList:
        N, n = code.N, code.n
        counter.charge(N)
        alpha = [llr.reshape(1, N)] + [np.zeros((1, N >> d)) for d in range(1, n + 1)]
        beta = [np.zeros((1, N >> d), dtype=np.uint8) for d in range(n + 1)]
        return cls(
            code=code,
            alpha=alpha,
            beta=beta,
            estimates=np.zeros((1, N), dtype=np.uint8),
            scores=np.zeros(1),
            counter=counter,
        )

    @classmethod
    def resume(cls, code: CodeSpec, path: DecoderPath, counter: LrCounter) -> _PathList:
        return cls(
            code=code,
            alpha=[np.array(level, dtype=float).reshape(1, -1) for level in path.llr_memory],
            beta=[np.array(level, dtype=np.uint8).reshape(1, -1) for level in path.partial_sums],
            estimates=np.array(path.estimates, dtype=np.uint8).reshape(1, -1),
            scores=np.array([path.score], dtype=float),
            counter=counter,
            offset=path.score_offset,
            trace=list(path.mode_trace),
        )

    @property
    def size(self) -> int:
        return self.scores.size

    def leaf_llr(self, i: int) -> np.ndarray:
        """Bring every path's memory to leaf i and return the leaf LLRs."""
        n = self.code.n
        start = 1 if i == 0 else n - _trailing_zeros(i)
        for d in range(start, n + 1):
            parent = self.alpha[d - 1]
            half = parent.shape[1] // 2
            upper, lower = parent[:, :half], parent[:, half:]
            if (i >> (n - d)) & 1:
                self.alpha[d] = g_combine(upper, lower, self.beta[d], self.counter)
            else:
                self.alpha[d] = f_combine(upper, lower, self.counter)
        return self.alpha[n][:, 0]

    def commit(self, i: int, bits: np.ndarray, llr: np.ndarray) -> None:
        """Fix u_i on every path, score it and propagate partial sums."""
        n = self.code.n
        bits = np.asarray(bits, dtype=np.uint8)
        self.scores = self.scores + branch_log_probability(llr, bits)
        self.estimates[:, i] = bits
        current = bits.reshape(-1, 1)
        d = n
        while d > 0 and (i >> (n - d)) & 1:
            current = np.concatenate([self.beta[d] ^ current, current], axis=1)
            d -= 1
        if d > 0:
            self.beta[d] = current
        self._normalize()

    def select(self, rows: np.ndarray) -> None:
        self.alpha = [level[rows] for level in self.alpha]
        self.beta = [level[rows] for level in self.beta]
        self.estimates = self.estimates[rows]
        self.scores = self.scores[rows]

    def _normalize(self) -> None:
        best = float(np.max(self.scores))
        if math.isfinite(best):
            self.scores = self.scores - best
            self.offset += best

    def snapshot(self, row: int, position: int, leaf_ready: bool) -> DecoderPath:
        return DecoderPath(
            estimates=self.estimates[row].copy(),
            score=float(self.scores[row]),
            llr_memory=[level[row].copy() for level in self.alpha],
            partial_sums=[level[row].copy() for level in self.beta],
            position=position,
            leaf_ready=leaf_ready,
            score_offset=self.offset,
            lr_calls=self.counter.calls,
            contradictions=self.counter.contradictions,
            mode_trace="".join(self.trace),
        )

    def outcome(self) -> DecodeOutcome:
        info_set = self.code.info_set
        best = int(np.argmax(self.scores))
        list_info = self.estimates[:, info_set].copy()
        metrics = self.scores + self.offset
        trace = "".join(self.trace)
        return DecodeOutcome(
            info_bits=list_info[best].copy(),
            lr_calls=self.counter.calls,
            sc_mode_bits=trace.count(SC_MODE),
            mode_trace=trace,
            path_metric=float(metrics[best]),
            list_info_bits=list_info,
            list_metrics=metrics,
            contradictions=self.counter.contradictions,
        )


def _check_llr(llr, code: CodeSpec) -> np.ndarray:
    llr = np.asarray(llr, dtype=float)
    if llr.shape != (code.N,):
        raise ValueError(f"expected {code.N} channel LLRs, got shape {llr.shape}")
    if np.isnan(llr).any():
        raise ValueError("channel LLRs must not be NaN")
    return llr


def _sc_step(paths: _PathList, i: int, llr: np.ndarray) -> None:
    code = paths.code
    if code.frozen_mask[i]:
        paths.commit(i, np.zeros(paths.size, dtype=np.uint8), llr)
        return
    paths.commit(i, hard_decision(llr), llr)
    paths.trace.append(SC_MODE)


def sc_decode(llr, code: CodeSpec) -> DecodeOutcome:
    """Successive cancellation: hard decision at every information leaf."""
    llr = _check_llr(llr, code)
    paths = _PathList.fresh(code, llr, LrCounter())
    for i in range(code.N):
        _sc_step(paths, i, paths.leaf_llr(i))
    return paths.outcome()


def _validate_start(start: DecoderPath, llr: np.ndarray, code: CodeSpec) -> None:
    N, n = code.N, code.n
    estimates = np.asarray(start.estimates)
    if estimates.shape != (N,):
        raise PathStateError(f"start path holds {estimates.size} estimates, expected {N}")
    if not 0 <= start.position < N:
        raise PathStateError(f"start position {start.position} outside [0, {N})")
    if np.any(estimates[code.frozen_mask] != 0):
        raise PathStateError("start path has a non-zero frozen bit")
    if np.any(estimates[start.position:] != 0):
        raise PathStateError("start path holds decisions beyond its position")
    if len(start.llr_memory) != n + 1 or len(start.partial_sums) != n + 1:
        raise PathStateError("start path memory depth does not match the code")
    for d in range(n + 1):
        if np.asarray(start.llr_memory[d]).size != N >> d or np.asarray(start.partial_sums[d]).size != N >> d:
            raise PathStateError(f"start path memory at depth {d} has the wrong size")
    if not np.array_equal(np.asarray(start.llr_memory[0], dtype=float), llr):
        raise PathStateError("start path was built from different channel LLRs")
    decided = int(np.count_nonzero(code.decoding_position[: start.position] >= 0))
    if len(start.mode_trace) != decided:
        raise PathStateError("start path trace does not match its position")
    if math.isnan(start.score) or start.score > 0.0:
        raise PathStateError("start path score must be a normalized log probability")


def lsc_decode(llr, code: CodeSpec, list_size: int, start: DecoderPath | None = None) -> DecodeOutcome:
    """List SC keeping the ``list_size`` best paths, optionally resumed from ``start``."""
    llr = _check_llr(llr, code)
    if list_size < 1:
        raise ValueError(f"list size must be at least 1, got {list_size}")
    if start is None:
        paths = _PathList.fresh(code, llr, LrCounter())
        first = 0
        first_ready = False
    else:
        _validate_start(start, llr, code)
        counter = LrCounter(calls=start.lr_calls, contradictions=start.contradictions)
        paths = _PathList.resume(code, start, counter)
        first = start.position
        first_ready = start.leaf_ready

    for i in range(first, code.N):
        if i == first and first_ready:
            leaf = paths.alpha[code.n][:, 0]
        else:
            leaf = paths.leaf_llr(i)
        if code.frozen_mask[i]:
            paths.commit(i, np.zeros(paths.size, dtype=np.uint8), leaf)
            continue
        _fork_and_prune(paths, i, leaf, list_size)
        paths.trace.append(LIST_MODE)
    return paths.outcome()


def _fork_and_prune(paths: _PathList, i: int, leaf: np.ndarray, list_size: int) -> None:
    # Order: score desc, parent asc, branch probability desc, bit 0 first.
    # A parent already at -inf ties its children on score; the branch key
    # then follows the leaf decision, as SC does.
    size = paths.size
    parents = np.repeat(np.arange(size), 2)
    bits = np.tile(np.array([0, 1], dtype=np.uint8), size)
    branch = branch_log_probability(leaf[parents], bits)
    candidate_scores = paths.scores[parents] + branch
    keep = np.lexsort((bits, -branch, parents, -candidate_scores))[: min(list_size, 2 * size)]
    rows = parents[keep]
    paths.select(rows)
    paths.commit(i, bits[keep], leaf[rows])


def decode_sc_prefix(llr, code: CodeSpec, info_bits: int) -> DecoderPath:
    """SC over the first ``info_bits`` information bits, paused at the next one."""
    llr = _check_llr(llr, code)
    if not 0 <= info_bits < code.k:
        raise ValueError(f"prefix must cover [0, {code.k}) information bits, got {info_bits}")
    paths = _PathList.fresh(code, llr, LrCounter())
    for i in range(code.N):
        leaf = paths.leaf_llr(i)
        if code.decoding_position[i] == info_bits:
            return paths.snapshot(0, i, leaf_ready=True)
        _sc_step(paths, i, leaf)
    raise AssertionError("unreachable: prefix position lies inside the code")


def lclsc_decode(llr, code: CodeSpec, list_size: int) -> DecodeOutcome:
    """Low-complexity list SC.

    The first ``a`` information bits are SC-decoded while their LLR clears
    the per-bit threshold; the first miss hands the single current path to
    the list decoder for every remaining bit. When all ``a`` checks pass,
    the rest of the frame is SC-decoded.
    """
    llr = _check_llr(llr, code)
    paths = _PathList.fresh(code, llr, LrCounter())
    positions = code.decoding_position
    for i in range(code.N):
        leaf = paths.leaf_llr(i)
        j = positions[i]
        if 0 <= j < code.a and not abs(float(leaf[0])) > code.tau[j]:
            start = paths.snapshot(0, i, leaf_ready=True)
            return lsc_decode(llr, code, list_size, start=start)
        _sc_step(paths, i, leaf)
    return paths.outcome()


def decode_frame(kind: DecoderKind | str, llr, code: CodeSpec, list_size: int = 1) -> DecodeOutcome:
    kind = DecoderKind(kind)
    if kind is DecoderKind.SC:
        return sc_decode(llr, code)
    if kind is DecoderKind.LSC:
        return lsc_decode(llr, code, list_size)
    return lclsc_decode(llr, code, list_size)
