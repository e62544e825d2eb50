"""SC / LSC / LCLSC decoders against exhaustive references and counting identities."""

import math

import numpy as np
import pytest

from polar.logic.channels import ChannelKind, ChannelModel
from polar.logic.codec import (
    DecoderKind,
    PathStateError,
    count_lr_calls,
    decode_frame,
    decode_sc_prefix,
    lclsc_decode,
    lsc_decode,
    sc_decode,
)
from polar.logic.construction import ReliabilityMode, construct_code
from polar.logic.oracles import PosteriorTable, brute_force_sc, log_transition, ml_decode
from polar.tests.codec_tests.codec_base import (
    BAWGN,
    BEC,
    BSC,
    REFERENCE_CHANNELS,
    assert_close,
    channel_id,
    full_input,
    random_frame,
)


class TestSuccessiveCancellation:
    def test_two_bit_noiseless_code(self):
        code = construct_code(BEC, 2, 1)
        assert code.info_set.tolist() == [1]
        outcome = sc_decode(np.array([-math.inf, -math.inf]), code)
        assert outcome.info_bits.tolist() == [1]
        assert outcome.lr_calls == 4
        assert outcome.sc_mode_bits == 1

    @pytest.mark.parametrize("ch", REFERENCE_CHANNELS, ids=channel_id)
    def test_call_count_exact_every_frame(self, ch, test_rng):
        code = construct_code(ch, 512, 256)
        for _ in range(5):
            _, _, llr = random_frame(code, ch, test_rng)
            outcome = sc_decode(llr, code)
            assert outcome.lr_calls == 5120
            assert count_lr_calls(outcome) == 5120
            assert outcome.sc_mode_bits == 256
            assert outcome.mode_trace == "S" * 256

    @pytest.mark.parametrize("ch", [BEC, BAWGN], ids=channel_id)
    def test_matches_exhaustive_sc(self, ch, test_rng):
        code = construct_code(ch, 8, 4)
        compared = 0
        for _ in range(60):
            _, y, llr = random_frame(code, ch, test_rng)
            decoded = sc_decode(llr, code).info_bits
            # A wrong erasure guess can make a later frozen bit impossible; both
            # sides are then undefined.
            if log_transition(full_input(code, decoded), y, ch) == -math.inf:
                continue
            assert np.array_equal(decoded, brute_force_sc(y, ch, code))
            compared += 1
        assert compared >= 40

    def test_rejects_wrong_length(self):
        code = construct_code(BEC, 8, 4)
        with pytest.raises(ValueError):
            sc_decode(np.zeros(4), code)

    def test_rejects_nan(self):
        code = construct_code(BEC, 4, 2)
        with pytest.raises(ValueError):
            sc_decode(np.array([0.0, math.nan, 1.0, 1.0]), code)


class TestListDecoder:
    @pytest.mark.parametrize("ch", REFERENCE_CHANNELS, ids=channel_id)
    def test_width_one_is_sc(self, ch, test_rng):
        code = construct_code(ch, 64, 32)
        for _ in range(20):
            _, _, llr = random_frame(code, ch, test_rng)
            sc = sc_decode(llr, code)
            lsc = lsc_decode(llr, code, 1)
            assert np.array_equal(sc.info_bits, lsc.info_bits)
            assert sc.lr_calls == lsc.lr_calls
            assert lsc.sc_mode_bits == 0

    def test_width_one_follows_sc_after_impossible_frozen_bit(self):
        # A wrong erasure guess can make a later frozen bit impossible; the
        # single path then sits at -inf and must keep taking hard decisions.
        code = construct_code(BEC, 64, 32)
        rng = np.random.default_rng(83)
        dead_paths = 0
        for _ in range(300):
            _, _, llr = random_frame(code, BEC, rng)
            sc = sc_decode(llr, code)
            lsc = lsc_decode(llr, code, 1)
            assert np.array_equal(sc.info_bits, lsc.info_bits)
            assert sc.lr_calls == lsc.lr_calls
            dead_paths += lsc.path_metric == -np.inf
        assert dead_paths > 0

    def test_small_list_holds_two_paths(self, test_rng):
        code = construct_code(BAWGN, 4, 2)
        _, _, llr = random_frame(code, BAWGN, test_rng)
        outcome = lsc_decode(llr, code, 2)
        assert outcome.list_info_bits.shape == (2, 2)
        assert outcome.list_metrics.size == 2
        assert outcome.path_metric == pytest.approx(float(np.max(outcome.list_metrics)))

    def test_best_path_is_ml(self, test_rng):
        code = construct_code(BSC, 8, 4)
        for _ in range(200):
            _, y, llr = random_frame(code, BSC, test_rng)
            outcome = lsc_decode(llr, code, 16)
            _, best = ml_decode(y, BSC, code)
            assert_close(outcome.path_metric, best)

    @pytest.mark.parametrize("ch", [BSC, BAWGN], ids=channel_id)
    def test_every_survivor_score_is_exact(self, ch, test_rng):
        code = construct_code(ch, 8, 4)
        for _ in range(20):
            _, y, llr = random_frame(code, ch, test_rng)
            table = PosteriorTable(y, ch)
            outcome = lsc_decode(llr, code, 16)
            for bits, metric in zip(outcome.list_info_bits, outcome.list_metrics):
                assert_close(float(metric), table.prefix_log_probability(full_input(code, bits)))

    @pytest.mark.parametrize("list_size", [2, 4, 16])
    def test_call_count_bounded(self, list_size, test_rng):
        code = construct_code(BEC, 512, 256)
        _, _, llr = random_frame(code, BEC, test_rng)
        assert 5120 < lsc_decode(llr, code, list_size).lr_calls <= list_size * 5120

    def test_rejects_empty_list(self):
        code = construct_code(BEC, 8, 4)
        with pytest.raises(ValueError):
            lsc_decode(np.zeros(8), code, 0)

    def test_rejects_start_from_other_frame(self, test_rng):
        code = construct_code(BAWGN, 16, 8)
        _, _, llr = random_frame(code, BAWGN, test_rng)
        _, _, other = random_frame(code, BAWGN, test_rng)
        start = decode_sc_prefix(llr, code, 3)
        with pytest.raises(PathStateError):
            lsc_decode(other, code, 4, start=start)

    def test_rejects_start_with_frozen_one(self, test_rng):
        code = construct_code(BAWGN, 16, 8)
        _, _, llr = random_frame(code, BAWGN, test_rng)
        start = decode_sc_prefix(llr, code, 3)
        start.estimates[np.flatnonzero(code.frozen_mask)[0]] = 1
        with pytest.raises(PathStateError):
            lsc_decode(llr, code, 4, start=start)


    def test_wider_list_never_raises_fer(self):
        code = construct_code(BEC, 64, 32)
        rng = np.random.default_rng(64)
        frames = 400
        widths = (1, 2, 4, 8)
        errors = dict.fromkeys(widths, 0)
        for _ in range(frames):
            info, _, llr = random_frame(code, BEC, rng)
            for width in widths:
                errors[width] += not np.array_equal(lsc_decode(llr, code, width).info_bits, info)

        fer = [errors[width] / frames for width in widths]
        assert fer[0] > 0.0
        for narrow, wide in zip(fer, fer[1:]):
            sigma = math.sqrt((narrow * (1 - narrow) + wide * (1 - wide)) / frames)
            assert wide <= narrow + 3 * sigma


class TestLowComplexityListDecoder:
    @pytest.mark.parametrize("kind", list(ChannelKind))
    def test_noiseless_channel_stays_sc(self, kind, test_rng):
        ch = ChannelModel.noiseless_limit(kind)
        design = {ChannelKind.BEC: BEC, ChannelKind.BSC: BSC, ChannelKind.BAWGN: BAWGN}[kind]
        code = construct_code(design, 64, 32)
        info, _, llr = random_frame(code, ch, test_rng)
        outcome = lclsc_decode(llr, code, 8)
        assert outcome.sc_mode_bits == 32
        assert outcome.lr_calls == 64 + 64 * 6
        assert np.array_equal(outcome.info_bits, info)

    def test_first_check_failure_is_plain_lsc(self):
        code = construct_code(BAWGN, 32, 16)
        llr = np.zeros(32)
        outcome = lclsc_decode(llr, code, 4)
        reference = lsc_decode(llr, code, 4)
        assert outcome.sc_mode_bits == 0
        assert outcome.mode_trace == "L" * 16
        assert np.array_equal(outcome.info_bits, reference.info_bits)
        assert outcome.lr_calls == reference.lr_calls

    @pytest.mark.parametrize("ch", REFERENCE_CHANNELS, ids=channel_id)
    def test_trace_replay(self, ch, test_rng):
        code = construct_code(ch, 64, 24)
        for _ in range(25):
            _, _, llr = random_frame(code, ch, test_rng)
            outcome = lclsc_decode(llr, code, 8)
            m = outcome.sc_mode_bits
            assert outcome.mode_trace == "S" * m + "L" * (code.k - m)
            if m == code.k:
                replay = sc_decode(llr, code)
            else:
                assert m < code.a
                replay = lsc_decode(llr, code, 8, start=decode_sc_prefix(llr, code, m))
            assert np.array_equal(outcome.info_bits, replay.info_bits)
            assert outcome.lr_calls == replay.lr_calls

    @pytest.mark.parametrize("ch", REFERENCE_CHANNELS, ids=channel_id)
    def test_complexity_sandwich(self, ch, test_rng):
        code = construct_code(ch, 128, 48, ReliabilityMode.lower_bound())
        for _ in range(10):
            _, _, llr = random_frame(code, ch, test_rng)
            sc = sc_decode(llr, code).lr_calls
            lc = lclsc_decode(llr, code, 8).lr_calls
            ls = lsc_decode(llr, code, 8).lr_calls
            assert sc <= lc <= ls


class TestRoundTrip:
    @pytest.mark.parametrize("kind", list(ChannelKind))
    @pytest.mark.parametrize("decoder", list(DecoderKind))
    def test_noiseless_round_trip(self, kind, decoder, test_rng):
        ch = ChannelModel.noiseless_limit(kind)
        design = {ChannelKind.BEC: BEC, ChannelKind.BSC: BSC, ChannelKind.BAWGN: BAWGN}[kind]
        code = construct_code(design, 64, 40)
        for _ in range(5):
            info, _, llr = random_frame(code, ch, test_rng)
            assert np.array_equal(decode_frame(decoder, llr, code, 4).info_bits, info)

    def test_decode_frame_dispatch(self, test_rng):
        code = construct_code(BSC, 32, 16)
        _, _, llr = random_frame(code, BSC, test_rng)
        assert decode_frame("sc", llr, code).lr_calls == 32 + 32 * 5
        assert decode_frame(DecoderKind.LSC, llr, code, 4).sc_mode_bits == 0
        with pytest.raises(ValueError):
            decode_frame("bp", llr, code)
