"""Long Monte Carlo checks at the N = 512 reference operating points.

Run with ``pytest -m slow``; worker count follows POLAR_WORKERS.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from django.conf import settings

from polar.logic.channels import ChannelModel
from polar.logic.codec import DecoderKind, decode_sc_prefix, lclsc_decode, lsc_decode, sc_decode
from polar.logic.construction import construct_code, k_for_rate, sc_fer_upper_bound
from polar.logic.oracles import ml_decode
from polar.logic.simulator import DEFAULT_RATES, CampaignConfig, run_campaign
from polar.tests.basetest import ProfiledTestCase
from polar.tests.codec_tests.codec_base import random_frame

BEC = ChannelModel.bec(0.4)
ALL_DECODERS = (DecoderKind.SC, DecoderKind.LSC, DecoderKind.LCLSC)


def _sigma(fer: float, frames: int) -> float:
    return math.sqrt(fer * (1.0 - fer) / frames)


@pytest.mark.slow
class CampaignAcceptanceTests(ProfiledTestCase):
    def _campaign(self, **kwargs):
        defaults = dict(channel=BEC, N=512, list_size=16, seed=20140601, workers=settings.POLAR_WORKERS)
        defaults.update(kwargs)
        return run_campaign(CampaignConfig(**defaults))

    def test_sc_counts_every_frame(self):
        code = construct_code(BEC, 512, 256)
        rng = np.random.default_rng(1)
        for _ in range(1000):
            _, _, llr = random_frame(code, BEC, rng)
            self.assertEqual(sc_decode(llr, code).lr_calls, 5120)
        for _ in range(50):
            _, _, llr = random_frame(code, BEC, rng)
            self.assertLessEqual(lsc_decode(llr, code, 16).lr_calls, 81920)

    def test_list_decoder_reaches_ml_metric(self):
        channel = ChannelModel.bsc(0.11)
        code = construct_code(channel, 8, 4)
        rng = np.random.default_rng(2)
        for _ in range(1000):
            _, y, llr = random_frame(code, channel, rng)
            _, best = ml_decode(y, channel, code)
            metric = lsc_decode(llr, code, 16).path_metric
            self.assertLessEqual(abs(metric - best), 1e-9 * max(1.0, abs(best)))

    def test_sc_fer_below_union_bound(self):
        z = construct_code(BEC, 512, 1).z
        order = np.sort(z)
        k = max(k for k in range(1, 513) if np.sum(order[:k]) <= 0.5)
        union = sc_fer_upper_bound(order[:k])
        self.assertGreaterEqual(union, 0.05)

        cell = self._campaign(ks=(k,), decoders=(DecoderKind.SC,), trials=10_000, min_errors=0).cells[0]
        self.assertEqual(cell.frames, 10_000)
        self.assertLessEqual(cell.fer, union + 3 * _sigma(union, cell.frames))

    def test_fer_ordering(self):
        # 0.4375, or the nearest grid rate where SC collects 100 error frames in 1e5
        for rate in sorted(DEFAULT_RATES, key=lambda r: (abs(r - 0.4375), -r)):
            k = k_for_rate(rate, 512)
            sc_only = self._campaign(ks=(k,), decoders=(DecoderKind.SC,), trials=100_000, min_errors=100)
            if sc_only.cells[0].errors >= 100:
                break
        frames = max(4000, sc_only.cells[0].frames)

        stats = self._campaign(ks=(k,), decoders=ALL_DECODERS, trials=frames, min_errors=100)
        sc, lsc, lclsc = (stats.for_decoder(d)[0] for d in ALL_DECODERS)
        self.assertGreaterEqual(sc.errors, 100)
        self.assertLess(lsc.fer + lsc.fer_ci, sc.fer - sc.fer_ci)
        combined = math.sqrt(_sigma(lclsc.fer, lclsc.frames) ** 2 + _sigma(lsc.fer, lsc.frames) ** 2)
        self.assertLessEqual(lclsc.fer, 1.5 * lsc.fer + 3 * combined)
        self.assertLessEqual(lclsc.fer, sc.fer + 3 * _sigma(sc.fer, sc.frames))

    def test_complexity_reduction(self):
        low = self._campaign(ks=(k_for_rate(0.125, 512),), decoders=ALL_DECODERS, trials=300, min_errors=0)
        sc, lsc, lclsc = (low.for_decoder(d)[0] for d in ALL_DECODERS)
        self.assertLessEqual(lclsc.mean_lr_calls, 2 * sc.mean_lr_calls)
        self.assertLessEqual(lclsc.mean_lr_calls, 0.5 * lsc.mean_lr_calls)

        grid = self._campaign(
            ks=tuple(k_for_rate(r, 512) for r in DEFAULT_RATES),
            decoders=ALL_DECODERS,
            trials=40,
            min_errors=0,
        )
        for sc, lsc, lclsc in zip(*(grid.for_decoder(d) for d in ALL_DECODERS)):
            self.assertLessEqual(sc.mean_lr_calls, lclsc.mean_lr_calls)
            self.assertLessEqual(lclsc.mean_lr_calls, lsc.mean_lr_calls)
            self.assertTrue(math.isfinite(lclsc.prediction_gap))

    def test_lclsc_output_is_sc_or_list_from_prefix(self):
        rng = np.random.default_rng(9)
        channels = [BEC, ChannelModel.bsc(0.11), ChannelModel.bawgn(0.97865)]
        codes = [(construct_code(ch, 128, k), ch) for ch in channels for k in (32, 64)]
        for frame in range(10_000):
            code, channel = codes[frame % len(codes)]
            _, _, llr = random_frame(code, channel, rng)
            outcome = lclsc_decode(llr, code, 16)
            m = outcome.sc_mode_bits
            if m == code.k:
                replay = sc_decode(llr, code)
            else:
                replay = lsc_decode(llr, code, 16, start=decode_sc_prefix(llr, code, m))
            self.assertTrue(np.array_equal(outcome.info_bits, replay.info_bits))
            self.assertEqual(outcome.lr_calls, replay.lr_calls)
