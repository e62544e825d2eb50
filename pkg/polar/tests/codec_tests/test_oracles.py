"""Sanity checks of the exhaustive reference computations themselves."""

import math

import numpy as np
import pytest

from polar.logic.channels import ChannelModel
from polar.logic.construction import construct_code
from polar.logic.oracles import (
    all_inputs,
    genie_erasure_probabilities,
    log_transition,
    ml_decode,
    prefix_log_probability,
)
from polar.tests.codec_tests.codec_base import BSC, full_input, random_frame


def test_all_inputs_enumerates_every_word():
    inputs = all_inputs(4)
    assert inputs.shape == (16, 4)
    assert len({tuple(row) for row in inputs}) == 16
    assert inputs[1].tolist() == [0, 0, 0, 1]


def test_genie_probabilities_two_bits():
    assert genie_erasure_probabilities(0.4, 1) == pytest.approx([0.64, 0.16], abs=1e-15)


def test_genie_limited_to_short_codes():
    with pytest.raises(ValueError):
        genie_erasure_probabilities(0.4, 4)


def test_transition_of_sent_word_on_noiseless_bec(test_rng):
    ch = ChannelModel.noiseless_limit("bec")
    code = construct_code(ChannelModel.bec(0.4), 8, 4)
    info, y, _ = random_frame(code, ch, test_rng)
    u = full_input(code, info)
    assert log_transition(u, y, ch) == 0.0
    other = u.copy()
    other[code.info_set[0]] ^= 1
    assert log_transition(other, y, ch) == -math.inf


def test_ml_recovers_clean_frames(test_rng):
    code = construct_code(BSC, 8, 4)
    ch = ChannelModel.noiseless_limit("bsc")
    for _ in range(10):
        info, y, _ = random_frame(code, ch, test_rng)
        decoded, _ = ml_decode(y, BSC, code)
        assert np.array_equal(decoded, info)


def test_prefix_probabilities_are_consistent(test_rng):
    code = construct_code(BSC, 8, 4)
    _, y, _ = random_frame(code, BSC, test_rng)
    assert prefix_log_probability([], y, BSC) == pytest.approx(0.0, abs=1e-12)
    both = np.logaddexp(prefix_log_probability([0, 1], y, BSC), prefix_log_probability([0, 0], y, BSC))
    assert both == pytest.approx(prefix_log_probability([0], y, BSC), abs=1e-12)
