"""Run-config validation and ``--set`` overrides."""

import copy
from dataclasses import replace
from pathlib import Path

import pytest
from django.core.exceptions import ValidationError

from polar.logic.channels import ChannelKind
from polar.logic.codec import DecoderKind
from polar.logic.construction import ReliabilityMode, TargetMode
from polar.logic.simulator import DEFAULT_RATES
from polar.services.config_services import apply_overrides, build_run_settings, load_run_settings
from polar.validators.config_validators import validate_run_config

MINIMAL = {"channel": {"kind": "bsc", "p": 0.11}, "code": {"N": 512}}


def _messages(excinfo) -> str:
    return " ".join(excinfo.value.messages)


class TestValidateRunConfig:
    def test_minimal_config_gets_defaults(self, settings):
        settings.POLAR_WORKERS = 3
        settings.POLAR_MIN_ERRORS = 50
        normalized = validate_run_config(copy.deepcopy(MINIMAL))
        assert normalized["channel"] == {"kind": ChannelKind.BSC, "param": 0.11}
        assert normalized["code"]["ks"] == [round(r * 512) for r in DEFAULT_RATES]
        assert normalized["decoders"] == [DecoderKind.SC, DecoderKind.LSC, DecoderKind.LCLSC]
        assert normalized["list_size"] == 16
        assert normalized["thresholds"] == {"p_mode": TargetMode.FIXED, "p_value": 0.9}
        assert normalized["campaign"]["workers"] == 3
        assert normalized["campaign"]["min_errors"] == 50

    @pytest.mark.parametrize(
        ("patch", "message"),
        [
            ({"code": {"N": 3}}, "code.N: N must be a power of two"),
            ({"code": {"N": 8, "k": [0]}}, "code.k:"),
            ({"code": {"N": 8, "k": [9]}}, "code.k:"),
            ({"code": {"N": 8, "k": [4], "rates": [0.5]}}, "code: give either rates or k"),
            ({"code": {"N": 8, "rates": [0.01]}}, "code.rates:"),
            ({"decoders": []}, "decoders: at least one decoder is required"),
            ({"decoders": ["sc", "sc"]}, "decoders: sc is listed twice"),
            ({"decoders": ["bp"]}, "decoders: must be one of"),
            ({"channel": {"kind": "bsc", "p": 0.6}}, "channel.p:"),
            ({"channel": {"kind": "bec"}}, "channel.epsilon: is required"),
            ({"channel": {"kind": "bawgn", "sigma": 1.0, "p": 0.1}}, "channel.p: unknown key"),
            ({"thresholds": {"p_mode": "fixed", "p_value": 1.0}}, "thresholds.p_value:"),
            ({"thresholds": {"p_mode": "lower_bound", "p_value": 0.9}}, "thresholds.p_value: only applies"),
            ({"campaign": {"trials": 0}}, "campaign.trials:"),
            ({"campaign": {"seed": 2**64}}, "campaign.seed:"),
            ({"campaign": {"keep_traces": "yes"}}, "campaign.keep_traces:"),
            ({"list_size": True}, "list_size: must be an integer"),
            ({"plots": {}}, "plots: unknown key"),
        ],
    )
    def test_rejections_name_the_key(self, patch, message):
        raw = copy.deepcopy(MINIMAL)
        raw.update(patch)
        with pytest.raises(ValidationError) as excinfo:
            validate_run_config(raw)
        assert message in _messages(excinfo)

    def test_top_level_must_be_mapping(self):
        with pytest.raises(ValidationError):
            validate_run_config(["channel"])

    def test_missing_channel(self):
        with pytest.raises(ValidationError) as excinfo:
            validate_run_config({"code": {"N": 8}})
        assert "channel" in _messages(excinfo)


class TestOverrides:
    def test_nested_override(self):
        merged = apply_overrides(MINIMAL, ["campaign.seed=5", "list_size=8"])
        assert merged["campaign"]["seed"] == 5
        assert merged["list_size"] == 8
        assert "campaign" not in MINIMAL

    def test_rates_override_replaces_k(self):
        raw = {"channel": MINIMAL["channel"], "code": {"N": 64, "k": [8]}}
        merged = apply_overrides(raw, ["code.rates=[0.5]"])
        assert merged["code"] == {"N": 64, "rates": [0.5]}

    def test_flow_values_parse_as_yaml(self):
        merged = apply_overrides(MINIMAL, ["decoders=[sc, lclsc]", "channel.p=0.05"])
        assert merged["decoders"] == ["sc", "lclsc"]
        assert merged["channel"]["p"] == 0.05

    @pytest.mark.parametrize("item", ["campaign.seed", "=3", "channel.p.x=1"])
    def test_malformed_override(self, item):
        with pytest.raises(ValidationError):
            apply_overrides(MINIMAL, [item])


class TestRunSettings:
    def test_digest_ignores_workers_and_output(self):
        first = build_run_settings(validate_run_config(copy.deepcopy(MINIMAL)))
        raw = apply_overrides(MINIMAL, ["campaign.workers=4", "output.directory=elsewhere"])
        second = build_run_settings(validate_run_config(raw))
        assert first.digest == second.digest
        assert len(first.run_id) == 12

    def test_digest_tracks_seed(self):
        first = build_run_settings(validate_run_config(copy.deepcopy(MINIMAL)))
        second = build_run_settings(validate_run_config(apply_overrides(MINIMAL, ["campaign.seed=1"])))
        assert first.digest != second.digest

    def test_campaign_built_from_config(self):
        raw = apply_overrides(MINIMAL, ["thresholds.p_mode=lower_bound", "code.k=[128]"])
        run = build_run_settings(validate_run_config(raw))
        assert run.campaign.ks == (128,)
        assert run.reliability.mode is TargetMode.LOWER_BOUND
        assert run.echo()["channel"] == {"kind": "bsc", "param": 0.11}


class TestShippedConfigs:
    @pytest.fixture
    def configs_dir(self, settings):
        return Path(settings.BASE_DIR) / "configs"

    @pytest.mark.parametrize("name", ["bsc_n512.yaml", "bawgn_n512.yaml", "bec_n512.yaml"])
    def test_fixed_target_of_ninety_percent(self, configs_dir, name):
        run = load_run_settings(configs_dir / name)
        assert run.reliability == ReliabilityMode.fixed(0.9)
        assert run.campaign.N == 512
        assert run.campaign.list_size == 16

    def test_bec_variants_pair_on_the_same_frames(self, configs_dir):
        fixed = load_run_settings(configs_dir / "bec_n512.yaml")
        lower = load_run_settings(configs_dir / "bec_n512_lower_bound.yaml")
        assert lower.reliability == ReliabilityMode.lower_bound()
        assert replace(fixed.campaign, reliability=lower.reliability) == lower.campaign
        assert fixed.output_dir != lower.output_dir
        assert fixed.digest != lower.digest
