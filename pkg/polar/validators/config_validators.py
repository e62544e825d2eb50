"""Validation of the YAML run configuration shared by every command."""

from django.conf import settings
from django.core.exceptions import ValidationError
from loguru import logger

from polar.logic.channels import PARAMETER_KEYS, ChannelKind
from polar.logic.codec import DecoderKind
from polar.logic.construction import CodeConstructionError, TargetMode, k_for_rate
from polar.logic.simulator import DEFAULT_RATES
from polar.validators.validation_core import (
    _fail,
    _reject_unknown,
    _require_mapping,
    _validate_bool,
    _validate_choice,
    _validate_float,
    _validate_int,
    _validate_open_interval,
    _validate_power_of_two,
)

SECTIONS = ("channel", "code", "decoders", "list_size", "thresholds", "campaign", "output")

# Open parameter interval of each channel kind.
_CHANNEL_RANGES = {
    ChannelKind.BEC: (0.0, 1.0),
    ChannelKind.BSC: (0.0, 0.5),
    ChannelKind.BAWGN: (0.0, float("inf")),
}


def validate_channel(section) -> dict:
    section = _require_mapping(section, "channel")
    if not section:
        _fail("channel", "section is required")
    kind = ChannelKind(_validate_choice(section.get("kind"), "channel.kind", [k.value for k in ChannelKind]))
    param_key = PARAMETER_KEYS[kind]
    _reject_unknown(section, "channel", ("kind", param_key))
    if param_key not in section:
        _fail(f"channel.{param_key}", f"is required for {kind.value}")
    low, high = _CHANNEL_RANGES[kind]
    param = _validate_open_interval(section[param_key], f"channel.{param_key}", low, high)
    return {"kind": kind, "param": param}


def validate_code(section) -> dict:
    section = _require_mapping(section, "code")
    _reject_unknown(section, "code", ("N", "rates", "k"))
    if "N" not in section:
        _fail("code.N", "is required")
    N = _validate_power_of_two(section["N"], "code.N")

    if "rates" in section and "k" in section:
        _fail("code", "give either rates or k, not both")
    if "k" in section:
        ks = section["k"] if isinstance(section["k"], list) else [section["k"]]
        if not ks:
            _fail("code.k", "must list at least one dimension")
        ks = [_validate_int(k, "code.k", minimum=1, maximum=N) for k in ks]
        rates = None
    else:
        rates = section.get("rates", list(DEFAULT_RATES))
        rates = rates if isinstance(rates, list) else [rates]
        if not rates:
            _fail("code.rates", "must list at least one rate")
        rates = [_validate_float(r, "code.rates") for r in rates]
        try:
            ks = [k_for_rate(r, N) for r in rates]
        except CodeConstructionError as exc:
            _fail("code.rates", str(exc))
    return {"N": N, "ks": ks, "rates": rates}


def validate_decoders(value) -> list[DecoderKind]:
    if value is None:
        return list(DecoderKind)
    value = value if isinstance(value, list) else [value]
    if not value:
        _fail("decoders", "at least one decoder is required")
    decoders = []
    for item in value:
        decoder = DecoderKind(_validate_choice(item, "decoders", [d.value for d in DecoderKind]))
        if decoder in decoders:
            _fail("decoders", f"{decoder.value} is listed twice")
        decoders.append(decoder)
    return decoders


def validate_thresholds(section) -> dict:
    section = _require_mapping(section, "thresholds")
    _reject_unknown(section, "thresholds", ("p_mode", "p_value"))
    mode = TargetMode(
        _validate_choice(section.get("p_mode", TargetMode.FIXED.value), "thresholds.p_mode", [m.value for m in TargetMode])
    )
    if mode is TargetMode.LOWER_BOUND:
        if section.get("p_value") is not None:
            _fail("thresholds.p_value", "only applies to p_mode fixed")
        return {"p_mode": mode, "p_value": None}
    value = _validate_open_interval(section.get("p_value", 0.9), "thresholds.p_value", 0.5, 1.0)
    return {"p_mode": mode, "p_value": value}


def validate_campaign(section) -> dict:
    section = _require_mapping(section, "campaign")
    _reject_unknown(section, "campaign", ("trials", "min_errors", "seed", "workers", "keep_traces"))
    return {
        "trials": _validate_int(section.get("trials", 10_000), "campaign.trials", minimum=1),
        "min_errors": _validate_int(section.get("min_errors", settings.POLAR_MIN_ERRORS), "campaign.min_errors", minimum=0),
        "seed": _validate_int(section.get("seed", 0), "campaign.seed", minimum=0, maximum=2**64 - 1),
        "workers": _validate_int(section.get("workers", settings.POLAR_WORKERS), "campaign.workers", minimum=1),
        "keep_traces": _validate_bool(section.get("keep_traces", False), "campaign.keep_traces"),
    }


def validate_output(section) -> dict:
    section = _require_mapping(section, "output")
    _reject_unknown(section, "output", ("directory", "gnuplot"))
    directory = section.get("directory", str(settings.POLAR_RESULTS_DIR))
    if not isinstance(directory, str) or not directory.strip():
        _fail("output.directory", "must be a non-empty path")
    return {
        "directory": directory,
        "gnuplot": _validate_bool(section.get("gnuplot", False), "output.gnuplot"),
    }


def validate_run_config(raw) -> dict:
    """Check a parsed YAML document and return it normalized with defaults filled in."""
    if not isinstance(raw, dict):
        raise ValidationError("config: top level must be a mapping")
    logger.debug("Validating run config | keys={}", sorted(raw))
    _reject_unknown(raw, "", SECTIONS)
    return {
        "channel": validate_channel(raw.get("channel")),
        "code": validate_code(raw.get("code")),
        "decoders": validate_decoders(raw.get("decoders")),
        "list_size": _validate_int(raw.get("list_size", 16), "list_size", minimum=1),
        "thresholds": validate_thresholds(raw.get("thresholds")),
        "campaign": validate_campaign(raw.get("campaign")),
        "output": validate_output(raw.get("output")),
    }
