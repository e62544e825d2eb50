"""Service layer turning a YAML run file plus ``--set`` overrides into typed objects."""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import yaml
from django.core.exceptions import ValidationError
from loguru import logger

from polar.logic.channels import ChannelModel
from polar.logic.construction import ReliabilityMode
from polar.logic.simulator import CampaignConfig
from polar.validators.config_validators import validate_run_config


@dataclass(frozen=True)
class RunSettings:
    """Validated configuration of one command invocation."""

    normalized: dict
    campaign: CampaignConfig
    output_dir: Path
    gnuplot: bool
    digest: str

    @property
    def run_id(self) -> str:
        return self.digest[:12]

    @property
    def reliability(self) -> ReliabilityMode:
        return self.campaign.reliability

    def echo(self) -> dict:
        """JSON-safe copy of the normalized config, enums as plain strings."""
        return json.loads(json.dumps(self.normalized, default=str))


def read_config_file(path) -> dict:
    path = Path(path)
    logger.debug(f"Reading run config {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"config: cannot read {path}: {exc.strerror or exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ValidationError(f"config: {path} is not valid YAML: {exc}") from exc
    return raw if raw is not None else {}


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply ``section.key=value`` overrides; values are parsed as YAML."""
    merged = copy.deepcopy(raw) if isinstance(raw, dict) else {}
    for item in overrides or ():
        dotted, sep, text = str(item).partition("=")
        dotted = dotted.strip()
        if not sep or not dotted:
            raise ValidationError(f"--set: expected section.key=value, got {item!r}")
        try:
            value = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ValidationError(f"{dotted}: cannot parse override value {text!r}") from exc
        parts = dotted.split(".")
        node = merged
        for depth, part in enumerate(parts[:-1]):
            child = node.get(part)
            if child is None:
                child = node[part] = {}
            if not isinstance(child, dict):
                raise ValidationError(f"{'.'.join(parts[: depth + 1])}: is not a section")
            node = child
        if parts[-1] == "rates":
            node.pop("k", None)
        elif parts[-1] == "k" and parts[0] == "code":
            node.pop("rates", None)
        node[parts[-1]] = value
        logger.debug(f"Applied override {dotted}")
    return merged


def config_digest(normalized: dict) -> str:
    """SHA-256 of everything that affects results (worker count and output excluded)."""
    relevant = {key: value for key, value in normalized.items() if key != "output"}
    relevant["campaign"] = {k: v for k, v in normalized["campaign"].items() if k != "workers"}
    canonical = json.dumps(relevant, sort_keys=True, default=str, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def build_run_settings(normalized: dict) -> RunSettings:
    channel = ChannelModel(normalized["channel"]["kind"], normalized["channel"]["param"])
    thresholds = normalized["thresholds"]
    campaign = normalized["campaign"]
    cfg = CampaignConfig(
        channel=channel,
        N=normalized["code"]["N"],
        ks=tuple(normalized["code"]["ks"]),
        decoders=tuple(normalized["decoders"]),
        list_size=normalized["list_size"],
        reliability=ReliabilityMode(thresholds["p_mode"], thresholds["p_value"]),
        trials=campaign["trials"],
        min_errors=campaign["min_errors"],
        seed=campaign["seed"],
        workers=campaign["workers"],
        keep_traces=campaign["keep_traces"],
    )
    return RunSettings(
        normalized=normalized,
        campaign=cfg,
        output_dir=Path(normalized["output"]["directory"]),
        gnuplot=normalized["output"]["gnuplot"],
        digest=config_digest(normalized),
    )


def load_run_settings(path, overrides=None) -> RunSettings:
    raw = apply_overrides(read_config_file(path), overrides)
    return build_run_settings(validate_run_config(raw))
