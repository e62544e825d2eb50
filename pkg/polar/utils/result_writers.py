"""Writers for campaign artifacts: results/deltas/traces CSV, manifest, code files, gnuplot."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import yaml
from loguru import logger

from polar.logic.construction import CodeSpec, classify_subchannels, ml_fer_lower_bound, sc_fer_upper_bound
from polar.logic.simulator import CampaignStats, CellStats, DeltaRow

RESULT_COLUMNS = (
    "decoder",
    "channel",
    "N",
    "k",
    "L",
    "frames",
    "errors",
    "fer",
    "fer_ci",
    "mean_lr_calls",
    "mean_m",
    # filled from CellStats.predicted_lr_calls
    "eq12_estimate",
    "ml_lower",
    "union_upper",
)

DELTA_COLUMNS = (
    "decoder_a",
    "decoder_b",
    "N",
    "k",
    "fer_ratio",
    "fer_ratio_low",
    "fer_ratio_high",
    "complexity_ratio",
    "complexity_low",
    "complexity_high",
    "low_confidence",
)

TRACE_COLUMNS = ("decoder", "k", "frame", "frame_error", "lr_calls", "sc_mode_bits", "mode_trace")


def format_number(value) -> str:
    """Round-trip text for numbers: ints as ints, floats via repr."""
    if isinstance(value, bool | np.bool_):
        return "1" if value else "0"
    if isinstance(value, int | np.integer):
        return str(int(value))
    return repr(float(value))


def result_row(cell: CellStats) -> list[str]:
    return [
        cell.decoder.value,
        cell.channel,
        format_number(cell.N),
        format_number(cell.k),
        format_number(cell.list_size),
        format_number(cell.frames),
        format_number(cell.errors),
        format_number(cell.fer),
        format_number(cell.fer_ci),
        format_number(cell.mean_lr_calls),
        format_number(cell.mean_m),
        format_number(cell.predicted_lr_calls),
        format_number(cell.ml_lower),
        format_number(cell.union_upper),
    ]


def _write_csv(path: Path, header, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    logger.debug(f"Wrote {path}")
    return path


def write_results_csv(path, cells) -> Path:
    return _write_csv(Path(path), RESULT_COLUMNS, [result_row(cell) for cell in cells])


def write_deltas_csv(path, deltas: list[DeltaRow]) -> Path:
    rows = [
        [
            d.decoder_a.value,
            d.decoder_b.value,
            format_number(d.N),
            format_number(d.k),
            format_number(d.fer_ratio),
            format_number(d.fer_ratio_low),
            format_number(d.fer_ratio_high),
            format_number(d.complexity_ratio),
            format_number(d.complexity_low),
            format_number(d.complexity_high),
            format_number(d.low_confidence),
        ]
        for d in deltas
    ]
    return _write_csv(Path(path), DELTA_COLUMNS, rows)


def write_traces_csv(path, stats: CampaignStats) -> Path:
    rows = []
    for (decoder, k), trials in stats.traces.items():
        for trial in trials:
            rows.append(
                [
                    decoder.value,
                    format_number(k),
                    format_number(trial.frame_index),
                    format_number(trial.frame_error),
                    format_number(trial.lr_calls),
                    format_number(trial.sc_mode_bits),
                    trial.mode_trace,
                ]
            )
    return _write_csv(Path(path), TRACE_COLUMNS, rows)


@dataclass
class RunManifest:
    """Everything needed to trace a results row back to its run."""

    run_id: str
    version: str
    timestamp: str
    seed: int
    config: dict
    rows: list[dict] = field(default_factory=list)
    files: list[str] = field(default_factory=list)

    @classmethod
    def from_stats(cls, *, run_id: str, version: str, timestamp: str, config: dict, stats: CampaignStats) -> RunManifest:
        rows = []
        for cell in stats.cells:
            row = asdict(cell)
            row["decoder"] = cell.decoder.value
            row["rate"] = cell.rate
            rows.append(row)
        return cls(
            run_id=run_id,
            version=version,
            timestamp=timestamp,
            seed=stats.config.seed,
            config=config,
            rows=rows,
        )

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(asdict(self), indent=2, sort_keys=False) + "\n", encoding="utf-8")
        logger.debug(f"Wrote {path}")
        return path


def code_document(code: CodeSpec) -> dict:
    """Plain-data view of a CodeSpec; indices are 0-based, floats full precision."""
    z_info = code.z_info
    return {
        "channel": code.channel.as_config() if code.channel is not None else None,
        "N": code.N,
        "k": code.k,
        "rate": code.rate,
        "reliability": code.reliability.label,
        "info_set": [int(i) for i in code.info_set],
        "frozen": [int(i) for i in np.flatnonzero(code.frozen_mask)],
        "z": [float(v) for v in code.z],
        "z_th": float(code.z_th),
        "a": int(code.a),
        "good": [bool(g) for g in classify_subchannels(code)],
        "p": [float(v) for v in code.p],
        "tau": [float(v) for v in code.tau],
        "ml_fer_lower_bound": ml_fer_lower_bound(z_info),
        "sc_fer_upper_bound": sc_fer_upper_bound(z_info),
    }


def write_code_yaml(directory, code: CodeSpec) -> Path:
    path = Path(directory) / f"code_k{code.k}.yaml"
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        yaml.safe_dump(code_document(code), fh, sort_keys=False, default_flow_style=None)
    logger.debug(f"Wrote {path}")
    return path


def gnuplot_script(stats: CampaignStats, results_name: str = "results.csv") -> str:
    """FER and complexity against rate, one curve per decoder, log-scale FER."""
    decoders = [d.value for d in stats.config.decoders]
    # Columns: 3 = N, 4 = k, 8 = fer, 10 = mean_lr_calls, 12 = eq12_estimate, 13 = ml_lower.
    fer_curves = [
        f'"{results_name}" every ::1 using ($4/$3):(strcol(1) eq "{name}" ? $8 : 1/0) with linespoints title "{name}"'
        for name in decoders
    ]
    fer_curves.append(
        f'"{results_name}" every ::1 using ($4/$3):(strcol(1) eq "{decoders[0]}" ? $13 : 1/0) '
        'with lines dashtype 2 title "ML lower bound"'
    )
    cost_curves = [
        f'"{results_name}" every ::1 using ($4/$3):(strcol(1) eq "{name}" ? $10 : 1/0) with linespoints title "{name}"'
        for name in decoders
    ]
    if "lclsc" in decoders:
        cost_curves.append(
            f'"{results_name}" every ::1 using ($4/$3):(strcol(1) eq "lclsc" ? $12 : 1/0) '
            'with lines dashtype 2 title "lclsc predicted from m"'
        )
    label = f"{stats.config.channel.label}, N={stats.config.N}, L={stats.config.list_size}"
    lines = [
        "set datafile separator ','",
        "set terminal pngcairo size 900,600",
        "set key left top",
        "set xlabel 'rate'",
        "",
        "set output 'fer.png'",
        f"set title 'FER, {label}'",
        "set logscale y",
        "set ylabel 'frame error rate'",
        "plot " + ", \\\n     ".join(fer_curves),
        "",
        "set output 'complexity.png'",
        f"set title 'average LR calculations, {label}'",
        "unset logscale y",
        "set ylabel 'LR calculations per frame'",
        "plot " + ", \\\n     ".join(cost_curves),
        "",
    ]
    return "\n".join(lines)


def write_gnuplot(path, stats: CampaignStats) -> Path:
    path = Path(path)
    path.write_text(gnuplot_script(stats), encoding="utf-8")
    return path
