"""Service layer for the construct / bounds / simulate commands."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from django.utils import timezone
from loguru import logger

from polar import __version__
from polar.logic.codec import DecoderKind
from polar.logic.construction import CodeSpec, ml_fer_lower_bound, sc_fer_upper_bound, verify_split
from polar.logic.simulator import CampaignStats, DeltaRow, build_codes, paired_delta, run_campaign
from polar.services.config_services import RunSettings
from polar.utils.result_writers import (
    RunManifest,
    write_code_yaml,
    write_deltas_csv,
    write_gnuplot,
    write_results_csv,
    write_traces_csv,
)


@dataclass(frozen=True, slots=True)
class BoundsRow:
    k: int
    rate: float
    ml_lower: float
    union_upper: float
    z_th: float
    a: int
    problems: tuple[str, ...]


@dataclass(frozen=True)
class SimulationReport:
    stats: CampaignStats
    deltas: list[DeltaRow]
    files: list[Path]


def construct_codes(run: RunSettings, output_dir: Path | None = None) -> list[Path]:
    """Write one ``code_k<k>.yaml`` per configured dimension."""
    directory = Path(output_dir or run.output_dir)
    written = [write_code_yaml(directory, code) for code in build_codes(run.campaign)]
    logger.info("codes_written count={} directory={}", len(written), directory)
    return written


def bounds_rows(run: RunSettings) -> list[BoundsRow]:
    rows = []
    for code in build_codes(run.campaign):
        rows.append(_bounds_row(code))
    return rows


def _bounds_row(code: CodeSpec) -> BoundsRow:
    problems = tuple(verify_split(code))
    if problems:
        logger.warning("split_check_failed k={} problems={}", code.k, "; ".join(problems))
    return BoundsRow(
        k=code.k,
        rate=code.rate,
        ml_lower=ml_fer_lower_bound(code.z_info),
        union_upper=sc_fer_upper_bound(code.z_info),
        z_th=code.z_th,
        a=code.a,
        problems=problems,
    )


def decoder_pairs(decoders) -> list[tuple[DecoderKind, DecoderKind]]:
    """(A, B) pairs against the reference decoder: LSC when configured, else the first."""
    decoders = [DecoderKind(d) for d in decoders]
    reference = DecoderKind.LSC if DecoderKind.LSC in decoders else decoders[0]
    return [(decoder, reference) for decoder in decoders if decoder is not reference]


def compute_deltas(stats: CampaignStats) -> list[DeltaRow]:
    deltas = []
    for a, b in decoder_pairs(stats.config.decoders):
        deltas.extend(paired_delta(stats.for_decoder(a), stats.for_decoder(b)))
    return deltas


def run_simulation(run: RunSettings, output_dir: Path | None = None, gnuplot: bool | None = None) -> SimulationReport:
    """Run the campaign and write results.csv, deltas.csv, manifest.json and the optional extras."""
    directory = Path(output_dir or run.output_dir)
    directory.mkdir(parents=True, exist_ok=True)
    stats = run_campaign(run.campaign)
    deltas = compute_deltas(stats)

    files = [write_results_csv(directory / "results.csv", stats.cells)]
    files.append(write_deltas_csv(directory / "deltas.csv", deltas))
    if run.campaign.keep_traces:
        files.append(write_traces_csv(directory / "traces.csv", stats))
    if run.gnuplot if gnuplot is None else gnuplot:
        files.append(write_gnuplot(directory / "plot.gp", stats))

    manifest = RunManifest.from_stats(
        run_id=run.run_id,
        version=__version__,
        timestamp=timezone.now().isoformat(),
        config=run.echo(),
        stats=stats,
    )
    manifest_path = directory / "manifest.json"
    manifest.files = [path.name for path in files] + [manifest_path.name]
    files.append(manifest.write(manifest_path))
    logger.info("campaign_written directory={} cells={}", directory, len(stats.cells))
    return SimulationReport(stats=stats, deltas=deltas, files=files)
