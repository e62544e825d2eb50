from dataclasses import replace
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from polar.management.commands._setup_helpers import add_config_arguments, bound_run, load_settings_or_fail
from polar.services.campaign_services import run_simulation


class Command(BaseCommand):
    help = (
        "Run the seeded Monte Carlo campaign and write results.csv, deltas.csv "
        "and manifest.json (plus traces.csv / plot.gp when enabled)."
    )

    def add_arguments(self, parser):
        add_config_arguments(parser)
        parser.add_argument("--workers", type=int, default=None, help="Overrides campaign.workers.")
        parser.add_argument("--output-dir", type=str, default=None, help="Overrides output.directory.")
        parser.add_argument("--gnuplot", action="store_true", help="Also write a plot.gp script.")

    def handle(self, *args, **options):
        run = load_settings_or_fail(options)
        if options["workers"] is not None:
            if options["workers"] < 1:
                raise CommandError("--workers must be at least 1")
            run = replace(run, campaign=replace(run.campaign, workers=options["workers"]))
        output_dir = Path(options["output_dir"]) if options["output_dir"] else None
        gnuplot = True if options["gnuplot"] else None

        with bound_run(run, "simulate"):
            report = run_simulation(run, output_dir=output_dir, gnuplot=gnuplot)

        for cell in report.stats.cells:
            self.stdout.write(
                f"{cell.decoder.value:<6} k={cell.k:<5} frames={cell.frames:<7} "
                f"errors={cell.errors:<6} fer={cell.fer:.4e} lr_calls={cell.mean_lr_calls:.1f}"
            )
        for path in report.files:
            self.stdout.write(str(path))
