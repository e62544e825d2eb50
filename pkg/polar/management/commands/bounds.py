from django.core.management.base import BaseCommand, CommandError

from polar.management.commands._setup_helpers import add_config_arguments, bound_run, load_settings_or_fail
from polar.services.campaign_services import bounds_rows

HEADER = f"{'k':>6} {'rate':>8} {'ml_lower':>14} {'union_upper':>14} {'z_th':>14} {'a':>6}"


class Command(BaseCommand):
    help = "Print the ML FER lower bound, SC union bound, Z threshold and split index per rate."

    def add_arguments(self, parser):
        add_config_arguments(parser)

    def handle(self, *args, **options):
        run = load_settings_or_fail(options)
        with bound_run(run, "bounds"):
            rows = bounds_rows(run)

        self.stdout.write(f"# {run.campaign.channel.label} N={run.campaign.N}")
        self.stdout.write(HEADER)
        for row in rows:
            self.stdout.write(
                f"{row.k:>6} {row.rate:>8.5f} {row.ml_lower:>14.6e} {row.union_upper:>14.6e} {row.z_th:>14.6e} {row.a:>6}"
            )

        broken = [row for row in rows if row.problems]
        if broken:
            details = "; ".join(f"k={row.k}: {', '.join(row.problems)}" for row in broken)
            raise CommandError(f"threshold invariants violated: {details}")
