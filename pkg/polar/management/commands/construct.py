from pathlib import Path

from django.core.management.base import BaseCommand

from polar.management.commands._setup_helpers import add_config_arguments, bound_run, load_settings_or_fail
from polar.services.campaign_services import construct_codes


class Command(BaseCommand):
    help = "Construct the configured polar codes and write one code_k<k>.yaml per dimension."

    def add_arguments(self, parser):
        add_config_arguments(parser)
        parser.add_argument("--output-dir", type=str, default=None, help="Overrides output.directory.")

    def handle(self, *args, **options):
        run = load_settings_or_fail(options)
        output_dir = Path(options["output_dir"]) if options["output_dir"] else None
        with bound_run(run, "construct"):
            written = construct_codes(run, output_dir)
        for path in written:
            self.stdout.write(str(path))
