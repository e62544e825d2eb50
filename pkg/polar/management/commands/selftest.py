from django.core.management.base import BaseCommand, CommandError
from loguru import logger

from polar.services.selftest_services import FAULTS, run_selftest


class Command(BaseCommand):
    help = "Run the embedded oracle suite against the encoder and decoders."

    def add_arguments(self, parser):
        parser.add_argument(
            "--inject-fault",
            choices=FAULTS,
            default=None,
            help="Replace a kernel with a broken variant; the suite must then fail.",
        )

    def handle(self, *args, **options):
        report = run_selftest(fault=options["inject_fault"])
        for check in report.checks:
            status = "PASS" if check.passed else "FAIL"
            self.stdout.write(f"{status} {check.name:<24} {check.seconds:7.3f}s  {check.detail}")

        if not report.passed:
            names = ", ".join(check.name for check in report.failures)
            logger.error(f"Selftest failed: {names}")
            raise CommandError(f"selftest failed: {names}")
        self.stdout.write(self.style.SUCCESS(f"all {len(report.checks)} checks passed"))
