from contextlib import contextmanager

from django.core.exceptions import ValidationError
from django.core.management.base import CommandError
from loguru import logger

from polar.services.config_services import RunSettings, load_run_settings


def add_config_arguments(parser) -> None:
    """Options shared by every command that reads a run config."""
    parser.add_argument("config", type=str, help="Path to the YAML run configuration.")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="Override one config key; the value is parsed as YAML. Repeatable.",
    )


def _validation_message(exc: ValidationError) -> str:
    return "; ".join(str(message) for message in exc.messages)


def load_settings_or_fail(options) -> RunSettings:
    """Load and validate the run config, surfacing problems as CommandError."""
    try:
        return load_run_settings(options["config"], options.get("overrides"))
    except ValidationError as exc:
        raise CommandError(_validation_message(exc)) from exc
    except ValueError as exc:
        raise CommandError(str(exc)) from exc


@contextmanager
def bound_run(run: RunSettings, command: str):
    """Tag every log record emitted inside the block with the run id."""
    with logger.contextualize(run=run.run_id):
        logger.info("command_start command={} digest={}", command, run.digest)
        try:
            yield
        except ValueError as exc:
            logger.error("command_failed command={} error={}", command, exc)
            raise CommandError(str(exc)) from exc
        logger.info("command_done command={}", command)
