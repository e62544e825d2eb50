import os
import re
import sys
from pathlib import Path

from loguru import logger

RUN_ID_RE = re.compile(r"^[0-9a-f]{12}$")
RUN_LOG_MAX_BYTES = 10 * 1024 * 1024

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "run=<magenta>{extra[run]}</magenta> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
    "<level>{message}</level>"
)

# level, path override, rotation, backtrace, diagnose
LEVEL_SINKS = (
    ("DEBUG", "DEBUG_LOG_PATH", "10 MB", True, True),
    ("INFO", "INFO_LOG_PATH", "5 MB", False, False),
    ("WARNING", "WARN_LOG_PATH", "5 MB", False, False),
    ("ERROR", "ERR_LOG_PATH", "10 MB", True, False),
    ("CRITICAL", "CRIT_LOG_PATH", "10 MB", True, True),
)


def _logs_dir() -> Path:
    # logs/ sits at the project root, next to manage.py
    package_dir = Path(__file__).resolve().parent
    logs_dir = package_dir.parent.parent / "logs"
    try:
        logs_dir.mkdir(parents=True, exist_ok=True)
    except OSError:
        logs_dir = package_dir.parent / "logs"
        logs_dir.mkdir(parents=True, exist_ok=True)
    return logs_dir


def _only(level: str):
    return lambda record: record["level"].name == level


class RunLogSink:
    """Append INFO+ records bound to a campaign run to logs/runs/<run_id>.log."""

    def __init__(self, logs_dir: Path):
        self.runs_dir = logs_dir / "runs"

    def __call__(self, message):
        record = message.record
        run = str(record["extra"].get("run", ""))
        if not RUN_ID_RE.match(run) or record["level"].no < logger.level("INFO").no:
            return

        self.runs_dir.mkdir(parents=True, exist_ok=True)
        path = self.runs_dir / f"{run}.log"
        if path.exists() and path.stat().st_size >= RUN_LOG_MAX_BYTES:
            path.replace(path.with_suffix(".log.1"))
        with path.open("a", encoding="utf-8") as fh:
            fh.write(message)


def logging_config():
    """
    Configure Loguru: one file sink per level, a stderr sink and a per-run sink.

    Overrides: DEBUG_LOG_PATH, INFO_LOG_PATH, WARN_LOG_PATH, ERR_LOG_PATH,
    CRIT_LOG_PATH, POLAR_LOG_LEVEL, DEBUG.
    """
    logger.remove()
    logger.configure(extra={"run": "n/a"})

    logs_dir = _logs_dir()
    default_log = logs_dir / f"{Path(sys.argv[0]).stem or 'polarsim'}.log"

    # stdout carries command output only
    if os.getenv("DEBUG", "false").lower() == "true":
        stderr_level = "DEBUG"
    else:
        stderr_level = os.getenv("POLAR_LOG_LEVEL", "WARNING")
    logger.add(sys.stderr, format=LOG_FORMAT, level=stderr_level)

    for level, env_name, rotation, backtrace, diagnose in LEVEL_SINKS:
        logger.add(
            os.getenv(env_name, default_log),
            rotation=rotation,
            level=level,
            filter=_only(level),
            format=LOG_FORMAT,
            backtrace=backtrace,
            diagnose=diagnose,
        )

    logger.add(RunLogSink(logs_dir), level="INFO", format=LOG_FORMAT)
    return logger
