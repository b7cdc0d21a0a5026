"""Command-line runner.

    dickefield <scenario> [flags]
    dickefield --config run.json [flags]

Exit codes: 0 success, 2 configuration error, 3 numerical guard violation.
"""
from __future__ import annotations

import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import OUTPUT_DIR_ENV, SCENARIOS, ConfigError, parse_config
from .report import serialize
from .scenarios import NumericalGuardError, run_scenario

log = logging.getLogger("dickefield")

USAGE = f"""usage: dickefield <scenario> [options]
       dickefield --config FILE.json [options]

scenarios: {", ".join(SCENARIOS)}

physical parameters (angles in radians; --pi-units multiplies them by pi):
  --n-atoms N  --theta X  --phi X  --alpha C  --beta C
  --phi0t X | --omega W --delta D --t T
  --n-max N  --atom-basis-angle X  --delta-ratios R1,R2,...  --j-max J
complex values: 0.6, 0.8i, 0.6-0.8i
run control:
  --sweep NAME:START:STOP:COUNT  --jobs K  --seed S
  --format json|csv  --output PATH  --dump-state  --timing
default output directory: ${OUTPUT_DIR_ENV} (stdout when unset and no --output)
"""


def _target(cfg) -> Path | None:
    if cfg.output:
        path = Path(cfg.output)
        base = os.environ.get(OUTPUT_DIR_ENV)
        return Path(base) / path if base and not path.is_absolute() else path
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base:
        return Path(base) / f"{cfg.scenario}.{cfg.format}"
    return None


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    if not argv or argv[0] in ("-h", "--help"):
        sys.stdout.write(USAGE)
        return 0 if argv else 2
    if argv[0] == "--version":
        sys.stdout.write(f"dickefield {__version__}\n")
        return 0
    try:
        cfg = parse_config(argv)
        records = run_scenario(cfg)
        data = serialize(records, cfg.format, cfg.sweep)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return 2
    except NumericalGuardError as exc:
        log.error("numerical guard: %s", exc)
        return 3
    except ValueError as exc:
        log.error("invalid input: %s", exc)
        return 2

    target = _target(cfg)
    if target is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)
        log.info("wrote %s", target)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
