"""Command-line entrypoint."""

from __future__ import annotations

import logging
import sys
from uuid import uuid4

from shuffle_privacy.presentation.cli import EXIT_INVALID_INPUT, run

LOGGER = logging.getLogger(__name__)


def main() -> int:
    """Run the shuffle-privacy command line."""
    try:
        return run(sys.argv[1:])
    except Exception:
        correlation_id = str(uuid4())
        LOGGER.exception("event=cli_failed correlation_id=%s", correlation_id)
        print(f"shuffle-privacy failed. correlation_id={correlation_id}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
