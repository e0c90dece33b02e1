"""
Command-line entry point.

Exit codes: 0 success, 1 runtime or data error, 2 usage or configuration error.
"""
import logging
import sys
from typing import Optional, Sequence

from app.domain.exceptions import EXIT_RUNTIME_ERROR, DomainException
from app.infrastructure.logging_setup import configure_logging
from app.presentation.cli.router import build_parser

logger = logging.getLogger(__name__)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 on --help
        return e.code if isinstance(e.code, int) else EXIT_RUNTIME_ERROR

    configure_logging(args.log_level, args.log_file)
    try:
        return args.handler(args)
    except DomainException as e:
        logger.error("%s: %s", type(e).__name__, e.message)
        return e.exit_code
    except Exception:
        logger.exception("Unexpected error in '%s'", args.command)
        return EXIT_RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
