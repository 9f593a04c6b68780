#!/usr/bin/env python3
"""
cfkit - continued fraction toolkit
Main entry point
"""

import logging
import os
import sys

from dotenv import load_dotenv

from src.cli import main as cli_main


def configure_logging():
    """Configure root logging; stdout is reserved for reports"""
    level_name = os.getenv('CF_LOG_LEVEL', 'WARNING').upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING

    handlers = [logging.StreamHandler(sys.stderr)]
    log_file = os.getenv('CF_LOG_FILE')
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers
    )
    if level_name != logging.getLevelName(level):
        logging.getLogger(__name__).warning(f"Unknown CF_LOG_LEVEL '{level_name}', using WARNING")


def main():
    """Main entry point"""
    load_dotenv()
    configure_logging()
    return cli_main(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
