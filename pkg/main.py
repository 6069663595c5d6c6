"""
Command-line entry point

    python main.py profile --n 1 --k 1 --lambda -2
    python main.py rationality --n 3 --k 2 --lambda -2
    python main.py verify-ma --model egg --n 1 --k 1 --p 1 --points 20
    python main.py bundle-check --model sum-disk --powers 1,2
    python main.py selftest
"""
import json
import sys

from cli.commands import (
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_USAGE,
    cmd_bundle_check,
    cmd_profile,
    cmd_rationality,
    cmd_verify_ma,
)
from cli.config import UsageError, resolve_config
from cli.selftest import run_selftest
from config.settings import VERSION, settings
from utils.exceptions import CompositionError, InvalidSpecError, KahlerEinsteinError, PreconditionError
from utils.logger import reconfigure_all, setup_logger

# Setup logger
logger = setup_logger('KahlerEinstein')

COMMANDS = {
    'profile': cmd_profile,
    'rationality': cmd_rationality,
    'verify-ma': cmd_verify_ma,
    'bundle-check': cmd_bundle_check,
}


def main(argv=None) -> int:
    """Parse, dispatch and map failures to exit codes"""
    try:
        config = resolve_config(argv)
    except UsageError as e:
        logger.error(f"❌ Usage error: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"❌ Cannot read config file: {e}")
        return EXIT_IO

    if config.log_level or config.log_file:
        reconfigure_all(config.log_level, config.log_file)
    if not settings.validate():
        return EXIT_USAGE
    if config.log_level == 'DEBUG':
        settings.print_config()

    logger.info("=" * 60)
    logger.info(f"🚀 {config.subcommand} (version {VERSION})")
    logger.info("=" * 60)

    try:
        if config.subcommand == 'selftest':
            return run_selftest()
        return COMMANDS[config.subcommand](config)
    except (UsageError, InvalidSpecError, CompositionError, PreconditionError) as e:
        logger.error(f"❌ Invalid input: {e}")
        return EXIT_USAGE
    except KahlerEinsteinError as e:
        logger.error(f"❌ {type(e).__name__}: {e}")
        return EXIT_NUMERICAL
    except OSError as e:
        logger.error(f"❌ I/O failure: {e}")
        return EXIT_IO
    except json.JSONDecodeError as e:
        logger.error(f"❌ Unreadable input: {e}")
        return EXIT_IO


if __name__ == '__main__':
    sys.exit(main())
