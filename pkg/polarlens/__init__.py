import json
import logging
import logging.config
import os

import click
from dotenv import load_dotenv
from pydantic import ValidationError

from config import Config
from polarlens.errors import ConfigError, PolarLensError

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


def error_payload(exc):
    """Single-line JSON body for a failed command"""
    payload = {'error': type(exc).__name__, 'message': str(exc)}
    if isinstance(exc, PolarLensError):
        payload.update(exc.details())
    return json.dumps(payload, sort_keys=True)


class PolarLensGroup(click.Group):
    """Reports library errors as one JSON line on stderr"""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (ConfigError, ValidationError) as exc:
            click.echo(error_payload(exc), err=True)
            ctx.exit(2)
        except (PolarLensError, ValueError, TypeError, KeyError, OSError) as exc:
            logger.debug('command failed', exc_info=True)
            click.echo(error_payload(exc), err=True)
            ctx.exit(1)


def configure_logging(config_class):
    logging.config.fileConfig(config_class.LOGGING_INI, disable_existing_loggers=False)
    logging.getLogger('polarlens').setLevel(config_class.LOG_LEVEL)


def register_blueprint(cli, group):
    for name, command in group.commands.items():
        cli.add_command(command, name)


def create_cli(config_class=Config):
    """Create and configure the command-line application"""

    @click.group(cls=PolarLensGroup)
    @click.option('-v', '--verbose', is_flag=True, help='Log at DEBUG level.')
    @click.pass_context
    def cli(ctx, verbose):
        """Lensless polarization imaging through a diffuser and a striped polarizer mask."""
        ctx.obj = config_class
        if verbose:
            logging.getLogger('polarlens').setLevel(logging.DEBUG)

    configure_logging(config_class)

    # Register command groups
    from polarlens.commands.synthesis import synthesis
    register_blueprint(cli, synthesis)

    from polarlens.commands.imaging import imaging
    register_blueprint(cli, imaging)

    from polarlens.commands.analysis import analysis
    register_blueprint(cli, analysis)

    from polarlens.commands.experiments import experiments
    register_blueprint(cli, experiments)

    from polarlens.commands.replay import replay_bp
    register_blueprint(cli, replay_bp)

    return cli
