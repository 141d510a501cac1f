"""Main CLI entry point for polypcount."""

import json
import logging
import os
import sys

import click
from pydantic import ValidationError

from .. import __version__
from ..config import create_sample_config
from ..errors import EXIT_USAGE, PolypCountError
from ..manifest import TOOL_NAME
from .ablate import ablate
from .cluster import cluster
from .common import emit
from .embed import embed
from .evaluate import evaluate, grid_search, loocv
from .generate import generate
from .loss_check import loss_check
from .reproduce import reproduce
from .tracklets import tracklets
from .train import train


def _fail(payload, exit_code: int):
    click.echo(json.dumps(payload, sort_keys=True), err=True)
    sys.exit(exit_code)


class PolypCountGroup(click.Group):
    """Click group that reports every failure as an error JSON on stderr.

    Exit codes: 0 success, 1 aborted, 2 usage or configuration error,
    3 data error, 4 numerical error.
    """

    def main(self, *args, **kwargs):
        kwargs["standalone_mode"] = False
        try:
            rv = super().main(*args, **kwargs)
        except click.exceptions.Abort:
            _fail({"error": "Aborted", "message": "aborted"}, 1)
        except click.ClickException as e:
            _fail({"error": type(e).__name__, "message": e.format_message()}, EXIT_USAGE)
        except PolypCountError as e:
            _fail(e.to_dict(), e.exit_code)
        except ValidationError as e:
            _fail({"error": "ConfigError", "message": str(e)}, EXIT_USAGE)
        sys.exit(rv if isinstance(rv, int) else 0)


@click.group(cls=PolypCountGroup)
@click.option('--debug', is_flag=True, help='Enable debug logging')
@click.option('--config-file', '-c', help='Path to JSON configuration file')
@click.option('--jobs', '-j', type=click.IntRange(min=1), help='Worker threads (default: CPU count)')
@click.pass_context
def cli(ctx, debug, config_file, jobs):
    """polypcount - count unique polyps in colonoscopy videos from tracklets."""

    # Logs go to stderr, result JSON to stdout
    level = logging.DEBUG if debug else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    ctx.ensure_object(dict)
    ctx.obj['logger'] = logging.getLogger('polypcount')
    ctx.obj['config_file'] = config_file
    ctx.obj['jobs'] = jobs


@cli.command('init-config')
@click.option('--path', '-p', default='polypcount.json', help='Path for the config file')
@click.pass_context
def init_config(ctx, path):
    """Create a sample configuration file."""
    try:
        written = create_sample_config(path)
    except OSError as e:
        raise click.FileError(path, hint=str(e))
    ctx.obj['logger'].info(f"Sample configuration written to {written}")
    emit({"config_file": os.path.abspath(written)})


@cli.command()
def version():
    """Show version information."""
    emit({"tool": TOOL_NAME, "version": __version__})


# Add subcommands
cli.add_command(generate)
cli.add_command(tracklets)
cli.add_command(train)
cli.add_command(embed)
cli.add_command(cluster)
cli.add_command(evaluate)
cli.add_command(grid_search)
cli.add_command(loocv)
cli.add_command(loss_check)
cli.add_command(ablate)
cli.add_command(reproduce)


def main():
    """Main entry point for console script."""
    cli(prog_name=TOOL_NAME)


if __name__ == '__main__':
    main()
