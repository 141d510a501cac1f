"""Reproduce command implementation."""

import click

from ..manifest import reproduce as reproduce_manifest
from .common import emit


@click.command()
@click.option('--manifest', '-m', required=True, help='manifest.json of a previous run')
@click.pass_context
def reproduce(ctx, manifest):
    """Re-run a manifest and verify that every artifact is byte-identical."""
    from .registry import RUNNERS

    ctx.obj['logger'].info(f"Reproducing {manifest}")
    emit(reproduce_manifest(manifest, RUNNERS))
