import logging
import os

import click

from polarlens.errors import PolarLensError
from polarlens.utils.manifest import RunManifest

logger = logging.getLogger(__name__)

replay_bp = click.Group('replay', help='Re-run from a manifest.')


@replay_bp.command('replay')
@click.argument('manifest_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--check/--no-check', default=True, help='Compare regenerated outputs with the recorded hashes.')
@click.pass_context
def replay(ctx, manifest_path, check):
    """Re-run the command recorded in MANIFEST_PATH with its resolved config."""
    recorded = RunManifest.load(manifest_path)
    command = ctx.find_root().command.get_command(ctx, recorded.command)
    if command is None:
        raise PolarLensError(f'manifest names unknown command {recorded.command!r}')
    stale_inputs = recorded.verify('inputs')
    if stale_inputs:
        logger.warning('inputs changed since the recorded run: %s', ', '.join(stale_inputs))

    ctx.invoke(command, config_path=manifest_path, overrides=(), preset=None, output_dir=None)
    if not check:
        return
    output_dir = recorded.config.get('output_dir') or os.path.dirname(os.path.abspath(manifest_path))
    rerun = RunManifest.load(os.path.join(output_dir, ctx.obj.MANIFEST_NAME))
    changed = sorted(name for name, entry in recorded.outputs.items()
                     if rerun.outputs.get(name, {}).get('sha256') != entry['sha256'])
    if changed:
        raise PolarLensError(f'replay produced different outputs: {", ".join(changed)}')
    click.echo(f'{len(recorded.outputs)} outputs reproduced')
