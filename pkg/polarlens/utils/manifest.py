"""Run manifests: resolved config, seed and SHA-256 hashes of inputs and outputs."""
from dataclasses import dataclass, field
import hashlib
import logging
import os

import yaml

from polarlens.errors import ConfigError

logger = logging.getLogger(__name__)

MANIFEST_VERSION = 1
CHUNK = 1 << 20


def file_sha256(path):
    digest = hashlib.sha256()
    with open(path, 'rb') as handle:
        for block in iter(lambda: handle.read(CHUNK), b''):
            digest.update(block)
    return f'sha256:{digest.hexdigest()}'


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    # data-scale and solver diagnostics; not checked on replay
    notes: dict = field(default_factory=dict)

    def add_input(self, name, path):
        self.inputs[name] = {'path': os.path.abspath(path), 'sha256': file_sha256(path)}

    def add_output(self, name, path):
        self.outputs[name] = {'path': os.path.abspath(path), 'sha256': file_sha256(path)}
        logger.info('wrote %s', path)

    def note(self, name, payload):
        self.notes[name] = payload

    def to_dict(self):
        return {
            'manifest_version': MANIFEST_VERSION,
            'command': self.command,
            'seed': self.seed,
            'config': self.config,
            'inputs': self.inputs,
            'outputs': self.outputs,
            'notes': self.notes,
        }

    def write(self, path):
        with open(path, 'w', encoding='utf-8') as handle:
            yaml.safe_dump(self.to_dict(), handle, sort_keys=True, default_flow_style=False)
        logger.info('manifest written to %s (%d inputs, %d outputs)', path, len(self.inputs), len(self.outputs))
        return path

    @classmethod
    def load(cls, path):
        try:
            with open(path, 'r', encoding='utf-8') as handle:
                raw = yaml.safe_load(handle) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f'cannot read manifest {path}: {exc}') from exc
        if raw.get('manifest_version') != MANIFEST_VERSION:
            raise ConfigError(f'{path} is not a version {MANIFEST_VERSION} manifest', field='manifest_version')
        return cls(raw['command'], raw.get('config') or {}, raw.get('seed', 0),
                   raw.get('inputs') or {}, raw.get('outputs') or {}, raw.get('notes') or {})

    def verify(self, section='outputs'):
        """Names of entries whose file is missing or whose hash changed"""
        stale = []
        for name, entry in getattr(self, section).items():
            if not os.path.exists(entry['path']) or file_sha256(entry['path']) != entry['sha256']:
                stale.append(name)
        return stale
