"""
Command-line interface: reproducible experiments writing CSV/JSON artifacts and a manifest.
"""

from src.cli.common import emit_manifest, experiment, RunContext
from src.cli.main import cli, main

__all__ = [
    'cli',
    'main',
    'emit_manifest',
    'experiment',
    'RunContext'
]
