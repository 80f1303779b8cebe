"""
Schemas shared across packages: experiment configuration and run manifests.
"""

from src.schemas.experiment import CalibrationSettings, ExperimentConfig, RunManifest

__all__ = [
    'CalibrationSettings',
    'ExperimentConfig',
    'RunManifest'
]
