"""
Training configuration for the optical-mapped CNN.
"""
from enum import Enum

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Backend(str, Enum):
    """Forward backend options"""
    DIGITAL = "digital"
    OPTICAL = "optical-sim"


class TrainConfig(BaseSettings):
    """Optimizer, schedule and noise settings."""

    # Adam
    learning_rate: float = Field(default=1e-3, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    epsilon: float = Field(default=1e-8, gt=0)

    # Schedule
    epochs: int = Field(default=10, ge=1)
    batch_size: int = Field(default=32, ge=1)
    seed: int = 0

    # Forward pass
    backend: Backend = Backend.DIGITAL
    noise_sigma: float = Field(default=0.0, ge=0)

    # Loss is fixed: sparse categorical cross-entropy
    loss: str = "sparse_categorical_crossentropy"

    model_config = SettingsConfigDict(
        env_prefix="FASTONN_TRAIN_",
        env_file=".env",
        extra="ignore"
    )

    @field_validator("loss")
    def check_loss(cls, v):
        """Only sparse categorical cross-entropy is supported"""
        if v != "sparse_categorical_crossentropy":
            raise ValueError(f"Unsupported loss '{v}'")
        return v
