"""Settings for the lab, read from CARDLAB_* environment variables and an optional .env file."""

import logging
from functools import lru_cache
from pathlib import Path
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .simnet import DEFAULT_DELTA_T

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class LabSettings(BaseSettings):
    """Process-wide settings. The seed is deliberately not configurable here."""

    model_config = SettingsConfigDict(env_prefix="CARDLAB_", env_file=".env", extra="ignore")

    log_level: str = Field(default="WARNING", description="Root log level")
    delta_t: int = Field(default=DEFAULT_DELTA_T, ge=0, description="Default timestamp window in ticks")
    fixtures_dir: Optional[Path] = Field(default=None, description="Override for the fixture corpus directory")

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        level = value.upper()
        # getLevelNamesMapping() is 3.11+; it returns a copy of _nameToLevel.
        names = getattr(logging, "getLevelNamesMapping", lambda: logging._nameToLevel)()
        if level not in names:
            raise ValueError(f"unknown log level '{value}'")
        return level


@lru_cache(maxsize=1)
def get_settings() -> LabSettings:
    settings = LabSettings()
    logger.debug(f"Loaded settings: log_level={settings.log_level} delta_t={settings.delta_t}")
    return settings
