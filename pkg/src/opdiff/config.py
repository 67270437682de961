from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class OpdiffConfig(BaseSettings):
    grid_points: int = Field(501, ge=11)
    norm_grid_points: int = Field(2001, ge=11)
    quad_extra: int = Field(50, ge=1)
    antiderivative_panels: int = Field(128, ge=64)
    output_dir: Path = Path("out")
    verdict_atol: float = Field(1e-12, ge=0.0)
    check_refinement: bool = False
    workers: int = Field(1, ge=1)
    debug: bool = False

    model_config = SettingsConfigDict(
        env_prefix="OPDIFF_",
        env_file=".env",
        env_file_encoding="utf-8",
    )
