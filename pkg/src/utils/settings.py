# src/utils/settings.py

from functools import lru_cache
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """Environment-driven defaults (INDEX_TRANSFORMS_* variables or .env)"""

    model_config = SettingsConfigDict(env_prefix="INDEX_TRANSFORMS_", env_file=".env", extra="ignore")

    output_dir: Path = Path("outputs")
    log_file: str = "index_transforms.log"
    log_level: str = "INFO"

    series_max_terms: int = Field(5000, ge=10)
    series_rel_tol: float = Field(1e-13, gt=0.0, lt=1.0)
    series_abs_floor: float = Field(1e-300, gt=0.0)

    contour_half_height: float = Field(14.0, gt=0.0)
    contour_nodes: int = Field(2048, ge=64)

    # largest tau accepted by the oscillatory routes
    tau_cap: float = Field(20.0, gt=0.0)



@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
