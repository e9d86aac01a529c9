from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

load_dotenv()

class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_file=".env", case_sensitive=False, extra="ignore", populate_by_name=True)

    # Root finding tolerances
    root_eps: float = Field(1e-12, alias="ROOT_EPS")
    unimodular_eps: float = Field(1e-10, alias="UNIMODULAR_EPS")
    cluster_eps: float = Field(1e-6, alias="CLUSTER_EPS")
    degeneracy_eps: float = Field(1e-14, alias="DEGENERACY_EPS")

    # Multiplicity certification near triple roots
    multiplicity_eps: float = Field(1e-4, alias="MULTIPLICITY_EPS")
    certify_eps: float = Field(1e-6, alias="CERTIFY_EPS")

    # Relative residual band for the reflection identity
    residual_eps: float = Field(1e-9, alias="RESIDUAL_EPS")

    # Brute-force oracle and level sets
    oracle_grid_size: int = Field(1_000_000, alias="ORACLE_GRID_SIZE")
    level_set_workers: int = Field(1, alias="LEVEL_SET_WORKERS")

    # Invariant sweeps
    default_seed: int = Field(42, alias="DEFAULT_SEED")
    selftest_workers: int = Field(4, alias="SELFTEST_WORKERS")

    # Logging
    log_level: str = Field("WARNING", alias="LOG_LEVEL")
    log_format: str = Field("console", alias="LOG_FORMAT")  # console, json

settings = Settings()
