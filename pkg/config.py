from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    # App Settings
    APP_NAME: str = "FrameCraft"
    DEBUG: bool = False
    LOG_LEVEL: str = "WARNING"

    # Numerical tolerances
    FRAMECRAFT_TOL: float = 1e-10         # section solver + CLI --tol default
    PINV_RCOND: float = 1e-12             # relative cutoff for the least-squares step

    # ── Section solver (norm-preserving transport) ───────────────────
    SOLVER_MAX_ITER: int = 100
    SOLVER_MAX_HALVINGS: int = 20

    # ── Local-minimality probe ───────────────────────────────────────
    PROBE_RADIUS: float = 1e-2
    PROBE_SAMPLES: int = 2000
    PROBE_WORKERS: int = 1                # >1 evaluates samples on a thread pool

    # Cap on m**n for explicit cyclic-product enumeration
    ENUMERATION_BUDGET: int = 10**7

    # Model Configuration
    model_config = SettingsConfigDict(env_file=".env", env_file_encoding="utf-8", case_sensitive=True, extra="ignore")

settings = Settings()
