from typing import Optional

from pydantic_settings import BaseSettings


class Settings(BaseSettings):

    PROJECT_NAME: str = "finsler-cone"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Numerical tolerances
    CLASSIFICATION_TOL: float = 1e-10
    ODE_RTOL: float = 1e-10
    ODE_ATOL: float = 1e-12
    DEAD_BAND: float = 1e-7
    DEGENERACY_FLOOR: float = 1e-12
    EVENT_TOL: float = 1e-12

    MAX_STEPS: int = 20000
    BRACKET_MAX: float = 1e6

    # Memoized catalog constants (z_* and friends); unset keeps them in memory
    CACHE: Optional[str] = None

    DEVICE: str = "cpu"

    class Config:
        env_file = ".env"
        env_prefix = "FINSLER_CONE_"
        case_sensitive = True
        extra = "ignore"


settings = Settings()
