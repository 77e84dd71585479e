from pydantic_settings import BaseSettings
import os
from dotenv import load_dotenv

load_dotenv()


class Settings(BaseSettings):
    PROJECT_NAME: str = "radmhd"
    VERSION: str = "1.0.0"

    OUTPUT_DIR: str = os.getenv("RADMHD_OUTPUT_DIR", "output")
    LOG_LEVEL: str = os.getenv("RADMHD_LOG_LEVEL", "INFO")

    # Output settings
    CSV_PRECISION: int = 17  # significant digits, lossless for float64
    METRICS_FILENAME: str = "metrics.prom"

    # MMS settings
    MMS_SELF_CHECK_POINTS: int = 64
    MMS_SELF_CHECK_SEED: int = int(os.getenv("RADMHD_MMS_SEED", "20240611"))

    class Config:
        case_sensitive = True


settings = Settings()
