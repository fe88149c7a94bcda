from pydantic_settings import BaseSettings, SettingsConfigDict
from pathlib import Path


class Settings(BaseSettings):
    """애플리케이션 설정"""

    model_config = SettingsConfigDict(
        env_file=str(Path(__file__).resolve().parent.parent.parent / ".env"),  # backend/.env 경로 명시
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"  # 정의되지 않은 환경 변수 무시
    )

    # Application
    APP_NAME: str = "Manifold Memorization Lab"
    APP_VERSION: str = "1.0.0"

    # Output
    OUTPUT_DIR: str = "./output"

    # Reproducibility
    DEFAULT_SEED: int = 0
    NUM_THREADS: int = 1

    # Geometry (MFTMA)
    GAUSS_SAMPLES: int = 200
    RANK_TOL: float = 1e-10

    # Empirical capacity
    DICHOTOMY_TRIALS: int = 100
    LP_MAX_ITER: int = 10000

    # Console
    SHOW_PROGRESS: bool = True

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = ""

    @property
    def output_path(self) -> Path:
        """출력 디렉토리를 Path로 반환"""
        return Path(self.OUTPUT_DIR)


# 싱글톤 설정 인스턴스
settings = Settings()
