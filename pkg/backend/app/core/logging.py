"""
Logging Setup

rich 콘솔 핸들러 + (선택) 파일 핸들러 구성
"""
import logging
from pathlib import Path
from typing import Optional

from rich.logging import RichHandler

from app.core.config import settings

_CONFIGURED = False


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """
    `app` 로거 설정 (여러 번 호출해도 핸들러는 한 번만 붙음)

    Args:
        level: 로그 레벨 (기본값: settings.LOG_LEVEL)
        log_file: 로그 파일 경로 (빈 문자열이면 콘솔만)

    Returns:
        `app` 루트 로거
    """
    global _CONFIGURED
    logger = logging.getLogger("app")
    logger.setLevel((level or settings.LOG_LEVEL).upper())

    if _CONFIGURED:
        return logger

    console = RichHandler(rich_tracebacks=True, show_path=False)
    console.setFormatter(logging.Formatter("%(message)s"))
    logger.addHandler(console)

    log_file = settings.LOG_FILE if log_file is None else log_file
    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, encoding="utf-8")
        file_handler.setFormatter(
            logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s")
        )
        logger.addHandler(file_handler)

    logger.propagate = False
    _CONFIGURED = True
    return logger
