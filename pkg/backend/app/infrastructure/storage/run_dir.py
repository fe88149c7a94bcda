"""
Run Directory

실행별 출력 디렉토리: 덮어쓰기 방지, CSV/JSON 기록, 매니페스트, FAILED 마커
"""
import hashlib
import json
import logging
import platform
import shutil
import traceback
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
import scipy

import app
from app.core.exceptions import OverwriteRefusedError
from app.infrastructure.storage.binary import PathLike, write_bytes

logger = logging.getLogger(__name__)

FAILED_MARKER = "FAILED"


def config_hash(payload: Dict[str, Any]) -> str:
    """정렬된 JSON 의 sha256"""
    return hashlib.sha256(json.dumps(payload, sort_keys=True, default=str).encode("utf-8")).hexdigest()


class RunDirectory:
    """한 번의 CLI 실행 산출물 디렉토리"""

    def __init__(self, root: PathLike, force: bool = False):
        self.root = Path(root)
        self.force = force
        self.root.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        """
        산출물 경로 (이미 있으면 force 없이는 거부)

        Raises:
            OverwriteRefusedError
        """
        target = self.root / name
        if target.exists() and not self.force:
            raise OverwriteRefusedError(f"Refusing to overwrite existing file: {target} (use --force)")
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def subdir(self, name: str) -> Path:
        """
        하위 디렉토리 (비어 있지 않으면 force 없이는 거부, force 면 비우고 다시 생성)

        Raises:
            OverwriteRefusedError
        """
        target = self.root / name
        if target.exists() and any(target.iterdir()):
            if not self.force:
                raise OverwriteRefusedError(f"Refusing to overwrite existing directory: {target} (use --force)")
            shutil.rmtree(target)
        target.mkdir(parents=True, exist_ok=True)
        return target

    def write_text(self, name: str, content: str) -> Path:
        return write_bytes(self.path(name), content.encode("utf-8"), force=True)

    def write_json(self, name: str, payload: Any) -> Path:
        return self.write_text(name, json.dumps(payload, indent=2, sort_keys=True, default=_json_default))

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        return self.write_text(name, frame.to_csv(index=False))

    def write_manifest(self, config: Dict[str, Any], seeds: Dict[str, int], extra: Optional[Dict[str, Any]] = None) -> Path:
        """재현용 매니페스트 (설정 해시, 시드, 버전)"""
        manifest = {
            "config_hash": config_hash(config),
            "config": config,
            "seeds": seeds,
            "versions": {
                "app": app.__version__,
                "python": platform.python_version(),
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "pandas": pd.__version__,
            },
            "created_at": datetime.now().isoformat(timespec="seconds"),
        }
        if extra:
            manifest.update(extra)
        return self.write_json("manifest.json", manifest)

    def mark_failed(self, stage: str, exc: BaseException) -> Path:
        """단계 실패 마커 (부분 산출물은 유지)"""
        target = self.root / FAILED_MARKER
        content = f"stage: {stage}\nerror: {type(exc).__name__}: {exc}\n\n" + "".join(
            traceback.format_exception(type(exc), exc, exc.__traceback__)
        )
        target.write_text(content, encoding="utf-8")
        logger.error("Stage '%s' failed: %s (marker: %s)", stage, exc, target)
        return target

    @property
    def failed(self) -> bool:
        return (self.root / FAILED_MARKER).exists()


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Not JSON serializable: {type(value).__name__}")
