"""
Binary Container Helpers

버전 헤더가 있는 little-endian 바이너리 컨테이너 읽기/쓰기 공통 유틸
"""
import io
import struct
from pathlib import Path
from typing import Union

import numpy as np

from app.core.exceptions import (
    MagicMismatchError,
    NonFinitePayloadError,
    OverwriteRefusedError,
    TruncatedFileError,
    VersionMismatchError,
)

PathLike = Union[str, Path]


def write_bytes(path: PathLike, payload: bytes, force: bool = False) -> Path:
    """
    파일 쓰기 (기존 파일은 force 없이 덮어쓰지 않음)

    Raises:
        OverwriteRefusedError: 파일이 이미 존재하고 force=False
    """
    path = Path(path)
    if path.exists() and not force:
        raise OverwriteRefusedError(f"Refusing to overwrite existing file: {path} (use --force)")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(payload)
    return path


class BinaryWriter:
    """매직 + 버전 헤더로 시작하는 컨테이너 작성기"""

    def __init__(self, magic: bytes, version: int):
        self._buf = io.BytesIO()
        self._buf.write(magic)
        self.u16(version)

    def u8(self, value: int) -> "BinaryWriter":
        self._buf.write(struct.pack("<B", value))
        return self

    def u16(self, value: int) -> "BinaryWriter":
        self._buf.write(struct.pack("<H", value))
        return self

    def u32(self, value: int) -> "BinaryWriter":
        self._buf.write(struct.pack("<I", value))
        return self

    def u64(self, value: int) -> "BinaryWriter":
        self._buf.write(struct.pack("<Q", value))
        return self

    def f64(self, value: float) -> "BinaryWriter":
        self._buf.write(struct.pack("<d", value))
        return self

    def raw(self, data: bytes) -> "BinaryWriter":
        self._buf.write(data)
        return self

    def text(self, value: str) -> "BinaryWriter":
        encoded = value.encode("utf-8")
        self.u32(len(encoded))
        self._buf.write(encoded)
        return self

    def array(self, values: np.ndarray, dtype: str) -> "BinaryWriter":
        """row-major little-endian 배열"""
        self._buf.write(np.ascontiguousarray(values, dtype=np.dtype(dtype).newbyteorder("<")).tobytes())
        return self

    def getvalue(self) -> bytes:
        return self._buf.getvalue()


class BinaryReader:
    """컨테이너 판독기 (매직/버전 검증 + 잘림 검사)"""

    def __init__(self, data: bytes, magic: bytes, version: int):
        self.data = data
        self.offset = 0
        found = self.data[: len(magic)]
        if found != magic:
            raise MagicMismatchError(magic, bytes(found))
        self.offset = len(magic)
        actual_version = self.u16()
        if actual_version != version:
            raise VersionMismatchError(version, actual_version)

    @classmethod
    def from_path(cls, path: PathLike, magic: bytes, version: int) -> "BinaryReader":
        return cls(Path(path).read_bytes(), magic, version)

    def _take(self, n: int) -> bytes:
        end = self.offset + n
        if end > len(self.data):
            raise TruncatedFileError(end, len(self.data))
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk

    def u8(self) -> int:
        return struct.unpack("<B", self._take(1))[0]

    def u16(self) -> int:
        return struct.unpack("<H", self._take(2))[0]

    def u32(self) -> int:
        return struct.unpack("<I", self._take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self._take(8))[0]

    def f64(self) -> float:
        return struct.unpack("<d", self._take(8))[0]

    def raw(self, n: int) -> bytes:
        return self._take(n)

    def text(self) -> str:
        return self._take(self.u32()).decode("utf-8")

    def expect_remaining(self, n_bytes: int) -> None:
        """헤더에서 계산한 페이로드 크기와 실제 파일 크기 비교"""
        expected = self.offset + n_bytes
        if len(self.data) < expected:
            raise TruncatedFileError(expected, len(self.data))

    def array(self, shape, dtype: str) -> np.ndarray:
        dt = np.dtype(dtype).newbyteorder("<")
        count = int(np.prod(shape)) if len(shape) else 1
        chunk = self._take(count * dt.itemsize)
        return np.frombuffer(chunk, dtype=dt).astype(np.dtype(dtype)).reshape(shape)


def require_finite(values: np.ndarray, what: str) -> np.ndarray:
    """NaN/Inf 페이로드 거부"""
    if not np.all(np.isfinite(values)):
        raise NonFinitePayloadError(f"{what} contains non-finite values")
    return values
