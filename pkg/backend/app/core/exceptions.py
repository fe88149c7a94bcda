"""
Exceptions

도메인 공통 예외 계층과 CLI 종료 코드 매핑
"""
from typing import Dict, Optional


class MemorizationLabError(Exception):
    """모든 도메인 예외의 기반 클래스"""

    exit_code = 1


# ========================================
# Config (exit 2)
# ========================================

class ConfigError(MemorizationLabError, ValueError):
    """잘못된 스펙/설정"""

    exit_code = 2


class EmptySubsetError(ConfigError):
    """요청한 예시 부분집합이 비어 있음"""

    def __init__(self, subset: str):
        self.subset = subset
        super().__init__(f"Subset '{subset}' is empty")


class InsufficientExamplesError(ConfigError):
    """클래스별 예시 수 부족"""

    def __init__(self, subset: str, required: int, deficient: Dict[int, int]):
        self.subset = subset
        self.required = required
        self.deficient = dict(deficient)
        listing = ", ".join(f"{c}:{n}" for c, n in sorted(self.deficient.items()))
        super().__init__(
            f"Subset '{subset}' needs {required} rows per class; deficient classes -> {listing}"
        )


# ========================================
# Numerical (exit 3)
# ========================================

class NumericalError(MemorizationLabError, ArithmeticError):
    """수치 계산 실패"""

    exit_code = 3


class AnchorSolveError(NumericalError):
    """앵커 QP가 반복 한도 내에 수렴하지 않음"""

    def __init__(self, draw_index: int, manifold_index: Optional[int] = None, reason: str = ""):
        self.draw_index = draw_index
        self.manifold_index = manifold_index
        where = f"draw {draw_index}"
        if manifold_index is not None:
            where = f"manifold {manifold_index}, {where}"
        super().__init__(f"Anchor solve failed ({where}) {reason}".strip())


class DegenerateManifoldError(NumericalError):
    """중심 노름이 0인 매니폴드 등 좌표계를 만들 수 없는 경우"""


class DivergenceError(NumericalError):
    """학습 발산 (loss > 1e3 또는 non-finite)"""

    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"Training diverged at epoch {epoch} (loss={loss})")


class NonFiniteActivationError(NumericalError):
    """순전파 중 non-finite 값 발생"""

    def __init__(self, layer: int):
        self.layer = layer
        super().__init__(f"Non-finite activation at layer {layer}")


class NonMonotoneFractionError(NumericalError):
    """이분 탐색 중 분리가능 비율이 단조가 아님"""


# ========================================
# Storage (exit 4)
# ========================================

class StorageFormatError(MemorizationLabError, OSError):
    """파일 포맷/입출력 오류"""

    exit_code = 4


class MagicMismatchError(StorageFormatError):
    def __init__(self, expected: bytes, actual: bytes):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Bad magic: expected {expected!r}, got {actual!r}")


class VersionMismatchError(StorageFormatError):
    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(f"Unsupported format version {actual} (expected {expected})")


class TruncatedFileError(StorageFormatError):
    def __init__(self, expected_bytes: int, actual_bytes: int):
        self.expected_bytes = expected_bytes
        self.actual_bytes = actual_bytes
        super().__init__(
            f"Truncated file: expected {expected_bytes} bytes, got {actual_bytes}"
        )


class NonFinitePayloadError(StorageFormatError):
    """페이로드에 NaN/Inf 포함"""


class OverwriteRefusedError(StorageFormatError):
    """--force 없이 기존 산출물 덮어쓰기 시도"""


class MissingCheckpointError(MemorizationLabError, KeyError):
    """요청한 에폭의 스냅샷이 없음"""

    exit_code = 4

    def __init__(self, epoch: int):
        self.epoch = epoch
        super().__init__(f"No checkpoint for epoch {epoch}")

    def __str__(self) -> str:
        return f"No checkpoint for epoch {self.epoch}"


def exit_code_for(exc: BaseException) -> int:
    """
    예외를 CLI 종료 코드로 변환

    Args:
        exc: 발생한 예외

    Returns:
        0 이외의 종료 코드
    """
    if isinstance(exc, MemorizationLabError):
        return exc.exit_code
    if isinstance(exc, (ValueError,)):
        return 2
    if isinstance(exc, (ArithmeticError, FloatingPointError)):
        return 3
    if isinstance(exc, OSError):
        return 4
    return 1
