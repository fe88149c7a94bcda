"""
Checkpoint File (MPC1)

매직, 버전, 스펙 해시(sha256 32B), 에폭, 레이어 수, 바이어스 플래그,
레이어별 (out, in) + f64 가중치 [+ f64 바이어스]
"""
from pathlib import Path
from typing import Tuple

from app.infrastructure.storage.binary import (
    BinaryReader,
    BinaryWriter,
    PathLike,
    require_finite,
    write_bytes,
)
from app.domain.net.schemas import FeedforwardModel

MAGIC = b"MPC1"
VERSION = 1


def encode_checkpoint(model: FeedforwardModel, spec_hash: str) -> bytes:
    writer = BinaryWriter(MAGIC, VERSION)
    writer.raw(bytes.fromhex(spec_hash))
    writer.u32(model.epoch).u32(model.n_layers).u8(1 if model.biases is not None else 0)
    for w in model.weights:
        writer.u32(w.shape[0]).u32(w.shape[1])
    for l, w in enumerate(model.weights):
        writer.array(w, "f8")
        if model.biases is not None:
            writer.array(model.biases[l], "f8")
    return writer.getvalue()


def decode_checkpoint(payload: bytes) -> Tuple[FeedforwardModel, str]:
    reader = BinaryReader(payload, MAGIC, VERSION)
    spec_hash = reader.raw(32).hex()
    epoch, n_layers, has_bias = reader.u32(), reader.u32(), reader.u8()
    shapes = [(reader.u32(), reader.u32()) for _ in range(n_layers)]

    expected = sum(o * i * 8 + (o * 8 if has_bias else 0) for o, i in shapes)
    reader.expect_remaining(expected)

    weights, biases = [], [] if has_bias else None
    for out_dim, in_dim in shapes:
        weights.append(require_finite(reader.array((out_dim, in_dim), "f8"), "weights").copy())
        if has_bias:
            biases.append(require_finite(reader.array((out_dim,), "f8"), "biases").copy())
    return FeedforwardModel(weights=weights, biases=biases, epoch=epoch), spec_hash


def write_checkpoint(path: PathLike, model: FeedforwardModel, spec_hash: str, force: bool = False) -> Path:
    """체크포인트 파일 저장"""
    return write_bytes(path, encode_checkpoint(model, spec_hash), force=force)


def read_checkpoint(path: PathLike) -> Tuple[FeedforwardModel, str]:
    """체크포인트 파일 로드 → (model, spec_hash)"""
    return decode_checkpoint(Path(path).read_bytes())
