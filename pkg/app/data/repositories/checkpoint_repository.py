"""Checkpoint container repository

Layout (all integers little-endian):

    magic b"CASECKPT" | u32 version | u64 manifest length | manifest JSON (UTF-8)
    u32 tensor count
    per tensor: u16 name length | name | u8 dtype width (4 or 8) | u8 ndim |
                u64 dims... | raw little-endian IEEE values

Writing the same state twice yields identical bytes.
"""
import struct
from pathlib import Path
from typing import Mapping

import numpy as np

from app.domain.exceptions import ArtifactMismatchError, ResourceNotFoundError
from app.schemas.checkpoint import CHECKPOINT_FORMAT_VERSION, ModelManifest

MAGIC = b"CASECKPT"
_DTYPES = {4: np.dtype("<f4"), 8: np.dtype("<f8")}


class CheckpointRepository:
    def __init__(self, directory: Path):
        self.directory = Path(directory)

    def path_for(self, name: str) -> Path:
        return self.directory / f"{name}.ckpt"

    def save(self, name: str, manifest: ModelManifest, state: Mapping[str, np.ndarray]) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        target = self.path_for(name)
        target.write_bytes(encode_checkpoint(manifest, state))
        return target

    @staticmethod
    def load(path: Path) -> tuple[ModelManifest, dict[str, np.ndarray]]:
        path = Path(path)
        if not path.exists():
            raise ResourceNotFoundError("Checkpoint", path)
        return decode_checkpoint(path.read_bytes())


def encode_checkpoint(manifest: ModelManifest, state: Mapping[str, np.ndarray]) -> bytes:
    manifest_bytes = manifest.model_dump_json().encode("utf-8")
    parts = [MAGIC, struct.pack("<IQ", CHECKPOINT_FORMAT_VERSION, len(manifest_bytes)), manifest_bytes]
    parts.append(struct.pack("<I", len(state)))
    for name, values in state.items():
        values = np.asarray(values)
        width = values.dtype.itemsize
        if width not in _DTYPES or values.dtype.kind != "f":
            raise ArtifactMismatchError(f"tensor {name} has unsupported dtype {values.dtype}")
        encoded = name.encode("utf-8")
        parts.append(struct.pack("<H", len(encoded)))
        parts.append(encoded)
        parts.append(struct.pack("<BB", width, values.ndim))
        parts.append(struct.pack(f"<{values.ndim}Q", *values.shape))
        parts.append(np.ascontiguousarray(values, dtype=_DTYPES[width]).tobytes())
    return b"".join(parts)


def decode_checkpoint(blob: bytes) -> tuple[ModelManifest, dict[str, np.ndarray]]:
    if blob[: len(MAGIC)] != MAGIC:
        raise ArtifactMismatchError("not a checkpoint file (bad magic)")
    offset = len(MAGIC)
    version, manifest_len = struct.unpack_from("<IQ", blob, offset)
    if version != CHECKPOINT_FORMAT_VERSION:
        raise ArtifactMismatchError(f"checkpoint format version {version} is not supported")
    offset += struct.calcsize("<IQ")
    manifest = ModelManifest.model_validate_json(blob[offset : offset + manifest_len])
    offset += manifest_len
    (count,) = struct.unpack_from("<I", blob, offset)
    offset += 4
    state: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack_from("<H", blob, offset)
        offset += 2
        name = blob[offset : offset + name_len].decode("utf-8")
        offset += name_len
        width, ndim = struct.unpack_from("<BB", blob, offset)
        offset += 2
        shape = struct.unpack_from(f"<{ndim}Q", blob, offset)
        offset += 8 * ndim
        dtype = _DTYPES.get(width)
        if dtype is None:
            raise ArtifactMismatchError(f"tensor {name} has unsupported width {width}")
        size = int(np.prod(shape, dtype=np.int64)) if ndim else 1
        values = np.frombuffer(blob, dtype=dtype, count=size, offset=offset).reshape(shape)
        offset += size * width
        state[name] = values.astype(dtype.newbyteorder("="), copy=True)
    return manifest, state
