"""``ESNN`` parameter checkpoints holding the encoder and decoder sections.

Layout (little-endian)::

    magic "ESNN", u16 version, u16 section count
    section "ENC\\0": u32 intervals, u32 layers, per layer
        f64 alpha, f64 u_th, f64 surrogate_width, tensor
    section "DEC\\0": u32 layers, per layer weight tensor then bias tensor
    tensor: u32 ndim, ndim x u32 dims, row-major f32 data
"""

from __future__ import annotations

import io
import logging
import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np
import torch

from esai.common.errors import CheckpointError, InvalidArgumentError
from esai.recon.decoder import DecoderParams
from esai.snn.encoder import EncoderParams
from esai.snn.lif import LifConfig

LOGGER = logging.getLogger(__name__)

MAGIC = b"ESNN"
VERSION = 1
ENCODER_TAG = b"ENC\0"
DECODER_TAG = b"DEC\0"
HEADER = struct.Struct("<4sHH")
LIF_RECORD = struct.Struct("<ddd")
U32 = struct.Struct("<I")
F32 = np.dtype("<f4")


def save_checkpoint(path: Path | str, encoder: EncoderParams, decoder: DecoderParams) -> None:
    path = Path(path)
    buffer = io.BytesIO()
    buffer.write(HEADER.pack(MAGIC, VERSION, 2))
    buffer.write(ENCODER_TAG)
    buffer.write(U32.pack(encoder.intervals))
    buffer.write(U32.pack(len(encoder.weights)))
    for weight, lif in zip(encoder.weights, encoder.lif):
        buffer.write(LIF_RECORD.pack(lif.alpha, lif.u_th, lif.surrogate_width))
        _write_tensor(buffer, weight)
    buffer.write(DECODER_TAG)
    buffer.write(U32.pack(len(decoder.weights)))
    for weight, bias in zip(decoder.weights, decoder.biases):
        _write_tensor(buffer, weight)
        _write_tensor(buffer, bias)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(buffer.getvalue())
    except OSError as exc:
        raise CheckpointError(f"{path}: failed to write checkpoint ({exc})") from exc
    LOGGER.info("Saved checkpoint to %s", path)


def load_checkpoint(
    path: Path | str, dtype: torch.dtype = torch.float32
) -> tuple[EncoderParams, DecoderParams]:
    path = Path(path)
    try:
        payload = path.read_bytes()
    except OSError as exc:
        raise CheckpointError(f"{path}: cannot read checkpoint ({exc})") from exc
    stream = io.BytesIO(payload)
    try:
        magic, version, sections = HEADER.unpack(_read(stream, HEADER.size))
        if magic != MAGIC:
            raise CheckpointError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != VERSION:
            raise CheckpointError(f"unsupported checkpoint version {version}")
        if sections != 2:
            raise CheckpointError(f"expected 2 sections, found {sections}")

        _expect_tag(stream, ENCODER_TAG)
        (intervals,) = U32.unpack(_read(stream, U32.size))
        (layers,) = U32.unpack(_read(stream, U32.size))
        weights, configs = [], []
        for _ in range(layers):
            alpha, u_th, width = LIF_RECORD.unpack(_read(stream, LIF_RECORD.size))
            configs.append(LifConfig(alpha=alpha, u_th=u_th, surrogate_width=width))
            weights.append(_read_tensor(stream, dtype))

        _expect_tag(stream, DECODER_TAG)
        (layers,) = U32.unpack(_read(stream, U32.size))
        decoder_weights, decoder_biases = [], []
        for _ in range(layers):
            decoder_weights.append(_read_tensor(stream, dtype))
            decoder_biases.append(_read_tensor(stream, dtype))
        if stream.read(1):
            raise CheckpointError("trailing bytes after the decoder section")

        encoder = EncoderParams(weights, tuple(configs), intervals)  # type: ignore[arg-type]
        decoder = DecoderParams(decoder_weights, decoder_biases)
    except CheckpointError as exc:
        raise CheckpointError(f"{path}: {exc}") from exc
    except InvalidArgumentError as exc:
        raise CheckpointError(f"{path}: inconsistent parameters ({exc})") from exc
    LOGGER.info("Loaded checkpoint %s (N=%d)", path, encoder.intervals)
    return encoder, decoder


def _write_tensor(buffer: BinaryIO, tensor: torch.Tensor) -> None:
    array = tensor.detach().cpu().numpy().astype(F32)
    buffer.write(U32.pack(array.ndim))
    for dimension in array.shape:
        buffer.write(U32.pack(dimension))
    buffer.write(np.ascontiguousarray(array).tobytes())


def _read_tensor(stream: BinaryIO, dtype: torch.dtype) -> torch.Tensor:
    (ndim,) = U32.unpack(_read(stream, U32.size))
    if ndim > 8:
        raise CheckpointError(f"implausible tensor rank {ndim} at byte {stream.tell() - U32.size}")
    shape = tuple(U32.unpack(_read(stream, U32.size))[0] for _ in range(ndim))
    count = int(np.prod(shape)) if shape else 1
    data = np.frombuffer(_read(stream, count * F32.itemsize), dtype=F32).reshape(shape)
    return torch.as_tensor(data.copy(), dtype=dtype)


def _read(stream: BinaryIO, size: int) -> bytes:
    offset = stream.tell()
    chunk = stream.read(size)
    if len(chunk) != size:
        raise CheckpointError(f"truncated checkpoint at byte {offset}")
    return chunk


def _expect_tag(stream: BinaryIO, tag: bytes) -> None:
    offset = stream.tell()
    found = _read(stream, len(tag))
    if found != tag:
        raise CheckpointError(f"expected section {tag!r} at byte {offset}, found {found!r}")


__all__ = ["load_checkpoint", "save_checkpoint"]
