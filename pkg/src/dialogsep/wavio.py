"""RIFF/WAVE reading and writing for stereo broadcast material.

Supports little-endian PCM 16/24-bit and IEEE float 32-bit, interleaved
stereo only. Unlike the stdlib ``wave`` module this handles float and
24-bit payloads, and it rejects anything the rest of the toolkit cannot
represent instead of guessing.
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np

from .audio import AudioClip
from .errors import WavFormatError

log = logging.getLogger(__name__)

_FORMAT_PCM = 1
_FORMAT_IEEE_FLOAT = 3
_FORMAT_EXTENSIBLE = 0xFFFE

# Allowed values for save_wav's bit_depth argument.
BIT_DEPTHS = (16, 24, "float32")


def load_wav(path: str | Path) -> AudioClip:
    """Read a stereo WAV file into an AudioClip.

    Integer PCM is scaled to [-1, 1) by dividing by 2^(bits-1); float
    payloads are taken as-is. Mono files and unsupported codecs raise
    WavFormatError naming the offending field.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if chunk_id == b"fmt ":
            fmt = _parse_fmt(body, path)
        elif chunk_id == b"data":
            if len(body) < size:
                raise WavFormatError(f"{path}: data chunk truncated ({len(body)} < {size} bytes)")
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise WavFormatError(f"{path}: missing fmt chunk")
    if payload is None:
        raise WavFormatError(f"{path}: missing data chunk")

    audio_format, channels, sample_rate, bits = fmt
    if channels != 2:
        raise WavFormatError(f"{path}: channels={channels} unsupported (stereo required)")

    if audio_format == _FORMAT_PCM and bits == 16:
        raw = np.frombuffer(payload, dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif audio_format == _FORMAT_PCM and bits == 24:
        samples = _decode_int24(payload) / 8388608.0
    elif audio_format == _FORMAT_IEEE_FLOAT and bits == 32:
        samples = np.frombuffer(payload, dtype="<f4").astype(np.float64)
    else:
        raise WavFormatError(
            f"{path}: audio_format={audio_format} bits_per_sample={bits} unsupported"
        )

    if samples.size % channels:
        raise WavFormatError(f"{path}: payload not a whole number of frames")
    return AudioClip(samples.reshape(-1, channels), sample_rate)


def save_wav(clip: AudioClip, path: str | Path, bit_depth: int | str = "float32") -> int:
    """Write a clip as WAV at the requested depth; returns the clip count.

    Samples beyond full scale are clamped for integer depths and the number
    of clamped samples is returned (and logged). float32 writes are lossless
    for values representable in single precision.
    """
    frames = clip.samples
    if bit_depth == 16:
        scaled = np.round(frames * 32768.0)
        clipped = int(np.count_nonzero((scaled > 32767.0) | (scaled < -32768.0)))
        payload = np.clip(scaled, -32768, 32767).astype("<i2").tobytes()
        audio_format, bits = _FORMAT_PCM, 16
    elif bit_depth == 24:
        scaled = np.round(frames * 8388608.0)
        clipped = int(np.count_nonzero((scaled > 8388607.0) | (scaled < -8388608.0)))
        payload = _encode_int24(np.clip(scaled, -8388608, 8388607).astype(np.int32))
        audio_format, bits = _FORMAT_PCM, 24
    elif bit_depth == "float32":
        clipped = 0
        payload = frames.astype("<f4").tobytes()
        audio_format, bits = _FORMAT_IEEE_FLOAT, 32
    else:
        raise ValueError(f"bit_depth must be one of {BIT_DEPTHS}, got {bit_depth!r}")

    if clipped:
        log.warning("%s: clamped %d samples beyond full scale", path, clipped)

    channels = 2
    block_align = channels * bits // 8
    byte_rate = clip.sample_rate * block_align
    fmt_chunk = struct.pack(
        "<4sIHHIIHH", b"fmt ", 16, audio_format, channels, clip.sample_rate, byte_rate,
        block_align, bits,
    )
    chunks = [fmt_chunk]
    if audio_format != _FORMAT_PCM:
        # fact chunk is required for non-PCM payloads
        chunks.append(struct.pack("<4sII", b"fact", 4, frames.shape[0]))
    chunks.append(struct.pack("<4sI", b"data", len(payload)) + payload)
    if len(payload) & 1:
        chunks[-1] += b"\x00"

    body = b"".join(chunks)
    with open(path, "wb") as f:
        f.write(struct.pack("<4sI4s", b"RIFF", 4 + len(body), b"WAVE"))
        f.write(body)
    return clipped


def _parse_fmt(body: bytes, path: str | Path) -> tuple[int, int, int, int]:
    if len(body) < 16:
        raise WavFormatError(f"{path}: fmt chunk too short ({len(body)} bytes)")
    audio_format, channels, sample_rate, _, _, bits = struct.unpack_from("<HHIIHH", body, 0)
    if audio_format == _FORMAT_EXTENSIBLE:
        if len(body) < 26:
            raise WavFormatError(f"{path}: extensible fmt chunk too short")
        # first two bytes of the subformat GUID carry the actual format tag
        (audio_format,) = struct.unpack_from("<H", body, 24)
    return audio_format, channels, sample_rate, bits


def _decode_int24(payload: bytes) -> np.ndarray:
    raw = np.frombuffer(payload, dtype=np.uint8)
    if raw.size % 3:
        raise WavFormatError("24-bit payload not a whole number of samples")
    triplets = raw.reshape(-1, 3).astype(np.int32)
    value = triplets[:, 0] | (triplets[:, 1] << 8) | (triplets[:, 2] << 16)
    value -= (value & 0x800000) << 1  # sign extension
    return value.astype(np.float64)


def _encode_int24(values: np.ndarray) -> bytes:
    as_uint = values.reshape(-1).astype(np.int32).view(np.uint32)
    out = np.empty((values.size, 3), dtype=np.uint8)
    out[:, 0] = as_uint & 0xFF
    out[:, 1] = (as_uint >> 8) & 0xFF
    out[:, 2] = (as_uint >> 16) & 0xFF
    return out.tobytes()
