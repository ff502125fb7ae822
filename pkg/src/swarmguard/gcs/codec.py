"""Binary wire format and length-prefixed framing.

Layouts (little-endian):

=============  ===========================================================
PositionReport ``type=0x01 u8 | uav u16 | time_ms u64 | lat f64 | lon f64 | alt f32`` (31 bytes)
RangingReport  ``type=0x02 u8 | uav_a u16 | uav_b u16 | time_ms u64 | distance_mm u32`` (17 bytes)
=============  ===========================================================

A stream is a concatenation of frames, each a one-byte length followed by
that many payload bytes.
"""

from __future__ import annotations

import struct
from collections import Counter
from typing import BinaryIO, Iterable, Iterator

from swarmguard.geodesy import GeoCoordinate
from swarmguard.gcs.messages import Message, PositionReport, RangingReport

POSITION_TYPE = 0x01
RANGING_TYPE = 0x02

_POSITION = struct.Struct("<BHQddf")
_RANGING = struct.Struct("<BHHQI")

POSITION_SIZE = _POSITION.size
RANGING_SIZE = _RANGING.size
MAX_PAYLOAD = 50


class DecodeError(ValueError):
    """A payload or frame could not be decoded.

    ``offset`` is the byte position of the problem (relative to the
    payload for :func:`decode`, to the stream for :func:`ingest`).
    """

    def __init__(self, offset: int, reason: str, kind: str = "malformed"):
        super().__init__(f"offset {offset}: {reason}")
        self.offset = offset
        self.reason = reason
        self.kind = kind


def encode(msg: Message) -> bytes:
    if isinstance(msg, PositionReport):
        c = msg.coordinate
        payload = _POSITION.pack(
            POSITION_TYPE, msg.uav, msg.time_ms, c.latitude_deg, c.longitude_deg, c.altitude_m
        )
    elif isinstance(msg, RangingReport):
        payload = _RANGING.pack(RANGING_TYPE, msg.uav_a, msg.uav_b, msg.time_ms, msg.distance_mm)
    else:
        raise TypeError(f"cannot encode {type(msg).__name__}")
    assert len(payload) <= MAX_PAYLOAD
    return payload


def decode(payload: bytes) -> Message:
    if not payload:
        raise DecodeError(0, "empty payload", "short-frame")
    kind = payload[0]
    if kind == POSITION_TYPE:
        layout = _POSITION
    elif kind == RANGING_TYPE:
        layout = _RANGING
    else:
        raise DecodeError(0, f"unknown message type 0x{kind:02x}", "unknown-type")
    if len(payload) != layout.size:
        raise DecodeError(
            min(len(payload), layout.size),
            f"type 0x{kind:02x} needs {layout.size} bytes, got {len(payload)}",
            "short-frame" if len(payload) < layout.size else "oversized-frame",
        )
    fields = layout.unpack(payload)
    try:
        if kind == POSITION_TYPE:
            _, uav, time_ms, lat, lon, alt = fields
            return PositionReport(uav, time_ms, GeoCoordinate(lat, lon, alt))
        _, uav_a, uav_b, time_ms, distance_mm = fields
        return RangingReport(uav_a, uav_b, time_ms, distance_mm)
    except ValueError as exc:
        # field offsets: uav ids start at byte 1 for both types
        raise DecodeError(1, str(exc), "invalid-field") from exc


def frame(payload: bytes) -> bytes:
    if len(payload) > 255:
        raise ValueError("payload longer than 255 bytes cannot be framed")
    return bytes((len(payload),)) + payload


def encode_stream(messages: Iterable[Message]) -> bytes:
    return b"".join(frame(encode(m)) for m in messages)


def write_stream(fh: BinaryIO, messages: Iterable[Message]) -> int:
    count = 0
    for m in messages:
        fh.write(frame(encode(m)))
        count += 1
    return count


class Ingestor:
    """Decode a framed byte stream, skipping bad frames.

    Errors never stop ingestion; they are tallied in :attr:`errors` by
    class and the most recent ones kept in :attr:`last_errors`.
    """

    def __init__(self):
        self.errors: Counter[str] = Counter()
        self.last_errors: list[DecodeError] = []
        self.decoded = 0

    def _fail(self, err: DecodeError):
        self.errors[err.kind] += 1
        self.last_errors = (self.last_errors + [err])[-16:]

    def iter_messages(self, data: bytes) -> Iterator[Message]:
        view = memoryview(data)
        pos = 0
        end = len(view)
        while pos < end:
            length = view[pos]
            start = pos + 1
            stop = start + length
            if stop > end:
                self._fail(DecodeError(pos, f"frame announces {length} bytes, only {end - start} left", "truncated"))
                return
            try:
                msg = decode(bytes(view[start:stop]))
            except DecodeError as exc:
                self._fail(DecodeError(start + exc.offset, exc.reason, exc.kind))
            else:
                self.decoded += 1
                yield msg
            pos = stop

    @property
    def error_count(self) -> int:
        return sum(self.errors.values())


def ingest(data: bytes, ingestor: Ingestor | None = None) -> list[Message]:
    """Decode every well-formed frame in ``data``, in arrival order."""
    ingestor = ingestor if ingestor is not None else Ingestor()
    return list(ingestor.iter_messages(data))
