"""Entropy sources: a deterministic replayable stream and the OS stream.

Deterministic streams are immutable values; consuming octets returns a
remainder stream rather than mutating. That keeps DRBG driving code
referentially transparent and lets tests replay exact entropy
sequences. The system stream draws fresh octets from the operating
system on every take and never runs dry.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .prf import from_hex


class EntropyExhausted(Exception):
    """A deterministic stream was asked for more octets than it holds."""


@dataclass(frozen=True)
class DeterministicStream:
    """A finite stream serving exactly the octets it was built with."""

    remaining: bytes

    @classmethod
    def from_hex(cls, text: str) -> "DeterministicStream":
        return cls(from_hex(text))

    def __len__(self) -> int:
        return len(self.remaining)


class SystemStream:
    """Operating-system randomness; safe for concurrent use, never exhausts."""

    def __repr__(self) -> str:  # pragma: no cover - cosmetic
        return "SystemStream()"


EntropyStream = DeterministicStream | SystemStream


def take(stream: EntropyStream, n: int) -> tuple[bytes, EntropyStream]:
    """Consume ``n`` octets, returning them with the follow-on stream.

    Deterministic streams yield their first ``n`` octets and the
    remainder; asking for more than remains raises EntropyExhausted.
    """
    if n < 0:
        raise ValueError(f"cannot take a negative octet count ({n})")
    if isinstance(stream, DeterministicStream):
        if n > len(stream.remaining):
            raise EntropyExhausted(
                f"stream has {len(stream.remaining)} octets, {n} requested"
            )
        return stream.remaining[:n], DeterministicStream(stream.remaining[n:])
    return os.urandom(n), stream
