"""HMAC-SHA256 and a truncated small-block PRF.

SHA-256 itself comes from the platform (hashlib). HMAC is deliberately
built here from the raw hash, rather than taken from the stdlib hmac
module, so the FIPS 198 structure (key normalization, ipad/opad, nested
hashing) is visible and testable on its own. The stdlib implementation
serves as an independent oracle in the test suite.

``prf_small`` shrinks HMAC-SHA256 to an ``eta``-bit block cipher-style
PRF so that probability experiments over the full input space stay
enumerable at small ``eta`` while exercising the real compression
function.
"""

from __future__ import annotations

import functools
import hashlib
from dataclasses import dataclass

SHA256_BLOCK_OCTETS = 64
SHA256_OUTPUT_OCTETS = 32

_IPAD = 0x36
_OPAD = 0x5C


def sha256(data: bytes) -> bytes:
    """SHA-256 digest (32 octets)."""
    return hashlib.sha256(data).digest()


def hmac_sha256(key: bytes, message: bytes) -> bytes:
    """HMAC-SHA256 per FIPS 198-1.

    Keys longer than the 64-octet hash block are hashed down first;
    shorter keys are zero-padded on the right to exactly one block.
    """
    if len(key) > SHA256_BLOCK_OCTETS:
        key = sha256(key)
    k0 = key.ljust(SHA256_BLOCK_OCTETS, b"\x00")
    inner = sha256(bytes(b ^ _IPAD for b in k0) + message)
    return sha256(bytes(b ^ _OPAD for b in k0) + inner)


def to_hex(octets: bytes) -> str:
    """Lowercase hex, the only rendering used anywhere in this package."""
    return octets.hex()


def from_hex(text: str) -> bytes:
    """Decode hex (case-insensitive). Raises ValueError on odd length or bad digits."""
    text = text.strip()
    if len(text) % 2 != 0:
        raise ValueError(f"hex string has odd length {len(text)}")
    try:
        return bytes.fromhex(text)
    except ValueError as exc:
        raise ValueError(f"invalid hex string {text!r}: {exc}") from None


Bits = tuple[int, ...]


@dataclass(frozen=True)
class Block:
    """An immutable bit-vector of length ``eta``, stored as an integer.

    Bit order is MSB-first: ``Block(8, 0b10000000).bits() == (1,0,...,0)``.
    """

    eta: int
    value: int

    def __post_init__(self) -> None:
        if self.eta < 1:
            raise ValueError(f"block width must be >= 1, got {self.eta}")
        if not 0 <= self.value < (1 << self.eta):
            raise ValueError(f"block value {self.value} out of range for eta={self.eta}")

    def bits(self) -> Bits:
        return tuple((self.value >> (self.eta - 1 - i)) & 1 for i in range(self.eta))

    @classmethod
    def from_bits(cls, bits: Bits) -> "Block":
        value = 0
        for b in bits:
            value = (value << 1) | (b & 1)
        return cls(len(bits), value)

    def to_octets(self) -> bytes:
        if self.eta % 8 != 0:
            raise ValueError(f"eta={self.eta} is not a whole number of octets")
        return self.value.to_bytes(self.eta // 8, "big")

    @classmethod
    def from_octets(cls, octets: bytes) -> "Block":
        return cls(8 * len(octets), int.from_bytes(octets, "big"))


def encode_bits(bits: Bits) -> bytes:
    """Injective octet encoding of a bit sequence.

    Layout: one length octet (bit count mod 256) followed by the bits
    right-aligned in the minimum number of octets (zero bits padded on
    the left). Distinct (length, bits) pairs always produce distinct
    octet strings: equal lengths differ in the payload, lengths that
    differ by less than 256 differ in the length octet, and lengths that
    differ by 256 or more differ in the payload octet count.
    """
    n = len(bits)
    value = 0
    for b in bits:
        value = (value << 1) | (b & 1)
    payload = value.to_bytes((n + 7) // 8, "big") if n else b""
    return bytes([n & 0xFF]) + payload


@functools.lru_cache(maxsize=1 << 18)
def _prf_small_raw(eta: int, key_value: int, bits: Bits) -> int:
    key_block = Block(eta, key_value)
    digest = hmac_sha256(encode_bits(key_block.bits()), encode_bits(bits))
    return int.from_bytes(digest, "big") >> (8 * SHA256_OUTPUT_OCTETS - eta)


def prf_small(eta: int, key: Block, input_bits: Bits) -> Block:
    """The ``eta``-bit PRF: first ``eta`` bits of HMAC-SHA256 over encoded inputs.

    Both the key block and the input bit sequence go through
    ``encode_bits`` before hashing, so the PRF is well defined for any
    bit lengths and the pre-hash encoding never collides across
    distinct inputs.
    """
    if not 1 <= eta <= 256:
        raise ValueError(f"eta must be in 1..256, got {eta}")
    if key.eta != eta:
        raise ValueError(f"key width {key.eta} does not match eta={eta}")
    return Block(eta, _prf_small_raw(eta, key.value, tuple(input_bits)))


def hmac_block_prf(key: Block, input_bits: Bits) -> Block:
    """The 256-bit PRF used for cross-checking against the octet-level DRBG.

    Here the bit sequences are whole octets already (widths 256 and
    256+8), so they are hashed directly without the length-prefix
    encoding; this is exactly HMAC-SHA256 on the serialized values.
    """
    if key.eta != 256:
        raise ValueError(f"hmac_block_prf needs a 256-bit key, got {key.eta}")
    if len(input_bits) % 8 != 0:
        raise ValueError("input bit length must be a whole number of octets")
    n = len(input_bits)
    value = 0
    for b in input_bits:
        value = (value << 1) | (b & 1)
    message = value.to_bytes(n // 8, "big") if n else b""
    return Block.from_octets(hmac_sha256(key.to_octets(), message))
