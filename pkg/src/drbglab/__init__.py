"""HMAC-DRBG toolkit: the SP 800-90A generator, CAVP conformance
checking, executable distribution-level security games at reduced block
size, and concrete security-bound calculators."""

from .drbg import (
    DrbgError,
    DrbgState,
    GenerateRequest,
    InstantiationError,
    ReseedRequired,
    generate,
    generate_with_entropy,
    instantiate,
    reseed,
    update,
    zeroize,
)
from .entropy import DeterministicStream, EntropyExhausted, SystemStream, take
from .prf import Block, from_hex, hmac_sha256, sha256, to_hex

__all__ = [
    "Block",
    "DeterministicStream",
    "DrbgError",
    "DrbgState",
    "EntropyExhausted",
    "GenerateRequest",
    "InstantiationError",
    "ReseedRequired",
    "SystemStream",
    "from_hex",
    "generate",
    "generate_with_entropy",
    "hmac_sha256",
    "instantiate",
    "reseed",
    "sha256",
    "take",
    "to_hex",
    "zeroize",
]

__version__ = "0.1.0"
