"""Random-oracle surface: Fiat-Shamir transcript, keyed PRF, hash-to-group
and prime-challenge sampling.

The hash is SHA-256 throughout, recorded in proof headers as HASH_ID.
All framing is length-prefixed so concatenation is unambiguous.
"""

import hashlib
import math
from dataclasses import dataclass

from .encoding import u8, u32, u64
from .errors import InternalError, UsageError
from .field import Field, FieldElement
from .primes import is_prime

HASH_ID = 0x01  # SHA-256
DOMAIN_TAG = b"vc-kit/v1"

_HASH_TO_GROUP_CAP = 2**16


def _h(*parts: bytes) -> bytes:
    return hashlib.sha256(b"".join(parts)).digest()


class Transcript:
    """Deterministic challenge stream bound to every absorbed byte.

    A transcript is a value: clone() forks the stream, and replaying the
    same absorb/draw script always reproduces the same challenges.
    """

    def __init__(self, protocol: str, _state: bytes = None, _counter: int = 0):
        if _state is None:
            _state = _h(DOMAIN_TAG, protocol.encode())
        self.protocol = protocol
        self.state = _state
        self.counter = _counter

    def clone(self) -> "Transcript":
        return Transcript(self.protocol, self.state, self.counter)

    def absorb(self, label: bytes, data: bytes) -> None:
        if len(label) > 32:
            raise UsageError("absorb label longer than 32 bytes")
        self.state = _h(self.state, u8(len(label)), label, u64(len(data)), data)
        self.counter = 0

    def absorb_int(self, label: bytes, value: int) -> None:
        raw = value.to_bytes((value.bit_length() + 7) // 8 or 1, "big")
        self.absorb(label, raw)

    def challenge_bytes(self, n: int) -> bytes:
        out = b""
        while len(out) < n:
            out += _h(self.state, u64(self.counter))
            self.counter += 1
        return out[:n]

    def challenge_field(self, field: Field) -> FieldElement:
        """Uniform field element by rejection sampling on masked 8-byte draws."""
        mask = (1 << field.modulus.bit_length()) - 1
        while True:
            v = int.from_bytes(self.challenge_bytes(8), "big") & mask
            if v < field.modulus:
                return FieldElement(field, v)

    def challenge_index(self, n: int) -> int:
        """Uniform index in [0, n)."""
        if n < 1:
            raise UsageError("empty index range")
        mask = (1 << (n - 1).bit_length()) - 1 if n > 1 else 0
        while True:
            v = int.from_bytes(self.challenge_bytes(8), "big") & mask
            if v < n:
                return v

    def challenge_prime(self, bits: int) -> int:
        """Prime of exactly `bits` bits: masked draw, top bit forced, then
        incremented until Miller-Rabin (40 rounds) passes."""
        if bits < 16:
            raise UsageError("prime challenges need at least 16 bits")
        raw = int.from_bytes(self.challenge_bytes((bits + 7) // 8), "big")
        v = (raw & ((1 << bits) - 1)) | (1 << (bits - 1)) | 1
        while not is_prime(v, rounds=40):
            v += 2
        if v.bit_length() != bits:
            raise InternalError("prime search overflowed the bit budget")
        return v


@dataclass(frozen=True)
class PrfKey:
    key: bytes

    def __post_init__(self):
        if len(self.key) != 32:
            raise UsageError("PRF keys are exactly 32 bytes")


def prf(key: PrfKey, label: bytes, field: Field) -> FieldElement:
    """Keyed hash reduced to the field by counter-mode rejection sampling."""
    mask = (1 << field.modulus.bit_length()) - 1
    ctr = 0
    while True:
        digest = _h(key.key, u64(len(label)), label, u64(ctr))
        v = int.from_bytes(digest[:8], "big") & mask
        if v < field.modulus:
            return FieldElement(field, v)
        ctr += 1


def hash_to_group(x: bytes, n_modulus: int) -> int:
    """Map bytes into the quotient group Z_N^* / {+-1}.

    Counter-mode hashing; the first candidate below N that is a unit wins,
    normalized to min(v, N - v).
    """
    if n_modulus < 6:
        raise UsageError("modulus too small for hash-to-group")
    bits = n_modulus.bit_length()
    nbytes = (bits + 7) // 8
    mask = (1 << bits) - 1
    for ctr in range(_HASH_TO_GROUP_CAP):
        stream = b""
        block = 0
        while len(stream) < nbytes:
            stream += _h(b"h2g", u64(len(x)), x, u64(ctr), u64(block))
            block += 1
        v = int.from_bytes(stream[:nbytes], "big") & mask
        if 0 < v < n_modulus and math.gcd(v, n_modulus) == 1:
            return min(v, n_modulus - v)
    raise InternalError("hash_to_group exhausted its iteration cap")
