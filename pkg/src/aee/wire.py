"""Canonical byte encodings for scalars, group elements and hash inputs.

All integers are big-endian and fixed width.  G1 points serialize either as
x || y (64 bytes) or compressed as x || parity (33 bytes, parity 0x00/0x01,
or 0xff with x = 0 for the identity).  G2 points are the four base-field
coefficients x0 || x1 || y0 || y1.  Decoders reject anything that is not the
unique canonical encoding of a valid element: bad lengths, out-of-range
coordinates, off-curve points and wrong-subgroup G2 points all raise
WireError rather than producing an element.

Hash inputs are framed as type_tag (1 byte) || length (4 bytes BE) || bytes,
so distinct types and item boundaries can never collide.
"""

from __future__ import annotations

from typing import List, Sequence

from . import bn254
from .algebra import BilinearSuite, G1Element, G2Element, GTElement, Scalar


class WireError(ValueError):
    """Raised for any malformed or non-canonical encoding."""


# ---------------------------------------------------------------------------
# Scalars


def encode_scalar(suite: BilinearSuite, value: Scalar) -> bytes:
    if not 0 <= value < suite.order:
        raise WireError("scalar out of range")
    return int(value).to_bytes(suite.scalar_bytes, "big")


def decode_scalar(suite: BilinearSuite, data: bytes) -> Scalar:
    if len(data) != suite.scalar_bytes:
        raise WireError("scalar: bad length")
    value = int.from_bytes(data, "big")
    if value >= suite.order:
        raise WireError("scalar: not reduced")
    return value


# ---------------------------------------------------------------------------
# G1


def encode_g1(suite: BilinearSuite, el: G1Element, compressed: bool = False) -> bytes:
    if el.p is None:
        if compressed:
            return b"\x00" * suite.scalar_bytes + b"\xff"
        return b"\x00" * suite.g1_bytes_full
    x, y = el.p
    xb = int(x).to_bytes(suite.scalar_bytes, "big")
    if compressed:
        return xb + bytes([int(y) & 1])
    return xb + int(y).to_bytes(suite.scalar_bytes, "big")


def decode_g1(suite: BilinearSuite, data: bytes, compressed: bool = False) -> G1Element:
    q = int(bn254.Q)
    if compressed:
        if len(data) != suite.g1_bytes_compressed:
            raise WireError("g1: bad length")
        x = int.from_bytes(data[:-1], "big")
        flag = data[-1]
        if flag == 0xFF:
            if x != 0:
                raise WireError("g1: bad identity encoding")
            return G1Element(None)
        if flag not in (0, 1):
            raise WireError("g1: bad parity flag")
        if x >= q:
            raise WireError("g1: coordinate out of range")
        p = bn254.g1_from_x(x, flag)
        if p is None:
            raise WireError("g1: x not on curve")
        return G1Element(p)
    if len(data) != suite.g1_bytes_full:
        raise WireError("g1: bad length")
    half = suite.scalar_bytes
    x = int.from_bytes(data[:half], "big")
    y = int.from_bytes(data[half:], "big")
    if x == 0 and y == 0:
        return G1Element(None)
    if x >= q or y >= q:
        raise WireError("g1: coordinate out of range")
    el = G1Element((bn254.mpz(x), bn254.mpz(y)))
    if not bn254.g1_is_on_curve(el.p):
        raise WireError("g1: point not on curve")
    return el


# ---------------------------------------------------------------------------
# G2


def encode_g2(suite: BilinearSuite, el: G2Element) -> bytes:
    if el.p is None:
        return b"\x00" * suite.g2_bytes
    (x0, x1), (y0, y1) = el.p
    w = suite.scalar_bytes
    return b"".join(int(c).to_bytes(w, "big") for c in (x0, x1, y0, y1))


def decode_g2(suite: BilinearSuite, data: bytes) -> G2Element:
    if len(data) != suite.g2_bytes:
        raise WireError("g2: bad length")
    w = suite.scalar_bytes
    coeffs = [int.from_bytes(data[i * w : (i + 1) * w], "big") for i in range(4)]
    if all(c == 0 for c in coeffs):
        return G2Element(None)
    q = int(bn254.Q)
    if any(c >= q for c in coeffs):
        raise WireError("g2: coordinate out of range")
    x0, x1, y0, y1 = (bn254.mpz(c) for c in coeffs)
    p = ((x0, x1), (y0, y1))
    if not bn254.g2_in_subgroup(p):
        raise WireError("g2: not in the pairing subgroup")
    return G2Element(p)


# ---------------------------------------------------------------------------
# GT (encode only; GT values are hashed, never parsed back)


def encode_gt(suite: BilinearSuite, el: GTElement) -> bytes:
    (c0, c1, c2), (d0, d1, d2) = el.v
    w = suite.scalar_bytes
    out = []
    for pair in (c0, d0, c1, d1, c2, d2):
        out.append(int(pair[0]).to_bytes(w, "big"))
        out.append(int(pair[1]).to_bytes(w, "big"))
    return b"".join(out)


# ---------------------------------------------------------------------------
# Hash-input framing


TAG_SCALAR = 0x01
TAG_G1 = 0x02
TAG_G2 = 0x03
TAG_GT = 0x04
TAG_BYTES = 0x05
TAG_EVENT_KEY = 0x06
TAG_GROUP_SIG = 0x07


def tagged_item(tag: int, payload: bytes) -> bytes:
    return bytes([tag]) + len(payload).to_bytes(4, "big") + payload


def canonical_hash_item(suite: BilinearSuite, value) -> bytes:
    """Frame a scalar, group element or byte string for hashing."""
    if isinstance(value, bool):
        raise WireError("unhashable type: bool")
    if isinstance(value, int):
        return tagged_item(TAG_SCALAR, encode_scalar(suite, value))
    if isinstance(value, G1Element):
        return tagged_item(TAG_G1, encode_g1(suite, value))
    if isinstance(value, G2Element):
        return tagged_item(TAG_G2, encode_g2(suite, value))
    if isinstance(value, GTElement):
        return tagged_item(TAG_GT, encode_gt(suite, value))
    if isinstance(value, (bytes, bytearray)):
        return tagged_item(TAG_BYTES, bytes(value))
    raise WireError("unhashable type: %s" % type(value).__name__)


def hash_items(suite: BilinearSuite, values: Sequence) -> List[bytes]:
    return [canonical_hash_item(suite, v) for v in values]


# ---------------------------------------------------------------------------
# Signature size formulas


def signature_sizes(g1_full: int, g1_compressed: int, scalar_width: int) -> dict:
    """Byte sizes of the two signature kinds at the given element widths.

    A group signature is three G1 points plus five scalars; an event
    signature is two scalars.  Works for any parameter widths, so callers
    can evaluate it both for the live suite and for reference curves.
    """
    return {
        "group_full": 3 * g1_full + 5 * scalar_width,
        "group_compressed": 3 * g1_compressed + 5 * scalar_width,
        "event": 2 * scalar_width,
    }


def suite_signature_sizes(suite: BilinearSuite) -> dict:
    return signature_sizes(
        suite.g1_bytes_full, suite.g1_bytes_compressed, suite.scalar_bytes
    )


# ---------------------------------------------------------------------------
# Framed file containers


MAGIC = b"AEE1"

KIND_GPK = 0x01
KIND_MIK = 0x02
KIND_MOK = 0x03
KIND_UKP = 0x04
KIND_GSK = 0x05
KIND_REG = 0x06
KIND_JOIN_REQUEST = 0x07
KIND_ISSUE_RESPONSE = 0x08
KIND_EVENT_KEY = 0x09
KIND_TRACE_PROOF = 0x0A
KIND_UPK = 0x0B
KIND_SCHEDULE = 0x0C

SIG_FRAME_GROUP_FULL = 0x11
SIG_FRAME_GROUP_COMPRESSED = 0x12
SIG_FRAME_EVENT = 0x13


def frame(kind: int, payload: bytes) -> bytes:
    return MAGIC + bytes([kind]) + payload


def unframe(kind: int, blob: bytes) -> bytes:
    if len(blob) < 5 or blob[:4] != MAGIC:
        raise WireError("bad file header")
    if blob[4] != kind:
        raise WireError("unexpected object kind 0x%02x" % blob[4])
    return blob[5:]


def lv(data: bytes) -> bytes:
    """Length-prefixed variable-size field (4-byte BE length)."""
    return len(data).to_bytes(4, "big") + data


class ByteReader:
    """Sequential reader that raises WireError on any truncation."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise WireError("truncated input")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def take_lv(self, limit: int = 1 << 20) -> bytes:
        n = int.from_bytes(self.take(4), "big")
        if n > limit:
            raise WireError("length field too large")
        return self.take(n)

    def expect_end(self) -> None:
        if self.pos != len(self.data):
            raise WireError("trailing bytes")
