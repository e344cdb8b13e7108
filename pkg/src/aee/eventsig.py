"""Lightweight per-event signatures under the token of a group signature.

Once a member has broadcast a verified group signature for event et, the pair
epk = (H1(et), T) acts as that member's ephemeral public key for the rest of
the event: a Schnorr signature base H1(et) with public point T = H1(et)^y.
Signing costs one G1 exponentiation and verification two, so high-rate
messages avoid pairings entirely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import wire
from .algebra import BilinearSuite, G1Element, Scalar, default_suite, rand_scalar_nonzero
from .groupsig import GroupSignature
from .keys import GroupPublicKey


@dataclass
class EventPublicKey:
    et: bytes
    base: G1Element
    token: G1Element

    def hash_item(self, suite: Optional[BilinearSuite] = None) -> bytes:
        """Canonical encoding of the (base, token) pair, framed for hashing."""
        s = suite or default_suite()
        payload = wire.encode_g1(s, self.base) + wire.encode_g1(s, self.token)
        return wire.tagged_item(wire.TAG_EVENT_KEY, payload)

    def to_bytes(self, suite: Optional[BilinearSuite] = None) -> bytes:
        s = suite or default_suite()
        payload = (
            wire.lv(self.et)
            + wire.encode_g1(s, self.base)
            + wire.encode_g1(s, self.token)
        )
        return wire.frame(wire.KIND_EVENT_KEY, payload)

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "EventPublicKey":
        s = suite or default_suite()
        r = wire.ByteReader(wire.unframe(wire.KIND_EVENT_KEY, data))
        et = r.take_lv(4096)
        base = wire.decode_g1(s, r.take(s.g1_bytes_full))
        token = wire.decode_g1(s, r.take(s.g1_bytes_full))
        r.expect_end()
        return cls(et=et, base=base, token=token)


@dataclass
class EventSignature:
    s_e: Scalar
    c_e: Scalar

    def to_bytes_raw(self, suite: Optional[BilinearSuite] = None) -> bytes:
        s = suite or default_suite()
        return wire.encode_scalar(s, self.s_e) + wire.encode_scalar(s, self.c_e)

    def to_bytes(self, suite: Optional[BilinearSuite] = None) -> bytes:
        return bytes([wire.SIG_FRAME_EVENT]) + self.to_bytes_raw(suite)

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "EventSignature":
        s = suite or default_suite()
        if not data or data[0] != wire.SIG_FRAME_EVENT:
            raise wire.WireError("not an event signature")
        r = wire.ByteReader(data[1:])
        s_e = wire.decode_scalar(s, r.take(s.scalar_bytes))
        c_e = wire.decode_scalar(s, r.take(s.scalar_bytes))
        r.expect_end()
        return cls(s_e=s_e, c_e=c_e)


def epk_from_signature(gpk: GroupPublicKey, et: bytes, sig: GroupSignature) -> EventPublicKey:
    """Extract the event public key from a (verified) group signature."""
    base = gpk.suite.hash_to_g1(gpk.h1_tag, et)
    return EventPublicKey(et=et, base=base, token=sig.token())


def _challenge(gpk: GroupPublicKey, et: bytes, m: bytes, epk: EventPublicKey, r: G1Element) -> Scalar:
    s = gpk.suite
    items = [
        wire.canonical_hash_item(s, et),
        wire.canonical_hash_item(s, m),
        epk.hash_item(s),
        wire.canonical_hash_item(s, r),
    ]
    return s.hash_to_scalar(gpk.h2_tag, items)


def esign(
    gpk: GroupPublicKey,
    usk: Scalar,
    et: bytes,
    epk: EventPublicKey,
    m: bytes,
    rng,
) -> EventSignature:
    """Sign m for event et under the member secret y; one G1 exponentiation."""
    s = gpk.suite
    r = rand_scalar_nonzero(rng, s.order)
    commitment = s.g1_exp(epk.base, r)
    c_e = _challenge(gpk, et, m, epk, commitment)
    s_e = (r + usk * c_e) % s.order
    return EventSignature(s_e=s_e, c_e=c_e)


def ever(
    gpk: GroupPublicKey,
    et: bytes,
    epk: EventPublicKey,
    m: bytes,
    sig: EventSignature,
) -> bool:
    """Verify an event signature against the event public key."""
    s = gpk.suite
    if epk.et != et:
        return False
    if not (0 <= sig.s_e < s.order and 0 <= sig.c_e < s.order):
        return False
    if not (s.g1_valid(epk.base) and s.g1_valid(epk.token)):
        return False
    if epk.base != s.hash_to_g1(gpk.h1_tag, et):
        return False
    commitment = s.g1_mul(
        s.g1_exp(epk.base, sig.s_e), s.g1_exp(epk.token, (-sig.c_e) % s.order)
    )
    return _challenge(gpk, et, m, epk, commitment) == sig.c_e
