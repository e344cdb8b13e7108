"""Anonymous event-linkable signatures: signing and verification.

A signature on (et, m) is (D, B, T, c, s_x, s_y, s_alpha, s_delta) where
D = u^alpha blinds the credential as B = A * h^alpha, T = H1(et)^y is the
per-event linking token, and the remaining values are a Fiat-Shamir proof of
a valid credential behind (D, B) and of T being well formed for the same y.

Signing never computes a pairing: the proof commitment R4 is assembled from
e(A, g2) (cached per signer in a PairingContext) and the fixed pairings
e(h, w), e(h, g2) carried by the group public key.  Verification needs two
pairings, evaluated as one product with a shared final exponentiation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import wire
from .algebra import (
    BilinearSuite,
    G1Element,
    GTElement,
    Scalar,
    default_suite,
    rand_scalar_nonzero,
)
from .keys import GroupPublicKey, GroupSigningKey


@dataclass
class GroupSignature:
    d: G1Element
    b: G1Element
    t: G1Element
    c: Scalar
    s_x: Scalar
    s_y: Scalar
    s_alpha: Scalar
    s_delta: Scalar

    def token(self) -> G1Element:
        """The event-linking token T."""
        return self.t

    def to_bytes_raw(self, suite: Optional[BilinearSuite] = None, compressed: bool = False) -> bytes:
        s = suite or default_suite()
        return (
            wire.encode_g1(s, self.d, compressed)
            + wire.encode_g1(s, self.b, compressed)
            + wire.encode_g1(s, self.t, compressed)
            + wire.encode_scalar(s, self.c)
            + wire.encode_scalar(s, self.s_x)
            + wire.encode_scalar(s, self.s_y)
            + wire.encode_scalar(s, self.s_alpha)
            + wire.encode_scalar(s, self.s_delta)
        )

    def to_bytes(self, suite: Optional[BilinearSuite] = None, compressed: bool = False) -> bytes:
        tag = wire.SIG_FRAME_GROUP_COMPRESSED if compressed else wire.SIG_FRAME_GROUP_FULL
        return bytes([tag]) + self.to_bytes_raw(suite, compressed)

    @classmethod
    def from_bytes_raw(
        cls, data: bytes, suite: Optional[BilinearSuite] = None, compressed: bool = False
    ) -> "GroupSignature":
        s = suite or default_suite()
        g1w = s.g1_bytes_compressed if compressed else s.g1_bytes_full
        r = wire.ByteReader(data)
        d = wire.decode_g1(s, r.take(g1w), compressed)
        b = wire.decode_g1(s, r.take(g1w), compressed)
        t = wire.decode_g1(s, r.take(g1w), compressed)
        scalars = [wire.decode_scalar(s, r.take(s.scalar_bytes)) for _ in range(5)]
        r.expect_end()
        return cls(d, b, t, *scalars)

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "GroupSignature":
        if not data:
            raise wire.WireError("empty signature")
        if data[0] == wire.SIG_FRAME_GROUP_FULL:
            return cls.from_bytes_raw(data[1:], suite, compressed=False)
        if data[0] == wire.SIG_FRAME_GROUP_COMPRESSED:
            return cls.from_bytes_raw(data[1:], suite, compressed=True)
        raise wire.WireError("unknown signature framing 0x%02x" % data[0])

    def hash_item(self, suite: Optional[BilinearSuite] = None) -> bytes:
        """Framed canonical bytes of the whole signature, for hashing."""
        return wire.tagged_item(wire.TAG_GROUP_SIG, self.to_bytes_raw(suite))


@dataclass
class PairingContext:
    """Per-signer cache of e(A, g2), making signing pairing-free."""

    e_a_g2: GTElement

    @classmethod
    def for_signer(cls, gpk: GroupPublicKey, gsk: GroupSigningKey) -> "PairingContext":
        return cls(e_a_g2=gpk.suite.pair(gsk.a, gpk.g2))


def _challenge(
    gpk: GroupPublicKey,
    et: bytes,
    m: bytes,
    d: G1Element,
    b: G1Element,
    t: G1Element,
    r1: G1Element,
    r2: G1Element,
    r3: G1Element,
    r4: GTElement,
) -> Scalar:
    items = wire.hash_items(gpk.suite, [et, m, d, b, t, r1, r2, r3, r4])
    return gpk.suite.hash_to_scalar(gpk.h2_tag, items)


def gsign(
    gpk: GroupPublicKey,
    gsk: GroupSigningKey,
    et: bytes,
    m: bytes,
    rng,
    ctx: Optional[PairingContext] = None,
) -> GroupSignature:
    """Sign message m for event et."""
    s = gpk.suite
    order = s.order
    alpha = rand_scalar_nonzero(rng, order)
    d = s.g1_exp(gpk.u, alpha)
    b = s.g1_mul(gsk.a, s.g1_exp(gpk.h, alpha))
    base = s.hash_to_g1(gpk.h1_tag, et)
    t = s.g1_exp(base, gsk.y)
    r_x = rand_scalar_nonzero(rng, order)
    r_y = rand_scalar_nonzero(rng, order)
    r_alpha = rand_scalar_nonzero(rng, order)
    r_delta = rand_scalar_nonzero(rng, order)
    r1 = s.g1_exp(gpk.u, r_alpha)
    r2 = s.g1_exp(base, r_y)
    r3 = s.g1_mul(s.g1_exp(gpk.u, r_delta), s.g1_exp(d, r_x))
    e_a_g2 = ctx.e_a_g2 if ctx is not None else s.pair(gsk.a, gpk.g2)
    r4 = s.gt_mul(
        s.gt_mul(s.gt_exp(e_a_g2, r_x), s.gt_exp(gpk.e_h_w, r_alpha)),
        s.gt_exp(gpk.e_h_g2, (alpha * r_x + r_y + r_delta) % order),
    )
    c = _challenge(gpk, et, m, d, b, t, r1, r2, r3, r4)
    s_x = (c * gsk.x + r_x) % order
    s_y = (c * gsk.y + r_y) % order
    s_alpha = (r_alpha - c * alpha) % order
    s_delta = (r_delta - c * alpha * gsk.x) % order
    return GroupSignature(d=d, b=b, t=t, c=c, s_x=s_x, s_y=s_y, s_alpha=s_alpha, s_delta=s_delta)


def _valid_shape(gpk: GroupPublicKey, sig: GroupSignature) -> bool:
    s = gpk.suite
    for el in (sig.d, sig.b, sig.t):
        if not s.g1_valid(el):
            return False
    for v in (sig.c, sig.s_x, sig.s_y, sig.s_alpha, sig.s_delta):
        if not 0 <= v < s.order:
            return False
    return True


def gver(
    gpk: GroupPublicKey,
    et: bytes,
    m: bytes,
    sig: GroupSignature,
    four_pairing: bool = False,
) -> bool:
    """Verify a signature; four_pairing selects the unoptimized reference path."""
    s = gpk.suite
    if not _valid_shape(gpk, sig):
        return False
    order = s.order
    neg_c = (-sig.c) % order
    base = s.hash_to_g1(gpk.h1_tag, et)
    r1 = s.g1_mul(s.g1_exp(gpk.u, sig.s_alpha), s.g1_exp(sig.d, sig.c))
    r2 = s.g1_mul(s.g1_exp(base, sig.s_y), s.g1_exp(sig.t, neg_c))
    r3 = s.g1_mul(s.g1_exp(gpk.u, sig.s_delta), s.g1_exp(sig.d, sig.s_x))
    if four_pairing:
        r4 = _r4_four_pairing(gpk, sig)
    else:
        # Two pairings sharing one final exponentiation:
        # R4 = e(B^s_x * h^(s_y+s_delta) * g1^-c, g2) * e(h^s_alpha * B^c, w).
        a1 = s.g1_mul(
            s.g1_mul(s.g1_exp(sig.b, sig.s_x), s.g1_exp(gpk.h, (sig.s_y + sig.s_delta) % order)),
            s.g1_exp(gpk.g1, neg_c),
        )
        a2 = s.g1_mul(s.g1_exp(gpk.h, sig.s_alpha), s.g1_exp(sig.b, sig.c))
        r4 = s.pair_product([(a1, gpk.g2), (a2, gpk.w)])
    return _challenge(gpk, et, m, sig.d, sig.b, sig.t, r1, r2, r3, r4) == sig.c


def _r4_four_pairing(gpk: GroupPublicKey, sig: GroupSignature) -> GTElement:
    """R4 = e(B,g2)^s_x * e(h,w)^s_alpha * e(h,g2)^(s_y+s_delta) * (e(B,w)/e(g1,g2))^c."""
    s = gpk.suite
    order = s.order
    e_b_g2 = s.pair(sig.b, gpk.g2)
    e_b_w = s.pair(sig.b, gpk.w)
    acc = s.gt_mul(s.gt_exp(e_b_g2, sig.s_x), s.gt_exp(gpk.e_h_w, sig.s_alpha))
    acc = s.gt_mul(acc, s.gt_exp(gpk.e_h_g2, (sig.s_y + sig.s_delta) % order))
    return s.gt_mul(acc, s.gt_exp(s.gt_mul(e_b_w, s.gt_inv(gpk.e_g1_g2)), sig.c))


def precompute_event_schedule(
    gpk: GroupPublicKey,
    gsk: GroupSigningKey,
    events: Sequence[bytes],
    rng,
    m0: bytes = b"",
    ctx: Optional[PairingContext] = None,
) -> List[Tuple[bytes, GroupSignature]]:
    """Pre-sign a placeholder message for every upcoming event identifier."""
    seen = set()
    for et in events:
        if et in seen:
            raise ValueError("duplicate event identifier: %r" % (et,))
        seen.add(et)
    if ctx is None:
        ctx = PairingContext.for_signer(gpk, gsk)
    return [(et, gsign(gpk, gsk, et, m0, rng, ctx)) for et in events]
