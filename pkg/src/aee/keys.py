"""Key material: group setup, issuer/opener secrets, member keys.

The group is described by gpk = (g1, h, u, g2, w) plus the two hash domain
tags.  The issuer holds gamma (with w = g2^gamma), the opener holds xi (with
h = u^xi).  A user key pair is (y, z = h^y); after enrollment the member
additionally holds the credential (x, A) with A = (g1 * z^-1)^(1/(gamma+x)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

from . import bn254, wire
from .algebra import (
    BilinearSuite,
    G1Element,
    G2Element,
    GTElement,
    H1_TAG_DEFAULT,
    H2_TAG_DEFAULT,
    Scalar,
    default_suite,
    rand_scalar_nonzero,
)


class KeyMaterialError(ValueError):
    """Raised when key material is malformed or internally inconsistent."""


@dataclass
class GroupPublicKey:
    g1: G1Element
    h: G1Element
    u: G1Element
    g2: G2Element
    w: G2Element
    h1_tag: str = H1_TAG_DEFAULT
    h2_tag: str = H2_TAG_DEFAULT
    suite: BilinearSuite = field(default_factory=default_suite, repr=False)

    # Pairings of fixed gpk elements, shared by signing contexts, enrollment
    # and the verifier test oracle.  Computed once here, outside any counting
    # session, so per-operation counts reflect the precomputed-pairing flow.
    e_g1_g2: GTElement = field(init=False, repr=False)
    e_h_g2: GTElement = field(init=False, repr=False)
    e_h_w: GTElement = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("g1", "h", "u"):
            if getattr(self, name).is_identity:
                raise KeyMaterialError("%s must not be the identity" % name)
        for name in ("g2", "w"):
            if getattr(self, name).is_identity:
                raise KeyMaterialError("%s must not be the identity" % name)
        self.e_g1_g2 = GTElement(bn254.pairing(self.g1.p, self.g2.p))
        self.e_h_g2 = GTElement(bn254.pairing(self.h.p, self.g2.p))
        self.e_h_w = GTElement(bn254.pairing(self.h.p, self.w.p))

    def validate(self) -> None:
        """Full membership checks, for material that skipped decoding."""
        s = self.suite
        for name in ("g1", "h", "u"):
            el = getattr(self, name)
            if el.is_identity or not s.g1_valid(el):
                raise KeyMaterialError("%s is not a valid G1 element" % name)
        for name in ("g2", "w"):
            el = getattr(self, name)
            if el.is_identity or not s.g2_valid(el):
                raise KeyMaterialError("%s is not a valid G2 element" % name)

    def to_bytes(self) -> bytes:
        s = self.suite
        payload = (
            wire.lv(s.name.encode())
            + wire.lv(self.h1_tag.encode())
            + wire.lv(self.h2_tag.encode())
            + wire.encode_g1(s, self.g1)
            + wire.encode_g1(s, self.h)
            + wire.encode_g1(s, self.u)
            + wire.encode_g2(s, self.g2)
            + wire.encode_g2(s, self.w)
        )
        return wire.frame(wire.KIND_GPK, payload)

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "GroupPublicKey":
        s = suite or default_suite()
        r = wire.ByteReader(wire.unframe(wire.KIND_GPK, data))
        name = r.take_lv(64).decode()
        if name != s.name:
            raise wire.WireError("unknown suite %r" % name)
        h1_tag = r.take_lv(64).decode()
        h2_tag = r.take_lv(64).decode()
        g1 = wire.decode_g1(s, r.take(s.g1_bytes_full))
        h = wire.decode_g1(s, r.take(s.g1_bytes_full))
        u = wire.decode_g1(s, r.take(s.g1_bytes_full))
        g2 = wire.decode_g2(s, r.take(s.g2_bytes))
        w = wire.decode_g2(s, r.take(s.g2_bytes))
        r.expect_end()
        try:
            return cls(g1=g1, h=h, u=u, g2=g2, w=w, h1_tag=h1_tag, h2_tag=h2_tag, suite=s)
        except KeyMaterialError as exc:
            raise wire.WireError(str(exc)) from exc


@dataclass
class MasterIssueKey:
    gamma: Scalar

    def to_bytes(self, suite: Optional[BilinearSuite] = None) -> bytes:
        s = suite or default_suite()
        return wire.frame(wire.KIND_MIK, wire.encode_scalar(s, self.gamma))

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "MasterIssueKey":
        s = suite or default_suite()
        return cls(gamma=wire.decode_scalar(s, wire.unframe(wire.KIND_MIK, data)))


@dataclass
class MasterOpenKey:
    xi: Scalar

    def to_bytes(self, suite: Optional[BilinearSuite] = None) -> bytes:
        s = suite or default_suite()
        return wire.frame(wire.KIND_MOK, wire.encode_scalar(s, self.xi))

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "MasterOpenKey":
        s = suite or default_suite()
        return cls(xi=wire.decode_scalar(s, wire.unframe(wire.KIND_MOK, data)))


@dataclass
class UserKeyPair:
    """Long-term key pair: secret y and public z = h^y."""

    y: Scalar
    z: G1Element

    def to_bytes(self, suite: Optional[BilinearSuite] = None) -> bytes:
        s = suite or default_suite()
        payload = wire.encode_scalar(s, self.y) + wire.encode_g1(s, self.z)
        return wire.frame(wire.KIND_UKP, payload)

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "UserKeyPair":
        s = suite or default_suite()
        r = wire.ByteReader(wire.unframe(wire.KIND_UKP, data))
        y = wire.decode_scalar(s, r.take(s.scalar_bytes))
        z = wire.decode_g1(s, r.take(s.g1_bytes_full))
        r.expect_end()
        return cls(y=y, z=z)


def encode_upk(suite: BilinearSuite, z: G1Element) -> bytes:
    return wire.frame(wire.KIND_UPK, wire.encode_g1(suite, z))


def decode_upk(data: bytes, suite: Optional[BilinearSuite] = None) -> G1Element:
    s = suite or default_suite()
    z = wire.decode_g1(s, wire.unframe(wire.KIND_UPK, data))
    if z.is_identity:
        raise wire.WireError("upk: identity element")
    return z


@dataclass
class GroupSigningKey:
    """Member credential (x, A) together with the user secret y."""

    x: Scalar
    y: Scalar
    a: G1Element

    def to_bytes(self, suite: Optional[BilinearSuite] = None) -> bytes:
        s = suite or default_suite()
        payload = (
            wire.encode_scalar(s, self.x)
            + wire.encode_scalar(s, self.y)
            + wire.encode_g1(s, self.a)
        )
        return wire.frame(wire.KIND_GSK, payload)

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "GroupSigningKey":
        s = suite or default_suite()
        r = wire.ByteReader(wire.unframe(wire.KIND_GSK, data))
        x = wire.decode_scalar(s, r.take(s.scalar_bytes))
        y = wire.decode_scalar(s, r.take(s.scalar_bytes))
        a = wire.decode_g1(s, r.take(s.g1_bytes_full))
        r.expect_end()
        if a.is_identity:
            raise wire.WireError("gsk: identity credential")
        return cls(x=x, y=y, a=a)


def gset(rng, suite: Optional[BilinearSuite] = None) -> Tuple[GroupPublicKey, MasterIssueKey, MasterOpenKey]:
    """Group setup: sample generators and the two master secrets."""
    s = suite or default_suite()
    order = s.order
    gamma = rand_scalar_nonzero(rng, order)
    xi = rand_scalar_nonzero(rng, order)
    g1 = s.g1_exp(s.g1_gen, rand_scalar_nonzero(rng, order))
    u = s.g1_exp(s.g1_gen, rand_scalar_nonzero(rng, order))
    h = s.g1_exp(u, xi)
    g2 = s.g2_exp(s.g2_gen, rand_scalar_nonzero(rng, order))
    w = s.g2_exp(g2, gamma)
    gpk = GroupPublicKey(g1=g1, h=h, u=u, g2=g2, w=w, suite=s)
    return gpk, MasterIssueKey(gamma=gamma), MasterOpenKey(xi=xi)


def ukg(gpk: GroupPublicKey, rng) -> UserKeyPair:
    """User key generation: y and z = h^y."""
    y = rand_scalar_nonzero(rng, gpk.suite.order)
    z = gpk.suite.g1_exp(gpk.h, y)
    return UserKeyPair(y=y, z=z)
