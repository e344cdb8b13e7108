"""Enrollment: the join/issue handshake and the issuer's registration table.

A joining member proves knowledge of y behind z = h^y with a Schnorr proof;
the issuer then extends the credential (x, A = (g1 * z^-1)^(1/(gamma+x)))
and records (member_id, x, A, z).  The table keeps a reverse index keyed by
the encoding of A so the opener can attribute a recovered A in O(1).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from gmpy2 import invert

from . import wire
from .algebra import BilinearSuite, G1Element, Scalar, default_suite, rand_scalar_nonzero
from .keys import GroupPublicKey, GroupSigningKey, MasterIssueKey, UserKeyPair


class EnrollmentError(ValueError):
    """Join or issue failed (bad proof, inconsistent credential)."""


class MemberConflictError(EnrollmentError):
    """A member id or credential would collide with an existing row."""


@dataclass
class JoinRequest:
    z: G1Element
    c: Scalar
    s: Scalar

    def to_bytes(self, suite: Optional[BilinearSuite] = None) -> bytes:
        st = suite or default_suite()
        payload = (
            wire.encode_g1(st, self.z)
            + wire.encode_scalar(st, self.c)
            + wire.encode_scalar(st, self.s)
        )
        return wire.frame(wire.KIND_JOIN_REQUEST, payload)

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "JoinRequest":
        st = suite or default_suite()
        r = wire.ByteReader(wire.unframe(wire.KIND_JOIN_REQUEST, data))
        z = wire.decode_g1(st, r.take(st.g1_bytes_full))
        c = wire.decode_scalar(st, r.take(st.scalar_bytes))
        s = wire.decode_scalar(st, r.take(st.scalar_bytes))
        r.expect_end()
        return cls(z=z, c=c, s=s)


@dataclass
class IssueResponse:
    x: Scalar
    a: G1Element

    def to_bytes(self, suite: Optional[BilinearSuite] = None) -> bytes:
        st = suite or default_suite()
        payload = wire.encode_scalar(st, self.x) + wire.encode_g1(st, self.a)
        return wire.frame(wire.KIND_ISSUE_RESPONSE, payload)

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "IssueResponse":
        st = suite or default_suite()
        r = wire.ByteReader(wire.unframe(wire.KIND_ISSUE_RESPONSE, data))
        x = wire.decode_scalar(st, r.take(st.scalar_bytes))
        a = wire.decode_g1(st, r.take(st.g1_bytes_full))
        r.expect_end()
        return cls(x=x, a=a)


@dataclass
class JoinState:
    """Prover-side state between join_start and join_finish."""

    r: Scalar


def _join_challenge(gpk: GroupPublicKey, z: G1Element, commitment: G1Element) -> Scalar:
    items = wire.hash_items(gpk.suite, [gpk.h, z, commitment])
    return gpk.suite.hash_to_scalar(gpk.h2_tag, items)


def join_start(gpk: GroupPublicKey, keys: UserKeyPair, rng) -> Tuple[JoinRequest, JoinState]:
    """Build the proof of knowledge of y for z = h^y."""
    s = gpk.suite
    r = rand_scalar_nonzero(rng, s.order)
    commitment = s.g1_exp(gpk.h, r)
    c = _join_challenge(gpk, keys.z, commitment)
    resp = (r + c * keys.y) % s.order
    return JoinRequest(z=keys.z, c=c, s=resp), JoinState(r=r)


# How many times issue() silently resamples x on a (vanishingly unlikely)
# credential collision before treating it as an error.
MAX_X_RESAMPLE = 8


def issue(
    gpk: GroupPublicKey,
    mik: MasterIssueKey,
    reg: "RegistrationTable",
    member_id: str,
    request: JoinRequest,
    rng,
) -> IssueResponse:
    """Verify a join request, mint a credential and record the member."""
    s = gpk.suite
    if member_id in reg:
        raise MemberConflictError("member id already enrolled: %r" % member_id)
    if request.z.is_identity or not s.g1_valid(request.z):
        raise EnrollmentError("join request: invalid z")
    # Recompute the commitment as h^s * z^(-c) and check the challenge.
    commitment = s.g1_mul(
        s.g1_exp(gpk.h, request.s), s.g1_exp(request.z, (-request.c) % s.order)
    )
    if _join_challenge(gpk, request.z, commitment) != request.c:
        raise EnrollmentError("join request: proof of knowledge failed")
    base = s.g1_mul(gpk.g1, s.g1_neg(request.z))
    for _ in range(MAX_X_RESAMPLE):
        x = rand_scalar_nonzero(rng, s.order)
        denom = (mik.gamma + x) % s.order
        if denom == 0:
            continue
        a = s.g1_exp(base, int(invert(denom, s.order)))
        if reg.lookup_by_credential(a) is None:
            reg.add(member_id, x, a, request.z)
            return IssueResponse(x=x, a=a)
    raise EnrollmentError("could not sample a fresh credential")


def join_finish(
    gpk: GroupPublicKey, keys: UserKeyPair, response: IssueResponse
) -> GroupSigningKey:
    """Check e(A, g2^x * w) = e(g1 * z^-1, g2) and assemble the signing key."""
    s = gpk.suite
    if response.a.is_identity or not s.g1_valid(response.a):
        raise EnrollmentError("issue response: invalid credential point")
    lhs = s.pair(response.a, s.g2_mul(s.g2_exp(gpk.g2, response.x), gpk.w))
    # e(g1 * z^-1, g2) = e(g1, g2) * e(h, g2)^(-y), using the cached pairings.
    rhs = s.gt_mul(gpk.e_g1_g2, s.gt_exp(gpk.e_h_g2, (-keys.y) % s.order))
    if lhs != rhs:
        raise EnrollmentError("credential does not verify against this key pair")
    return GroupSigningKey(x=response.x, y=keys.y, a=response.a)


@dataclass
class RegRow:
    member_id: str
    x: Scalar
    a: G1Element
    upk: G1Element


class RegistrationTable:
    """Issuer-side member registry with an O(1) credential index."""

    def __init__(self, suite: Optional[BilinearSuite] = None):
        self.suite = suite or default_suite()
        self._rows: Dict[str, RegRow] = {}
        self._by_credential: Dict[bytes, str] = {}

    def __len__(self) -> int:
        return len(self._rows)

    def __contains__(self, member_id: str) -> bool:
        return member_id in self._rows

    def members(self):
        return list(self._rows)

    def row(self, member_id: str) -> RegRow:
        return self._rows[member_id]

    def add(self, member_id: str, x: Scalar, a: G1Element, upk: G1Element) -> None:
        if member_id in self._rows:
            raise MemberConflictError("member id already enrolled: %r" % member_id)
        key = wire.encode_g1(self.suite, a, compressed=True)
        if key in self._by_credential:
            raise MemberConflictError("credential already assigned")
        self._rows[member_id] = RegRow(member_id=member_id, x=x, a=a, upk=upk)
        self._by_credential[key] = member_id

    def lookup_by_credential(self, a: G1Element) -> Optional[str]:
        """Member id owning credential point A, or None; O(1) in table size."""
        return self._by_credential.get(wire.encode_g1(self.suite, a, compressed=True))

    def overwrite(self, member_id: str, x: Scalar, a: G1Element, upk: G1Element) -> None:
        """Replace (or insert) a row, trusting the caller; keeps the index sound."""
        old = self._rows.pop(member_id, None)
        if old is not None:
            del self._by_credential[wire.encode_g1(self.suite, old.a, compressed=True)]
        self.add(member_id, x, a, upk)

    def remove(self, member_id: str) -> None:
        old = self._rows.pop(member_id)
        del self._by_credential[wire.encode_g1(self.suite, old.a, compressed=True)]

    # -- persistence

    def to_bytes(self) -> bytes:
        s = self.suite
        out = [len(self._rows).to_bytes(4, "big")]
        for row in self._rows.values():
            out.append(wire.lv(row.member_id.encode()))
            out.append(wire.encode_scalar(s, row.x))
            out.append(wire.encode_g1(s, row.a, compressed=True))
            out.append(wire.encode_g1(s, row.upk, compressed=True))
        return wire.frame(wire.KIND_REG, b"".join(out))

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "RegistrationTable":
        table = cls(suite)
        s = table.suite
        r = wire.ByteReader(wire.unframe(wire.KIND_REG, data))
        count = int.from_bytes(r.take(4), "big")
        for i in range(count):
            try:
                member_id = r.take_lv(4096).decode()
                x = wire.decode_scalar(s, r.take(s.scalar_bytes))
                a = wire.decode_g1(s, r.take(s.g1_bytes_compressed), compressed=True)
                upk = wire.decode_g1(s, r.take(s.g1_bytes_compressed), compressed=True)
                table.add(member_id, x, a, upk)
            except (wire.WireError, MemberConflictError, UnicodeDecodeError) as exc:
                raise wire.WireError("registration row %d: %s" % (i, exc)) from exc
        r.expect_end()
        return table

    def save(self, path) -> None:
        tmp = "%s.tmp.%d" % (path, os.getpid())
        with open(tmp, "wb") as fh:
            fh.write(self.to_bytes())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path, suite: Optional[BilinearSuite] = None) -> "RegistrationTable":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read(), suite)
