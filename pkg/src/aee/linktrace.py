"""Linking signatures within an event, and opening them across events.

Two valid signatures on the same event are linkable exactly when their tokens
T agree; link() receives whole signed tuples for interface symmetry but is
routed through a token-only comparison, so it can never depend on messages,
proofs or the registry.

The opener strips the blinding from B via A = B * D^(-xi), attributes A with
one registry lookup, and emits a proof that D^xi was computed honestly plus
the member's credential exponent x, which judge() checks against the
member's public key without any secrets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from . import wire
from .algebra import BilinearSuite, G1Element, Scalar, default_suite, rand_scalar_nonzero
from .enroll import RegistrationTable
from .groupsig import GroupSignature, gver
from .keys import GroupPublicKey, MasterOpenKey


class InvalidSignatureError(ValueError):
    """open was asked to trace a signature that does not verify."""


def _tokens_equal(t0: G1Element, t1: G1Element) -> bool:
    return t0 == t1


def link(
    et: bytes,
    m0: bytes,
    sig0: GroupSignature,
    m1: bytes,
    sig1: GroupSignature,
) -> bool:
    """Same-event linking: true iff the tokens match.  Constant work."""
    return _tokens_equal(sig0.token(), sig1.token())


@dataclass
class TraceProof:
    k: G1Element
    s: Scalar
    c: Scalar
    x: Scalar

    def to_bytes(self, suite: Optional[BilinearSuite] = None) -> bytes:
        st = suite or default_suite()
        payload = (
            wire.encode_g1(st, self.k)
            + wire.encode_scalar(st, self.s)
            + wire.encode_scalar(st, self.c)
            + wire.encode_scalar(st, self.x)
        )
        return wire.frame(wire.KIND_TRACE_PROOF, payload)

    @classmethod
    def from_bytes(cls, data: bytes, suite: Optional[BilinearSuite] = None) -> "TraceProof":
        st = suite or default_suite()
        r = wire.ByteReader(wire.unframe(wire.KIND_TRACE_PROOF, data))
        k = wire.decode_g1(st, r.take(st.g1_bytes_full))
        s = wire.decode_scalar(st, r.take(st.scalar_bytes))
        c = wire.decode_scalar(st, r.take(st.scalar_bytes))
        x = wire.decode_scalar(st, r.take(st.scalar_bytes))
        r.expect_end()
        return cls(k=k, s=s, c=c, x=x)


@dataclass
class OpenResult:
    """Outcome of open(); member_id is None when A is not in the registry."""

    member_id: Optional[str]
    proof: Optional[TraceProof]
    credential: G1Element

    @property
    def traced(self) -> bool:
        return self.member_id is not None


class OpenerAuditLog:
    """Append-only record of open() invocations."""

    def __init__(self):
        self.entries: List[dict] = []

    def append(self, **record) -> None:
        record["seq"] = len(self.entries)
        self.entries.append(record)


def _proof_challenge(
    gpk: GroupPublicKey,
    sig: GroupSignature,
    k: G1Element,
    u_part: G1Element,
    d_part: G1Element,
) -> Scalar:
    s = gpk.suite
    items = [
        sig.hash_item(s),
        wire.canonical_hash_item(s, k),
        wire.canonical_hash_item(s, u_part),
        wire.canonical_hash_item(s, d_part),
    ]
    return s.hash_to_scalar(gpk.h2_tag, items)


def attribute_credential(
    gpk: GroupPublicKey,
    mok: MasterOpenKey,
    reg: RegistrationTable,
    sig: GroupSignature,
) -> Tuple[G1Element, Optional[str]]:
    """Strip the blinding from B and look the credential up in the registry.

    This is the identification step alone; callers that have not already
    verified the signature must use open_signature instead.
    """
    s = gpk.suite
    a = s.g1_mul(sig.b, s.g1_exp(sig.d, (-mok.xi) % s.order))
    return a, reg.lookup_by_credential(a)


def open_signature(
    gpk: GroupPublicKey,
    mok: MasterOpenKey,
    reg: RegistrationTable,
    et: bytes,
    m: bytes,
    sig: GroupSignature,
    rng,
    audit: Optional[OpenerAuditLog] = None,
) -> OpenResult:
    """Recover the signer's credential and prove the attribution."""
    s = gpk.suite
    if not gver(gpk, et, m, sig):
        if audit is not None:
            audit.append(et=et.hex(), outcome="rejected")
        raise InvalidSignatureError("signature does not verify; refusing to open")
    a, member_id = attribute_credential(gpk, mok, reg, sig)
    if member_id is None:
        if audit is not None:
            audit.append(et=et.hex(), outcome="untraceable")
        return OpenResult(member_id=None, proof=None, credential=a)
    r = rand_scalar_nonzero(rng, s.order)
    k = s.g1_exp(sig.d, mok.xi)
    u_part = s.g1_exp(gpk.u, r)
    d_part = s.g1_exp(sig.d, r)
    c = _proof_challenge(gpk, sig, k, u_part, d_part)
    proof = TraceProof(k=k, s=(r + mok.xi * c) % s.order, c=c, x=reg.row(member_id).x)
    if audit is not None:
        audit.append(
            et=et.hex(),
            outcome="traced",
            member_id=member_id,
            token=wire.encode_g1(s, sig.token(), compressed=True).hex(),
        )
    return OpenResult(member_id=member_id, proof=proof, credential=a)


def judge(
    gpk: GroupPublicKey,
    member_id: str,
    upk: G1Element,
    sig: GroupSignature,
    proof: TraceProof,
) -> bool:
    """Publicly check an opener's attribution of sig to the given member."""
    s = gpk.suite
    if not s.g1_valid(proof.k):
        return False
    if upk.is_identity or not s.g1_valid(upk):
        return False
    for v in (proof.s, proof.c, proof.x):
        if not 0 <= v < s.order:
            return False
    order = s.order
    neg_c = (-proof.c) % order
    u_part = s.g1_mul(s.g1_exp(gpk.u, proof.s), s.g1_exp(gpk.h, neg_c))
    d_part = s.g1_mul(s.g1_exp(sig.d, proof.s), s.g1_exp(proof.k, neg_c))
    if _proof_challenge(gpk, sig, proof.k, u_part, d_part) != proof.c:
        return False
    # e(B * K^-1, w * g2^x) == e(g1 * upk^-1, g2), checked as a product.
    lhs1 = s.g1_mul(sig.b, s.g1_neg(proof.k))
    rhs1 = s.g2_mul(gpk.w, s.g2_exp(gpk.g2, proof.x))
    lhs2 = s.g1_neg(s.g1_mul(gpk.g1, s.g1_neg(upk)))
    ratio = s.pair_product([(lhs1, rhs1), (lhs2, gpk.g2)])
    return ratio == s.gt_one
