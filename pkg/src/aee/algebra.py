"""Bilinear-group abstraction: wrapped elements, operation counting, hashing.

Everything above this layer speaks in terms of a BilinearSuite, which exposes
group operations on opaque G1/G2/GT elements and two domain-separated hashes
(to G1 and to the scalar field).  Scalars are plain ints in [0, order).

Operation counting: any suite call made while a CountingSession is active
increments the session's counters.  Multiplications, exponentiations,
pairings and the two hashes are counted; negation, inversion, equality and
encoding are free.  A pairing product over n pairs counts n pairings plus
n - 1 GT multiplications, which is what it replaces.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

from . import bn254

Scalar = int


class G1Element:
    """Opaque G1 point; compare with ==, never touch the coordinates directly."""

    __slots__ = ("p",)

    def __init__(self, p):
        self.p = p

    def __eq__(self, other):
        return isinstance(other, G1Element) and self.p == other.p

    def __hash__(self):
        return hash(("g1", self.p))

    def __repr__(self):
        if self.p is None:
            return "G1(identity)"
        return "G1(%x..)" % (int(self.p[0]) >> 234)

    @property
    def is_identity(self) -> bool:
        return self.p is None


class G2Element:
    __slots__ = ("p",)

    def __init__(self, p):
        self.p = p

    def __eq__(self, other):
        return isinstance(other, G2Element) and self.p == other.p

    def __hash__(self):
        return hash(("g2", self.p))

    def __repr__(self):
        if self.p is None:
            return "G2(identity)"
        return "G2(%x..)" % (int(self.p[0][0]) >> 234)

    @property
    def is_identity(self) -> bool:
        return self.p is None


class GTElement:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __eq__(self, other):
        return isinstance(other, GTElement) and self.v == other.v

    def __hash__(self):
        return hash(("gt", self.v))

    def __repr__(self):
        return "GT(%x..)" % (int(self.v[0][0][0]) >> 234)

    @property
    def is_identity(self) -> bool:
        return self.v == bn254.GT_ONE


@dataclass
class OpCounter:
    """Tally of countable group operations."""

    mul_g1: int = 0
    exp_g1: int = 0
    mul_g2: int = 0
    exp_g2: int = 0
    mul_gt: int = 0
    exp_gt: int = 0
    pairing: int = 0
    hash_g1: int = 0
    hash_scalar: int = 0

    def as_dict(self) -> dict:
        return {
            "mul_g1": self.mul_g1,
            "exp_g1": self.exp_g1,
            "mul_g2": self.mul_g2,
            "exp_g2": self.exp_g2,
            "mul_gt": self.mul_gt,
            "exp_gt": self.exp_gt,
            "pairing": self.pairing,
            "hash_g1": self.hash_g1,
            "hash_scalar": self.hash_scalar,
        }

    def total(self) -> int:
        return sum(self.as_dict().values())


# Sessions are a stack so that nested scopes each see their own ops; this is
# deliberately not thread safe and counting code must stay on one thread.
_sessions: List[OpCounter] = []


class CountingSession:
    def __init__(self):
        self.counter = OpCounter()

    def __enter__(self) -> OpCounter:
        _sessions.append(self.counter)
        return self.counter

    def __exit__(self, *exc):
        _sessions.remove(self.counter)
        return False


def count_ops() -> CountingSession:
    """Context manager: `with count_ops() as ops:` tallies suite calls."""
    return CountingSession()


def _tick(name: str, n: int = 1) -> None:
    for counter in _sessions:
        setattr(counter, name, getattr(counter, name) + n)


# ---------------------------------------------------------------------------
# Hashing helpers (expand_message_xmd with SHA-256, then reduce)


def expand_message_xmd(msg: bytes, dst: bytes, length: int) -> bytes:
    """Expand msg to `length` uniform bytes under domain tag dst."""
    if len(dst) > 255:
        dst = b"H2C-OVERSIZE-DST-" + hashlib.sha256(dst).digest()
    ell = (length + 31) // 32
    if ell > 255 or length == 0:
        raise ValueError("unsupported expand length")
    dst_prime = dst + bytes([len(dst)])
    b0 = hashlib.sha256(
        b"\x00" * 64 + msg + length.to_bytes(2, "big") + b"\x00" + dst_prime
    ).digest()
    blocks = [hashlib.sha256(b0 + b"\x01" + dst_prime).digest()]
    for i in range(2, ell + 1):
        mixed = bytes(x ^ y for x, y in zip(b0, blocks[-1]))
        blocks.append(hashlib.sha256(mixed + bytes([i]) + dst_prime).digest())
    return b"".join(blocks)[:length]


def _hash_to_field(msg: bytes, dst: bytes, count: int, modulus: int) -> List[int]:
    # 48 bytes per element keeps the mod-p bias below 2^-128.
    ell = 48
    uniform = expand_message_xmd(msg, dst, count * ell)
    return [
        int.from_bytes(uniform[i * ell : (i + 1) * ell], "big") % modulus
        for i in range(count)
    ]


H1_TAG_DEFAULT = "AEE-H1-v1"
H2_TAG_DEFAULT = "AEE-H2-v1"


# ---------------------------------------------------------------------------
# The suite


class BilinearSuite:
    """Type-3 pairing suite backed by the in-package BN254 implementation."""

    name = "bn254"
    order = int(bn254.R)
    scalar_bytes = 32
    g1_bytes_full = 64
    g1_bytes_compressed = 33
    g2_bytes = 128
    gt_bytes = 384

    def __init__(self):
        self.g1_gen = G1Element(bn254.G1_GEN)
        self.g2_gen = G2Element(bn254.G2_GEN)
        self.gt_one = GTElement(bn254.GT_ONE)

    # -- G1

    def g1_identity(self) -> G1Element:
        return G1Element(None)

    def g1_mul(self, a: G1Element, b: G1Element) -> G1Element:
        _tick("mul_g1")
        return G1Element(bn254.g1_add(a.p, b.p))

    def g1_exp(self, a: G1Element, k: Scalar) -> G1Element:
        _tick("exp_g1")
        return G1Element(bn254.g1_mul(a.p, k % self.order))

    def g1_neg(self, a: G1Element) -> G1Element:
        return G1Element(bn254.g1_neg(a.p))

    def g1_valid(self, a: G1Element) -> bool:
        return bn254.g1_is_on_curve(a.p)

    # -- G2

    def g2_identity(self) -> G2Element:
        return G2Element(None)

    def g2_mul(self, a: G2Element, b: G2Element) -> G2Element:
        _tick("mul_g2")
        return G2Element(bn254.g2_add(a.p, b.p))

    def g2_exp(self, a: G2Element, k: Scalar) -> G2Element:
        _tick("exp_g2")
        return G2Element(bn254.g2_mul(a.p, k % self.order))

    def g2_neg(self, a: G2Element) -> G2Element:
        return G2Element(bn254.g2_neg(a.p))

    def g2_valid(self, a: G2Element) -> bool:
        return bn254.g2_in_subgroup(a.p)

    # -- GT

    def gt_mul(self, a: GTElement, b: GTElement) -> GTElement:
        _tick("mul_gt")
        return GTElement(bn254.gt_mul(a.v, b.v))

    def gt_exp(self, a: GTElement, k: Scalar) -> GTElement:
        _tick("exp_gt")
        return GTElement(bn254.gt_exp(a.v, k % self.order))

    def gt_inv(self, a: GTElement) -> GTElement:
        return GTElement(bn254.gt_inv(a.v))

    # -- pairing

    def pair(self, p: G1Element, q: G2Element) -> GTElement:
        _tick("pairing")
        return GTElement(bn254.pairing(p.p, q.p))

    def pair_product(self, pairs: Sequence[Tuple[G1Element, G2Element]]) -> GTElement:
        """Product of e(p_i, q_i); counted as n pairings and n-1 GT muls."""
        n = len(pairs)
        _tick("pairing", n)
        if n > 1:
            _tick("mul_gt", n - 1)
        return GTElement(bn254.pairing_multi([(p.p, q.p) for p, q in pairs]))

    # -- hashes

    def hash_to_g1(self, tag: str, data: bytes) -> G1Element:
        _tick("hash_g1")
        dst = tag.encode()
        u0, u1 = _hash_to_field(data, dst, 2, int(bn254.Q))
        p = bn254.g1_add(bn254.svdw_map(u0), bn254.svdw_map(u1))
        return G1Element(p)

    def hash_to_scalar(self, tag: str, items: Sequence[bytes]) -> Scalar:
        """Hash framed items (see wire.canonical_hash_item) to a scalar."""
        _tick("hash_scalar")
        msg = len(items).to_bytes(4, "big") + b"".join(items)
        return _hash_to_field(msg, tag.encode(), 1, self.order)[0]


_default = BilinearSuite()


def default_suite() -> BilinearSuite:
    return _default


# ---------------------------------------------------------------------------
# Randomness


def system_rng() -> random.SystemRandom:
    """OS-entropy RNG for production use."""
    return random.SystemRandom()


def seeded_rng(seed: int) -> random.Random:
    """Deterministic RNG; only for tests and the simulation harness."""
    return random.Random(seed)


def rand_scalar_nonzero(rng, order: int) -> Scalar:
    """Uniform scalar in [1, order), rejecting zero."""
    while True:
        k = rng.randrange(order)
        if k != 0:
            return k
