"""Game-style oracle harness, the correctness experiment, and abuse suites.

GameState carries the global variables shared by the standard experiments:
honest users HU, corrupted users BU, the signing log SigL (indexed from 1 by
a counter sn), the challenge list ChL, and the per-user key/registration
tables.  The oracle methods mirror the usual pen-and-paper definitions,
returning None for a rejected query.

exp_corr_once() plays one round of the correctness experiment: an honest
signer's signature must verify, open to the right member with a judge-valid
proof, support a verifying event signature, and link against a second
signature exactly when both came from the same member.  It returns None on
success or the name of the first failing branch.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from . import wire
from .algebra import G1Element, Scalar, count_ops, rand_scalar_nonzero, seeded_rng
from .enroll import (
    EnrollmentError,
    IssueResponse,
    JoinRequest,
    RegistrationTable,
    issue,
    join_finish,
    join_start,
)
from .eventsig import EventSignature, epk_from_signature, esign, ever
from .groupsig import GroupSignature, PairingContext, gsign, gver
from .keys import GroupPublicKey, GroupSigningKey, MasterIssueKey, MasterOpenKey, UserKeyPair, gset, ukg
from .linktrace import InvalidSignatureError, open_signature, judge, link


class GameState:
    """Oracle state for one experiment instance."""

    def __init__(self, rng, suite=None):
        self.rng = rng
        self.gpk, self.mik, self.mok = gset(rng, suite)
        self.hu: set = set()
        self.bu: set = set()
        self.upk: Dict[int, G1Element] = {}
        self.usk: Dict[int, UserKeyPair] = {}
        self.gsk: Dict[int, Optional[GroupSigningKey]] = {}
        self.reg = RegistrationTable(self.gpk.suite)
        self.sigl: Dict[int, Tuple[int, bytes, bytes, GroupSignature]] = {}
        self.sn = 1
        self.chl: List[Tuple[int, bytes, bytes, Optional[GroupSignature]]] = []
        self._join_pending: Dict[int, JoinRequest] = {}

    # -- oracles

    def add_u(self, i: int) -> Optional[G1Element]:
        """Enroll an honest user end to end; returns upk or None if i exists."""
        if i in self.hu:
            return None
        self.hu.add(i)
        self.gsk[i] = None
        keys = ukg(self.gpk, self.rng)
        self.upk[i] = keys.z
        self.usk[i] = keys
        request, _state = join_start(self.gpk, keys, self.rng)
        response = issue(self.gpk, self.mik, self.reg, str(i), request, self.rng)
        self.gsk[i] = join_finish(self.gpk, keys, response)
        return self.upk[i]

    def usk_oracle(self, i: int):
        """Corrupt user i, revealing both its secrets."""
        if i not in self.hu or i in self.bu:
            return None
        if any(entry[0] == i for entry in self.chl):
            return None
        self.bu.add(i)
        return (self.gsk[i], self.usk[i])

    def gsign_oracle(self, i: int, et: bytes, m: bytes) -> Optional[GroupSignature]:
        if i not in self.hu:
            return None
        if self.gsk.get(i) is None:
            return None
        if any(entry[0] == i and entry[1] == et for entry in self.chl):
            return None
        sig = gsign(self.gpk, self.gsk[i], et, m, self.rng)
        self.sigl[self.sn] = (i, et, m, sig)
        self.sn += 1
        return sig

    def rreg(self, i: int):
        return self.reg.row(str(i)) if str(i) in self.reg else None

    def wreg(self, i: int, x: Scalar, a: G1Element, upk: G1Element) -> None:
        self.reg.overwrite(str(i), x, a, upk)

    def esign_oracle(self, k: int, m_e: bytes) -> Optional[EventSignature]:
        if k >= 1:
            entry = self.sigl.get(k)
            if entry is None:
                return None
            i, et, _m, sig = entry
            epk = epk_from_signature(self.gpk, et, sig)
            return esign(self.gpk, self.usk[i].y, et, epk, m_e, self.rng)
        if k == 0:
            challenge = next((e for e in self.chl if e[3] is not None), None)
            if challenge is None:
                return None
            i, et, _m, sig = challenge
            epk = epk_from_signature(self.gpk, et, sig)
            return esign(self.gpk, self.usk[i].y, et, epk, m_e, self.rng)
        return None

    def snd_to_u(self, i: int, m_in: Optional[bytes]):
        """Drive the user side of join one message at a time.

        Returns (m_out, dec) with dec one of "cont", "accept", "reject".
        """
        if i not in self.hu:
            self.hu.add(i)
            keys = ukg(self.gpk, self.rng)
            self.upk[i] = keys.z
            self.usk[i] = keys
            self.gsk[i] = None
            m_in = None
        if m_in is None:
            request, _state = join_start(self.gpk, self.usk[i], self.rng)
            self._join_pending[i] = request
            return (request.to_bytes(self.gpk.suite), "cont")
        try:
            response = IssueResponse.from_bytes(m_in, self.gpk.suite)
            self.gsk[i] = join_finish(self.gpk, self.usk[i], response)
        except (wire.WireError, EnrollmentError):
            return (None, "reject")
        return (None, "accept")

    def ch(self, b: int, i0: int, i1: int, et: bytes, m: bytes) -> Optional[GroupSignature]:
        """Challenge oracle for the anonymity game."""
        for i in (i0, i1):
            if i not in self.hu or i in self.bu or self.gsk.get(i) is None:
                return None
        if any(e[0] in (i0, i1) and e[1] == et for e in self.sigl.values()):
            return None
        chosen = (i0, i1)[b]
        other = (i0, i1)[1 - b]
        sig = gsign(self.gpk, self.gsk[chosen], et, m, self.rng)
        self.chl.append((chosen, et, m, sig))
        self.chl.append((other, et, m, None))
        return sig


# ---------------------------------------------------------------------------
# Correctness experiment


EXP_CORR_BRANCHES = (
    "gver",
    "open-attribution",
    "judge",
    "ever",
    "link-same-signer",
    "link-distinct-signers",
)


def exp_corr_once(rng, suite=None) -> Optional[str]:
    """One trial; None on success, else the first failing branch name."""
    state = GameState(rng, suite)
    same = rng.random() < 0.5
    i0, i1 = 1, (1 if same else 2)
    state.add_u(i0)
    if not same:
        state.add_u(i1)
    et = bytes(rng.randrange(256) for _ in range(rng.randrange(8, 40)))
    m0 = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 64)))
    m1 = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 64)))
    m_e = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 64)))

    sig0 = gsign(state.gpk, state.gsk[i0], et, m0, rng)
    if not gver(state.gpk, et, m0, sig0):
        return "gver"
    try:
        opened = open_signature(state.gpk, state.mok, state.reg, et, m0, sig0, rng)
    except InvalidSignatureError:
        return "gver"
    if opened.member_id != str(i0):
        return "open-attribution"
    if not judge(state.gpk, opened.member_id, state.upk[i0], sig0, opened.proof):
        return "judge"
    epk0 = epk_from_signature(state.gpk, et, sig0)
    sig_e = esign(state.gpk, state.usk[i0].y, et, epk0, m_e, rng)
    if not ever(state.gpk, et, epk0, m_e, sig_e):
        return "ever"
    sig1 = gsign(state.gpk, state.gsk[i1], et, m1, rng)
    linked = link(et, m0, sig0, m1, sig1)
    if i0 == i1 and not linked:
        return "link-same-signer"
    if i0 != i1 and linked:
        return "link-distinct-signers"
    return None


@dataclass
class CorrReport:
    trials: int
    failures: List[Tuple[int, str]]
    elapsed_s: float

    @property
    def passed(self) -> bool:
        return not self.failures


def exp_corr(trials: int, seed: int = 0, suite=None) -> CorrReport:
    """Run repeated randomized correctness trials."""
    rng = seeded_rng(seed)
    failures = []
    start = time.perf_counter()
    for t in range(trials):
        branch = exp_corr_once(rng, suite)
        if branch is not None:
            failures.append((t, branch))
    return CorrReport(trials=trials, failures=failures, elapsed_s=time.perf_counter() - start)


# ---------------------------------------------------------------------------
# Scripted abuse suites


@dataclass
class NegativeReport:
    results: Dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.results.values())

    def record(self, name: str, ok: bool) -> None:
        self.results[name] = bool(ok)


def negative_suites(seed: int = 0, sybil_count: int = 50, suite=None) -> NegativeReport:
    """Scripted misuse: Sybil linking, framing, replay, tampering."""
    rng = seeded_rng(seed)
    report = NegativeReport()
    state = GameState(rng, suite)
    state.add_u(1)
    state.add_u(2)
    gpk = state.gpk
    et0 = b"zone-4|201703011000"
    et1 = b"zone-4|201703011010"
    ctx = PairingContext.for_signer(gpk, state.gsk[1])

    # One credential pretending to be many participants in one event: every
    # signature carries the same token, so all pairs link.
    sybils = [gsign(gpk, state.gsk[1], et0, b"claim %d" % n, rng, ctx) for n in range(sybil_count)]
    all_linked = all(
        link(et0, b"", sybils[0], b"", other) for other in sybils[1:]
    )
    tokens = {wire.encode_g1(gpk.suite, s.token(), compressed=True) for s in sybils}
    report.record("sybil-all-linked", all_linked and len(tokens) == 1)

    other = gsign(gpk, state.gsk[2], et0, b"honest", rng)
    report.record("distinct-members-unlinked", not link(et0, b"", sybils[0], b"", other))

    cross = gsign(gpk, state.gsk[1], et1, b"later", rng, ctx)
    report.record("cross-event-tokens-differ", cross.token() != sybils[0].token())

    # Opening attributes to member 1; the proof must not judge against 2.
    opened = open_signature(gpk, state.mok, state.reg, et0, b"claim 0", sybils[0], rng)
    report.record("open-attributes-correctly", opened.member_id == "1")
    report.record(
        "judge-accepts-true-attribution",
        judge(gpk, "1", state.upk[1], sybils[0], opened.proof),
    )
    report.record(
        "judge-rejects-framing",
        not judge(gpk, "2", state.upk[2], sybils[0], opened.proof),
    )

    # Event signatures must not replay across events or under swapped tokens.
    epk0 = epk_from_signature(gpk, et0, sybils[0])
    epk1 = epk_from_signature(gpk, et1, cross)
    es = esign(gpk, state.usk[1].y, et0, epk0, b"status", rng)
    report.record("esign-verifies", ever(gpk, et0, epk0, b"status", es))
    report.record("esign-cross-event-rejected", not ever(gpk, et1, epk1, b"status", es))
    swapped = type(epk0)(et=et0, base=epk0.base, token=other.token())
    report.record("esign-wrong-token-rejected", not ever(gpk, et0, swapped, b"status", es))

    # Byte-level tampering of a group signature must never verify.
    blob = bytearray(sybils[0].to_bytes(gpk.suite))
    blob[10] ^= 0x40
    try:
        mutated = GroupSignature.from_bytes(bytes(blob), gpk.suite)
        survived = gver(gpk, et0, b"claim 0", mutated)
    except wire.WireError:
        survived = False
    report.record("tampered-signature-rejected", not survived)
    report.record(
        "wrong-message-rejected", not gver(gpk, et0, b"claim 1", sybils[0])
    )
    return report


def populate_registry(
    gpk: GroupPublicKey,
    mik: MasterIssueKey,
    reg: RegistrationTable,
    count: int,
    rng,
    prefix: str = "filler-",
) -> None:
    """Mint `count` registry rows directly with the issuer secret.

    Benchmark support only: the rows carry real credentials (so lookups
    behave exactly as in production) but skip the interactive join, and all
    fillers share upk = h, i.e. the member secret y = 1.  Never use outside
    load generation.
    """
    s = gpk.suite
    base = s.g1_mul(gpk.g1, s.g1_neg(gpk.h))
    order = s.order
    for i in range(count):
        while True:
            x = rand_scalar_nonzero(rng, order)
            if (mik.gamma + x) % order != 0:
                break
        a = s.g1_exp(base, pow(mik.gamma + x, -1, order))
        reg.add("%s%d" % (prefix, i), x, a, gpk.h)


# Reference operation-count profile for each protocol step.  bench and the
# acceptance suite compare the instrumented algebra against these rows.
# Fields absent from a row are expected to be zero.
REFERENCE_OP_COUNTS = {
    "gsign": {"mul_g1": 3, "exp_g1": 4, "mul_gt": 2, "exp_gt": 3, "pairing": 0},
    "gver": {"mul_g1": 6, "exp_g1": 11, "mul_gt": 1, "pairing": 2},
    "esign": {"exp_g1": 1},
    "ever": {"mul_g1": 1, "exp_g1": 2},
}

GROUP_OP_FIELDS = ("mul_g1", "exp_g1", "mul_g2", "exp_g2", "mul_gt", "exp_gt", "pairing")


def measured_op_counts(seed: int = 0, suite=None) -> Dict[str, dict]:
    """Run one of each protocol step under the op counter."""
    rng = seeded_rng(seed)
    state = GameState(rng, suite)
    state.add_u(1)
    gpk = state.gpk
    gsk = state.gsk[1]
    ctx = PairingContext.for_signer(gpk, gsk)
    et = b"ops|201703011000"
    m = b"status"
    out: Dict[str, dict] = {}
    with count_ops() as ops:
        sig = gsign(gpk, gsk, et, m, rng, ctx)
    out["gsign"] = ops.as_dict()
    with count_ops() as ops:
        ok = gver(gpk, et, m, sig)
    out["gver"] = ops.as_dict()
    if not ok:
        raise RuntimeError("verification failed during op measurement")
    epk = epk_from_signature(gpk, et, sig)
    with count_ops() as ops:
        es = esign(gpk, state.usk[1].y, et, epk, m, rng)
    out["esign"] = ops.as_dict()
    with count_ops() as ops:
        ok = ever(gpk, et, epk, m, es)
    out["ever"] = ops.as_dict()
    if not ok:
        raise RuntimeError("event verification failed during op measurement")
    return out


def op_profile_matches(measured: dict, reference: dict) -> bool:
    """Equality over the group-operation fields, absent reference keys = 0."""
    return all(measured.get(f, 0) == reference.get(f, 0) for f in GROUP_OP_FIELDS)
