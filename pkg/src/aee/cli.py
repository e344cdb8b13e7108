"""Command line covering the whole protocol lifecycle plus benchmarking.

Artifacts (keys, signatures, proofs, schedules) move between subcommands as
files, hex-encoded text by default (`--mode bin` for raw bytes).  Exit codes
are the contract: 0 for success or accept, 1 for a verifier saying no, 2 for
operational problems such as unreadable files or bad arguments.

Signing commands draw randomness from the operating system.  A fixed seed
can only be supplied through `--test-seed`, and that flag exists only when
the process runs with AEE_TEST_MODE=1; reusing nonces across signatures
leaks the member secret, so production invocations have no seeding surface.
The simulator's `--seed` is different: simulation runs are deterministic
replays by design.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional

import filelock

from . import wire
from .algebra import seeded_rng, system_rng
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
from .groupsig import GroupSignature, PairingContext, gsign, gver, precompute_event_schedule
from .keys import (
    GroupPublicKey,
    GroupSigningKey,
    KeyMaterialError,
    MasterIssueKey,
    MasterOpenKey,
    UserKeyPair,
    decode_upk,
    encode_upk,
    gset,
    ukg,
)
from .linktrace import (
    InvalidSignatureError,
    OpenerAuditLog,
    TraceProof,
    attribute_credential,
    judge,
    link,
    open_signature,
)
from .testkit import (
    GROUP_OP_FIELDS,
    REFERENCE_OP_COUNTS,
    measured_op_counts,
    op_profile_matches,
    populate_registry,
)
from .v2xsim import (
    AttackerSpec,
    SimConfig,
    build_rig,
    daily_timeslots,
    offline_precompute_report,
    run,
)

TEST_MODE = os.environ.get("AEE_TEST_MODE") == "1"

D224_G1_FULL = 56
D224_G1_COMPRESSED = 29
D224_SCALAR = 28


# ---------------------------------------------------------------------------
# artifact plumbing


def _write_artifact(path: str, data: bytes, mode: str, secret: bool = False) -> None:
    p = Path(path)
    if mode == "hex":
        p.write_text(data.hex() + "\n")
    else:
        p.write_bytes(data)
    if secret and os.name == "posix":
        os.chmod(p, 0o600)


def _read_artifact(path: str, mode: str) -> bytes:
    p = Path(path)
    if mode == "hex":
        text = p.read_text().strip()
        try:
            return bytes.fromhex(text)
        except ValueError as exc:
            raise wire.WireError("%s: not valid hex (use --mode bin for raw files)" % path) from exc
    return p.read_bytes()


def _read_message(spec: str) -> bytes:
    if spec == "-":
        return sys.stdin.buffer.read()
    return Path(spec).read_bytes()


def _rng(args):
    seed = getattr(args, "test_seed", None)
    if seed is not None:
        return seeded_rng(seed)
    return system_rng()


def _load_gpk(args) -> GroupPublicKey:
    return GroupPublicKey.from_bytes(_read_artifact(args.gpk, args.mode))


def _reg_lock(path: str) -> filelock.FileLock:
    return filelock.FileLock(path + ".lock", timeout=10)


def _load_reg(path: str, suite) -> RegistrationTable:
    if Path(path).exists():
        return RegistrationTable.load(path, suite)
    return RegistrationTable(suite)


# ---------------------------------------------------------------------------
# lifecycle subcommands


def cmd_setup(args) -> int:
    rng = _rng(args)
    gpk, mik, mok = gset(rng)
    _write_artifact(args.gpk, gpk.to_bytes(), args.mode)
    _write_artifact(args.mik, mik.to_bytes(gpk.suite), args.mode, secret=True)
    _write_artifact(args.mok, mok.to_bytes(gpk.suite), args.mode, secret=True)
    print("wrote %s %s %s" % (args.gpk, args.mik, args.mok))
    return 0


def cmd_ukg(args) -> int:
    gpk = _load_gpk(args)
    keys = ukg(gpk, _rng(args))
    _write_artifact(args.out, keys.to_bytes(gpk.suite), args.mode, secret=True)
    if args.upk_out:
        _write_artifact(args.upk_out, encode_upk(gpk.suite, keys.z), args.mode)
    print("wrote %s" % args.out)
    return 0


def cmd_join_start(args) -> int:
    gpk = _load_gpk(args)
    keys = UserKeyPair.from_bytes(_read_artifact(args.usk, args.mode), gpk.suite)
    request, _state = join_start(gpk, keys, _rng(args))
    _write_artifact(args.request, request.to_bytes(gpk.suite), args.mode)
    print("wrote %s" % args.request)
    return 0


def cmd_issue(args) -> int:
    gpk = _load_gpk(args)
    mik = MasterIssueKey.from_bytes(_read_artifact(args.mik, args.mode), gpk.suite)
    request = JoinRequest.from_bytes(_read_artifact(args.request, args.mode), gpk.suite)
    with _reg_lock(args.reg):
        reg = _load_reg(args.reg, gpk.suite)
        response = issue(gpk, mik, reg, args.member_id, request, _rng(args))
        reg.save(args.reg)
    _write_artifact(args.response, response.to_bytes(gpk.suite), args.mode)
    print("enrolled %s" % args.member_id)
    return 0


def cmd_join_finish(args) -> int:
    gpk = _load_gpk(args)
    keys = UserKeyPair.from_bytes(_read_artifact(args.usk, args.mode), gpk.suite)
    response = IssueResponse.from_bytes(_read_artifact(args.response, args.mode), gpk.suite)
    gsk = join_finish(gpk, keys, response)
    _write_artifact(args.gsk, gsk.to_bytes(gpk.suite), args.mode, secret=True)
    print("wrote %s" % args.gsk)
    return 0


def cmd_gsign(args) -> int:
    gpk = _load_gpk(args)
    gsk = GroupSigningKey.from_bytes(_read_artifact(args.gsk, args.mode), gpk.suite)
    m = _read_message(args.msg)
    sig = gsign(gpk, gsk, args.et.encode(), m, _rng(args))
    _write_artifact(args.sig, sig.to_bytes(gpk.suite, args.compressed), args.mode)
    print("token %s" % wire.encode_g1(gpk.suite, sig.token(), compressed=True).hex())
    return 0


def cmd_gver(args) -> int:
    gpk = _load_gpk(args)
    sig = GroupSignature.from_bytes(_read_artifact(args.sig, args.mode), gpk.suite)
    if gver(gpk, args.et.encode(), _read_message(args.msg), sig):
        print("accept")
        return 0
    print("reject")
    return 1


def cmd_esign(args) -> int:
    gpk = _load_gpk(args)
    keys = UserKeyPair.from_bytes(_read_artifact(args.usk, args.mode), gpk.suite)
    sig = GroupSignature.from_bytes(_read_artifact(args.sig, args.mode), gpk.suite)
    et = args.et.encode()
    epk = epk_from_signature(gpk, et, sig)
    es = esign(gpk, keys.y, et, epk, _read_message(args.msg), _rng(args))
    _write_artifact(args.out, es.to_bytes(gpk.suite), args.mode)
    print("wrote %s" % args.out)
    return 0


def cmd_ever(args) -> int:
    gpk = _load_gpk(args)
    sig = GroupSignature.from_bytes(_read_artifact(args.sig, args.mode), gpk.suite)
    es = EventSignature.from_bytes(_read_artifact(args.esig, args.mode), gpk.suite)
    et = args.et.encode()
    epk = epk_from_signature(gpk, et, sig)
    if ever(gpk, et, epk, _read_message(args.msg), es):
        print("accept")
        return 0
    print("reject")
    return 1


def cmd_link(args) -> int:
    sig0 = GroupSignature.from_bytes(_read_artifact(args.sig, args.mode))
    sig1 = GroupSignature.from_bytes(_read_artifact(args.sig2, args.mode))
    m0 = _read_message(args.msg) if args.msg else b""
    m1 = _read_message(args.msg2) if args.msg2 else b""
    if link(args.et.encode(), m0, sig0, m1, sig1):
        print("linked")
        return 0
    print("not-linked")
    return 1


def cmd_open(args) -> int:
    gpk = _load_gpk(args)
    mok = MasterOpenKey.from_bytes(_read_artifact(args.mok, args.mode), gpk.suite)
    sig = GroupSignature.from_bytes(_read_artifact(args.sig, args.mode), gpk.suite)
    with _reg_lock(args.reg):
        reg = _load_reg(args.reg, gpk.suite)
    audit = OpenerAuditLog() if args.audit else None
    try:
        result = open_signature(
            gpk, mok, reg, args.et.encode(), _read_message(args.msg), sig, _rng(args), audit
        )
    except InvalidSignatureError:
        _append_audit(args, audit)
        print("reject")
        return 1
    _append_audit(args, audit)
    if not result.traced:
        print("untraceable")
        return 1
    _write_artifact(args.proof, result.proof.to_bytes(gpk.suite), args.mode)
    print("traced %s" % result.member_id)
    return 0


def _append_audit(args, audit: Optional[OpenerAuditLog]) -> None:
    if audit is None or not audit.entries:
        return
    with open(args.audit, "a") as fh:
        for entry in audit.entries:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


def cmd_judge(args) -> int:
    gpk = _load_gpk(args)
    upk = decode_upk(_read_artifact(args.upk, args.mode), gpk.suite)
    sig = GroupSignature.from_bytes(_read_artifact(args.sig, args.mode), gpk.suite)
    proof = TraceProof.from_bytes(_read_artifact(args.proof, args.mode), gpk.suite)
    if judge(gpk, args.member_id, upk, sig, proof):
        print("accept")
        return 0
    print("reject")
    return 1


def cmd_precompute(args) -> int:
    if args.timing_report:
        report = offline_precompute_report(slots=args.slots)
        for key in sorted(report):
            print("%s %s" % (key, report[key]))
        return 0
    if not (args.gpk and args.gsk and args.out):
        raise ValueError("--gpk, --gsk and --out are required unless --timing-report is used")
    gpk = _load_gpk(args)
    gsk = GroupSigningKey.from_bytes(_read_artifact(args.gsk, args.mode), gpk.suite)
    if args.events:
        lines = Path(args.events).read_text().splitlines()
        events = [ln.strip().encode() for ln in lines if ln.strip()]
    else:
        events = daily_timeslots(args.slots, minutes=args.slot_minutes)
    if not events:
        raise ValueError("no event identifiers to precompute")
    schedule = precompute_event_schedule(gpk, gsk, events, _rng(args))
    payload = len(schedule).to_bytes(4, "big")
    for et, sig in schedule:
        payload += wire.lv(et) + wire.lv(sig.to_bytes(gpk.suite, args.compressed))
    _write_artifact(args.out, wire.frame(wire.KIND_SCHEDULE, payload), args.mode)
    print("precomputed %d signatures" % len(schedule))
    return 0


# ---------------------------------------------------------------------------
# bench


def _median_ms(fn, iters: int) -> float:
    samples = []
    for _ in range(iters):
        t0 = time.perf_counter()
        fn()
        samples.append((time.perf_counter() - t0) * 1000)
    return statistics.median(samples)


def _ops_brief(ops: dict) -> str:
    return "%dm1 %de1 %dmT %deT %dP" % (
        ops.get("mul_g1", 0),
        ops.get("exp_g1", 0),
        ops.get("mul_gt", 0),
        ops.get("exp_gt", 0),
        ops.get("pairing", 0),
    )


def cmd_bench(args) -> int:
    iters = args.iters
    rng = seeded_rng(0xB3) if TEST_MODE else system_rng()
    rig = build_rig(0xB3, 1, False)
    gpk, member = rig.gpk, rig.members[0]
    mik, mok = rig.mik, rig.mok
    et = b"bench||201703011000"
    m = b"bench status payload"

    reg_small = RegistrationTable(gpk.suite)
    reg_small.add("member-0", rig.reg.row(member.member_id).x, rig.reg.row(member.member_id).a, member.keys.z)
    populate_registry(gpk, mik, reg_small, 9, rng)

    reg_full = RegistrationTable(gpk.suite)
    reg_full.add("member-0", rig.reg.row(member.member_id).x, rig.reg.row(member.member_id).a, member.keys.z)
    populate_registry(gpk, mik, reg_full, args.registry_size - 1, rng)

    sig = gsign(gpk, member.gsk, et, m, rng, member.ctx)
    sig_b = gsign(gpk, member.gsk, et, m, rng, member.ctx)
    epk = epk_from_signature(gpk, et, sig)
    es = esign(gpk, member.keys.y, et, epk, m, rng)

    rows: Dict[str, dict] = {}
    rows["gsign"] = {"median_ms": _median_ms(lambda: gsign(gpk, member.gsk, et, m, rng, member.ctx), iters)}
    rows["gver"] = {"median_ms": _median_ms(lambda: gver(gpk, et, m, sig), iters)}
    rows["esign"] = {"median_ms": _median_ms(lambda: esign(gpk, member.keys.y, et, epk, m, rng), iters)}
    rows["ever"] = {"median_ms": _median_ms(lambda: ever(gpk, et, epk, m, es), iters)}
    rows["link"] = {
        "median_ms_10_members": _median_ms(lambda: link(et, m, sig, m, sig_b), iters),
        "median_ms_%d_members" % args.registry_size: _median_ms(lambda: link(et, m, sig, m, sig_b), iters),
    }
    rows["open_attribution"] = {
        "median_ms": _median_ms(lambda: attribute_credential(gpk, mok, reg_full, sig), iters),
        "registry_size": args.registry_size,
    }
    rows["open_full"] = {
        "median_ms": _median_ms(
            lambda: open_signature(gpk, mok, reg_full, et, m, sig, rng), max(10, iters // 20)
        ),
        "registry_size": args.registry_size,
    }

    measured = measured_op_counts()
    matches = {}
    print("op                 median_ms   ops measured           ops reference          verdict")
    for op in ("gsign", "gver", "esign", "ever"):
        ref = REFERENCE_OP_COUNTS[op]
        ok = op_profile_matches(measured[op], ref)
        matches[op] = ok
        rows[op]["ops"] = {f: measured[op].get(f, 0) for f in GROUP_OP_FIELDS}
        rows[op]["ops_reference"] = {f: ref.get(f, 0) for f in GROUP_OP_FIELDS}
        rows[op]["ops_match"] = ok
        print(
            "%-18s %9.3f   %-22s %-22s %s"
            % (op, rows[op]["median_ms"], _ops_brief(measured[op]), _ops_brief(ref), "MATCH" if ok else "MISMATCH")
        )
    for op in ("link", "open_attribution", "open_full"):
        med = rows[op].get("median_ms", rows[op].get("median_ms_10_members"))
        print("%-18s %9.3f" % (op, med))

    sizes = wire.suite_signature_sizes(gpk.suite)
    d224 = wire.signature_sizes(D224_G1_FULL, D224_G1_COMPRESSED, D224_SCALAR)
    print("signature bytes:   group full=%(group_full)d compressed=%(group_compressed)d event=%(event)d" % sizes)
    print("d224 reference:    group full=%(group_full)d compressed=%(group_compressed)d event=%(event)d" % d224)
    print(
        "deviation vs d224: %+d / %+d / %+d"
        % (
            sizes["group_full"] - d224["group_full"],
            sizes["group_compressed"] - d224["group_compressed"],
            sizes["event"] - d224["event"],
        )
    )
    all_match = all(matches.values())
    print("op-count verdict:  %s" % ("all rows match" if all_match else "MISMATCH in %s" % ", ".join(k for k, v in matches.items() if not v)))

    if args.json:
        out = {
            "iters": iters,
            "registry_size": args.registry_size,
            "rows": rows,
            "sizes": sizes,
            "d224_reference": d224,
            "size_deviation_vs_d224": {k: sizes[k] - d224[k] for k in sizes},
            "op_count_matches": matches,
        }
        Path(args.json).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
    return 0 if all_match else 1


# ---------------------------------------------------------------------------
# sim


_SIM_FIELD_TYPES = {
    "scenario": str,
    "vehicle_count": int,
    "duration_s": float,
    "cam_interval_s": float,
    "event_slot_s": float,
    "seed": int,
    "drop_prob": float,
    "rebroadcast_every": int,
    "processing_budget_ms": float,
    "location": str,
    "start_time": str,
    "verify_peer_cams": bool,
    "compressed_signatures": bool,
    "attacker_identities": int,
    "attacker_distinct_payloads": bool,
}


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError("not a boolean: %r" % text)


def _parse_sim_config_file(path: str) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError("%s:%d: expected key = value" % (path, lineno))
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _SIM_FIELD_TYPES:
            raise ValueError("%s:%d: unknown key %r" % (path, lineno, key))
        typ = _SIM_FIELD_TYPES[key]
        out[key] = _parse_bool(value) if typ is bool else typ(value)
    return out


def cmd_sim(args) -> int:
    settings: dict = {}
    if args.config:
        settings.update(_parse_sim_config_file(args.config))
    overrides = {
        "scenario": args.scenario,
        "vehicle_count": args.vehicles,
        "duration_s": args.duration,
        "cam_interval_s": args.cam_interval,
        "event_slot_s": args.slot,
        "seed": args.seed,
        "drop_prob": args.drop,
        "rebroadcast_every": args.rebroadcast,
        "processing_budget_ms": args.budget_ms,
        "location": args.location,
        "start_time": args.start_time,
    }
    for key, val in overrides.items():
        if val is not None:
            settings[key] = val
    if args.verify_peer_cams:
        settings["verify_peer_cams"] = True
    if args.compressed:
        settings["compressed_signatures"] = True
    if args.attacker_identities is not None:
        settings["attacker_identities"] = args.attacker_identities
    if args.lazy_attacker:
        settings["attacker_distinct_payloads"] = False

    identities = settings.pop("attacker_identities", 0)
    distinct = settings.pop("attacker_distinct_payloads", True)
    attacker = None
    if identities:
        attacker = AttackerSpec(claimed_identities=identities, distinct_payloads=distinct)
    config = SimConfig(attacker=attacker, **settings)
    report = run(config)
    s = report.summary
    print("scenario          %s" % s["scenario"])
    print("events            %d" % len(s["events"]))
    print("messages          auth=%(auth)d cam=%(cam)d rebroadcast=%(rebroadcast)d dropped=%(dropped)d" % s["message_counts"])
    print("sybil             events-with-attacker=%d detected=%d honest-flagged=%d" % (
        s["attacker_event_count"], s["attacker_detected_events"], s["honest_flagged_total"]))
    print("token discipline  conflicts=%d cross-event-collisions=%d" % (
        s["token_conflicts"], s["cross_event_token_collisions"]))
    print("hot-path pairings %d" % s["steady_state_ops"]["pairing"])
    print("report digest     %s" % report.digest())
    if args.report:
        Path(args.report).write_text(
            json.dumps({"summary": report.summary, "timing": report.timing}, indent=2, sort_keys=True) + "\n"
        )
    if args.canonical:
        Path(args.canonical).write_bytes(report.canonical_bytes())
    return 0


# ---------------------------------------------------------------------------
# parser


def _min_iters(text: str) -> int:
    value = int(text)
    if value < 100:
        raise argparse.ArgumentTypeError("iterations must be >= 100")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aee",
        description="Anonymous event-linkable authentication: keys, signatures, tracing, simulation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=fn)
        p.add_argument("--mode", choices=("hex", "bin"), default="hex", help="artifact file encoding")
        if TEST_MODE:
            p.add_argument("--test-seed", type=int, default=None, help="deterministic rng (test builds only)")
        return p

    p = add("setup", cmd_setup, "generate group, issuer and opener keys")
    p.add_argument("--gpk", required=True)
    p.add_argument("--mik", required=True)
    p.add_argument("--mok", required=True)

    p = add("ukg", cmd_ukg, "generate a user key pair")
    p.add_argument("--gpk", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--upk-out", default=None, help="also write the public half")

    p = add("join-start", cmd_join_start, "produce a join request for the issuer")
    p.add_argument("--gpk", required=True)
    p.add_argument("--usk", required=True)
    p.add_argument("--request", required=True)

    p = add("issue", cmd_issue, "issue a credential and record the member")
    p.add_argument("--gpk", required=True)
    p.add_argument("--mik", required=True)
    p.add_argument("--reg", required=True)
    p.add_argument("--member-id", required=True)
    p.add_argument("--request", required=True)
    p.add_argument("--response", required=True)

    p = add("join-finish", cmd_join_finish, "validate the credential and store the signing key")
    p.add_argument("--gpk", required=True)
    p.add_argument("--usk", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--gsk", required=True)

    p = add("gsign", cmd_gsign, "group-sign a message for an event")
    p.add_argument("--gpk", required=True)
    p.add_argument("--gsk", required=True)
    p.add_argument("--et", required=True, help="event identifier string")
    p.add_argument("--msg", required=True, help="message file, or - for stdin")
    p.add_argument("--sig", required=True)
    p.add_argument("--compressed", action="store_true")

    p = add("gver", cmd_gver, "verify a group signature")
    p.add_argument("--gpk", required=True)
    p.add_argument("--et", required=True)
    p.add_argument("--msg", required=True)
    p.add_argument("--sig", required=True)

    p = add("esign", cmd_esign, "event-sign a message under a verified group signature")
    p.add_argument("--gpk", required=True)
    p.add_argument("--usk", required=True)
    p.add_argument("--et", required=True)
    p.add_argument("--sig", required=True, help="the signer's group signature for this event")
    p.add_argument("--msg", required=True)
    p.add_argument("--out", required=True)

    p = add("ever", cmd_ever, "verify an event signature")
    p.add_argument("--gpk", required=True)
    p.add_argument("--et", required=True)
    p.add_argument("--sig", required=True, help="the already gver-checked group signature")
    p.add_argument("--esig", required=True)
    p.add_argument("--msg", required=True)

    p = add("link", cmd_link, "decide whether two same-event signatures share a signer")
    p.add_argument("--et", required=True)
    p.add_argument("--sig", required=True)
    p.add_argument("--sig2", required=True)
    p.add_argument("--msg", default=None)
    p.add_argument("--msg2", default=None)

    p = add("open", cmd_open, "de-anonymize a signature and emit a tracing proof")
    p.add_argument("--gpk", required=True)
    p.add_argument("--mok", required=True)
    p.add_argument("--reg", required=True)
    p.add_argument("--et", required=True)
    p.add_argument("--msg", required=True)
    p.add_argument("--sig", required=True)
    p.add_argument("--proof", required=True)
    p.add_argument("--audit", default=None, help="append JSON audit lines here")

    p = add("judge", cmd_judge, "publicly check a tracing proof")
    p.add_argument("--gpk", required=True)
    p.add_argument("--member-id", required=True)
    p.add_argument("--upk", required=True)
    p.add_argument("--sig", required=True)
    p.add_argument("--proof", required=True)

    p = add("precompute", cmd_precompute, "pre-sign upcoming event slots")
    p.add_argument("--gpk", default=None)
    p.add_argument("--gsk", default=None)
    p.add_argument("--events", default=None, help="file with one event identifier per line")
    p.add_argument("--slots", type=_positive_int, default=144, help="daily timeslot count when --events is absent")
    p.add_argument("--slot-minutes", type=_positive_int, default=10)
    p.add_argument("--out", default=None)
    p.add_argument("--compressed", action="store_true")
    p.add_argument("--timing-report", action="store_true", help="print the offline timing report instead of writing a schedule")

    p = add("bench", cmd_bench, "median timings and operation counts")
    p.add_argument("--iters", type=_min_iters, default=1000)
    p.add_argument("--registry-size", type=_positive_int, default=10000)
    p.add_argument("--json", default=None, help="also write machine-readable results here")

    p = add("sim", cmd_sim, "run the deterministic traffic simulation")
    p.add_argument("--scenario", choices=("intersection", "cam"), default=None)
    p.add_argument("--config", default=None, help="key = value settings file")
    p.add_argument("--vehicles", type=_positive_int, default=None)
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--cam-interval", type=float, default=None)
    p.add_argument("--slot", type=float, default=None)
    p.add_argument("--seed", type=int, default=None, help="replay seed (simulation is deterministic)")
    p.add_argument("--attacker-identities", type=int, default=None)
    p.add_argument("--lazy-attacker", action="store_true", help="attacker reuses one signature per event")
    p.add_argument("--drop", type=float, default=None)
    p.add_argument("--rebroadcast", type=_positive_int, default=None)
    p.add_argument("--budget-ms", type=float, default=None)
    p.add_argument("--location", default=None)
    p.add_argument("--start-time", default=None)
    p.add_argument("--verify-peer-cams", action="store_true")
    p.add_argument("--compressed", action="store_true")
    p.add_argument("--report", default=None, help="write summary and timing as JSON")
    p.add_argument("--canonical", default=None, help="write the canonical summary bytes")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except filelock.Timeout:
        print("error: registration table is locked by another process", file=sys.stderr)
        return 2
    except (wire.WireError, KeyMaterialError, EnrollmentError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
