"""Acceptance checks: one test per reference target, at its stated tolerance.

Each test prints one summary line with the measured values.  Two checks are
expected to fail on this backend and are left failing on purpose rather than
loosened; the assertion messages carry the measured numbers:

* test_criterion_4_operation_counts: the signing flow here reaches the
  commitment values with 2 mul_G1 + 7 exp_G1 instead of the reference
  3 mul_G1 + 4 exp_G1 split, because R3 = u^r_delta * D^r_x and the R2 base
  are evaluated as independent exponentiations.  The other three rows match
  exactly.
* test_criterion_5_timing_ratios: the open step (blinding removal plus
  registry lookup at 10^4 members) costs one G1 exponentiation, which on a
  big-integer Python backend is about 4% of a verification, not under 1%.
"""

import dataclasses
import statistics
import subprocess
import sys
import time

import pytest

from aee.algebra import seeded_rng
from aee.enroll import EnrollmentError, JoinRequest, RegistrationTable, issue, join_start
from aee.eventsig import EventSignature, epk_from_signature, esign, ever
from aee.groupsig import GroupSignature, _r4_four_pairing, gsign, gver, precompute_event_schedule
from aee.keys import ukg
from aee.linktrace import TraceProof, attribute_credential, judge, link, open_signature
from aee.testkit import (
    GROUP_OP_FIELDS,
    REFERENCE_OP_COUNTS,
    exp_corr,
    measured_op_counts,
    populate_registry,
)
from aee.v2xsim import (
    AttackerSpec,
    SimConfig,
    build_rig,
    daily_timeslots,
    run_cam,
    run_intersection,
)
from aee.wire import encode_gt, signature_sizes, suite_signature_sizes


def median_ms(fn, iters):
    out = []
    for _ in range(iters):
        t0 = time.perf_counter()
        fn()
        out.append((time.perf_counter() - t0) * 1000.0)
    return statistics.median(out)


def test_criterion_1_correctness_experiment():
    report = exp_corr(trials=1000, seed=0xC0DE)
    print(
        "criterion 1: %d/%d randomized trials passed in %.1f s"
        % (report.trials - len(report.failures), report.trials, report.elapsed_s)
    )
    assert report.trials == 1000
    assert report.failures == [], "failing branches: %r" % report.failures[:5]
    assert report.elapsed_s < 300.0, "took %.1f s, budget is 300 s" % report.elapsed_s


def test_criterion_2_signature_composition(rig):
    suite = rig.suite
    point_fields, scalar_fields = [], []
    for f in dataclasses.fields(GroupSignature):
        (point_fields if f.name in ("d", "b", "t") else scalar_fields).append(f.name)
    assert len(point_fields) == 3 and len(scalar_fields) == 5
    assert len(dataclasses.fields(EventSignature)) == 2
    checked = 0
    for idx, member_id in enumerate(rig.member_ids):
        gsk, ctx = rig.gsks[member_id], rig.ctxs[member_id]
        for n in range(4):
            et, m = b"slot-%d" % n, b"msg-%d" % n
            sig = gsign(rig.gpk, gsk, et, m, seeded_rng(9000 + 10 * idx + n), ctx)
            raw_full = sig.to_bytes_raw(suite)
            raw_comp = sig.to_bytes_raw(suite, compressed=True)
            assert len(raw_full) == 3 * suite.g1_bytes_full + 5 * suite.scalar_bytes
            assert len(raw_comp) == 3 * suite.g1_bytes_compressed + 5 * suite.scalar_bytes
            epk = epk_from_signature(rig.gpk, et, sig)
            es = esign(rig.gpk, gsk.y, et, epk, m, seeded_rng(9500 + checked))
            assert len(es.to_bytes_raw(suite)) == 2 * suite.scalar_bytes
            checked += 1
    print("criterion 2: %d signatures, all 3 G1 + 5 scalar / 2 scalar" % checked)


def test_criterion_3_size_formulas(rig, tmp_path):
    d224 = signature_sizes(g1_full=56, g1_compressed=29, scalar_width=28)
    assert d224 == {"group_full": 308, "group_compressed": 227, "event": 56}
    backend = suite_signature_sizes(rig.suite)
    s = rig.suite
    assert backend["group_full"] == 3 * s.g1_bytes_full + 5 * s.scalar_bytes
    assert backend["group_compressed"] == 3 * s.g1_bytes_compressed + 5 * s.scalar_bytes
    assert backend["event"] == 2 * s.scalar_bytes
    # The framed files on the wire match the formulas byte for byte.
    gsk, ctx = rig.gsks[rig.member_ids[0]], rig.ctxs[rig.member_ids[0]]
    sig = gsign(rig.gpk, gsk, b"et", b"m", seeded_rng(9600), ctx)
    assert len(sig.to_bytes(s)) == 1 + backend["group_full"]
    assert len(sig.to_bytes(s, compressed=True)) == 1 + backend["group_compressed"]
    # bench must report the deviation from the 56/28-byte profile.
    proc = subprocess.run(
        [sys.executable, "-m", "aee.cli", "bench", "--iters", "100",
         "--registry-size", "10", "--json", str(tmp_path / "bench.json")],
        capture_output=True,
        text=True,
        timeout=600,
    )
    import json

    data = json.loads((tmp_path / "bench.json").read_text())
    deviation = data["size_deviation_vs_d224"]
    assert deviation == {
        "group_full": backend["group_full"] - 308,
        "group_compressed": backend["group_compressed"] - 227,
        "event": backend["event"] - 56,
    }
    assert "deviation" in proc.stdout
    print(
        "criterion 3: d224 %r exact, backend %r exact, deviation %r reported"
        % (d224, backend, deviation)
    )


def test_criterion_4_operation_counts():
    measured = {
        name: {f: profile.get(f, 0) for f in GROUP_OP_FIELDS}
        for name, profile in measured_op_counts(seed=0).items()
    }
    expected = {
        name: {f: profile.get(f, 0) for f in GROUP_OP_FIELDS}
        for name, profile in REFERENCE_OP_COUNTS.items()
    }
    for name in ("gver", "esign", "ever"):
        assert measured[name] == expected[name], name
    print(
        "criterion 4: gver/esign/ever rows exact; gsign measured %r vs reference %r"
        % (
            {k: v for k, v in measured["gsign"].items() if v},
            {k: v for k, v in expected["gsign"].items() if v},
        )
    )
    assert measured["gsign"] == expected["gsign"], (
        "gsign operation profile %r does not match the reference "
        "3 mul_G1 + 4 exp_G1 + 2 mul_GT + 3 exp_GT row; this signer reaches "
        "the same commitments with %r"
        % (expected["gsign"], measured["gsign"])
    )


def test_criterion_5_timing_ratios(rig):
    s = rig.suite
    member_id = rig.member_ids[0]
    gsk, ctx = rig.gsks[member_id], rig.ctxs[member_id]
    reg = rig.reg_copy()
    populate_registry(rig.gpk, rig.mik, reg, 10_000 - len(reg), seeded_rng(0xF111))
    assert len(reg) == 10_000
    rng = seeded_rng(0x71E5)
    et = b"ratio-check||201703011000"
    sig = gsign(rig.gpk, gsk, et, b"m", rng, ctx)
    epk = epk_from_signature(rig.gpk, et, sig)
    es = esign(rig.gpk, gsk.y, et, epk, b"cam", rng)
    sig_b = gsign(rig.gpk, gsk, et, b"m2", rng, ctx)

    gsign_med = median_ms(lambda: gsign(rig.gpk, gsk, et, b"m", rng, ctx), 60)
    gver_med = median_ms(lambda: gver(rig.gpk, et, b"m", sig), 60)
    esign_med = median_ms(lambda: esign(rig.gpk, gsk.y, et, epk, b"cam", rng), 200)
    ever_med = median_ms(lambda: ever(rig.gpk, et, epk, b"cam", es), 200)
    link_med = median_ms(lambda: link(et, b"m", sig, b"m2", sig_b), 200)
    open_med = median_ms(lambda: attribute_credential(rig.gpk, rig.mok, reg, sig), 200)

    print(
        "criterion 5: gsign %.2f ms, gver %.2f ms; esign %.3f ms (%.1f%%), "
        "ever %.3f ms (%.1f%%), link %.4f ms (%.2f%%), open %.3f ms (%.2f%%) "
        "at %d members"
        % (
            gsign_med, gver_med,
            esign_med, 100 * esign_med / gsign_med,
            ever_med, 100 * ever_med / gver_med,
            link_med, 100 * link_med / gver_med,
            open_med, 100 * open_med / gver_med,
            len(reg),
        )
    )
    assert esign_med <= 0.2 * gsign_med, (
        "event signing %.3f ms exceeds 20%% of group signing %.3f ms" % (esign_med, gsign_med)
    )
    assert ever_med <= 0.2 * gver_med, (
        "event verification %.3f ms exceeds 20%% of group verification %.3f ms"
        % (ever_med, gver_med)
    )
    assert link_med < 0.01 * gver_med, (
        "linking %.4f ms is not under 1%% of verification %.3f ms" % (link_med, gver_med)
    )
    assert open_med < 0.01 * gver_med, (
        "opening (blinding removal + lookup at %d members) takes %.3f ms, "
        "which is %.1f%% of the %.3f ms verification median, not under 1%%; "
        "a single G1 exponentiation on this backend already costs more than "
        "the whole 1%% budget"
        % (len(reg), open_med, 100 * open_med / gver_med, gver_med)
    )


def test_criterion_6_offline_precompute(rig):
    member_id = rig.member_ids[1]
    gsk, ctx = rig.gsks[member_id], rig.ctxs[member_id]
    slots = daily_timeslots(144)
    rng = seeded_rng(0x0FF1)
    # Host baseline measured in the same process, directly before the batch.
    warm_rng = seeded_rng(0xBEA7)
    gsign_med = median_ms(lambda: gsign(rig.gpk, gsk, b"warm", b"", warm_rng, ctx), 30)
    t0 = time.perf_counter()
    schedule = precompute_event_schedule(rig.gpk, gsk, slots, rng, ctx=ctx)
    elapsed = time.perf_counter() - t0
    assert len(schedule) == 144
    for et, sig in schedule:
        assert gver(rig.gpk, et, b"", sig), et
    expected = 144 * gsign_med / 1000.0
    ratio = elapsed / expected
    print(
        "criterion 6: 144/144 slots verify; %.2f s vs %.2f s expected (ratio %.2f)"
        % (elapsed, expected, ratio)
    )
    assert 0.75 <= ratio <= 1.25, (
        "batch time %.2f s deviates more than 25%% from 144 x %.2f ms = %.2f s"
        % (elapsed, gsign_med, expected)
    )


def test_criterion_7_sybil_detection_both_scenarios():
    rig = build_rig(seed=0x5B11, honest_count=2, with_attacker=True)
    runs_per_scenario = 500
    detected = 0
    total_events = 0
    for i in range(runs_per_scenario):
        k = 2 + (i % 9)
        cfg = SimConfig(
            scenario="intersection",
            vehicle_count=2,
            duration_s=2,
            cam_interval_s=1.0,
            event_slot_s=2.0,
            seed=20_000 + i,
            attacker=AttackerSpec(claimed_identities=k),
        )
        s = run_intersection(cfg, rig).summary
        assert s["honest_flagged_total"] == 0, "honest vehicle flagged in run %d" % i
        assert s["attacker_detected_events"] == s["attacker_event_count"], (
            "intersection run %d (k=%d): %d of %d events detected"
            % (i, k, s["attacker_detected_events"], s["attacker_event_count"])
        )
        detected += s["attacker_detected_events"]
        total_events += s["attacker_event_count"]
    for i in range(runs_per_scenario):
        k = 2 + (i % 9)
        cfg = SimConfig(
            scenario="cam",
            vehicle_count=2,
            duration_s=2,
            cam_interval_s=1.0,
            event_slot_s=2.0,
            seed=40_000 + i,
            attacker=AttackerSpec(claimed_identities=k),
        )
        s = run_cam(cfg, rig).summary
        assert s["honest_flagged_total"] == 0, "honest vehicle flagged in cam run %d" % i
        assert s["attacker_detected_events"] == s["attacker_event_count"], (
            "cam run %d (k=%d): %d of %d events detected"
            % (i, k, s["attacker_detected_events"], s["attacker_event_count"])
        )
        detected += s["attacker_detected_events"]
        total_events += s["attacker_event_count"]
    print(
        "criterion 7: %d/%d attacked events detected over %d intersection + %d cam runs, "
        "k cycling 2..10, zero honest flags"
        % (detected, total_events, runs_per_scenario, runs_per_scenario)
    )
    assert detected == total_events


def test_criterion_8_mutation_rejection(rig):
    s = rig.suite
    rnd = seeded_rng(0x8888)
    member_id = rig.member_ids[0]
    gsk, ctx = rig.gsks[member_id], rig.ctxs[member_id]

    def random_scalar_not(v):
        while True:
            cand = rnd.randrange(s.order)
            if cand != int(v):
                return cand

    def random_point_not(p):
        while True:
            cand = s.g1_exp(rig.gpk.h, rnd.randrange(1, s.order))
            if cand != p:
                return cand

    # Join requests: one mutated field each must fail the proof check.
    keys = ukg(rig.gpk, seeded_rng(0x8801))
    request, _ = join_start(rig.gpk, keys, seeded_rng(0x8802))
    join_fields = ("z", "c", "s")
    for i in range(1000):
        field = join_fields[rnd.randrange(3)]
        if field == "z":
            mutated = dataclasses.replace(request, z=random_point_not(request.z))
        else:
            mutated = dataclasses.replace(
                request, **{field: random_scalar_not(getattr(request, field))}
            )
        reg = RegistrationTable(s)
        with pytest.raises(EnrollmentError):
            issue(rig.gpk, rig.mik, reg, "mut-%d" % i, mutated, rnd)

    # Group signatures.
    et, m = b"mutation-target||201703011000", b"payload"
    sig = gsign(rig.gpk, gsk, et, m, seeded_rng(0x8803), ctx)
    assert gver(rig.gpk, et, m, sig)
    gs_fields = [f.name for f in dataclasses.fields(GroupSignature)]
    for _ in range(1000):
        field = gs_fields[rnd.randrange(len(gs_fields))]
        if field in ("d", "b", "t"):
            mutated = dataclasses.replace(sig, **{field: random_point_not(getattr(sig, field))})
        else:
            mutated = dataclasses.replace(sig, **{field: random_scalar_not(getattr(sig, field))})
        assert not gver(rig.gpk, et, m, mutated), field

    # Event signatures, plus replay of the intact signature at another event.
    epk = epk_from_signature(rig.gpk, et, sig)
    es = esign(rig.gpk, gsk.y, et, epk, m, seeded_rng(0x8804))
    assert ever(rig.gpk, et, epk, m, es)
    for _ in range(1000):
        field = ("s_e", "c_e")[rnd.randrange(2)]
        mutated = dataclasses.replace(es, **{field: random_scalar_not(getattr(es, field))})
        assert not ever(rig.gpk, et, epk, m, mutated), field
    other_et = b"mutation-target||201703011010"
    other_sig = gsign(rig.gpk, gsk, other_et, m, seeded_rng(0x8805), ctx)
    other_epk = epk_from_signature(rig.gpk, other_et, other_sig)
    assert not ever(rig.gpk, other_et, other_epk, m, es)

    # Tracing proofs, plus a proof presented against the wrong member.
    opened = open_signature(rig.gpk, rig.mok, rig.reg, et, m, sig, seeded_rng(0x8806))
    upk = rig.reg.row(opened.member_id).upk
    assert judge(rig.gpk, opened.member_id, upk, sig, opened.proof)
    tp_fields = [f.name for f in dataclasses.fields(TraceProof)]
    for _ in range(1000):
        field = tp_fields[rnd.randrange(len(tp_fields))]
        if field == "k":
            mutated = dataclasses.replace(opened.proof, k=random_point_not(opened.proof.k))
        else:
            mutated = dataclasses.replace(
                opened.proof, **{field: random_scalar_not(getattr(opened.proof, field))}
            )
        assert not judge(rig.gpk, opened.member_id, upk, sig, mutated), field
    wrong_id = rig.member_ids[1]
    assert not judge(rig.gpk, wrong_id, rig.reg.row(wrong_id).upk, sig, opened.proof)
    print(
        "criterion 8: 4000 single-field mutations rejected; cross-event replay "
        "and mis-attributed judgement rejected"
    )


def test_criterion_9_verifier_optimization_equivalence(rig):
    s = rig.suite
    rnd = seeded_rng(0x9999)
    agreements = 0
    for i in range(100):
        member_id = rig.member_ids[i % len(rig.member_ids)]
        gsk, ctx = rig.gsks[member_id], rig.ctxs[member_id]
        et = b"equiv-%d" % i
        m = bytes(rnd.randrange(256) for _ in range(rnd.randrange(0, 48)))
        sig = gsign(rig.gpk, gsk, et, m, seeded_rng(11_000 + i), ctx)
        # Same verdict through both pairing arrangements.
        assert gver(rig.gpk, et, m, sig)
        assert gver(rig.gpk, et, m, sig, four_pairing=True)
        # The recommitment entering the challenge hash is the same GT element
        # byte for byte, so the two verifiers hash identical transcripts.
        c = int(sig.c)
        exp_h = (int(sig.s_y) + int(sig.s_delta)) % s.order
        left = s.g1_mul(
            s.g1_mul(s.g1_exp(sig.b, sig.s_x), s.g1_exp(rig.gpk.h, exp_h)),
            s.g1_exp(rig.gpk.g1, (-c) % s.order),
        )
        right = s.g1_mul(s.g1_exp(rig.gpk.h, sig.s_alpha), s.g1_exp(sig.b, c))
        reduced = s.pair_product([(left, rig.gpk.g2), (right, rig.gpk.w)])
        reference = _r4_four_pairing(rig.gpk, sig)
        assert encode_gt(s, reduced) == encode_gt(s, reference), "transcript differs at %d" % i
        agreements += 1
        if i < 30:
            field = ("c", "s_x", "s_y", "s_alpha", "s_delta")[i % 5]
            broken = dataclasses.replace(sig, **{field: (int(getattr(sig, field)) + 1) % s.order})
            assert not gver(rig.gpk, et, m, broken)
            assert not gver(rig.gpk, et, m, broken, four_pairing=True)
    print(
        "criterion 9: %d/100 honest signatures bit-identical across verifier paths, "
        "30 corrupted ones rejected by both" % agreements
    )


def test_criterion_10_simulation_reports_deterministic():
    digests = []
    for scenario, seed in (("intersection", 0xD1), ("cam", 0xD2)):
        cfg = SimConfig(
            scenario=scenario,
            vehicle_count=2,
            duration_s=4,
            event_slot_s=2.0,
            seed=seed,
            attacker=AttackerSpec(claimed_identities=3),
        )
        runner = run_intersection if scenario == "intersection" else run_cam
        first = runner(cfg)
        second = runner(cfg)
        assert first.canonical_bytes() == second.canonical_bytes(), scenario
        assert first.digest() == second.digest()
        digests.append((scenario, first.digest()[:12]))
    print("criterion 10: repeated runs byte-identical; digests %r" % (digests,))
