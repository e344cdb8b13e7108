"""Group setup, user key generation, and key serialization."""

import pytest

from aee.algebra import default_suite, seeded_rng
from aee.keys import (
    GroupPublicKey,
    GroupSigningKey,
    KeyMaterialError,
    MasterIssueKey,
    MasterOpenKey,
    UserKeyPair,
    gset,
    ukg,
)


@pytest.fixture(scope="module")
def group():
    suite = default_suite()
    rng = seeded_rng(0x5E7)
    gpk, mik, mok = gset(rng, suite)
    return suite, gpk, mik, mok


def test_gset_elements_valid(group):
    suite, gpk, mik, mok = group
    gpk.validate()
    assert 1 <= int(mik.gamma) < suite.order
    assert 1 <= int(mok.xi) < suite.order


def test_gset_w_matches_issue_secret(group):
    # w must equal g2 raised to the issuing secret.
    suite, gpk, mik, mok = group
    assert gpk.w == suite.g2_exp(gpk.g2, mik.gamma)


def test_gset_u_matches_open_secret(group):
    # u is the opener base: u^xi = h.
    suite, gpk, mik, mok = group
    assert suite.g1_exp(gpk.u, mok.xi) == gpk.h


def test_gset_pairing_caches_match_direct_values(group):
    suite, gpk, mik, mok = group
    assert gpk.e_g1_g2 == suite.pair(gpk.g1, gpk.g2)
    assert gpk.e_h_g2 == suite.pair(gpk.h, gpk.g2)
    assert gpk.e_h_w == suite.pair(gpk.h, gpk.w)


def test_gset_distinct_bases(group):
    suite, gpk, mik, mok = group
    assert len({bytes(repr(e), "utf8") for e in (gpk.g1, gpk.h, gpk.u)}) == 3


def test_gset_different_rng_different_group():
    suite = default_suite()
    gpk1, _, _ = gset(seeded_rng(1), suite)
    gpk2, _, _ = gset(seeded_rng(2), suite)
    assert gpk1.h != gpk2.h


def test_ukg_relation(group):
    suite, gpk, mik, mok = group
    keys = ukg(gpk, seeded_rng(77))
    assert 1 <= int(keys.y) < suite.order
    assert keys.z == suite.g1_exp(gpk.h, keys.y)


def test_gpk_roundtrip(group):
    suite, gpk, mik, mok = group
    blob = gpk.to_bytes()
    back = GroupPublicKey.from_bytes(blob, suite)
    assert back.g1 == gpk.g1
    assert back.h == gpk.h
    assert back.u == gpk.u
    assert back.g2 == gpk.g2
    assert back.w == gpk.w
    assert back.h1_tag == gpk.h1_tag
    assert back.h2_tag == gpk.h2_tag
    assert back.e_h_w == gpk.e_h_w


def test_gpk_rejects_wrong_suite_name(group):
    suite, gpk, mik, mok = group
    blob = bytearray(gpk.to_bytes())
    # The suite name is the first length-value field; corrupt its payload.
    blob[4 + 4] ^= 0xFF
    with pytest.raises((KeyMaterialError, Exception)):
        GroupPublicKey.from_bytes(bytes(blob), suite)


def test_gpk_rejects_truncation(group):
    suite, gpk, mik, mok = group
    blob = gpk.to_bytes()
    with pytest.raises(Exception):
        GroupPublicKey.from_bytes(blob[:-5], suite)


def test_mik_roundtrip(group):
    suite, gpk, mik, mok = group
    back = MasterIssueKey.from_bytes(mik.to_bytes(), suite)
    assert int(back.gamma) == int(mik.gamma)


def test_mok_roundtrip(group):
    suite, gpk, mik, mok = group
    back = MasterOpenKey.from_bytes(mok.to_bytes(), suite)
    assert int(back.xi) == int(mok.xi)


def test_user_keypair_roundtrip(group):
    suite, gpk, mik, mok = group
    keys = ukg(gpk, seeded_rng(5))
    back = UserKeyPair.from_bytes(keys.to_bytes(), suite)
    assert int(back.y) == int(keys.y)
    assert back.z == keys.z


def test_signing_key_roundtrip(rig):
    member_id = rig.member_ids[0]
    gsk = rig.gsks[member_id]
    back = GroupSigningKey.from_bytes(gsk.to_bytes(), rig.suite)
    assert int(back.x) == int(gsk.x)
    assert int(back.y) == int(gsk.y)
    assert back.a == gsk.a


def test_constructor_rejects_identity_element(group):
    suite, gpk, mik, mok = group
    with pytest.raises(KeyMaterialError):
        GroupPublicKey(
            g1=gpk.g1,
            h=suite.g1_identity(),
            u=gpk.u,
            g2=gpk.g2,
            w=gpk.w,
            h1_tag=gpk.h1_tag,
            h2_tag=gpk.h2_tag,
            suite=suite,
        )


def test_validate_catches_off_curve_element(group):
    # validate() exists for material assembled without decoding, so feed it
    # a raw point that is not on the curve.
    from aee.algebra import G1Element

    suite, gpk, mik, mok = group
    broken = GroupPublicKey(
        g1=gpk.g1,
        h=G1Element((1, 1)),
        u=gpk.u,
        g2=gpk.g2,
        w=gpk.w,
        h1_tag=gpk.h1_tag,
        h2_tag=gpk.h2_tag,
        suite=suite,
    )
    with pytest.raises(KeyMaterialError):
        broken.validate()
