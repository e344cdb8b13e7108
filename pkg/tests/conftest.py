"""Shared fixtures for the test suite.

A single enrolled group rig is expensive to build (pairing-heavy), so it is
created once per session and shared read-only.  Tests that mutate the
registration table must copy it first.
"""

import pytest

from aee.algebra import default_suite, seeded_rng
from aee.enroll import RegistrationTable, issue, join_finish, join_start
from aee.groupsig import PairingContext
from aee.keys import gset, ukg


class Rig:
    """A group with a few enrolled members, shared across tests."""

    def __init__(self, seed: int, member_count: int = 3):
        rng = seeded_rng(seed)
        self.suite = default_suite()
        self.gpk, self.mik, self.mok = gset(rng, self.suite)
        self.reg = RegistrationTable()
        self.member_ids = []
        self.keys = {}
        self.gsks = {}
        self.ctxs = {}
        for i in range(member_count):
            member_id = "member-%d" % i
            keys = ukg(self.gpk, rng)
            req, _state = join_start(self.gpk, keys, rng)
            resp = issue(self.gpk, self.mik, self.reg, member_id, req, rng)
            gsk = join_finish(self.gpk, keys, resp)
            self.member_ids.append(member_id)
            self.keys[member_id] = keys
            self.gsks[member_id] = gsk
            self.ctxs[member_id] = PairingContext.for_signer(self.gpk, gsk)

    def reg_copy(self) -> RegistrationTable:
        return RegistrationTable.from_bytes(self.reg.to_bytes())


@pytest.fixture(scope="session")
def rig():
    return Rig(seed=0xACE)
