"""Anonymous event-linkable authentication for V2X.

Members join a group once and then sign anonymously.  Every signature on
the same event carries the same linking token, so receivers can spot one
credential claiming several identities without learning who signed.  A
separate opening authority can de-anonymize a signature and prove the
attribution to a judge.  After one group signature per event, members
authenticate follow-up messages with single-exponentiation event
signatures bound to the same token.
"""

from .algebra import (
    BilinearSuite,
    CountingSession,
    OpCounter,
    count_ops,
    default_suite,
    seeded_rng,
    system_rng,
)
from .enroll import (
    EnrollmentError,
    IssueResponse,
    JoinRequest,
    MemberConflictError,
    RegistrationTable,
    issue,
    join_finish,
    join_start,
)
from .eventsig import EventPublicKey, EventSignature, epk_from_signature, esign, ever
from .groupsig import (
    GroupSignature,
    PairingContext,
    gsign,
    gver,
    precompute_event_schedule,
)
from .keys import (
    GroupPublicKey,
    GroupSigningKey,
    KeyMaterialError,
    MasterIssueKey,
    MasterOpenKey,
    UserKeyPair,
    gset,
    ukg,
)
from .linktrace import (
    InvalidSignatureError,
    OpenerAuditLog,
    OpenResult,
    TraceProof,
    judge,
    link,
    open_signature,
)
from .testkit import CorrReport, GameState, exp_corr, exp_corr_once, negative_suites
from .v2xsim import (
    AttackerSpec,
    GroupRig,
    SimConfig,
    SimReport,
    build_rig,
    offline_precompute_report,
    run,
    run_cam,
    run_intersection,
)
from .wire import WireError, signature_sizes, suite_signature_sizes

__version__ = "0.1.0"

__all__ = [
    "AttackerSpec",
    "BilinearSuite",
    "CorrReport",
    "CountingSession",
    "EnrollmentError",
    "EventPublicKey",
    "EventSignature",
    "GameState",
    "GroupPublicKey",
    "GroupRig",
    "GroupSignature",
    "GroupSigningKey",
    "InvalidSignatureError",
    "IssueResponse",
    "JoinRequest",
    "KeyMaterialError",
    "MasterIssueKey",
    "MasterOpenKey",
    "MemberConflictError",
    "OpCounter",
    "OpenResult",
    "OpenerAuditLog",
    "PairingContext",
    "RegistrationTable",
    "SimConfig",
    "SimReport",
    "TraceProof",
    "UserKeyPair",
    "WireError",
    "build_rig",
    "count_ops",
    "default_suite",
    "epk_from_signature",
    "esign",
    "ever",
    "exp_corr",
    "exp_corr_once",
    "gset",
    "gsign",
    "gver",
    "issue",
    "join_finish",
    "join_start",
    "judge",
    "link",
    "negative_suites",
    "offline_precompute_report",
    "open_signature",
    "precompute_event_schedule",
    "run",
    "run_cam",
    "run_intersection",
    "seeded_rng",
    "signature_sizes",
    "suite_signature_sizes",
    "system_rng",
    "ukg",
]
