from .blobstore import (
    BlobStore,
    BlobStoreError,
    FilesystemBlobStore,
    MemoryBlobStore,
    store_from_env,
)
from .http import create_app
from .manager import EDITING_NOTICE, SessionManager, SnapshotWriter
from .models import (
    ALLOWED_TRANSITIONS,
    CONDITION_AI,
    CONDITION_CONTROL,
    CONDITION_FREE,
    CONDITIONS,
    STAGE_EDITING,
    STAGE_INTERVIEWING,
    STAGE_ONBOARDING,
    STAGE_SCREENED_OUT,
    STAGE_SCREENING,
    STAGE_SUBMITTED,
    STAGE_SURVEY,
    STAGES,
    IllegalTransition,
    InvalidInput,
    ModeViolation,
    ServiceError,
    ServiceUnavailable,
    SessionState,
    Submission,
    UnknownSession,
    WrongStage,
    restore_session,
    serialize_session,
    serialize_submission,
)
from .surveys import (
    AI_USE_QUALIFYING,
    load_instruments,
    screen_qualifies,
    survey_items_for,
    validate_survey,
)

__all__ = [
    "ALLOWED_TRANSITIONS",
    "AI_USE_QUALIFYING",
    "BlobStore",
    "BlobStoreError",
    "CONDITION_AI",
    "CONDITION_CONTROL",
    "CONDITION_FREE",
    "CONDITIONS",
    "EDITING_NOTICE",
    "FilesystemBlobStore",
    "IllegalTransition",
    "InvalidInput",
    "MemoryBlobStore",
    "ModeViolation",
    "STAGES",
    "STAGE_EDITING",
    "STAGE_INTERVIEWING",
    "STAGE_ONBOARDING",
    "STAGE_SCREENED_OUT",
    "STAGE_SCREENING",
    "STAGE_SUBMITTED",
    "STAGE_SURVEY",
    "ServiceError",
    "ServiceUnavailable",
    "SessionManager",
    "SessionState",
    "SnapshotWriter",
    "Submission",
    "UnknownSession",
    "WrongStage",
    "create_app",
    "load_instruments",
    "restore_session",
    "screen_qualifies",
    "serialize_session",
    "serialize_submission",
    "store_from_env",
    "survey_items_for",
    "validate_survey",
]
