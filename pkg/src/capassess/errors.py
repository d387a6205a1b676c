"""Domain error hierarchy shared by every module.

Each error carries a stable machine-readable ``code`` so the HTTP layer and
CLI can map failures without string matching.
"""

from __future__ import annotations


class DomainError(Exception):
    """Base class for all domain failures."""

    code = "domain_error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


# -- content bank ------------------------------------------------------------

class ParseError(DomainError):
    code = "parse_error"


class ValidationError(DomainError):
    code = "validation_error"


class VersionError(DomainError):
    code = "version_error"


class UnknownProcess(DomainError):
    code = "unknown_process"


# -- selection ---------------------------------------------------------------

class EmptyInput(DomainError):
    code = "empty_input"


class MismatchedProcessSets(DomainError):
    code = "mismatched_process_sets"


class InvalidWeights(DomainError):
    code = "invalid_weights"


# -- survey lifecycle --------------------------------------------------------

class EmptyProcessList(DomainError):
    code = "empty_process_list"


class InvalidState(DomainError):
    code = "invalid_state"


class DuplicateRoleForProcess(DomainError):
    code = "duplicate_role_for_process"


class UnknownParticipant(DomainError):
    code = "unknown_participant"


class UnknownAssessment(DomainError):
    code = "unknown_assessment"


class AuthError(DomainError):
    code = "auth_error"


class NotAllocated(DomainError):
    code = "not_allocated"


# -- measurement -------------------------------------------------------------

class OutOfRange(DomainError):
    code = "out_of_range"


class MixedQuestionIds(DomainError):
    code = "mixed_question_ids"


class MissingAttribute(DomainError):
    code = "missing_attribute"


# -- reporting ---------------------------------------------------------------

class BankMismatch(DomainError):
    code = "bank_mismatch"


class IncompleteResults(DomainError):
    code = "incomplete_results"


class UnsupportedFormat(DomainError):
    code = "unsupported_format"


# -- persistence -------------------------------------------------------------

class StoreError(DomainError):
    code = "store_error"


class StoreLocked(StoreError):
    code = "store_locked"
