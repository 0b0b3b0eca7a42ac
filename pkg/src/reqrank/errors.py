"""Exception hierarchy shared by all reqrank modules.

Every error carries a stable machine-readable ``code`` (used by the HTTP
layer) and an optional ``field`` path pointing at the offending input.
"""

from __future__ import annotations


class ReqRankError(Exception):
    """Base class for all reqrank errors."""

    code = "error"

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field

    @property
    def message(self) -> str:
        return str(self)


# --- domain -----------------------------------------------------------------

class ScaleMismatch(ReqRankError):
    code = "scale_mismatch"


class DuplicateRequirement(ReqRankError):
    code = "duplicate_requirement"


class IntegrityError(ReqRankError):
    """Dangling reference, duplicate id, or broken structural invariant."""

    code = "integrity_error"


class ScaleError(ReqRankError):
    """Rating outside the declared scale, or an inverted scale."""

    code = "scale_error"


# --- influence ranking ------------------------------------------------------

class InvalidRanks(ReqRankError):
    """Ranks are not a permutation of 1..n."""

    code = "invalid_ranks"


class MissingRole(ReqRankError):
    code = "missing_role"


class UnknownStakeholder(ReqRankError):
    code = "unknown_stakeholder"


# --- similarity -------------------------------------------------------------

class LengthMismatch(ReqRankError):
    code = "length_mismatch"


class TooFewRequirements(ReqRankError):
    code = "too_few_requirements"


# --- selector ---------------------------------------------------------------

class UnknownRequirement(ReqRankError):
    code = "unknown_requirement"


class AlreadyRated(ReqRankError):
    code = "already_rated"


# --- latent factors ---------------------------------------------------------

class InvalidConfig(ReqRankError):
    code = "invalid_config"


class UnknownCell(ReqRankError):
    code = "unknown_cell"


class Divergence(ReqRankError):
    """Training cost became non-finite (learning rate too high)."""

    code = "divergence"


class UntrainedModel(ReqRankError):
    code = "untrained_model"


# --- pipeline ---------------------------------------------------------------

class NoElicitedData(ReqRankError):
    code = "no_elicited_data"


# --- evaluation -------------------------------------------------------------

class SetMismatch(ReqRankError):
    code = "set_mismatch"


class EmptySet(ReqRankError):
    code = "empty_set"


class InvalidBaseline(ReqRankError):
    code = "invalid_baseline"


class InvalidParams(ReqRankError):
    code = "invalid_params"


# --- frontdoor --------------------------------------------------------------

class ParseError(ReqRankError):
    """File does not parse; carries file path and line number."""

    code = "parse_error"

    def __init__(self, message: str, path: str | None = None,
                 line: int | None = None, field: str | None = None):
        detail = message
        if path is not None:
            where = path if line is None else f"{path}:{line}"
            detail = f"{where}: {message}"
        super().__init__(detail, field=field)
        self.path = path
        self.line = line


class RevisionConflict(ReqRankError):
    """Optimistic-concurrency check failed; reload and retry."""

    code = "revision_conflict"


class UnknownProject(ReqRankError):
    code = "unknown_project"


class BindError(ReqRankError):
    code = "bind_error"


class StorageError(ReqRankError):
    code = "storage_error"
