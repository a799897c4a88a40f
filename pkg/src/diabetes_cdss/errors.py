"""Exception types raised across the package.

Every error condition callers are expected to branch on gets its own class;
generic misuse (wrong python types etc.) raises builtins as usual.
"""


class CdssError(Exception):
    """Base class for all package errors."""


# --- cohort ingestion / preprocessing ---

class MissingColumnError(CdssError):
    def __init__(self, column: str):
        super().__init__(f"required column missing: {column!r}")
        self.column = column


class TypeMismatchError(CdssError):
    def __init__(self, row: int, column: str, value: str):
        super().__init__(f"row {row}: column {column!r} has unparseable value {value!r}")
        self.row = row
        self.column = column
        self.value = value


class DuplicateIdError(CdssError):
    def __init__(self, record_id: str):
        super().__init__(f"duplicate record id: {record_id!r}")
        self.record_id = record_id


class InvalidRecordError(CdssError):
    """A parsed row violates a physiologic range invariant."""

    def __init__(self, row: int, reason: str):
        super().__init__(f"row {row}: {reason}")
        self.row = row
        self.reason = reason


class DegenerateSigmaError(CdssError):
    """Standard deviation of a feature is zero; normalization undefined."""


class AllMissingError(CdssError):
    """Imputation requested on a series with no observed values."""


class UnlabeledRecordError(CdssError):
    def __init__(self, record_id: str):
        super().__init__(f"record {record_id!r} has no label")
        self.record_id = record_id


class InsufficientGlycemicDataError(CdssError):
    """No glycemic measurement available; diagnostic rules cannot apply."""


class InvalidStatisticsError(CdssError):
    """Cohort statistics are incomplete or contain invalid values."""


# --- knowledge model ---

class SchemaViolationError(CdssError):
    """A model document does not conform to the model JSON schema."""


class CycleDetectedError(SchemaViolationError):
    pass


class DanglingBranchError(SchemaViolationError):
    def __init__(self, node_id: str, child_id: str):
        super().__init__(f"node {node_id!r} references missing child {child_id!r}")
        self.node_id = node_id
        self.child_id = child_id


class UnknownAttributeError(SchemaViolationError):
    def __init__(self, node_id: str, attribute: str):
        super().__init__(f"node {node_id!r} tests undeclared attribute {attribute!r}")
        self.node_id = node_id
        self.attribute = attribute


# --- induction ---

class EmptyDatasetError(CdssError):
    pass


class InvalidKError(CdssError):
    pass


class InvalidInputError(CdssError):
    pass


# --- hybridization ---

class IncompatibleSchemasError(CdssError):
    """Two trees disagree on the kind or unit of a shared attribute."""


# --- metrics ---

class LengthMismatchError(CdssError):
    def __init__(self, n_truth: int, n_pred: int):
        super().__init__(f"length mismatch: {n_truth} truth labels vs {n_pred} predictions")
        self.n_truth = n_truth
        self.n_pred = n_pred


class EmptyInputError(CdssError):
    pass


class DegenerateMarginalsError(CdssError):
    """Chance agreement equals 1; kappa is undefined."""


class OverlappingBandsError(CdssError):
    def __init__(self, band_a, band_b):
        super().__init__(f"age bands overlap: {band_a} and {band_b}")
        self.band_a = band_a
        self.band_b = band_b


class InvalidSubsetError(CdssError):
    pass


# --- service / persistence / pipeline ---

class VersionMismatchError(CdssError):
    def __init__(self, found: str, supported: str):
        super().__init__(f"unsupported model_version {found!r} (supported: {supported!r})")
        self.found = found
        self.supported = supported


class IoFailureError(CdssError):
    pass


class NoModelLoadedError(CdssError):
    pass


class FieldValidationError(CdssError):
    """Request-level validation failure with per-field messages."""

    def __init__(self, problems: list[tuple[str, str]]):
        msg = "; ".join(f"{field}: {reason}" for field, reason in problems)
        super().__init__(msg or "invalid request")
        self.problems = problems


class ConfigError(CdssError):
    def __init__(self, field: str, reason: str = "missing or invalid"):
        super().__init__(f"config field {field!r}: {reason}")
        self.field = field
        self.reason = reason


class StageError(CdssError):
    """A pipeline stage failed; wraps the cause with stage context."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause
