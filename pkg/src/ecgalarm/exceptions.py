"""Exception types raised across the package."""


class EcgAlarmError(Exception):
    """Base class for all package errors."""


class ParseError(EcgAlarmError):
    """Malformed WFDB header text."""

    def __init__(self, line_no, reason):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"header line {line_no}: {reason}")


class UnsupportedFormat(EcgAlarmError):
    """Signal storage format other than 16-bit two's complement."""


class TruncatedSignal(EcgAlarmError):
    """Signal file shorter than the header promises."""


class MissingLabel(EcgAlarmError):
    """Record has no entry in the labels table."""


class EmptySignal(EcgAlarmError):
    """Operation requires a non-empty sample sequence."""


class EmptyBeats(EcgAlarmError):
    """Operation requires at least one delineated beat."""


class EmptyInput(EcgAlarmError):
    """Operation requires a non-empty input set."""


class DimensionError(EcgAlarmError):
    """Vector or matrix dimensions do not match."""


class SingleClassError(EcgAlarmError):
    """Training labels contain only one class."""


class SignalTooShort(EcgAlarmError):
    """Signal too short for the requested decomposition depth."""


class EmptyBand(EcgAlarmError):
    """Statistics requested for an empty coefficient band."""


class UndefinedAuc(EcgAlarmError):
    """ROC analysis needs both classes present."""


class ConfigError(EcgAlarmError):
    """Invalid experiment or pipeline configuration."""


class MissingInput(EcgAlarmError):
    """A required upstream artifact (manifest, feature CSV) is absent."""


class EmptyDataset(EcgAlarmError):
    """No usable records found during ingestion."""
