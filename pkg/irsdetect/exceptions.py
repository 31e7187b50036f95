"""Exception hierarchy shared by all irsdetect components."""


class IrsDetectError(Exception):
    """Base class for all package errors."""


class ParameterError(IrsDetectError, ValueError):
    """An argument lies outside its admissible range."""


class GeometryError(IrsDetectError, ValueError):
    """A point cannot be expressed in the IRS spherical frame."""


class DimensionError(IrsDetectError, ValueError):
    """Vector lengths disagree with the IRS geometry."""


class CellIndexError(IrsDetectError, IndexError):
    """A unit-cell index lies outside the surface."""


class ScenarioError(IrsDetectError):
    """A scenario file could not be parsed or validated."""

    def __init__(
        self,
        message: str,
        *,
        line: int | None = None,
        column: int | None = None,
    ) -> None:
        self.line = line
        self.column = column
        if line is not None:
            location = f"line {line}" + (f", column {column}" if column else "")
            message = f"{message} ({location})"
        super().__init__(message)


class DesignFileError(IrsDetectError):
    """A serialized phase-shift design is malformed."""


class SolverError(IrsDetectError):
    """The semidefinite relaxation did not converge."""

    def __init__(
        self,
        message: str,
        *,
        status: str | None = None,
        residuals: dict[str, float] | None = None,
    ) -> None:
        self.status = status
        self.residuals = residuals or {}
        super().__init__(message)

    def __str__(self) -> str:
        text = super().__str__()
        if self.status:
            text += f" [status={self.status}]"
        if self.residuals:
            details = ", ".join(f"{k}={v:.3e}" for k, v in self.residuals.items())
            text += f" residuals: {details}"
        return text
