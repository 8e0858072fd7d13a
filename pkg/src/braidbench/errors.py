"""Exception types shared across the workbench."""

from __future__ import annotations


class BraidbenchError(Exception):
    """Base class for all workbench errors."""


class GeometryFormatError(BraidbenchError):
    """Geometry/circuit/script file cannot be parsed or has a bad version."""


class ValidationFailed(BraidbenchError):
    """An operation required a well-formed geometry and got violations."""

    def __init__(self, report) -> None:
        super().__init__("geometry is not well-formed:\n" + report.summary())
        self.report = report


class InvalidDistance(BraidbenchError):
    """Code distance below the supported minimum."""


class ResourceCapExceeded(BraidbenchError):
    """Cell complex would exceed the configured maximum cell count."""


class UnderdeterminedStructure(BraidbenchError):
    """Some port generator admits no correlation surface at all."""


class SignatureMismatch(BraidbenchError):
    """Two geometries cannot be compared: port signatures differ."""


class TheoremPreconditionError(BraidbenchError):
    """A bridge move violated the bridging theorem's preconditions."""


class MoveRejected(BraidbenchError):
    """A rewrite move failed its structural or semantic check."""

    def __init__(self, message: str, detail: str = "") -> None:
        super().__init__(message if not detail else f"{message}\n{detail}")
        self.detail = detail


class CircuitError(BraidbenchError):
    """Ill-formed circuit (uninitialized qubit, unknown gate, ...)."""


class UnsupportedGate(CircuitError):
    """Gate outside the supported lowering/propagation subset."""


class UnsupportedPolicy(BraidbenchError):
    """Resource calculation asked for a protocol/level combination with no
    built-in volume policy."""
