"""Semantic exception hierarchy.

Public functions never raise bare ValueError/KeyError for contract
violations; they raise one of the classes below so callers (and the CLI
exit-code mapping) can distinguish usage errors from numeric failures.
"""


class ConeCheckError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(ConeCheckError, ValueError):
    """Operands have incompatible kinds or dimensions."""


class CapabilityError(ConeCheckError):
    """The requested operation is not supported on this cone or at this size
    (no lattice structure, difference order above the cap, ...)."""


class DomainError(ConeCheckError):
    """A function was evaluated outside its domain, or the evaluation did not
    produce a finite value."""


class ParameterError(ConeCheckError, ValueError):
    """A parameter lies outside its documented range."""


class PreconditionError(ConeCheckError):
    """A caller-asserted hypothesis fails a validation or spot check."""


class NumericFailure(ConeCheckError):
    """A numeric routine failed (eigensolver did not converge, too many
    skipped trials, non-finite quadrature)."""


class UnknownEntryError(ConeCheckError, KeyError):
    """Catalog lookup with an id that does not exist."""

    def __str__(self) -> str:  # KeyError quotes its payload; keep it readable
        return self.args[0] if self.args else ""


class CertificateError(ConeCheckError):
    """A certificate is structurally invalid (negative weight, atom outside
    the dual cone, incompatible shapes)."""
