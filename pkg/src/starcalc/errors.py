class NumericalError(RuntimeError):
    """A computation ran but failed its own accuracy check (solver, residual, conditioning)."""


class StructureError(ValueError):
    """The input does not have the structure an operation requires."""
