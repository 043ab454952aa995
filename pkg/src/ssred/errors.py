class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class NotSemistableError(DomainError):
    """The inertia operator is not unipotent over the requested degree."""
