"""Exception hierarchy shared by every drsys module."""


class DrsysError(Exception):
    """Base class for all library errors."""


class GraphSyntaxError(DrsysError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphError(DrsysError):
    """Structurally invalid graph, path or point."""


class DomainError(DrsysError):
    """A point lies outside the domain of the requested shift power."""


class SupportError(DrsysError):
    pass


class ValidityError(DrsysError):
    """A transducer does not emit valid boundary paths of its target graph."""


class UnverifiedMapError(DrsysError):
    pass


class NotConjugacy(DrsysError):
    pass


class NotEventuallyConjugate(DrsysError):
    def __init__(self, point, bound: int):
        self.point = point
        self.bound = bound
        super().__init__(f"no eventual-conjugacy exponent <= {bound} at {point}")


class WitnessError(DrsysError):
    pass


class NotComposable(DrsysError):
    pass


class NotAcyclic(DrsysError):
    pass


class InternalConsistencyError(DrsysError):
    """Two independent decision routes disagreed."""
