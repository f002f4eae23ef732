"""Exception hierarchy shared by the library and the command line."""

from fractions import Fraction


class BorcherdsError(Exception):
    """Base class. ``exit_code`` is what the CLI returns for it."""

    exit_code = 1
    kind = "error"

    def to_json(self):
        return {"error": self.kind, "message": str(self)}


class InputError(BorcherdsError, ValueError):
    """Malformed or invalid input data (schema, reduction, integrality)."""

    kind = "validation"

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key

    def to_json(self):
        out = super().to_json()
        if self.key is not None:
            out["key"] = list(self.key) if isinstance(self.key, tuple) else self.key
        return out


class ContractViolation(BorcherdsError):
    """A documented precondition of a library operation was not met."""

    kind = "contract"


class DegenerateTruncation(BorcherdsError):
    """Support statistics were requested for an empty series."""

    kind = "degenerate"


class InsufficientPrecision(BorcherdsError):
    """The input form does not carry enough Fourier coefficients."""

    exit_code = 2
    kind = "insufficient-precision"

    def __init__(self, message, required, available=None, queried=None):
        super().__init__(message)
        self.required = Fraction(required)
        self.available = None if available is None else Fraction(available)
        self.queried = None if queried is None else Fraction(queried)

    def to_json(self):
        out = super().to_json()
        out["required_D"] = str(self.required)
        if self.available is not None:
            out["available"] = str(self.available)
        if self.queried is not None:
            out["queried"] = str(self.queried)
        return out


class IntegralityError(BorcherdsError):
    """A final product coefficient came out non-integral."""

    exit_code = 3
    kind = "integrality"

    def __init__(self, message, index=None, value=None):
        super().__init__(message)
        self.index = index
        self.value = value

    def to_json(self):
        out = super().to_json()
        if self.index is not None:
            out["index"] = [str(x) for x in _flatten(self.index)]
        if self.value is not None:
            out["value"] = str(self.value)
        return out


def _flatten(index):
    a, b, c = index
    return [a, *b, c]
