class WildkitError(Exception):
    def __init__(self, msg):
        super().__init__(self)
        self.msg = msg

    def __str__(self):
        return self.msg


class FieldError(WildkitError):
    """Raise when a scalar or field specification is malformed"""


class FieldDivisionError(FieldError, ZeroDivisionError):
    """Raise when inverting zero"""

    def __init__(self, msg="Cannot invert zero."):
        super().__init__(msg)


class NotEnumerableError(FieldError):
    """Raise when asking for the elements of an infinite field"""

    def __init__(self, field, msg=""):
        super().__init__(msg)
        self.field = field

    def __str__(self):
        if self.msg:
            return self.msg

        return f"The field {self.field} is not enumerable."


class ShapeError(WildkitError):
    """Raise on dimension or field mismatches"""


class ConstructionError(WildkitError):
    """Raise when the input to a construction violates its preconditions"""


class HypothesisError(WildkitError):
    """Raise when a Lie algebra operation is asked to go beyond its hypotheses"""


class InvariantError(WildkitError):
    """Raise when an internally checked invariant fails. This is always a bug."""
