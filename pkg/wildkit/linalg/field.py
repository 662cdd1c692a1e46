"""Exact scalar arithmetic over prime fields GF(p) and over the rationals.

A field is described by a :class:`FieldSpec`. Elements are :class:`Scalar` objects that
always hold a canonical representative: an integer in ``[0, p)`` for prime fields, and a
reduced :class:`fractions.Fraction` with positive denominator for the rationals. Matrices
store the same canonical representatives ("raw values") directly in numpy arrays, so the
raw-level helpers on :class:`FieldSpec` are what the matrix code uses.

    >>> F = GF(5)
    >>> scalar_parse(F, "7")
    Scalar(2, GF(5))
    >>> scalar_inv(F.scalar(2))
    Scalar(3, GF(5))
    >>> scalar_format(scalar_parse(QQ, "-4/6"))
    '-2/3'
"""

import re
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from wildkit.exceptions import FieldDivisionError, FieldError, NotEnumerableError

INTEGER_RE = re.compile(r"^\s*[+-]?\d+\s*$")
FRACTION_RE = re.compile(r"^\s*([+-]?\d+)\s*/\s*([+-]?\d+)\s*$")
GF_RE = re.compile(r"^\s*(?:GF|F)\s*\(\s*(\d+)\s*\)\s*$", re.IGNORECASE)

# Above this characteristic, products of two residues no longer fit comfortably in int64
# after summation, so arrays fall back to Python integers.
INT64_PRIME_LIMIT = 2**20


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


class FieldKind(str, Enum):
    prime = "prime"
    rational = "rational"


class FieldSpec(BaseModel):
    """An exact coefficient domain: GF(p) for a prime p, or the rationals."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: FieldKind
    """Either a prime field or the rationals"""

    p: Optional[int] = None
    """The characteristic; only present for prime fields"""

    @model_validator(mode="after")
    def check_characteristic(self) -> "FieldSpec":
        if self.kind == FieldKind.prime:
            if self.p is None or not is_prime(self.p):
                raise FieldError(f"A prime field needs a prime p, got {self.p}.")
        elif self.p is not None:
            raise FieldError("The rational field does not take a characteristic p.")
        return self

    def __str__(self):
        return f"GF({self.p})" if self.is_prime else "QQ"

    @property
    def is_prime(self) -> bool:
        return self.kind == FieldKind.prime

    @property
    def is_gf2(self) -> bool:
        return self.is_prime and self.p == 2

    @property
    def order(self) -> Optional[int]:
        """Number of elements, or None for the rationals"""
        return self.p if self.is_prime else None

    @property
    def dtype(self):
        if self.is_prime and self.p < INT64_PRIME_LIMIT:  # type: ignore
            return np.int64
        return object

    def to_json(self) -> dict:
        return self.model_dump(mode="json", exclude_none=True)

    # raw-level helpers, shared with the matrix code

    def coerce(self, value: Any):
        """Return the canonical raw representative of value"""
        if isinstance(value, Scalar):
            if value.field != self:
                raise FieldError(f"Cannot use an element of {value.field} in {self}.")
            return value.value
        if isinstance(value, str):
            return scalar_parse(self, value).value
        if self.is_prime:
            if isinstance(value, Fraction):
                if value.denominator == 1:
                    return int(value.numerator) % self.p  # type: ignore
                return (value.numerator * self.raw_inv(value.denominator)) % self.p  # type: ignore
            return int(value) % self.p  # type: ignore
        return Fraction(value)

    def raw_inv(self, value):
        if self.is_prime:
            value = int(value) % self.p  # type: ignore
            if value == 0:
                raise FieldDivisionError()
            return pow(value, -1, self.p)  # type: ignore
        if value == 0:
            raise FieldDivisionError()
        return 1 / Fraction(value)

    def reduce(self, array: np.ndarray) -> np.ndarray:
        """Bring an array of integer combinations back to canonical representatives"""
        return array % self.p if self.is_prime else array

    def raw_zero(self):
        return 0 if self.is_prime else Fraction(0)

    def raw_one(self):
        return 1 if self.is_prime else Fraction(1)

    def scalar(self, value: Any) -> "Scalar":
        return Scalar(self, value)

    @property
    def zero(self) -> "Scalar":
        return Scalar(self, 0)

    @property
    def one(self) -> "Scalar":
        return Scalar(self, 1)


def GF(p: int) -> FieldSpec:
    """The prime field with p elements"""
    return FieldSpec(kind=FieldKind.prime, p=p)


QQ = FieldSpec(kind=FieldKind.rational)


def field_from_text(text: str) -> FieldSpec:
    """Parse a command-line field description: ``QQ``, ``GF(5)`` or just ``5``"""
    cleaned = text.strip()
    if cleaned.upper() in ("QQ", "Q", "RATIONAL"):
        return QQ
    match = GF_RE.match(cleaned)
    if match:
        return GF(int(match.group(1)))
    if cleaned.isdigit():
        return GF(int(cleaned))
    raise FieldError(f"Cannot understand the field '{text}'. Use QQ or GF(p).")


class Scalar:
    """An element of a FieldSpec. Invariant: 'value' is the canonical representative."""

    __slots__ = ("field", "value")

    def __init__(self, field: FieldSpec, value: Any):
        self.field = field
        self.value = field.coerce(value)

    def _other(self, other) -> Union[int, Fraction]:
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise FieldError(
                    f"Cannot combine elements of {self.field} and {other.field}."
                )
            return other.value
        return self.field.coerce(other)

    def __add__(self, other):
        return Scalar(self.field, self.value + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Scalar(self.field, self.value - self._other(other))

    def __rsub__(self, other):
        return Scalar(self.field, self._other(other) - self.value)

    def __mul__(self, other):
        return Scalar(self.field, self.value * self._other(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * scalar_inv(Scalar(self.field, self._other(other)))

    def __rtruediv__(self, other):
        return Scalar(self.field, self._other(other)) * scalar_inv(self)

    def __neg__(self):
        return Scalar(self.field, -self.value)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, Fraction)):
            return self.value == self.field.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((str(self.field), self.value))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        if not self.field.is_prime and self.value.denominator != 1:
            raise FieldError(f"{self} is not an integer.")
        return int(self.value)

    def __repr__(self):
        return f"Scalar({scalar_format(self)}, {self.field})"

    def __str__(self):
        return scalar_format(self)

    def is_zero(self) -> bool:
        return self.value == 0


def scalar_parse(field: FieldSpec, text: str) -> Scalar:
    """Parse a decimal integer, or "a/b" over the rationals, into a canonical Scalar"""
    if INTEGER_RE.match(text):
        return Scalar(field, int(text))
    match = FRACTION_RE.match(text)
    if match is None:
        raise FieldError(f"'{text}' is not a decimal integer or a fraction a/b.")
    if field.is_prime:
        raise FieldError(
            f"Fractions like '{text}' are not accepted in the prime field {field}."
        )
    numerator, denominator = int(match.group(1)), int(match.group(2))
    if denominator == 0:
        raise FieldDivisionError(f"'{text}' has a zero denominator.")
    return Scalar(field, Fraction(numerator, denominator))


def format_raw(field: FieldSpec, value) -> str:
    if field.is_prime:
        return str(int(value))
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def scalar_format(a: Scalar) -> str:
    return format_raw(a.field, a.value)


def scalar_inv(a: Scalar) -> Scalar:
    return Scalar(a.field, a.field.raw_inv(a.value))


def field_elements(field: FieldSpec) -> Tuple[Scalar, ...]:
    """0, 1, ..., p-1 in that order. This order breaks every tie in the package."""
    if not field.is_prime:
        raise NotEnumerableError(field, f"The field {field} has infinitely many elements.")
    return tuple(Scalar(field, i) for i in range(field.p))  # type: ignore
