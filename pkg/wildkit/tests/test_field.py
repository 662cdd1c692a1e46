from fractions import Fraction
from unittest import main

import numpy as np

from wildkit.exceptions import FieldDivisionError, FieldError, NotEnumerableError
from wildkit.linalg.field import (
    GF,
    QQ,
    FieldKind,
    FieldSpec,
    field_elements,
    field_from_text,
    is_prime,
    scalar_format,
    scalar_inv,
    scalar_parse,
)
from wildkit.tests.base_test_case import BasicTestCase


class FieldTest(BasicTestCase):
    def setUp(self):
        super().setUp()
        self.gf5 = GF(5)

    def test_parse_prime(self):
        """Integers are reduced to their canonical residue"""
        self.assertEqual(scalar_parse(self.gf5, "7").value, 2)
        self.assertEqual(scalar_parse(self.gf5, "-1").value, 4)
        self.assertEqual(scalar_parse(self.gf5, " 10 ").value, 0)

    def test_parse_rational(self):
        a = scalar_parse(QQ, "-4/6")
        self.assertEqual(a.value, Fraction(-2, 3))
        self.assertEqual(scalar_format(a), "-2/3")
        self.assertEqual(scalar_format(scalar_parse(QQ, "6/3")), "2")
        self.assertEqual(scalar_format(scalar_parse(QQ, "3/-4")), "-3/4")

    def test_parse_errors(self):
        with self.assertRaises(FieldError):
            scalar_parse(self.gf5, "1/2")
        with self.assertRaises(FieldError):
            scalar_parse(QQ, "one half")
        with self.assertRaises(FieldDivisionError):
            scalar_parse(QQ, "1/0")

    def test_inverse(self):
        self.assertEqual(scalar_inv(self.gf5.scalar(2)).value, 3)
        self.assertEqual(scalar_inv(QQ.scalar(Fraction(-2, 3))).value, Fraction(-3, 2))
        with self.assertRaises(FieldDivisionError):
            scalar_inv(self.gf5.zero)
        # still a ZeroDivisionError for callers outside the package
        with self.assertRaises(ZeroDivisionError):
            scalar_inv(QQ.zero)

    def test_arithmetic(self):
        a, b = self.gf5.scalar(3), self.gf5.scalar(4)
        self.assertEqual(a + b, 2)
        self.assertEqual(a - b, 4)
        self.assertEqual(a * b, 2)
        self.assertEqual(a / b, 2)
        self.assertEqual(-a, 2)
        self.assertEqual(1 - a, 3)
        self.assertEqual(QQ.scalar(Fraction(1, 2)) + Fraction(1, 3), Fraction(5, 6))
        with self.assertRaises(FieldError):
            a + GF(3).one

    def test_field_spec(self):
        self.assertEqual(GF(7), FieldSpec(kind=FieldKind.prime, p=7))
        self.assertEqual(str(GF(7)), "GF(7)")
        self.assertEqual(str(QQ), "QQ")
        self.assertTrue(GF(2).is_gf2)
        self.assertFalse(GF(3).is_gf2)
        self.assertEqual(GF(3).order, 3)
        self.assertIsNone(QQ.order)
        self.assertEqual(GF(3).to_json(), {"kind": "prime", "p": 3})
        self.assertEqual(QQ.to_json(), {"kind": "rational"})
        with self.assertRaises(FieldError):
            GF(4)
        with self.assertRaises(FieldError):
            FieldSpec(kind=FieldKind.rational, p=3)

    def test_dtype(self):
        """Small prime fields use int64, large ones and QQ use Python objects"""
        self.assertIs(GF(3).dtype, np.int64)
        self.assertIs(GF(1_000_003).dtype, object)
        self.assertIs(QQ.dtype, object)

    def test_is_prime(self):
        self.assertEqual([n for n in range(20) if is_prime(n)], [2, 3, 5, 7, 11, 13, 17, 19])

    def test_field_elements(self):
        self.assertEqual([e.value for e in field_elements(GF(3))], [0, 1, 2])
        with self.assertRaises(NotEnumerableError):
            field_elements(QQ)

    def test_field_axioms(self):
        """Checked on every triple of elements of GF(p) for p <= 7"""
        for p in (2, 3, 5, 7):
            field = GF(p)
            elements = field_elements(field)
            zero, one = field.zero, field.one
            for a in elements:
                self.assertEqual(a + zero, a)
                self.assertEqual(a * one, a)
                self.assertEqual(a + (-a), zero)
                self.assertEqual(scalar_parse(field, scalar_format(a)), a)
                if not a.is_zero():
                    self.assertEqual(a * scalar_inv(a), one)
                for b in elements:
                    self.assertEqual(a + b, b + a)
                    self.assertEqual(a * b, b * a)
                    for c in elements:
                        self.assertEqual((a + b) + c, a + (b + c))
                        self.assertEqual((a * b) * c, a * (b * c))
                        self.assertEqual(a * (b + c), a * b + a * c)

    def test_field_from_text(self):
        self.assertEqual(field_from_text("GF(7)"), GF(7))
        self.assertEqual(field_from_text("gf( 2 )"), GF(2))
        self.assertEqual(field_from_text("5"), GF(5))
        self.assertEqual(field_from_text("QQ"), QQ)
        with self.assertRaises(FieldError):
            field_from_text("RR")
        with self.assertRaises(FieldError):
            field_from_text("GF(9)")


if __name__ == "__main__":
    main()
