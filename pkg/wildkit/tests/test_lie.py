from unittest import main

from wildkit.deciders.pencil import TwoDimSpace, verify_weak
from wildkit.exceptions import ConstructionError, HypothesisError, ShapeError
from wildkit.lie import (
    LieIso,
    TildeElement,
    basis_map,
    bracket,
    check_jacobi,
    conjugate_tilde,
    derived_subalgebra,
    iso_from_similarity,
    lie_build,
    lie_from_model,
    lie_to_model,
    lift_lie_witness,
    similarity_from_iso,
    tilde_coordinates,
    tilde_matrix,
    verify_lie_iso,
    weak_witness_from_iso,
    wild_lie_reduce,
)
from wildkit.linalg.field import GF
from wildkit.linalg.matrix import Matrix, commutator, direct_sum
from wildkit.tests.base_test_case import BasicTestCase


def values(coordinates):
    return tuple(c.value for c in coordinates)


class LieAlgebraTest(BasicTestCase):
    def setUp(self):
        super().setUp()
        self.gf3 = GF(3)
        self.V = TwoDimSpace(
            Matrix.identity(self.gf3, 2), Matrix.unit(self.gf3, 2, 0, 1)
        )
        self.L = lie_build(self.V)
        self.S = Matrix.from_rows(self.gf3, [[1, 1], [0, 1]])
        self.all_singular = TwoDimSpace(
            Matrix.unit(self.gf3, 3, 0, 2), Matrix.unit(self.gf3, 3, 1, 2)
        )

    def test_structure_constants(self):
        self.assertEqual(self.L.dim, 4)
        self.assertEqual(self.L.n, 2)
        self.assertEqual(self.L.basis_labels, ("x", "y", "e1", "e2"))
        self.assertEqual(
            {key: values(vector) for key, vector in self.L.structure.items()},
            {(0, 2): (0, 0, 1, 0), (0, 3): (0, 0, 0, 1), (1, 3): (0, 0, 1, 0)},
        )
        self.assertTrue(check_jacobi(self.L))

    def test_bracket(self):
        """[x + e2, y] = -[y, e2] = -e1"""
        self.assertEqual(values(bracket(self.L, (1, 0, 0, 1), (0, 1, 0, 0))), (0, 0, 2, 0))
        u = (1, 2, 0, 1)
        self.assertEqual(values(bracket(self.L, u, u)), (0, 0, 0, 0))
        with self.assertRaises(ShapeError):
            bracket(self.L, (1, 0), (0, 1))

    def test_bracket_is_commutator_of_tilde_matrices(self):
        pairs = [
            ((1, 0, 0, 1), (0, 1, 0, 0)),
            ((2, 1, 1, 0), (1, 1, 0, 2)),
            ((0, 0, 1, 1), (1, 2, 2, 0)),
        ]
        for u, v in pairs:
            expected = tilde_matrix(self.L, bracket(self.L, u, v))
            self.assertEqual(
                commutator(tilde_matrix(self.L, u), tilde_matrix(self.L, v)), expected
            )

    def test_tilde_matrix(self):
        M = tilde_matrix(self.L, (1, 1, 2, 0))
        self.assertMatrixEqual(M, [[1, 1, 2], [0, 1, 0], [0, 0, 0]])
        self.assertEqual(values(tilde_coordinates(self.L, M)), (1, 1, 2, 0))
        self.assertIsNone(
            tilde_coordinates(
                self.L, Matrix.from_rows(self.gf3, [[1, 0, 0], [0, 1, 0], [0, 1, 0]])
            )
        )
        self.assertIsNone(tilde_coordinates(self.L, Matrix.unit(self.gf3, 3, 1, 0)))
        element = TildeElement.from_coordinates(self.L, (2, 0, 1, 1))
        self.assertEqual(values(element.coordinates), (2, 0, 1, 1))

    def test_derived_subalgebra(self):
        dimension, basis = derived_subalgebra(self.L)
        self.assertEqual(dimension, 2)
        self.assertEqual([values(b) for b in basis], [(0, 0, 1, 0), (0, 0, 0, 1)])
        dimension, _ = derived_subalgebra(lie_build(self.all_singular))
        self.assertEqual(dimension, 2)

    def test_iso_from_similarity(self):
        P = Matrix.identity(self.gf3, 2)
        self.assertEqual(basis_map(self.V, self.V, self.S), P)
        iso = iso_from_similarity(self.V, self.V, self.S, P)
        self.assertEqual(iso.phi, direct_sum(P, self.S))
        self.assertTrue(verify_lie_iso(self.L, self.L, iso))
        with self.assertRaises(HypothesisError):
            iso_from_similarity(self.V, self.V, self.S, self.S)
        with self.assertRaises(HypothesisError):
            iso_from_similarity(self.V, self.V, Matrix.unit(self.gf3, 2, 0, 1), P)

    def test_verify_lie_iso(self):
        self.assertTrue(
            verify_lie_iso(self.L, self.L, LieIso(Matrix.identity(self.gf3, 4)))
        )
        self.assertFalse(verify_lie_iso(self.L, self.L, LieIso(Matrix.zeros(self.gf3, 4))))
        swap_xy = Matrix.from_rows(
            self.gf3, [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
        )
        self.assertFalse(verify_lie_iso(self.L, self.L, LieIso(swap_xy)))
        with self.assertRaises(ShapeError):
            LieIso(Matrix.zeros(self.gf3, 4, 3))

    def test_similarity_from_iso(self):
        P = Matrix.identity(self.gf3, 2)
        iso = iso_from_similarity(self.V, self.V, self.S, P)
        S, recovered_P = similarity_from_iso(self.L, self.L, iso)
        self.assertEqual(S, self.S)
        self.assertEqual(recovered_P, P)
        T, S_w = weak_witness_from_iso(S, recovered_P)
        self.assertTrue(verify_weak(self.V.pair, self.V.pair, T, S_w))
        R = direct_sum(S, Matrix.identity(self.gf3, 1))
        self.assertTrue(conjugate_tilde(self.L, self.L, R))

    def test_similarity_from_iso_needs_nonsingular_members(self):
        L = lie_build(self.all_singular)
        with self.assertRaises(HypothesisError):
            similarity_from_iso(L, L, LieIso(Matrix.identity(self.gf3, 5)))

    def test_composition(self):
        first = LieIso(direct_sum(Matrix.identity(self.gf3, 2), self.S))
        second = LieIso(direct_sum(Matrix.identity(self.gf3, 2), self.S))
        composed = first.then(second)
        self.assertEqual(composed.phi, second.phi @ first.phi)
        self.assertTrue(verify_lie_iso(self.L, self.L, composed))

    def test_model_roundtrip(self):
        model = lie_to_model(self.L)
        self.assertEqual(model.dim, 4)
        self.assertEqual(len(model.structure), 3)
        rebuilt = lie_from_model(model)
        self.assertEqual(rebuilt.structure, self.L.structure)
        tampered = model.model_copy(deep=True)
        tampered.structure[0].vector = ["0", "0", "2", "0"]
        with self.assertRaises(ConstructionError):
            lie_from_model(tampered)

    def test_wild_lie_reduce(self):
        X = Matrix.from_rows(self.gf3, [[1]])
        Y = Matrix.from_rows(self.gf3, [[2]])
        L = wild_lie_reduce(X, Y)
        self.assertEqual(L.dim, 43)
        S = Matrix.from_rows(self.gf3, [[2]])
        iso = lift_lie_witness(X, Y, X, Y, S)
        self.assertTrue(verify_lie_iso(L, L, iso))
        with self.assertRaises(HypothesisError):
            lift_lie_witness(X, Y, Y, X, S)


if __name__ == "__main__":
    main()
