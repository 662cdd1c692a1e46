import itertools
from fractions import Fraction
from unittest import main

import numpy as np

from wildkit.deciders.pencil import (
    PencilTransform,
    TwoDimSpace,
    are_weakly_similar,
    contains_nonsingular,
    nonsingular_transforms,
    pencil_transform,
    projective_directions,
    rank_profile,
    space_conjugate,
    space_make,
    spaces_similar,
    verify_weak,
)
from wildkit.deciders.similarity import (
    GF2_WARNING,
    CertificateKind,
    MatrixPair,
    Verdict,
)
from wildkit.exceptions import ConstructionError, ShapeError
from wildkit.generator import random_pair
from wildkit.linalg.field import GF, QQ
from wildkit.linalg.matrix import Matrix, is_nonsingular
from wildkit.tests.base_test_case import BasicTestCase


class PencilTest(BasicTestCase):
    def setUp(self):
        super().setUp()
        self.gf2 = GF(2)
        self.gf3 = GF(3)

    def scalars(self, field, a, b):
        return MatrixPair(Matrix.from_rows(field, [[a]]), Matrix.from_rows(field, [[b]]))

    def test_transform_must_be_nonsingular(self):
        with self.assertRaises(ConstructionError):
            PencilTransform.from_entries(self.gf3, 1, 2, 2, 1)
        with self.assertRaises(ConstructionError):
            PencilTransform(Matrix.identity(self.gf3, 3))

    def test_pencil_transform_acts_by_rows(self):
        A, B = Matrix.identity(self.gf3, 2), Matrix.unit(self.gf3, 2, 0, 1)
        T = PencilTransform.from_entries(self.gf3, 1, 1, 0, 2)
        result = pencil_transform(MatrixPair(A, B), T)
        self.assertMatrixEqual(result.A, [[1, 1], [0, 1]])
        self.assertMatrixEqual(result.B, [[0, 2], [0, 0]])
        with self.assertRaises(ShapeError):
            pencil_transform(MatrixPair(A, B), PencilTransform.identity(self.gf2))

    def test_composition(self):
        pair = MatrixPair(Matrix.identity(self.gf3, 2), Matrix.unit(self.gf3, 2, 0, 1))
        first = PencilTransform.from_entries(self.gf3, 1, 1, 0, 1)
        second = PencilTransform.from_entries(self.gf3, 0, 1, 1, 0)
        self.assertEqual(
            pencil_transform(pencil_transform(pair, first), second),
            pencil_transform(pair, first.then(second)),
        )

    def test_enumeration(self):
        self.assertEqual(len(list(nonsingular_transforms(self.gf2))), 6)
        transforms = list(nonsingular_transforms(self.gf3))
        self.assertEqual(len(transforms), 48)
        self.assertMatrixEqual(transforms[0].matrix, [[0, 1], [1, 0]])
        self.assertMatrixEqual(transforms[1].matrix, [[0, 1], [1, 1]])
        directions = projective_directions(self.gf3)
        self.assertEqual(
            [(a.value, b.value) for a, b in directions], [(1, 0), (1, 1), (1, 2), (0, 1)]
        )

    def test_rank_profile(self):
        self.assertEqual(rank_profile(self.scalars(self.gf3, 1, 1)), (0, 1, 1, 1))
        self.assertEqual(rank_profile(self.scalars(self.gf3, 1, 2)), (0, 1, 1, 1))
        self.assertEqual(rank_profile(self.scalars(self.gf3, 0, 0)), (0, 0, 0, 0))

    def test_weakly_similar_scalars(self):
        """The first transform in canonical order that works is [[0, 1], [1, 1]]"""
        L, R = self.scalars(self.gf3, 1, 1), self.scalars(self.gf3, 1, 2)
        decision = are_weakly_similar(L, R)
        self.assertEqual(decision.verdict, Verdict.yes)
        self.assertEqual(decision.certificate_kind, CertificateKind.exhaustive)
        T, S = decision.witness
        self.assertMatrixEqual(T.matrix, [[0, 1], [1, 1]])
        self.assertMatrixEqual(S, [[1]])
        self.assertEqual(decision.budget_report["transforms_tried"], 2)
        self.assertTrue(verify_weak(L, R, T, S))
        self.assertEqual(decision.warnings, ())

    def test_profile_reject(self):
        decision = are_weakly_similar(
            self.scalars(self.gf3, 1, 0), self.scalars(self.gf3, 0, 0)
        )
        self.assertEqual(decision.verdict, Verdict.no)
        self.assertEqual(
            decision.certificate_kind, CertificateKind.deterministic_polynomial
        )
        self.assertEqual(decision.budget_report["transforms_tried"], 0)

    def test_gf2_warning(self):
        L = MatrixPair(Matrix.unit(self.gf2, 2, 0, 0), Matrix.unit(self.gf2, 2, 1, 1))
        R = MatrixPair(Matrix.unit(self.gf2, 2, 1, 1), Matrix.unit(self.gf2, 2, 0, 0))
        decision = are_weakly_similar(L, R)
        self.assertEqual(decision.verdict, Verdict.yes)
        self.assertIn(GF2_WARNING, decision.warnings)
        self.assertTrue(verify_weak(L, R, *decision.witness))

    def test_rationals_need_candidates(self):
        L = self.scalars(QQ, Fraction(1, 2), 3)
        R = self.scalars(QQ, 3, Fraction(1, 2))
        decision = are_weakly_similar(L, R)
        self.assertEqual(decision.verdict, Verdict.inconclusive)
        self.assertEqual(decision.budget_report["transforms_tried"], 0)
        swap = PencilTransform.from_entries(QQ, 0, 1, 1, 0)
        decision = are_weakly_similar(L, R, candidates=[PencilTransform.identity(QQ), swap])
        self.assertEqual(decision.verdict, Verdict.yes)
        self.assertEqual(decision.witness[0], swap)
        self.assertEqual(decision.budget_report["transforms_tried"], 2)
        # failing on a finite list proves nothing over an infinite field
        decision = are_weakly_similar(L, R, candidates=[PencilTransform.identity(QQ)])
        self.assertEqual(decision.verdict, Verdict.inconclusive)

    def test_verify_weak(self):
        L, R = self.scalars(self.gf3, 1, 1), self.scalars(self.gf3, 1, 2)
        T = PencilTransform.from_entries(self.gf3, 0, 1, 1, 1)
        self.assertTrue(verify_weak(L, R, T, Matrix.from_rows(self.gf3, [[2]])))
        self.assertFalse(verify_weak(L, R, T, Matrix.zeros(self.gf3, 1)))
        self.assertFalse(
            verify_weak(
                L, R, PencilTransform.identity(self.gf3), Matrix.identity(self.gf3, 1)
            )
        )

    def test_space_needs_two_commuting_independent_matrices(self):
        identity = Matrix.identity(self.gf3, 2)
        with self.assertRaises(ConstructionError):
            TwoDimSpace(identity, identity.scale(2))
        with self.assertRaises(ConstructionError):
            TwoDimSpace(Matrix.unit(self.gf3, 2, 0, 1), Matrix.unit(self.gf3, 2, 1, 0))
        space = space_make(identity, Matrix.unit(self.gf3, 2, 0, 1))
        self.assertEqual(space.n, 2)
        self.assertMatrixEqual(space.member(1, 2), [[1, 2], [0, 1]])

    def test_contains_nonsingular(self):
        all_singular = TwoDimSpace(
            Matrix.unit(self.gf3, 3, 0, 2), Matrix.unit(self.gf3, 3, 1, 2)
        )
        self.assertIsNone(contains_nonsingular(all_singular))
        space = TwoDimSpace(Matrix.identity(self.gf3, 2), Matrix.unit(self.gf3, 2, 0, 1))
        alpha, beta = contains_nonsingular(space)
        self.assertEqual((alpha.value, beta.value), (1, 0))
        rational = TwoDimSpace(Matrix.identity(QQ, 2), Matrix.unit(QQ, 2, 0, 1))
        alpha, beta = contains_nonsingular(rational)
        self.assertEqual((alpha.value, beta.value), (1, 0))
        self.assertIsNone(
            contains_nonsingular(
                TwoDimSpace(Matrix.unit(QQ, 3, 0, 2), Matrix.unit(QQ, 3, 1, 2))
            )
        )

    def test_spaces_similar(self):
        V = TwoDimSpace(Matrix.identity(self.gf3, 2), Matrix.unit(self.gf3, 2, 0, 1))
        S = Matrix.from_rows(self.gf3, [[1, 1], [0, 1]])
        W = space_conjugate(V, S)
        self.assertEqual(W.pair, V.pair)
        decision = spaces_similar(V, W)
        self.assertEqual(decision.verdict, Verdict.yes)
        T, witness = decision.witness
        self.assertEqual(T, PencilTransform.identity(self.gf3))
        self.assertTrue(verify_weak(V.pair, W.pair, T, witness))

    def test_spaces_not_similar(self):
        """span(I, E12) contains a nonsingular matrix, span(E13, E23) does not"""
        V = TwoDimSpace(Matrix.identity(self.gf3, 3), Matrix.unit(self.gf3, 3, 0, 1))
        W = TwoDimSpace(Matrix.unit(self.gf3, 3, 0, 2), Matrix.unit(self.gf3, 3, 1, 2))
        decision = spaces_similar(V, W)
        self.assertEqual(decision.verdict, Verdict.no)
        self.assertEqual(
            decision.certificate_kind, CertificateKind.deterministic_polynomial
        )

    def test_spaces_with_equal_profiles(self):
        """Equal rank profiles, but the images of V span a plane and those of W a line"""
        V = TwoDimSpace(Matrix.unit(self.gf3, 3, 0, 2), Matrix.unit(self.gf3, 3, 1, 2))
        W = TwoDimSpace(Matrix.unit(self.gf3, 3, 0, 1), Matrix.unit(self.gf3, 3, 0, 2))
        self.assertEqual(rank_profile(V.pair), rank_profile(W.pair))
        decision = spaces_similar(V, W)
        self.assertEqual(decision.verdict, Verdict.no)
        self.assertEqual(decision.certificate_kind, CertificateKind.exhaustive)
        self.assertEqual(decision.budget_report["transforms_tried"], 48)

    def invertible_matrices(self, field, n=2):
        for entries in itertools.product(range(field.p), repeat=n * n):
            S = Matrix.from_rows(field, np.reshape(entries, (n, n)).tolist())
            if is_nonsingular(S):
                yield S

    def test_pencil_transform_is_a_group_action(self):
        rng = np.random.default_rng(17)
        pair = random_pair(rng, self.gf3, 3)
        self.assertEqual(
            pencil_transform(pair, PencilTransform.identity(self.gf3)), pair
        )
        transforms = list(nonsingular_transforms(self.gf3))[::6]
        for first in transforms:
            for second in transforms:
                self.assertEqual(
                    pencil_transform(pencil_transform(pair, first), second),
                    pencil_transform(pair, first.then(second)),
                )

    def test_weak_similarity_ignores_pre_composition(self):
        identity = Matrix.identity(self.gf3, 2)
        L = MatrixPair(identity, Matrix.unit(self.gf3, 2, 0, 1))
        similar = MatrixPair(identity, Matrix.unit(self.gf3, 2, 1, 0))
        different = MatrixPair(identity, Matrix.unit(self.gf3, 2, 1, 1))
        self.assertEqual(are_weakly_similar(L, similar).verdict, Verdict.yes)
        self.assertEqual(are_weakly_similar(L, different).verdict, Verdict.no)
        for T in list(nonsingular_transforms(self.gf3))[::8]:
            moved = pencil_transform(L, T)
            decision = are_weakly_similar(moved, similar)
            self.assertEqual(decision.verdict, Verdict.yes)
            self.assertTrue(verify_weak(moved, similar, *decision.witness))
            self.assertEqual(are_weakly_similar(moved, different).verdict, Verdict.no)

    def test_every_conjugate_space_is_similar(self):
        V = TwoDimSpace(Matrix.identity(self.gf3, 2), Matrix.unit(self.gf3, 2, 0, 1))
        conjugators = list(self.invertible_matrices(self.gf3))
        self.assertEqual(len(conjugators), 48)
        for S in conjugators:
            W = space_conjugate(V, S)
            decision = spaces_similar(V, W)
            self.assertEqual(decision.verdict, Verdict.yes)
            self.assertTrue(verify_weak(V.pair, W.pair, *decision.witness))

    def test_spaces_similar_matches_full_enumeration(self):
        """Every T and every S over GF(3) are tried for 2x2 spaces"""
        field = self.gf3
        identity = Matrix.identity(field, 2)
        spaces = [
            TwoDimSpace(identity, Matrix.unit(field, 2, 0, 1)),
            TwoDimSpace(identity, Matrix.unit(field, 2, 1, 0)),
            TwoDimSpace(Matrix.unit(field, 2, 0, 1), identity.scale(2)),
            TwoDimSpace(identity, Matrix.unit(field, 2, 1, 1)),
            TwoDimSpace(Matrix.unit(field, 2, 0, 0), Matrix.unit(field, 2, 1, 1)),
            TwoDimSpace(identity, Matrix.from_rows(field, [[0, 1], [2, 0]])),
        ]
        transforms = list(nonsingular_transforms(field))
        conjugators = list(self.invertible_matrices(field))

        def enumerated(V, W):
            for T in transforms:
                moved = pencil_transform(V.pair, T)
                for S in conjugators:
                    if moved.A @ S == S @ W.basisA and moved.B @ S == S @ W.basisB:
                        return Verdict.yes
            return Verdict.no

        verdicts = []
        for i, V in enumerate(spaces):
            for W in spaces[i:]:
                expected = enumerated(V, W)
                verdicts.append(expected)
                self.assertEqual(spaces_similar(V, W).verdict, expected)
                self.assertEqual(spaces_similar(W, V).verdict, expected)
        self.assertIn(Verdict.yes, verdicts)
        self.assertIn(Verdict.no, verdicts)


if __name__ == "__main__":
    main()
