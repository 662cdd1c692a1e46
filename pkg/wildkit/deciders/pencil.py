"""Weak similarity, two-dimensional commuting spaces and their similarity.

A pencil transform ``T = [[α, β], [γ, δ]]`` replaces a pair ``(A, B)`` by
``(αA + βB, γA + δB)``. Two pairs are weakly similar when a pencil transform followed by
a similarity maps one onto the other. A two-dimensional space is presented by an ordered
basis, and changing the basis is exactly a pencil transform, so space similarity is weak
similarity of the bases.
"""

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from loguru import logger

from wildkit.config.models import SearchBudget
from wildkit.deciders.similarity import (
    GF2_WARNING,
    CertificateKind,
    Decision,
    MatrixPair,
    Verdict,
    are_similar,
    check_compatible,
)
from wildkit.exceptions import ConstructionError, InvariantError, ShapeError
from wildkit.linalg.field import FieldSpec, Scalar, field_elements
from wildkit.linalg.matrix import Matrix, det_inv, determinant, rank


@dataclass(frozen=True)
class PencilTransform:
    """A nonsingular 2x2 matrix acting on pairs by rows"""

    matrix: Matrix

    def __post_init__(self):
        if self.matrix.shape != (2, 2):
            raise ConstructionError(
                f"A pencil transform is 2x2, got {self.matrix.shape}."
            )
        if determinant(self.matrix).is_zero():
            raise ConstructionError("A pencil transform must be nonsingular.")

    @classmethod
    def from_entries(cls, field: FieldSpec, alpha, beta, gamma, delta):
        return cls(Matrix.from_rows(field, [[alpha, beta], [gamma, delta]]))

    @classmethod
    def identity(cls, field: FieldSpec):
        return cls(Matrix.identity(field, 2))

    @property
    def field(self) -> FieldSpec:
        return self.matrix.field

    @property
    def coefficients(self) -> Tuple[Scalar, Scalar, Scalar, Scalar]:
        M = self.matrix
        return M[0, 0], M[0, 1], M[1, 0], M[1, 1]

    def then(self, other: "PencilTransform") -> "PencilTransform":
        """Transforming by self and then by other is transforming by other·self"""
        return PencilTransform(other.matrix @ self.matrix)


def pencil_transform(P: MatrixPair, T: PencilTransform) -> MatrixPair:
    if T.field != P.field:
        raise ShapeError(f"Field mismatch: {P.field} and {T.field}.")
    alpha, beta, gamma, delta = T.coefficients
    return MatrixPair(
        P.A.scale(alpha) + P.B.scale(beta), P.A.scale(gamma) + P.B.scale(delta)
    )


def nonsingular_transforms(field: FieldSpec) -> Iterator[PencilTransform]:
    """All nonsingular T over GF(p), lexicographic in (α, β, γ, δ) by field order"""
    elements = field_elements(field)
    for alpha, beta, gamma, delta in itertools.product(elements, repeat=4):
        if (alpha * delta - beta * gamma).is_zero():
            continue
        yield PencilTransform.from_entries(field, alpha, beta, gamma, delta)


def projective_directions(field: FieldSpec) -> List[Tuple[Scalar, Scalar]]:
    """(1, t) for t in field order, then (0, 1)"""
    return [(field.one, t) for t in field_elements(field)] + [(field.zero, field.one)]


def rank_profile(P: MatrixPair) -> Tuple[int, ...]:
    """Sorted ranks of αA + βB over the p + 1 projective directions of GF(p)"""
    return tuple(
        sorted(
            rank(P.A.scale(alpha) + P.B.scale(beta))
            for alpha, beta in projective_directions(P.field)
        )
    )


def verify_weak(
    L: MatrixPair, R: MatrixPair, T: PencilTransform, S: Matrix
) -> bool:
    """True iff S and T are nonsingular and S⁻¹·pencil_transform(L, T)·S = R"""
    if L.field != R.field or S.field != L.field or T.field != L.field:
        return False
    if L.n != R.n or S.shape != (L.n, L.n):
        return False
    if determinant(T.matrix).is_zero():
        return False
    S_inv = det_inv(S).inverse if L.n else S
    if S_inv is None:
        return False
    return pencil_transform(L, T).conjugate(S, S_inv) == R


def are_weakly_similar(
    L: MatrixPair,
    R: MatrixPair,
    budget: Optional[SearchBudget] = None,
    candidates: Optional[Sequence[PencilTransform]] = None,
) -> Decision:
    """Decide weak similarity by trying every nonsingular pencil transform.

    Over GF(p) all (p²-1)(p²-p) transforms are tried in canonical order. Over the
    rationals only a caller-supplied list of transforms can be tried, and failing to
    find a witness among them is inconclusive.
    """
    budget = budget or SearchBudget()
    check_compatible(L, R)
    field = L.field
    warnings = (GF2_WARNING,) if field.is_gf2 else ()
    exhaustive_over_t = candidates is None and field.is_prime
    if candidates is None and not field.is_prime:
        logger.debug("No pencil transforms to try over {field}", field=field)
        return Decision(
            Verdict.inconclusive,
            CertificateKind.probabilistic,
            None,
            {"transforms_tried": 0},
            warnings,
        )
    if exhaustive_over_t and L.n and rank_profile(L) != rank_profile(R):
        logger.debug("Pairs rejected by their projective rank profiles")
        return Decision(
            Verdict.no,
            CertificateKind.deterministic_polynomial,
            None,
            {"transforms_tried": 0},
            warnings,
        )
    transforms: Iterable[PencilTransform] = (
        nonsingular_transforms(field) if candidates is None else candidates
    )
    tried = 0
    inconclusive = False
    weakest = CertificateKind.exhaustive
    for T in transforms:
        tried += 1
        inner = are_similar(pencil_transform(L, T), R, budget)
        if inner.is_yes:
            if not verify_weak(L, R, T, inner.witness):
                raise InvariantError("The weak similarity witness does not verify.")
            logger.debug("Weakly similar after {tried} transforms", tried=tried)
            return Decision(
                Verdict.yes,
                inner.certificate_kind,
                (T, inner.witness),
                {"transforms_tried": tried, **inner.budget_report},
                warnings,
            )
        if inner.verdict == Verdict.inconclusive:
            inconclusive = True
        elif inner.certificate_kind == CertificateKind.deterministic_polynomial:
            weakest = CertificateKind.deterministic_polynomial
    report = {"transforms_tried": tried}
    if inconclusive or not exhaustive_over_t:
        return Decision(
            Verdict.inconclusive, CertificateKind.probabilistic, None, report, warnings
        )
    return Decision(Verdict.no, weakest, None, report, warnings)


@dataclass(frozen=True)
class TwoDimSpace:
    """A two-dimensional space of commuting matrices, given by an ordered basis"""

    basisA: Matrix
    basisB: Matrix

    def __post_init__(self):
        pair = MatrixPair(self.basisA, self.basisB)
        if not pair.commutes():
            raise ConstructionError("The basis matrices do not commute.")
        stacked = Matrix.from_rows(
            self.basisA.field, [self.basisA.vec(), self.basisB.vec()]
        )
        if rank(stacked) < 2:
            raise ConstructionError(
                "The basis matrices are linearly dependent, the space is not two-dimensional."
            )

    @property
    def n(self) -> int:
        return self.basisA.rows

    @property
    def field(self) -> FieldSpec:
        return self.basisA.field

    @property
    def pair(self) -> MatrixPair:
        return MatrixPair(self.basisA, self.basisB)

    def member(self, alpha, beta) -> Matrix:
        return self.basisA.scale(alpha) + self.basisB.scale(beta)


def space_make(A: Matrix, B: Matrix) -> TwoDimSpace:
    return TwoDimSpace(A, B)


def space_conjugate(V: TwoDimSpace, S: Matrix) -> TwoDimSpace:
    """S⁻¹VS with the conjugated basis"""
    pair = V.pair.conjugate(S)
    return TwoDimSpace(pair.A, pair.B)


def contains_nonsingular(V: TwoDimSpace) -> Optional[Tuple[Scalar, Scalar]]:
    """Some (α, β) with αA + βB nonsingular, or None when every member is singular"""
    field = V.field
    if field.is_prime:
        for alpha, beta in projective_directions(field):
            if not determinant(V.member(alpha, beta)).is_zero():
                return alpha, beta
        return None
    if not determinant(V.basisB).is_zero():
        return field.zero, field.one
    # det(A + tB) has degree <= n in t; n + 1 zeros make it vanish identically
    for t in range(V.n + 1):
        if not determinant(V.member(1, t)).is_zero():
            return field.one, field.scalar(t)
    return None


def spaces_similar(
    V: TwoDimSpace, W: TwoDimSpace, budget: Optional[SearchBudget] = None
) -> Decision:
    """Decide S⁻¹VS = W. A witness (T, S) maps the basis of V onto the basis of W."""
    return are_weakly_similar(V.pair, W.pair, budget)
