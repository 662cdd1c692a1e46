"""Simultaneous similarity of matrix pairs.

Two pairs ``L`` and ``R`` are similar when ``S⁻¹·L·S = R`` for one invertible ``S``,
i.e. when the intertwiner space ``{S : L·S = S·R}`` contains an invertible element.
The space is a kernel, so the work splits into linear algebra (exact, cheap) and a search
of the span for an invertible element (the expensive part, bounded by a SearchBudget).
"""

import random
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from wildkit.config.models import SearchBudget
from wildkit.exceptions import InvariantError, ShapeError
from wildkit.linalg.field import FieldSpec
from wildkit.linalg.matrix import (
    Matrix,
    det_inv,
    det_raw,
    kernel_raw,
    nonsingular_mask,
    rank,
    rref_raw,
)

GF2_WARNING = "gf2-unsupported-claims"

# candidates pushed through one batched elimination
CANDIDATE_CHUNK_ENTRIES = 2**20


@dataclass(frozen=True)
class MatrixPair:
    """An ordered pair of same-size square matrices over one field"""

    A: Matrix
    B: Matrix

    def __post_init__(self):
        if self.A.field != self.B.field:
            raise ShapeError(f"Field mismatch: {self.A.field} and {self.B.field}.")
        if not (self.A.is_square and self.B.is_square) or self.A.shape != self.B.shape:
            raise ShapeError(
                f"A pair needs two square matrices of the same size, got {self.A.shape} and {self.B.shape}."
            )

    @property
    def n(self) -> int:
        return self.A.rows

    @property
    def field(self) -> FieldSpec:
        return self.A.field

    def __iter__(self):
        return iter((self.A, self.B))

    def conjugate(self, S: Matrix, S_inv: Optional[Matrix] = None) -> "MatrixPair":
        """S⁻¹·(A, B)·S"""
        if S_inv is None:
            S_inv = det_inv(S).inverse
            if S_inv is None:
                raise ShapeError("Cannot conjugate by a singular matrix.")
        return MatrixPair(S_inv @ self.A @ S, S_inv @ self.B @ S)

    def commutes(self) -> bool:
        return self.A @ self.B == self.B @ self.A


class Verdict(str, Enum):
    yes = "yes"
    no = "no"
    inconclusive = "inconclusive"


class CertificateKind(str, Enum):
    exhaustive = "exhaustive"
    deterministic_polynomial = "deterministic-polynomial"
    probabilistic = "probabilistic"


@dataclass(frozen=True)
class Decision:
    """A three-valued verdict with its witness and how it was reached"""

    verdict: Verdict
    certificate_kind: CertificateKind
    witness: Any = None
    budget_report: Dict[str, int] = field(default_factory=dict)
    warnings: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.verdict == Verdict.yes and self.witness is None:
            raise InvariantError("A 'yes' decision needs a witness.")
        if (
            self.verdict == Verdict.no
            and self.certificate_kind == CertificateKind.probabilistic
        ):
            raise InvariantError("A 'no' decision cannot rest on sampling.")

    @property
    def is_yes(self) -> bool:
        return self.verdict == Verdict.yes

    def with_warnings(self, *warnings: str) -> "Decision":
        merged = tuple(dict.fromkeys(self.warnings + warnings))
        return Decision(
            self.verdict,
            self.certificate_kind,
            self.witness,
            self.budget_report,
            merged,
        )


def check_compatible(L: MatrixPair, R: MatrixPair):
    if L.field != R.field:
        raise ShapeError(f"Field mismatch: {L.field} and {R.field}.")
    if L.n != R.n:
        raise ShapeError(f"Size mismatch: {L.n} and {R.n}.")


def _kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # kept explicit so that object arrays of Fractions work the same way as int64
    rows_a, cols_a = a.shape
    rows_b, cols_b = b.shape
    product = a[:, None, :, None] * b[None, :, None, :]
    return product.reshape(rows_a * rows_b, cols_a * cols_b)


def _intertwiner_system(L: MatrixPair, R: MatrixPair) -> np.ndarray:
    """The 2n²×n² system whose kernel is {S : L·S = S·R}, with S vectorised row-major"""
    field = L.field
    identity = Matrix.identity(field, L.n).data
    blocks = [
        _kron(left.data, identity) - _kron(identity, right.data.T)
        for left, right in ((L.A, R.A), (L.B, R.B))
    ]
    return field.reduce(np.concatenate(blocks, axis=0))


def intertwiner_basis(L: MatrixPair, R: MatrixPair) -> List[Matrix]:
    check_compatible(L, R)
    n = L.n
    if n == 0:
        return []
    vectors = kernel_raw(L.field, _intertwiner_system(L, R))
    logger.debug(
        "Intertwiner space of two {n}x{n} pairs has dimension {d}", n=n, d=len(vectors)
    )
    return [Matrix(L.field, v.reshape(n, n)) for v in vectors]


def hom_dimension(L: MatrixPair, R: MatrixPair) -> int:
    check_compatible(L, R)
    if L.n == 0:
        return 0
    system = _intertwiner_system(L, R)
    return system.shape[1] - len(rref_raw(L.field, system)[1])


@lru_cache(maxsize=1024)
def endomorphism_dimension(L: MatrixPair) -> int:
    return hom_dimension(L, L)


def _digits(indices: np.ndarray, base: int, length: int) -> np.ndarray:
    """Base-`base` digits of each index, most significant first (last varies fastest)"""
    powers = base ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (indices[:, None] // powers[None, :]) % base


def _random_coefficients(
    rng: np.random.Generator, high: int, count: int, d: int
) -> np.ndarray:
    if high < 2**62:
        return rng.integers(0, high, size=(count, d), dtype=np.int64)
    seeded = random.Random(int(rng.integers(0, 2**62)))
    return np.array(
        [[seeded.randrange(high) for _ in range(d)] for _ in range(count)],
        dtype=object,
    )


def _combine(field: FieldSpec, coefficients: np.ndarray, stack: np.ndarray, n: int):
    combined = field.reduce(coefficients.astype(stack.dtype) @ stack)
    return combined.reshape(-1, n, n)


def exhaustive_feasible(field: FieldSpec, d: int, n: int, budget: SearchBudget) -> bool:
    if field.is_prime:
        return field.p**d <= budget.exhaustive_limit  # type: ignore
    return d == 1 or (n + 1) ** d <= budget.grid_limit


def _report(tried: int, d: int) -> Dict[str, int]:
    return {"candidates_tried": tried, "search_dimension": d}


def _full_search_kind(field: FieldSpec) -> CertificateKind:
    """The certificate a complete search of the span carries over field"""
    if field.is_prime:
        return CertificateKind.exhaustive
    return CertificateKind.deterministic_polynomial


def _search_prime(basis: Sequence[Matrix], budget: SearchBudget) -> Decision:
    field = basis[0].field
    p = field.p
    n = basis[0].rows
    d = len(basis)
    stack = np.stack([B.data.reshape(-1) for B in basis])
    if p**d <= budget.exhaustive_limit:  # type: ignore
        total = p**d  # type: ignore
        chunk = max(1, CANDIDATE_CHUNK_ENTRIES // max(1, n * n))
        for start in range(0, total, chunk):
            indices = np.arange(start, min(total, start + chunk), dtype=np.int64)
            candidates = _combine(field, _digits(indices, p, d), stack, n)  # type: ignore
            mask = nonsingular_mask(field, candidates)
            if mask.any():
                first = int(np.argmax(mask))
                return Decision(
                    Verdict.yes,
                    CertificateKind.exhaustive,
                    Matrix(field, candidates[first]),
                    _report(start + first + 1, d),
                )
        return Decision(Verdict.no, CertificateKind.exhaustive, None, _report(total, d))
    rng = np.random.default_rng(budget.seed)
    coefficients = _random_coefficients(rng, p, budget.samples, d)  # type: ignore
    candidates = _combine(field, coefficients, stack, n)
    mask = nonsingular_mask(field, candidates)
    if mask.any():
        first = int(np.argmax(mask))
        return Decision(
            Verdict.yes,
            CertificateKind.probabilistic,
            Matrix(field, candidates[first]),
            _report(first + 1, d),
        )
    return Decision(
        Verdict.inconclusive,
        CertificateKind.probabilistic,
        None,
        _report(budget.samples, d),
    )


def _search_rational(basis: Sequence[Matrix], budget: SearchBudget) -> Decision:
    field = basis[0].field
    n = basis[0].rows
    d = len(basis)
    stack = np.stack([B.data.reshape(-1) for B in basis])
    if d == 1 or (n + 1) ** d <= budget.grid_limit:
        # a nonzero polynomial of degree <= n in each variable cannot vanish on {0..n}^d
        total = (n + 1) ** d
        for index in range(total):
            point = _digits(np.array([index], dtype=np.int64), n + 1, d)
            candidate = _combine(field, point, stack, n)[0]
            if det_raw(field, candidate) != 0:
                return Decision(
                    Verdict.yes,
                    CertificateKind.deterministic_polynomial,
                    Matrix(field, candidate),
                    _report(index + 1, d),
                )
        return Decision(
            Verdict.no,
            CertificateKind.deterministic_polynomial,
            None,
            _report(total, d),
        )
    rng = np.random.default_rng(budget.seed)
    points = _random_coefficients(rng, 2 * n * n + 1, budget.samples, d)
    for tried, point in enumerate(points, start=1):
        candidate = _combine(field, point[None, :], stack, n)[0]
        if det_raw(field, candidate) != 0:
            return Decision(
                Verdict.yes,
                CertificateKind.probabilistic,
                Matrix(field, candidate),
                _report(tried, d),
            )
    return Decision(
        Verdict.inconclusive,
        CertificateKind.probabilistic,
        None,
        _report(budget.samples, d),
    )


def invertible_in_span(
    basis: Sequence[Matrix], budget: Optional[SearchBudget] = None
) -> Decision:
    """Search the span of basis for an invertible matrix.

    Over GF(p) the span is enumerated in canonical coefficient order when it has at
    most ``budget.exhaustive_limit`` elements, otherwise ``budget.samples`` random
    elements are tried. Over the rationals the determinant is evaluated on a grid that
    certifies its vanishing, or sampled when the grid is too large.
    """
    budget = budget or SearchBudget()
    if not basis:
        return Decision(Verdict.no, CertificateKind.exhaustive, None, _report(0, 0))
    shape = basis[0].shape
    if shape[0] != shape[1] or any(B.shape != shape for B in basis):
        raise ShapeError("The basis must consist of square matrices of one shape.")
    if any(B.field != basis[0].field for B in basis):
        raise ShapeError("The basis must live over a single field.")
    if basis[0].field.is_prime:
        decision = _search_prime(basis, budget)
    else:
        decision = _search_rational(basis, budget)
    logger.debug(
        "Span search over dimension {d}: {verdict} ({kind})",
        d=len(basis),
        verdict=decision.verdict.value,
        kind=decision.certificate_kind.value,
    )
    return decision


def verify_similarity(L: MatrixPair, R: MatrixPair, S: Matrix) -> bool:
    """True iff S is invertible and L·S = S·R componentwise"""
    if L.field != R.field or S.field != L.field:
        return False
    if L.n != R.n or S.shape != (L.n, L.n):
        return False
    if L.n and det_inv(S).inverse is None:
        return False
    return L.A @ S == S @ R.A and L.B @ S == S @ R.B


def are_similar(
    L: MatrixPair, R: MatrixPair, budget: Optional[SearchBudget] = None
) -> Decision:
    """Decide whether S⁻¹·L·S = R for some invertible S.

    A 'yes' always carries a verified witness. When the intertwiner space is small enough
    to enumerate, the verdict carries the certificate of that regime; a rank mismatch
    there settles the search without visiting candidates. Larger spaces are tested with
    ranks and then with the dimension criterion
    dim End(L) = dim Hom(L, R) = dim End(R), which holds exactly for similar pairs.
    """
    budget = budget or SearchBudget()
    check_compatible(L, R)
    field = L.field
    n = L.n
    if n == 0:
        return Decision(
            Verdict.yes, CertificateKind.exhaustive, Matrix.zeros(field, 0), _report(0, 0)
        )
    basis = intertwiner_basis(L, R)
    d = len(basis)
    if not basis:
        return Decision(Verdict.no, CertificateKind.exhaustive, None, _report(0, 0))
    ranks_differ = rank(L.A) != rank(R.A) or rank(L.B) != rank(R.B)
    if exhaustive_feasible(field, d, n, budget):
        if ranks_differ:
            logger.debug("Pairs rejected by rank at dimension {d}", d=d)
            return Decision(Verdict.no, _full_search_kind(field), None, _report(0, d))
        decision = invertible_in_span(basis, budget)
    elif ranks_differ:
        logger.debug("Pairs rejected by rank at dimension {d}", d=d)
        return Decision(
            Verdict.no, CertificateKind.deterministic_polynomial, None, _report(0, d)
        )
    elif not (endomorphism_dimension(L) == d == endomorphism_dimension(R)):
        logger.debug("Pairs rejected by the dimension criterion at dimension {d}", d=d)
        return Decision(
            Verdict.no, CertificateKind.deterministic_polynomial, None, _report(0, d)
        )
    elif L == R:
        decision = Decision(
            Verdict.yes,
            CertificateKind.deterministic_polynomial,
            Matrix.identity(field, n),
            _report(1, d),
        )
    else:
        decision = invertible_in_span(basis, budget)
    if decision.is_yes and not verify_similarity(L, R, decision.witness):
        raise InvariantError("The similarity witness found does not verify.")
    return decision
