"""Wildness reductions.

* ``gp_reduce`` embeds an arbitrary pair ``(X, Y)`` of n×n matrices into the pair of
  commuting nilpotent 5n×5n matrices ``(J, K_XY)``; similarity of the small pairs is
  equivalent to similarity of the big ones.
* ``build_M_pair`` embeds a pair ``(A, B)`` of m×m matrices into ``(M₁(A), M₂(B))`` of size
  7m+6; similarity of the small pairs is equivalent to weak similarity of the big ones.
* ``full_reduce`` chains both through the shift ``(λI + J, K_XY)`` and lands in pairs of
  commuting matrices whose sum is nonsingular when the field has at least 3 elements.

The ``lift_*`` functions carry a similarity witness of the input pairs to a witness for
the outputs.
"""

from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Union

from loguru import logger

from wildkit.deciders.pencil import TwoDimSpace
from wildkit.deciders.similarity import GF2_WARNING, MatrixPair
from wildkit.exceptions import ConstructionError, InvariantError, ShapeError
from wildkit.linalg.field import FieldSpec, Scalar, field_elements
from wildkit.linalg.matrix import (
    BlockGrid,
    Matrix,
    block_assemble,
    det_inv,
    direct_sum,
    nilpotency_index,
    rank,
)


@dataclass(frozen=True)
class GPPair:
    """(J, K_XY) together with the (X, Y) it was built from"""

    n: int
    pair: MatrixPair
    X: Matrix
    Y: Matrix


@dataclass(frozen=True)
class WeakPair:
    """(M₁(A), M₂(B)) together with λ and the (A, B) it was built from"""

    m: int
    lambda_value: Scalar
    pair: MatrixPair
    A: Matrix
    B: Matrix
    source: Optional[GPPair] = None
    warnings: Tuple[str, ...] = ()

    @property
    def size(self) -> int:
        return self.pair.n


def default_lambda(field: FieldSpec) -> Scalar:
    """The first field element that is neither 0 nor -1; 1 over GF(2) and over QQ"""
    if not field.is_prime or field.is_gf2:
        return field.one
    for candidate in field_elements(field):
        if not candidate.is_zero() and not (candidate + 1).is_zero():
            return candidate
    raise InvariantError(f"No admissible λ in {field}.")  # unreachable for p >= 3


def check_lambda(field: FieldSpec, lambda_value: Scalar) -> Scalar:
    if lambda_value.field != field:
        raise ConstructionError(f"λ = {lambda_value} is not an element of {field}.")
    if field.is_gf2:
        if lambda_value != field.one:
            raise ConstructionError("Over GF(2), λ must be 1.")
        return lambda_value
    if lambda_value.is_zero() or (lambda_value + 1).is_zero():
        raise ConstructionError(
            f"λ must satisfy λ≠0, λ≠−1, got λ = {lambda_value} in {field}."
        )
    return lambda_value


def _check_square_pair(X: Matrix, Y: Matrix) -> int:
    if X.field != Y.field:
        raise ShapeError(f"Field mismatch: {X.field} and {Y.field}.")
    if not (X.is_square and Y.is_square) or X.shape != Y.shape:
        raise ShapeError(
            f"Expected two square matrices of one size, got {X.shape} and {Y.shape}."
        )
    return X.rows


def build_J(n: int, field: FieldSpec) -> Matrix:
    """5n×5n, identity blocks at block positions (1,2), (2,3), (3,4)"""
    if n < 1:
        raise ConstructionError(f"The block size n must be at least 1, got {n}.")
    identity = Matrix.identity(field, n)
    return block_assemble(
        BlockGrid.uniform(
            field, 5, n, {(0, 1): identity, (1, 2): identity, (2, 3): identity}
        )
    )


def build_K(X: Matrix, Y: Matrix) -> Matrix:
    """5n×5n, blocks (1,3) = X, (1,5) = Y, (2,4) = X, (5,4) = I"""
    n = _check_square_pair(X, Y)
    if n < 1:
        raise ConstructionError("X and Y must be at least 1x1.")
    return block_assemble(
        BlockGrid.uniform(
            X.field,
            5,
            n,
            {(0, 2): X, (0, 4): Y, (1, 3): X, (4, 3): Matrix.identity(X.field, n)},
        )
    )


def gp_reduce(X: Matrix, Y: Matrix) -> GPPair:
    n = _check_square_pair(X, Y)
    J = build_J(n, X.field)
    K = build_K(X, Y)
    pair = MatrixPair(J, K)
    if not pair.commutes():
        raise InvariantError("J and K_XY do not commute.")
    if not J.power(4).is_zero() or not K.power(3).is_zero():
        raise InvariantError("J^4 or K_XY^3 is not zero.")
    logger.debug("Built the commuting nilpotent pair of size {size}", size=5 * n)
    return GPPair(n, pair, X, Y)


def lift_gp_witness(S: Matrix) -> Matrix:
    """S ⊕ S ⊕ S ⊕ S ⊕ S"""
    if not S.is_square:
        raise ShapeError(f"A witness must be square, got {S.shape}.")
    return direct_sum(*([S] * 5))


def build_M_pair(A: Matrix, B: Matrix, lambda_value: Scalar) -> WeakPair:
    """M₁(A) = I ⊕ 0 ⊕ I ⊕ A and M₂(B) = 0 ⊕ I ⊕ λI ⊕ B with blocks 2m+2, 3m+3, m+1, m"""
    m = _check_square_pair(A, B)
    if m < 1:
        raise ConstructionError("A and B must be at least 1x1.")
    field = A.field
    lambda_value = check_lambda(field, lambda_value)
    warnings: Tuple[str, ...] = ()
    if field.is_gf2:
        logger.info(
            "Over GF(2) the pair is defined but the nonsingularity and wildness claims do not apply"
        )
        warnings = (GF2_WARNING,)
    M1 = direct_sum(
        Matrix.identity(field, 2 * m + 2),
        Matrix.zeros(field, 3 * m + 3),
        Matrix.identity(field, m + 1),
        A,
    )
    M2 = direct_sum(
        Matrix.zeros(field, 2 * m + 2),
        Matrix.identity(field, 3 * m + 3),
        Matrix.scalar_matrix(field, m + 1, lambda_value),
        B,
    )
    return WeakPair(m, lambda_value, MatrixPair(M1, M2), A, B, warnings=warnings)


def lift_weak_witness(S: Matrix) -> Matrix:
    """I_{6m+6} ⊕ S"""
    if not S.is_square:
        raise ShapeError(f"A witness must be square, got {S.shape}.")
    return direct_sum(Matrix.identity(S.field, 6 * S.rows + 6), S)


def shift_pair(gp: GPPair, lambda_value: Scalar) -> MatrixPair:
    """(λI + J, K_XY)"""
    J, K = gp.pair
    return MatrixPair(Matrix.scalar_matrix(J.field, J.rows, lambda_value) + J, K)


def full_reduce(
    X: Matrix, Y: Matrix, lambda_value: Optional[Scalar] = None
) -> WeakPair:
    """(M₁(λI + J), M₂(K_XY)), a commuting pair of size 35n + 6"""
    gp = gp_reduce(X, Y)
    field = X.field
    if lambda_value is None:
        lambda_value = default_lambda(field)
    shifted = shift_pair(gp, lambda_value)
    result = build_M_pair(shifted.A, shifted.B, lambda_value)
    result = WeakPair(
        result.m,
        result.lambda_value,
        result.pair,
        result.A,
        result.B,
        source=gp,
        warnings=result.warnings,
    )
    if not result.pair.commutes():
        raise InvariantError("The fully reduced pair does not commute.")
    if not field.is_gf2 and not nonsingular_sum(result):
        raise InvariantError("M₁(λI+J) + M₂(K_XY) is singular.")
    return result


def nonsingular_sum(wp: WeakPair) -> bool:
    return det_inv(wp.pair.A + wp.pair.B).inverse is not None


def lift_full_witness(S: Matrix) -> Matrix:
    """I_{6m+6} ⊕ S⊕S⊕S⊕S⊕S with m = 5n"""
    return lift_weak_witness(lift_gp_witness(S))


def full_reduce_space(
    X: Matrix, Y: Matrix, lambda_value: Optional[Scalar] = None
) -> TwoDimSpace:
    """The commuting space spanned by the full_reduce pair"""
    reduced = full_reduce(X, Y, lambda_value)
    return TwoDimSpace(reduced.pair.A, reduced.pair.B)


def rank_bounds(
    wp: WeakPair,
    alpha: Union[Scalar, int],
    beta: Union[Scalar, int],
    gamma: Union[Scalar, int],
    delta: Union[Scalar, int],
) -> Dict[str, int]:
    """The rank quantities compared against 4m+3 and 5m+4 in the weak-similarity argument"""
    M1, M2 = wp.pair
    m = wp.m
    return {
        "rank_M1": rank(M1),
        "rank_M2": rank(M2),
        "rank_first": rank(M1.scale(alpha) + M2.scale(beta)),
        "rank_second": rank(M1.scale(gamma) + M2.scale(delta)),
        "bound_M1": 4 * m + 3,
        "bound_M2": 5 * m + 4,
    }


def gp_invariants(gp: GPPair) -> Dict[str, Union[bool, int, None]]:
    J, K = gp.pair
    n = gp.n
    product = J @ K
    return {
        "commute": gp.pair.commutes(),
        "nilpotency_J": nilpotency_index(J),
        "nilpotency_K": nilpotency_index(K),
        "JK_block_is_X": product.block(0, n, 3 * n, 4 * n) == gp.X,
        "rank_J": rank(J),
    }


def weak_invariants(wp: WeakPair) -> Dict[str, Union[bool, int, None]]:
    M1, M2 = wp.pair
    m = wp.m
    invariants: Dict[str, Union[bool, int, None]] = {
        "commute": wp.pair.commutes(),
        "rank_M1": rank(M1),
        "rank_M2": rank(M2),
        "rank_M1_within_bound": rank(M1) <= 4 * m + 3,
        "rank_M2_within_bound": rank(M2) <= 5 * m + 4,
    }
    # over GF(2) the λI + I block of M₁ + M₂ vanishes
    if wp.source is not None and not M1.field.is_gf2:
        invariants["nonsingular_sum"] = nonsingular_sum(wp)
    return invariants
