"""Seeded random instances.

Every stream is drawn from ``numpy.random.default_rng(seed)`` (PCG64), so the same
RandomSpec produces the same instances on every platform.
"""

from fractions import Fraction
from typing import List, Union

import numpy as np
from loguru import logger

from wildkit.config.models import RandomMode, RandomSpec
from wildkit.deciders.pencil import TwoDimSpace, contains_nonsingular
from wildkit.deciders.similarity import MatrixPair
from wildkit.exceptions import ConstructionError
from wildkit.linalg.field import FieldSpec, Scalar
from wildkit.linalg.matrix import Matrix, det_inv, linear_combination, rank

MAX_ATTEMPTS = 1000

Instance = Union[MatrixPair, TwoDimSpace]


def random_scalar(rng: np.random.Generator, field: FieldSpec, height: int = 3) -> Scalar:
    if field.is_prime:
        return Scalar(field, int(rng.integers(0, field.p)))  # type: ignore
    numerator = int(rng.integers(-height, height + 1))
    denominator = int(rng.integers(1, height + 1))
    return Scalar(field, Fraction(numerator, denominator))


def random_matrix(
    rng: np.random.Generator, field: FieldSpec, n: int, height: int = 3
) -> Matrix:
    if field.is_prime:
        values = rng.integers(0, field.p, size=(n, n))  # type: ignore
        return Matrix.from_rows(field, values.tolist(), cols=n)
    return Matrix.from_rows(
        field,
        [[random_scalar(rng, field, height) for _ in range(n)] for _ in range(n)],
        cols=n,
    )


def random_invertible(
    rng: np.random.Generator, field: FieldSpec, n: int, height: int = 3
) -> Matrix:
    for _ in range(MAX_ATTEMPTS):
        S = random_matrix(rng, field, n, height)
        if n == 0 or det_inv(S).inverse is not None:
            return S
    raise ConstructionError(f"No invertible {n}x{n} matrix after {MAX_ATTEMPTS} draws.")


def random_polynomial_in(
    rng: np.random.Generator, C: Matrix, height: int = 3
) -> Matrix:
    """q(C) for a random q of degree < n"""
    n = C.rows
    if n == 0:
        return C
    coefficients = [random_scalar(rng, C.field, height) for _ in range(n)]
    powers = [C.power(k) for k in range(n)]
    return linear_combination(coefficients, powers)


def random_pair(
    rng: np.random.Generator, field: FieldSpec, n: int, height: int = 3
) -> MatrixPair:
    return MatrixPair(
        random_matrix(rng, field, n, height), random_matrix(rng, field, n, height)
    )


def random_commuting_pair(
    rng: np.random.Generator, field: FieldSpec, n: int, height: int = 3
) -> MatrixPair:
    C = random_matrix(rng, field, n, height)
    return MatrixPair(C, random_polynomial_in(rng, C, height))


def random_space_with_nonsingular(
    rng: np.random.Generator, field: FieldSpec, n: int, height: int = 3
) -> TwoDimSpace:
    if n < 2:
        raise ConstructionError(
            f"A two-dimensional space of commuting matrices needs n >= 2, got n = {n}."
        )
    for attempt in range(MAX_ATTEMPTS):
        A, B = random_commuting_pair(rng, field, n, height)
        stacked = Matrix.from_rows(field, [A.vec(), B.vec()])
        if rank(stacked) < 2:
            continue
        space = TwoDimSpace(A, B)
        if contains_nonsingular(space) is None:
            continue
        if attempt:
            logger.trace("Accepted a random space after {count} rejections", count=attempt)
        return space
    raise ConstructionError(
        f"No commuting space with a nonsingular member after {MAX_ATTEMPTS} draws."
    )


def gen_random(spec: RandomSpec) -> List[Instance]:
    """A deterministic stream of spec.count instances"""
    rng = np.random.default_rng(spec.seed)
    if spec.mode == RandomMode.commuting_space_with_nonsingular and spec.n < 2:
        raise ConstructionError(
            f"A two-dimensional space of commuting matrices needs n >= 2, got n = {spec.n}."
        )
    makers = {
        RandomMode.arbitrary_pair: random_pair,
        RandomMode.commuting_pair: random_commuting_pair,
        RandomMode.commuting_space_with_nonsingular: random_space_with_nonsingular,
    }
    make = makers[spec.mode]
    instances: List[Instance] = [
        make(rng, spec.field, spec.n, spec.height) for _ in range(spec.count)
    ]
    logger.debug(
        "Generated {count} {mode} instances over {field}",
        count=spec.count,
        mode=spec.mode.value,
        field=spec.field,
    )
    return instances
