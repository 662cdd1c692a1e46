"""Runnable verification suites.

Each suite is a list of independent cases. Case ``i`` of a run with seed ``s`` draws its
data from ``numpy.random.default_rng([s, i])``, so the same case gives the same data in
any order and on any number of workers, and the report is sorted by case index.
"""

import itertools
import time
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from joblib import Parallel, delayed
from loguru import logger
from tqdm import tqdm

from wildkit.config.models import MatrixModel, SuiteFailure, SuiteReport
from wildkit.deciders.pencil import (
    PencilTransform,
    TwoDimSpace,
    are_weakly_similar,
    contains_nonsingular,
    verify_weak,
)
from wildkit.deciders.similarity import (
    CertificateKind,
    MatrixPair,
    Verdict,
    are_similar,
)
from wildkit.exceptions import ConstructionError, WildkitError
from wildkit.generator import (
    MAX_ATTEMPTS,
    random_invertible,
    random_matrix,
    random_scalar,
    random_space_with_nonsingular,
)
from wildkit.lie import (
    conjugate_tilde,
    derived_subalgebra,
    iso_from_similarity,
    lie_build,
    lift_lie_witness,
    similarity_from_iso,
    verify_lie_iso,
    weak_witness_from_iso,
    wild_lie_reduce,
)
from wildkit.linalg.field import GF, FieldSpec, field_elements
from wildkit.linalg.matrix import (
    Matrix,
    det_inv,
    determinant,
    direct_sum,
    nilpotency_index,
)
from wildkit.reductions import (
    build_M_pair,
    default_lambda,
    full_reduce,
    gp_reduce,
    lift_full_witness,
    nonsingular_sum,
    rank_bounds,
)
from wildkit.utils import tqdm_joblib_context

DEFAULT_SEED = 7

CaseCheck = Callable[[int, int], Optional[SuiteFailure]]


class SuiteName(str, Enum):
    gp_invariants = "gp-invariants"
    njk1_exhaustive_gf3 = "njk1-exhaustive-gf3"
    njk_exhaustive_gf3 = "njk-exhaustive-gf3"
    rank_laws = "rank-laws"
    full_chain = "full-chain"
    thm2_roundtrip = "thm2-roundtrip"
    simdecide_oracle = "simdecide-oracle"
    nonsingular_detection = "nonsingular-detection"
    lie_chain = "lie-chain"


def _case_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, index])


def _dump(**matrices: Matrix) -> Dict[str, Any]:
    return {
        name: MatrixModel.from_matrix(M).model_dump(mode="json")
        for name, M in matrices.items()
    }


def _failure(index: int, reason: str, **matrices: Matrix) -> SuiteFailure:
    return SuiteFailure(case=index, reason=reason, inputs=_dump(**matrices))


def _similar_copy(rng, X: Matrix, Y: Matrix):
    """(X′, Y′, S) with (X, Y)·S = S·(X′, Y′) for a random invertible S"""
    S = random_invertible(rng, X.field, X.rows)
    S_inv = det_inv(S).inverse
    return S_inv @ X @ S, S_inv @ Y @ S, S


def _one_by_one(field: FieldSpec) -> Callable[[int], Matrix]:
    return lambda value: Matrix.from_rows(field, [[value]])


def _scalar_pairs(index: int):
    """The index-th ordered pair of scalar pairs over GF(3), lexicographically"""
    digits = np.base_repr(index, base=3).zfill(4)
    x, y, x2, y2 = (int(d) for d in digits)
    return (x, y), (x2, y2)


# the cases


def check_gp_invariants(index: int, seed: int) -> Optional[SuiteFailure]:
    rng = _case_rng(seed, index)
    field = GF(5)
    n = 1 + index % 3
    X, Y = random_matrix(rng, field, n), random_matrix(rng, field, n)
    gp = gp_reduce(X, Y)
    J, K = gp.pair
    if not gp.pair.commutes():
        return _failure(index, "J and K_XY do not commute", X=X, Y=Y)
    if not J.power(4).is_zero() or not K.power(3).is_zero():
        return _failure(index, "J^4 or K^3 is nonzero", X=X, Y=Y)
    if (J @ K).block(0, n, 3 * n, 4 * n) != X:
        return _failure(index, "block (1,4) of J·K_XY is not X", X=X, Y=Y)
    if nilpotency_index(J) != 4:
        return _failure(index, "J is not nilpotent of index 4", X=X, Y=Y)
    return None


def check_njk1(index: int, seed: int) -> Optional[SuiteFailure]:
    field = GF(3)
    (x, y), (x2, y2) = _scalar_pairs(index)
    one = _one_by_one(field)
    left = gp_reduce(one(x), one(y)).pair
    right = gp_reduce(one(x2), one(y2)).pair
    decision = are_similar(left, right)
    expected = Verdict.yes if (x, y) == (x2, y2) else Verdict.no
    reason = None
    if decision.verdict != expected:
        reason = f"expected {expected.value}, got {decision.verdict.value}"
    elif decision.certificate_kind != CertificateKind.exhaustive:
        reason = f"certificate is {decision.certificate_kind.value}, not exhaustive"
    if reason:
        return _failure(index, reason, X=one(x), Y=one(y), X2=one(x2), Y2=one(y2))
    return None


def check_njk(index: int, seed: int) -> Optional[SuiteFailure]:
    field = GF(3)
    (a, b), (a2, b2) = _scalar_pairs(index)
    one = _one_by_one(field)
    left = build_M_pair(one(a), one(b), field.one).pair
    right = build_M_pair(one(a2), one(b2), field.one).pair
    decision = are_weakly_similar(left, right)
    expected = Verdict.yes if (a, b) == (a2, b2) else Verdict.no
    if decision.verdict != expected:
        return _failure(
            index,
            f"expected {expected.value}, got {decision.verdict.value}",
            A=one(a),
            B=one(b),
            A2=one(a2),
            B2=one(b2),
        )
    return None


def check_rank_laws(index: int, seed: int) -> Optional[SuiteFailure]:
    rng = _case_rng(seed, index)
    field = GF(3) if index % 2 == 0 else GF(5)
    m = 1 + (index // 2) % 2
    A, B = random_matrix(rng, field, m), random_matrix(rng, field, m)
    alpha, beta, gamma, delta = (random_scalar(rng, field) for _ in range(4))
    ranks = rank_bounds(
        build_M_pair(A, B, default_lambda(field)), alpha, beta, gamma, delta
    )
    reasons = []
    if ranks["rank_M1"] > 4 * m + 3:
        reasons.append("rank M1(A) > 4m+3")
    if ranks["rank_M2"] > 5 * m + 4:
        reasons.append("rank M2(B) > 5m+4")
    if not beta.is_zero() and ranks["rank_first"] <= 4 * m + 3:
        reasons.append("beta != 0 but rank(alpha M1 + beta M2) <= 4m+3")
    if (
        not gamma.is_zero()
        and not delta.is_zero()
        and ranks["rank_second"] <= 5 * m + 4
    ):
        reasons.append("gamma, delta != 0 but rank(gamma M1 + delta M2) <= 5m+4")
    if reasons:
        T = Matrix.from_rows(field, [[alpha, beta], [gamma, delta]])
        return _failure(index, "; ".join(reasons), A=A, B=B, coefficients=T)
    return None


def check_full_chain(index: int, seed: int) -> Optional[SuiteFailure]:
    rng = _case_rng(seed, index)
    field = GF(5)
    n = 1 + index % 2
    X, Y = random_matrix(rng, field, n), random_matrix(rng, field, n)
    X2, Y2, S = _similar_copy(rng, X, Y)
    left = full_reduce(X, Y, field.one)
    right = full_reduce(X2, Y2, field.one)
    if not left.pair.commutes():
        return _failure(index, "the reduced pair does not commute", X=X, Y=Y)
    if not nonsingular_sum(left):
        return _failure(index, "M1(λI+J) + M2(K_XY) is singular", X=X, Y=Y)
    if not verify_weak(
        left.pair, right.pair, PencilTransform.identity(field), lift_full_witness(S)
    ):
        return _failure(index, "the lifted witness does not verify", X=X, Y=Y, S=S)
    return None


def check_thm2_roundtrip(index: int, seed: int) -> Optional[SuiteFailure]:
    rng = _case_rng(seed, index)
    field = GF(5)
    n = 2 + index % 2
    V = random_space_with_nonsingular(rng, field, n)
    S = random_invertible(rng, field, n)
    P = random_invertible(rng, field, 2)
    S_inv = det_inv(S).inverse
    Q = det_inv(P).inverse
    conjugated = (S @ V.basisA @ S_inv, S @ V.basisB @ S_inv)
    V2 = TwoDimSpace(
        conjugated[0].scale(Q[0, 0]) + conjugated[1].scale(Q[1, 0]),
        conjugated[0].scale(Q[0, 1]) + conjugated[1].scale(Q[1, 1]),
    )
    inputs = dict(A=V.basisA, B=V.basisB, S=S, P=P)
    L, L2 = lie_build(V), lie_build(V2)
    if derived_subalgebra(L)[0] != n:
        return _failure(index, "the derived subalgebra is not the full e-part", **inputs)
    iso = iso_from_similarity(V, V2, S, P)
    if not verify_lie_iso(L, L2, iso):
        return _failure(index, "P ⊕ S is not a Lie isomorphism", **inputs)
    recovered_S, recovered_P = similarity_from_iso(L, L2, iso)
    if recovered_S != S or recovered_P != P:
        return _failure(index, "similarity_from_iso did not recover (S, P)", **inputs)
    if not conjugate_tilde(L, L2, direct_sum(S, Matrix.identity(field, 1))):
        return _failure(index, "S ⊕ I does not carry the tilde space onto its image", **inputs)
    T, S_w = weak_witness_from_iso(recovered_S, recovered_P)
    if not verify_weak(V.pair, V2.pair, T, S_w):
        return _failure(index, "the recovered witness is not a space similarity", **inputs)
    return None


def _brute_force_similar(L: MatrixPair, R: MatrixPair) -> bool:
    field = L.field
    for entries in itertools.product(field_elements(field), repeat=L.n * L.n):
        S = Matrix.from_rows(
            field, [list(entries[i * L.n : (i + 1) * L.n]) for i in range(L.n)]
        )
        if determinant(S).is_zero():
            continue
        if L.A @ S == S @ R.A and L.B @ S == S @ R.B:
            return True
    return False


def check_simdecide_oracle(index: int, seed: int) -> Optional[SuiteFailure]:
    rng = _case_rng(seed, index)
    field = GF(2)
    L = MatrixPair(random_matrix(rng, field, 2), random_matrix(rng, field, 2))
    if index % 2 == 0:
        R = L.conjugate(random_invertible(rng, field, 2))
    else:
        R = MatrixPair(random_matrix(rng, field, 2), random_matrix(rng, field, 2))
    decision = are_similar(L, R)
    expected = _brute_force_similar(L, R)
    if decision.verdict == Verdict.inconclusive or decision.is_yes != expected:
        return _failure(
            index,
            f"decider said {decision.verdict.value}, brute force says {'yes' if expected else 'no'}",
            A=L.A,
            B=L.B,
            A2=R.A,
            B2=R.B,
        )
    return None


def _all_singular_space() -> TwoDimSpace:
    field = GF(3)
    return TwoDimSpace(Matrix.unit(field, 3, 0, 2), Matrix.unit(field, 3, 1, 2))


def check_nonsingular_detection(index: int, seed: int) -> Optional[SuiteFailure]:
    if index == 0:
        space = _all_singular_space()
        if contains_nonsingular(space) is not None:
            return _failure(
                index, "span(E13, E23) reported a nonsingular member",
                A=space.basisA, B=space.basisB,
            )
        return None
    rng = _case_rng(seed, index)
    field = GF(3)
    for _ in range(MAX_ATTEMPTS):
        A, B = random_matrix(rng, field, 2), random_matrix(rng, field, 2)
        try:
            space = TwoDimSpace(A, B)
        except WildkitError:
            continue
        break
    else:
        raise ConstructionError(
            f"No two-dimensional commuting space after {MAX_ATTEMPTS} draws."
        )
    scan = any(
        not determinant(space.member(alpha, beta)).is_zero()
        for alpha, beta in itertools.product(field_elements(field), repeat=2)
    )
    found = contains_nonsingular(space)
    if (found is not None) != scan:
        return _failure(index, "contains_nonsingular disagrees with the full scan", A=A, B=B)
    if found is not None and determinant(space.member(*found)).is_zero():
        return _failure(index, "contains_nonsingular returned a singular member", A=A, B=B)
    return None


def check_lie_chain(index: int, seed: int) -> Optional[SuiteFailure]:
    rng = _case_rng(seed, index)
    field = GF(5)
    X, Y = random_matrix(rng, field, 1), random_matrix(rng, field, 1)
    X2, Y2, S = _similar_copy(rng, X, Y)
    L, L2 = wild_lie_reduce(X, Y), wild_lie_reduce(X2, Y2)
    iso = lift_lie_witness(X, Y, X2, Y2, S)
    if not verify_lie_iso(L, L2, iso):
        return _failure(index, "the lifted Lie isomorphism does not verify", X=X, Y=Y, S=S)
    return None


@dataclass(frozen=True)
class SuiteDefinition:
    name: SuiteName
    check: CaseCheck
    default_count: int
    max_count: Optional[int] = None
    """Suites that enumerate a finite set of cases cannot run more than this"""


SUITES: Dict[SuiteName, SuiteDefinition] = {
    definition.name: definition
    for definition in (
        SuiteDefinition(SuiteName.gp_invariants, check_gp_invariants, 200),
        SuiteDefinition(SuiteName.njk1_exhaustive_gf3, check_njk1, 81, 81),
        SuiteDefinition(SuiteName.njk_exhaustive_gf3, check_njk, 81, 81),
        SuiteDefinition(SuiteName.rank_laws, check_rank_laws, 200),
        SuiteDefinition(SuiteName.full_chain, check_full_chain, 50),
        SuiteDefinition(SuiteName.thm2_roundtrip, check_thm2_roundtrip, 100),
        SuiteDefinition(SuiteName.simdecide_oracle, check_simdecide_oracle, 50),
        # case 0 is the fixed all-singular space, the sample follows it
        SuiteDefinition(SuiteName.nonsingular_detection, check_nonsingular_detection, 101),
        SuiteDefinition(SuiteName.lie_chain, check_lie_chain, 10),
    )
}


def run_case(name: SuiteName, index: int, seed: int) -> Optional[SuiteFailure]:
    try:
        return SUITES[name].check(index, seed)
    except WildkitError as e:
        logger.debug("Case {index} of {suite} raised {error}", index=index, suite=name.value, error=e)
        return SuiteFailure(case=index, reason=f"{type(e).__name__}: {e}")


def run_suite(
    name: SuiteName,
    count: Optional[int] = None,
    seed: int = DEFAULT_SEED,
    jobs: int = 1,
    progress: bool = False,
) -> SuiteReport:
    definition = SUITES[name]
    count = definition.default_count if count is None else count
    if definition.max_count is not None:
        count = min(count, definition.max_count)
    start = time.perf_counter()
    indices = range(count)
    if jobs == 1:
        iterator = tqdm(indices, desc=name.value, disable=not progress)
        results = [run_case(name, index, seed) for index in iterator]
    else:
        with tqdm_joblib_context(
            tqdm(desc=name.value, total=count, disable=not progress)
        ):
            results = Parallel(n_jobs=jobs)(
                delayed(run_case)(name, index, seed) for index in indices
            )
    failures: List[SuiteFailure] = sorted(
        (f for f in results if f is not None), key=lambda f: f.case
    )
    report = SuiteReport(
        suite=name.value,
        run=count,
        passed=count - len(failures),
        wall_time=time.perf_counter() - start,
        failures=failures,
    )
    logger.debug(
        "Suite {suite}: {passed}/{run} in {time:.2f}s",
        suite=report.suite,
        passed=report.passed,
        run=report.run,
        time=report.wall_time,
    )
    return report
