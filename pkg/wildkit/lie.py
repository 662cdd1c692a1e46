"""The metabelian Lie algebra L(V) of a two-dimensional commuting space V.

L(V) has the basis ``x, y, e_1, ..., e_n``. Writing an element as ``(M|a)`` with
``M = u_x·A + u_y·B`` in V and ``a`` in F^n, the bracket is

    [(M|a), (N|b)] = (0 | M·b - N·a)

so ``[x, e_j]`` is column j of A, ``[y, e_j]`` is column j of B and every other basis
bracket vanishes. ``(M|a)`` is realised as the bordered matrix ``[[M, a], [0, 0]]``
(:func:`tilde_matrix`) and the bracket is the matrix commutator of those.

Coordinates are column vectors ordered ``(x, y, e_1, ..., e_n)``. Isomorphisms are
coordinate matrices whose columns are the images of the basis.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from wildkit.config.models import (
    LieAlgebraModel,
    MatrixModel,
    PairModel,
    StructureConstant,
)
from wildkit.deciders.pencil import (
    PencilTransform,
    TwoDimSpace,
    contains_nonsingular,
)
from wildkit.exceptions import (
    ConstructionError,
    HypothesisError,
    InvariantError,
    ShapeError,
)
from wildkit.linalg.field import FieldSpec, Scalar, format_raw
from wildkit.linalg.matrix import (
    Matrix,
    det_inv,
    direct_sum,
    rank,
    rref_raw,
)
from wildkit.reductions import full_reduce_space, lift_full_witness

Coordinates = Tuple[Scalar, ...]


def _labels(n: int) -> Tuple[str, ...]:
    return ("x", "y") + tuple(f"e{i}" for i in range(1, n + 1))


@dataclass(frozen=True)
class LieAlgebra:
    """L(V) given by its nonzero structure constants [b_i, b_j], i < j"""

    dim: int
    field: FieldSpec
    basis_labels: Tuple[str, ...]
    structure: Dict[Tuple[int, int], Tuple[Scalar, ...]]
    source_space: TwoDimSpace

    @property
    def n(self) -> int:
        return self.dim - 2

    @cached_property
    def tensor(self) -> np.ndarray:
        """C[k, i, j] = coordinate k of [b_i, b_j], both orders filled in"""
        C = np.full(
            (self.dim, self.dim, self.dim), self.field.raw_zero(), dtype=self.field.dtype
        )
        for (i, j), vector in self.structure.items():
            raw = np.array([v.value for v in vector], dtype=self.field.dtype)
            C[:, i, j] = raw
            C[:, j, i] = self.field.reduce(-raw)
        C.setflags(write=False)
        return C

    def coordinates(self, values: Sequence[Any]) -> Coordinates:
        if len(values) != self.dim:
            raise ShapeError(
                f"Expected {self.dim} coordinates, got {len(values)}."
            )
        return tuple(Scalar(self.field, v) for v in values)

    def basis_vector(self, index: int) -> Coordinates:
        return tuple(
            self.field.one if k == index else self.field.zero for k in range(self.dim)
        )


@dataclass(frozen=True)
class TildeElement:
    """(αA + βB | a): a member of V together with a column in F^n"""

    alpha: Scalar
    beta: Scalar
    a: Matrix

    @classmethod
    def from_coordinates(cls, L: LieAlgebra, u: Sequence[Any]):
        u = _raw_vector(L, u)
        return cls(
            Scalar(L.field, u[0]),
            Scalar(L.field, u[1]),
            Matrix(L.field, u[2:].reshape(-1, 1)),
        )

    @property
    def coordinates(self) -> Coordinates:
        return (self.alpha, self.beta) + tuple(
            self.a[i, 0] for i in range(self.a.rows)
        )

    def to_matrix(self, V: TwoDimSpace) -> Matrix:
        n = V.n
        top_left = V.member(self.alpha, self.beta)
        bordered = Matrix.zeros(V.field, n + 1)
        data = np.array(bordered.data, copy=True)
        data[:n, :n] = top_left.data
        data[:n, n] = self.a.data[:, 0]
        return Matrix(V.field, data)


@dataclass(frozen=True)
class LieIso:
    """A coordinate matrix; column k is the image of basis element k"""

    phi: Matrix

    def __post_init__(self):
        if not self.phi.is_square:
            raise ShapeError(f"An isomorphism matrix must be square, got {self.phi.shape}.")

    @property
    def dim(self) -> int:
        return self.phi.rows

    def then(self, other: "LieIso") -> "LieIso":
        """Apply self, then other"""
        return LieIso(other.phi @ self.phi)


def _raw_vector(L: LieAlgebra, u: Sequence[Any]) -> np.ndarray:
    if len(u) != L.dim:
        raise ShapeError(f"Expected {L.dim} coordinates, got {len(u)}.")
    return np.array([L.field.coerce(v) for v in u], dtype=L.field.dtype)


def _as_coordinates(field: FieldSpec, raw: np.ndarray) -> Coordinates:
    return tuple(Scalar(field, v) for v in raw)


def lie_build(V: TwoDimSpace) -> LieAlgebra:
    n = V.n
    field = V.field
    structure: Dict[Tuple[int, int], Tuple[Scalar, ...]] = {}
    zero_head = (field.zero, field.zero)
    for label, basis_matrix in ((0, V.basisA), (1, V.basisB)):
        for j in range(n):
            column = tuple(basis_matrix[i, j] for i in range(n))
            if all(c.is_zero() for c in column):
                continue
            structure[(label, 2 + j)] = zero_head + column
    L = LieAlgebra(n + 2, field, _labels(n), structure, V)
    if not check_jacobi(L):
        raise InvariantError("The structure constants of L(V) violate Jacobi.")
    logger.debug(
        "Built L(V) of dimension {dim} with {count} nonzero structure constants",
        dim=L.dim,
        count=len(structure),
    )
    return L


def _bracket_raw(L: LieAlgebra, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    flat = L.tensor.reshape(L.dim, L.dim * L.dim)
    return L.field.reduce(flat @ L.field.reduce(np.outer(u, v)).reshape(-1))


def bracket(L: LieAlgebra, u: Sequence[Any], v: Sequence[Any]) -> Coordinates:
    """The bilinear extension of the structure constants"""
    return _as_coordinates(L.field, _bracket_raw(L, _raw_vector(L, u), _raw_vector(L, v)))


def check_jacobi(L: LieAlgebra) -> bool:
    """[b_i,[b_j,b_k]] + [b_j,[b_k,b_i]] + [b_k,[b_i,b_j]] = 0 on every basis triple"""
    d = L.dim
    if d == 0:
        return True
    field = L.field
    C = L.tensor
    flat = C.reshape(d, d * d)
    stacked = C.reshape(d * d, d)
    for i in range(d):
        ad_i = C[:, i, :]
        if not bool((ad_i != 0).any()):
            continue
        # outer[m, j, k] = [b_i, [b_j, b_k]]_m and inner[m, a, b] = [b_a, [b_i, b_b]]_m
        outer = field.reduce(ad_i @ flat).reshape(d, d, d)
        inner = field.reduce(stacked @ ad_i).reshape(d, d, d)
        total = field.reduce(outer - inner + np.transpose(inner, (0, 2, 1)))
        if bool((total != 0).any()):
            logger.debug("Jacobi fails for basis element {label}", label=L.basis_labels[i])
            return False
    return True


def tilde_matrix(L: LieAlgebra, u: Sequence[Any]) -> Matrix:
    """The (n+1)×(n+1) bordered matrix [[u_x·A + u_y·B, u_e], [0, 0]]"""
    return TildeElement.from_coordinates(L, u).to_matrix(L.source_space)


def _span_coordinates(V: TwoDimSpace, M: Matrix) -> Optional[Tuple[Scalar, Scalar]]:
    """(α, β) with M = αA + βB, or None"""
    field = V.field
    system = np.stack(
        [
            np.array(V.basisA.vec(), dtype=field.dtype),
            np.array(V.basisB.vec(), dtype=field.dtype),
            np.array(M.vec(), dtype=field.dtype),
        ],
        axis=1,
    )
    R, pivots = rref_raw(field, system)
    if 2 in pivots:
        return None
    if pivots != [0, 1]:
        raise InvariantError("The basis of the space is not independent.")
    return Scalar(field, R[0, 2]), Scalar(field, R[1, 2])


def tilde_coordinates(L: LieAlgebra, M: Matrix) -> Optional[Coordinates]:
    """Coordinates u with tilde_matrix(L, u) = M, or None when M is not in the tilde space"""
    n = L.n
    if M.field != L.field or M.shape != (n + 1, n + 1):
        return None
    if not M.block(n, n + 1, 0, n + 1).is_zero():
        return None
    head = _span_coordinates(L.source_space, M.block(0, n, 0, n))
    if head is None:
        return None
    return head + tuple(M[i, n] for i in range(n))


def derived_subalgebra(L: LieAlgebra) -> Tuple[int, List[Coordinates]]:
    """The span of all brackets, as an echelonized basis"""
    d = L.dim
    if not L.structure:
        return 0, []
    rows = np.ascontiguousarray(L.tensor.reshape(d, d * d).T)
    R, pivots = rref_raw(L.field, rows)
    basis = [_as_coordinates(L.field, R[i]) for i in range(len(pivots))]
    if any(not (b[0].is_zero() and b[1].is_zero()) for b in basis):
        raise InvariantError("A bracket has a nonzero x or y coordinate.")
    return len(pivots), basis


def _brackets_of_columns(L: LieAlgebra, phi: np.ndarray) -> np.ndarray:
    """out[k, i, j] = coordinate k of [phi_i, phi_j] for the columns phi_i of phi"""
    field = L.field
    left = field.reduce(np.matmul(phi.T[None, :, :], L.tensor))
    return field.reduce(np.matmul(left, phi[None, :, :]))


def verify_lie_iso(L: LieAlgebra, L2: LieAlgebra, iso: LieIso) -> bool:
    """True iff phi is invertible and phi[b_i, b_j] = [phi b_i, phi b_j] for all i, j"""
    if L.field != L2.field or L.dim != L2.dim or iso.phi.field != L.field:
        return False
    if iso.phi.shape != (L.dim, L.dim):
        return False
    if L.dim == 0:
        return True
    if det_inv(iso.phi).inverse is None:
        return False
    field = L.field
    d = L.dim
    phi = iso.phi.data
    image_of_brackets = field.reduce(phi @ L.tensor.reshape(d, d * d)).reshape(d, d, d)
    brackets_of_images = _brackets_of_columns(L2, phi)
    return bool(np.all((image_of_brackets == brackets_of_images).astype(bool)))


def basis_map(V: TwoDimSpace, V2: TwoDimSpace, S: Matrix) -> Optional[Matrix]:
    """P with S·A·S⁻¹ = P₀₀A′ + P₁₀B′ and S·B·S⁻¹ = P₀₁A′ + P₁₁B′, or None"""
    if V.field != V2.field or V.n != V2.n or S.shape != (V.n, V.n):
        return None
    S_inv = det_inv(S).inverse
    if S_inv is None:
        return None
    first = _span_coordinates(V2, S @ V.basisA @ S_inv)
    second = _span_coordinates(V2, S @ V.basisB @ S_inv)
    if first is None or second is None:
        return None
    return Matrix.from_rows(V.field, [[first[0], second[0]], [first[1], second[1]]])


def weak_witness_from_iso(S: Matrix, P: Matrix) -> Tuple[PencilTransform, Matrix]:
    """(T, S_w) with S_w⁻¹·pencil_transform((A, B), T)·S_w = (A′, B′)"""
    P_inv = det_inv(P).inverse
    S_inv = det_inv(S).inverse
    if P_inv is None or S_inv is None:
        raise HypothesisError("Both S and P must be nonsingular.")
    return PencilTransform(P_inv.transpose()), S_inv


def iso_from_similarity(
    V: TwoDimSpace, V2: TwoDimSpace, S: Matrix, P: Matrix
) -> LieIso:
    """phi = P ⊕ S, the isomorphism L(V) → L(V′) induced by X ↦ (S ⊕ I₁)·X·(S ⊕ I₁)⁻¹"""
    if V.field != V2.field or V.n != V2.n:
        raise HypothesisError("The spaces must live over one field and one size.")
    if S.shape != (V.n, V.n) or P.shape != (2, 2):
        raise HypothesisError(
            f"Expected S of shape {(V.n, V.n)} and P of shape (2, 2), got {S.shape} and {P.shape}."
        )
    if det_inv(S).inverse is None:
        raise HypothesisError("S must be nonsingular.")
    if det_inv(P).inverse is None:
        raise HypothesisError("The basis map P must be nonsingular.")
    if basis_map(V, V2, S) != P:
        raise HypothesisError(
            "S does not carry the basis of V onto the basis of V′ through P."
        )
    return LieIso(direct_sum(P, S))


def similarity_from_iso(
    L: LieAlgebra, L2: LieAlgebra, iso: LieIso
) -> Tuple[Matrix, Matrix]:
    """Recover (S, P) from an isomorphism L(V) → L(V′).

    Both spaces must contain a nonsingular matrix; then the derived subalgebras are the
    full e-parts and phi restricted to them is S.
    """
    if L.field != L2.field or L.n != L2.n:
        raise HypothesisError("The algebras must have one field and one dimension.")
    for algebra in (L, L2):
        if contains_nonsingular(algebra.source_space) is None:
            raise HypothesisError(
                "similarity_from_iso needs spaces that contain a nonsingular matrix."
            )
    if not verify_lie_iso(L, L2, iso):
        raise HypothesisError("phi is not an isomorphism of the two Lie algebras.")
    n = L.n
    phi = iso.phi
    derived_dim, derived = derived_subalgebra(L)
    derived_dim2, _ = derived_subalgebra(L2)
    if derived_dim != derived_dim2:
        raise HypothesisError("The derived subalgebras have different dimensions.")
    derived_columns = [Matrix.column(L.field, list(b)) for b in derived]
    if any(not (phi @ v).block(0, 2, 0, 1).is_zero() for v in derived_columns):
        raise HypothesisError("phi does not map the derived subalgebra onto the derived subalgebra.")
    S = phi.block(2, n + 2, 2, n + 2)
    P = phi.block(0, 2, 0, 2)
    V, V2 = L.source_space, L2.source_space
    for column, source in enumerate((V.basisA, V.basisB)):
        target = V2.member(P[0, column], P[1, column])
        if target @ S != S @ source:
            raise InvariantError(
                "The recovered S does not intertwine the spaces, the isomorphism check is broken."
            )
    if rank(S) < n:
        raise InvariantError("The recovered S is singular.")
    return S, P


def conjugate_tilde(L: LieAlgebra, L2: LieAlgebra, R: Matrix) -> bool:
    """Every tilde generator of L conjugated as R·X·R⁻¹ lies in the tilde space of L2"""
    if R.field != L.field or R.shape != (L.n + 1, L.n + 1):
        return False
    R_inv = det_inv(R).inverse
    if R_inv is None:
        return False
    for k in range(L.dim):
        X = tilde_matrix(L, L.basis_vector(k))
        if tilde_coordinates(L2, R @ X @ R_inv) is None:
            return False
    return True


def wild_lie_reduce(X: Matrix, Y: Matrix, lambda_value: Optional[Scalar] = None) -> LieAlgebra:
    """L(V) for the commuting space V spanned by the full reduction of (X, Y)"""
    return lie_build(full_reduce_space(X, Y, lambda_value))


def lift_lie_witness(
    X: Matrix,
    Y: Matrix,
    X2: Matrix,
    Y2: Matrix,
    S: Matrix,
    lambda_value: Optional[Scalar] = None,
) -> LieIso:
    """The isomorphism wild_lie_reduce(X, Y) → wild_lie_reduce(X′, Y′) induced by S.

    S must satisfy (X, Y)·S = S·(X′, Y′).
    """
    if X @ S != S @ X2 or Y @ S != S @ Y2:
        raise HypothesisError("S is not a similarity from (X, Y) to (X′, Y′).")
    V = full_reduce_space(X, Y, lambda_value)
    V2 = full_reduce_space(X2, Y2, lambda_value)
    W = lift_full_witness(S)
    W_inv = det_inv(W).inverse
    if W_inv is None:
        raise HypothesisError("S must be nonsingular.")
    return iso_from_similarity(V, V2, W_inv, Matrix.identity(X.field, 2))


def lie_to_model(L: LieAlgebra) -> LieAlgebraModel:
    return LieAlgebraModel(
        dim=L.dim,
        field=L.field,
        structure=[
            StructureConstant(
                i=i, j=j, vector=[format_raw(L.field, v.value) for v in vector]
            )
            for (i, j), vector in sorted(L.structure.items())
        ],
        space=PairModel(
            A=MatrixModel.from_matrix(L.source_space.basisA),
            B=MatrixModel.from_matrix(L.source_space.basisB),
        ),
    )


def lie_from_model(model: LieAlgebraModel) -> LieAlgebra:
    """Rebuild L(V) from its source space and check it against the stored constants"""
    pair = model.space.to_pair()
    L = lie_build(TwoDimSpace(pair.A, pair.B))
    stored = {
        (c.i, c.j): tuple(Scalar(model.field, str(v)) for v in c.vector)
        for c in model.structure
    }
    if model.dim != L.dim or model.field != L.field or stored != L.structure:
        raise ConstructionError(
            "The structure constants do not match the Lie algebra of the stored space."
        )
    return L
