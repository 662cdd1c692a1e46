"""Dense exact matrices over one field.

Entries are canonical raw values (see :mod:`wildkit.linalg.field`) held in a read-only
numpy array: ``int64`` for small prime fields, Python objects (``int`` or ``Fraction``)
otherwise. Every operation returns a new matrix.

Block positions in :class:`BlockGrid` are 0-based, so the block written ``(1,2)`` in
the usual 1-based notation is ``(0, 1)`` here.
"""

from dataclasses import dataclass, field as dataclass_field
from functools import lru_cache
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from wildkit.exceptions import InvariantError, ShapeError
from wildkit.linalg.field import FieldSpec, Scalar, format_raw


def _new_array(field: FieldSpec, rows: int, cols: int, fill=None) -> np.ndarray:
    value = field.raw_zero() if fill is None else fill
    return np.full((rows, cols), value, dtype=field.dtype)


class Matrix:
    """A value-semantic dense matrix over a FieldSpec.

    Examples:
        >>> from wildkit.linalg.field import GF
        >>> A = Matrix.from_rows(GF(3), [[1, 1], [0, 1]])
        >>> B = Matrix.from_rows(GF(3), [[1, 2], [0, 1]])
        >>> (A @ B).to_rows()
        [['1', '0'], ['0', '1']]
    """

    __slots__ = ("field", "_data")

    def __init__(self, field: FieldSpec, data: np.ndarray):
        if data.ndim != 2:
            raise ShapeError(f"A matrix needs a two-dimensional array, got {data.ndim}.")
        data = np.array(data, dtype=field.dtype, copy=True)
        data.setflags(write=False)
        self.field = field
        self._data = data

    # construction

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[Any]], cols=None):
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else (cols or 0)
        if any(len(row) != n_cols for row in rows):
            raise ShapeError("All rows of a matrix must have the same length.")
        data = _new_array(field, n_rows, n_cols)
        for i, row in enumerate(rows):
            for j, value in enumerate(row):
                data[i, j] = field.coerce(value)
        return cls(field, data)

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: Optional[int] = None):
        return cls(field, _new_array(field, rows, rows if cols is None else cols))

    @classmethod
    def identity(cls, field: FieldSpec, n: int):
        data = _new_array(field, n, n)
        np.fill_diagonal(data, field.raw_one())
        return cls(field, data)

    @classmethod
    def scalar_matrix(cls, field: FieldSpec, n: int, value: Any):
        data = _new_array(field, n, n)
        np.fill_diagonal(data, field.coerce(value))
        return cls(field, data)

    @classmethod
    def column(cls, field: FieldSpec, values: Sequence[Any]):
        return cls.from_rows(field, [[v] for v in values], cols=1)

    @classmethod
    def unit(cls, field: FieldSpec, n: int, i: int, j: int, cols: Optional[int] = None):
        """The matrix unit E_ij (0-based)"""
        data = _new_array(field, n, n if cols is None else cols)
        data[i, j] = field.raw_one()
        return cls(field, data)

    # access

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape  # type: ignore

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def data(self) -> np.ndarray:
        """The read-only array of canonical raw values"""
        return self._data

    def __getitem__(self, position: Tuple[int, int]) -> Scalar:
        return Scalar(self.field, self._data[position])

    def to_rows(self) -> List[List[str]]:
        return [[format_raw(self.field, v) for v in row] for row in self._data]

    def vec(self) -> List[Any]:
        """Entries in row-major order"""
        return self._data.ravel().tolist()

    def is_zero(self) -> bool:
        return not bool((self._data != 0).any())

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool(np.all((self._data == other._data).astype(bool)))
        )

    def __hash__(self):
        return hash((str(self.field), self.shape, tuple(self.vec())))

    def __repr__(self):
        return f"Matrix({self.to_rows()}, {self.field})"

    # arithmetic

    def _check_same(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise ShapeError(f"Expected a Matrix, got {type(other).__name__}.")
        if other.field != self.field:
            raise ShapeError(f"Field mismatch: {self.field} and {other.field}.")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.shape != other.shape:
            raise ShapeError(f"Cannot add {self.shape} and {other.shape} matrices.")
        return Matrix(self.field, self.field.reduce(self._data + other._data))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same(other)
        if self.shape != other.shape:
            raise ShapeError(f"Cannot subtract {self.shape} and {other.shape} matrices.")
        return Matrix(self.field, self.field.reduce(self._data - other._data))

    def __neg__(self) -> "Matrix":
        return Matrix(self.field, self.field.reduce(-self._data))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        return mat_mul(self, other)

    def scale(self, value: Any) -> "Matrix":
        raw = self.field.coerce(value)
        return Matrix(self.field, self.field.reduce(self._data * raw))

    def transpose(self) -> "Matrix":
        return Matrix(self.field, self._data.T)

    @property
    def T(self) -> "Matrix":
        return self.transpose()

    def power(self, k: int) -> "Matrix":
        if not self.is_square:
            raise ShapeError(f"Only square matrices have powers, got {self.shape}.")
        result = Matrix.identity(self.field, self.rows)
        for _ in range(k):
            result = result @ self
        return result

    def block(self, row_start: int, row_stop: int, col_start: int, col_stop: int):
        return Matrix(self.field, self._data[row_start:row_stop, col_start:col_stop])


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    A._check_same(B)
    if A.cols != B.rows:
        raise ShapeError(f"Cannot multiply {A.shape} by {B.shape}.")
    if A.rows == 0 or B.cols == 0 or A.cols == 0:
        return Matrix.zeros(A.field, A.rows, B.cols)
    return Matrix(A.field, A.field.reduce(A.data @ B.data))


def commutator(A: Matrix, B: Matrix) -> Matrix:
    return A @ B - B @ A


def direct_sum(*matrices: Matrix) -> Matrix:
    """A ⊕ B ⊕ ..."""
    if not matrices:
        raise ShapeError("A direct sum needs at least one summand.")
    field = matrices[0].field
    for M in matrices[1:]:
        matrices[0]._check_same(M)
    rows = sum(M.rows for M in matrices)
    cols = sum(M.cols for M in matrices)
    data = _new_array(field, rows, cols)
    r = c = 0
    for M in matrices:
        data[r : r + M.rows, c : c + M.cols] = M.data
        r += M.rows
        c += M.cols
    return Matrix(field, data)


def linear_combination(coefficients: Sequence[Any], matrices: Sequence[Matrix]):
    if len(coefficients) != len(matrices) or not matrices:
        raise ShapeError("Need one coefficient per matrix and at least one matrix.")
    result = matrices[0].scale(coefficients[0])
    for c, M in zip(coefficients[1:], matrices[1:]):
        result = result + M.scale(c)
    return result


def unvec(field: FieldSpec, values: Sequence[Any], rows: int, cols: int) -> Matrix:
    data = np.array(list(values), dtype=field.dtype).reshape(rows, cols)
    return Matrix(field, data)


# Row reduction


def rref_raw(field: FieldSpec, data: np.ndarray) -> Tuple[np.ndarray, List[int]]:
    """RREF of a raw array of canonical values, with its pivot columns"""
    R = np.array(data, dtype=field.dtype, copy=True)
    n_rows, n_cols = R.shape
    pivots: List[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        candidates = np.flatnonzero((R[r:, c] != 0).astype(bool))
        if candidates.size == 0:
            continue
        k = r + int(candidates[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
        R[r] = field.reduce(R[r] * field.raw_inv(R[r, c]))
        others = np.flatnonzero((R[:, c] != 0).astype(bool))
        others = others[others != r]
        if others.size:
            R[others] = field.reduce(R[others] - R[others, c][:, None] * R[r][None, :])
        pivots.append(c)
        r += 1
    return R, pivots


class RrefResult(NamedTuple):
    R: Matrix
    rank: int
    pivot_cols: Tuple[int, ...]


def rref(A: Matrix) -> RrefResult:
    """Reduced row-echelon form. The pivot is the first nonzero entry of each column."""
    R, pivots = rref_raw(A.field, A.data)
    return RrefResult(Matrix(A.field, R), len(pivots), tuple(pivots))


def rank(A: Matrix) -> int:
    return len(rref_raw(A.field, A.data)[1])


def kernel_raw(field: FieldSpec, data: np.ndarray) -> List[np.ndarray]:
    """Kernel basis of a raw array, as flat raw vectors"""
    R, pivots = rref_raw(field, data)
    n_cols = data.shape[1]
    pivot_set = set(pivots)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        v = np.full(n_cols, field.raw_zero(), dtype=field.dtype)
        v[free] = field.raw_one()
        for i, pc in enumerate(pivots):
            v[pc] = -R[i, free]
        basis.append(field.reduce(v))
    return basis


def kernel_basis(A: Matrix) -> List[Matrix]:
    """Basis of {v : Av = 0} as column vectors.

    Free variables are taken in increasing column order and each basis vector has a 1
    in its own free position, so the basis is the same on every run.
    """
    return [
        Matrix(A.field, v.reshape(-1, 1)) for v in kernel_raw(A.field, A.data)
    ]


def kernel_dimension(A: Matrix) -> int:
    return A.cols - rank(A)


def det_raw(field: FieldSpec, data: np.ndarray):
    """Determinant of a raw square array, as a raw value"""
    M = np.array(data, dtype=field.dtype, copy=True)
    n = M.shape[0]
    det = field.raw_one()
    for c in range(n):
        candidates = np.flatnonzero((M[c:, c] != 0).astype(bool))
        if candidates.size == 0:
            return field.raw_zero()
        k = c + int(candidates[0])
        if k != c:
            M[[c, k]] = M[[k, c]]
            det = -det
        pivot = M[c, c]
        det = det * pivot
        if field.is_prime:
            det = int(det) % field.p  # type: ignore
        if c + 1 < n:
            factors = field.reduce(M[c + 1 :, c] * field.raw_inv(pivot))
            M[c + 1 :] = field.reduce(M[c + 1 :] - factors[:, None] * M[c][None, :])
    return field.coerce(det)


def determinant(A: Matrix) -> Scalar:
    if not A.is_square:
        raise ShapeError(f"Determinants need square matrices, got {A.shape}.")
    return Scalar(A.field, det_raw(A.field, A.data))


def is_nonsingular(A: Matrix) -> bool:
    return A.is_square and not determinant(A).is_zero()


class DetInv(NamedTuple):
    det: Scalar
    inverse: Optional[Matrix]


def det_inv(A: Matrix) -> DetInv:
    """Exact determinant, and the inverse when it exists (checked both ways)."""
    det = determinant(A)
    if det.is_zero():
        return DetInv(det, None)
    n = A.rows
    augmented = np.concatenate(
        [A.data, Matrix.identity(A.field, n).data], axis=1
    )
    R, pivots = rref_raw(A.field, augmented)
    if tuple(pivots[:n]) != tuple(range(n)):
        raise InvariantError(f"Nonzero determinant {det} but rank below {n}.")
    inverse = Matrix(A.field, R[:, n:])
    identity = Matrix.identity(A.field, n)
    if A @ inverse != identity or inverse @ A != identity:
        raise InvariantError("Computed inverse does not invert the matrix.")
    return DetInv(det, inverse)


def inverse(A: Matrix) -> Matrix:
    result = det_inv(A)
    if result.inverse is None:
        raise ShapeError("The matrix is singular.")
    return result.inverse


def nilpotency_index(A: Matrix) -> Optional[int]:
    """Least k <= n with A^k = 0, or None when A is not nilpotent"""
    if not A.is_square:
        raise ShapeError(f"Nilpotency needs a square matrix, got {A.shape}.")
    n = A.rows
    if n == 0:
        return 0
    power = A
    for k in range(1, n + 1):
        if power.is_zero():
            return k
        power = power @ A
    return None


# Block matrices


@dataclass(frozen=True)
class BlockGrid:
    """A block partition; absent blocks are zero."""

    field: FieldSpec
    row_sizes: Tuple[int, ...]
    col_sizes: Tuple[int, ...]
    blocks: Dict[Tuple[int, int], Matrix] = dataclass_field(default_factory=dict)

    @classmethod
    def uniform(cls, field: FieldSpec, count: int, size: int, blocks=None):
        sizes = tuple([size] * count)
        return cls(field, sizes, sizes, dict(blocks or {}))

    @classmethod
    def diagonal(cls, field: FieldSpec, matrices: Iterable[Matrix]):
        matrices = list(matrices)
        return cls(
            field,
            tuple(M.rows for M in matrices),
            tuple(M.cols for M in matrices),
            {(i, i): M for i, M in enumerate(matrices)},
        )


def block_assemble(grid: BlockGrid) -> Matrix:
    row_offsets = np.concatenate([[0], np.cumsum(grid.row_sizes, dtype=int)])
    col_offsets = np.concatenate([[0], np.cumsum(grid.col_sizes, dtype=int)])
    data = _new_array(grid.field, int(row_offsets[-1]), int(col_offsets[-1]))
    for (i, j), block in grid.blocks.items():
        if not (0 <= i < len(grid.row_sizes) and 0 <= j < len(grid.col_sizes)):
            raise ShapeError(f"Block position ({i}, {j}) is outside the grid.")
        if block.field != grid.field:
            raise ShapeError(f"Block ({i}, {j}) is over {block.field}, not {grid.field}.")
        if block.shape != (grid.row_sizes[i], grid.col_sizes[j]):
            raise ShapeError(
                f"Block ({i}, {j}) has shape {block.shape}, expected "
                f"{(grid.row_sizes[i], grid.col_sizes[j])}."
            )
        r, c = int(row_offsets[i]), int(col_offsets[j])
        data[r : r + block.rows, c : c + block.cols] = block.data
    return Matrix(grid.field, data)


def block_of(A: Matrix, sizes: Sequence[int], i: int, j: int) -> Matrix:
    """Extract block (i, j) of a square matrix partitioned by sizes on both sides"""
    offsets = np.concatenate([[0], np.cumsum(sizes, dtype=int)])
    return A.block(
        int(offsets[i]), int(offsets[i + 1]), int(offsets[j]), int(offsets[j + 1])
    )


# Batched nonsingularity over prime fields


@lru_cache(maxsize=32)
def _inverse_table(p: int) -> np.ndarray:
    table = np.zeros(p, dtype=np.int64)
    for value in range(1, p):
        table[value] = pow(value, -1, p)
    return table


def nonsingular_mask(field: FieldSpec, stack: np.ndarray) -> np.ndarray:
    """Boolean mask of the nonsingular matrices in a (k, n, n) stack of raw values.

    Runs one Gaussian elimination for the whole stack; only prime fields with an
    int64 representation are batched, other fields fall back to one determinant each.
    """
    k = stack.shape[0]
    if field.dtype is not np.int64:
        return np.array(
            [det_raw(field, stack[i]) != 0 for i in range(k)], dtype=bool
        )
    p = field.p
    M = np.array(stack, dtype=np.int64, copy=True) % p
    n = M.shape[1]
    alive = np.ones(k, dtype=bool)
    batch = np.arange(k)
    table = _inverse_table(p)  # type: ignore
    for c in range(n):
        column = M[:, c:, c] != 0
        alive &= column.any(axis=1)
        pivot_rows = c + np.argmax(column, axis=1)
        top = M[batch, c, :].copy()
        M[batch, c, :] = M[batch, pivot_rows, :]
        M[batch, pivot_rows, :] = top
        inv = table[M[:, c, c]]
        if c + 1 < n:
            factors = (M[:, c + 1 :, c] * inv[:, None]) % p
            M[:, c + 1 :, :] = (
                M[:, c + 1 :, :] - factors[:, :, None] * M[:, c, None, :]
            ) % p
    logger.trace("Tested {k} candidates of size {n}", k=k, n=n)
    return alive
