from enum import Enum
from typing import Any, Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from wildkit.exceptions import ShapeError
from wildkit.linalg.field import FieldSpec, scalar_parse
from wildkit.linalg.matrix import Matrix

Entry = Union[int, str]


class BaseConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SearchBudget(BaseConfig):
    """How much work the similarity deciders may spend looking for a witness"""

    exhaustive_limit: int = Field(default=1_000_000, ge=1)
    """Enumerate a span over GF(p) of dimension d completely when p^d is at most this"""

    samples: int = Field(default=64, ge=1)
    """Random elements tried when the span is too large to enumerate"""

    seed: int = 0
    """Seed for the sampling branch, so that every decision is reproducible"""

    grid_limit: int = Field(default=1_000_000, ge=1)
    """Over the rationals, evaluate the determinant on the full grid {0..n}^d when (n+1)^d is at most this"""


class MatrixModel(BaseConfig):
    """The JSON form of a Matrix. Entries are scalar strings ("3", "-2/3")."""

    field: FieldSpec
    rows: int = Field(ge=0)
    cols: int = Field(ge=0)
    entries: List[List[Entry]]

    @model_validator(mode="after")
    def check_shape(self) -> "MatrixModel":
        if len(self.entries) != self.rows or any(
            len(row) != self.cols for row in self.entries
        ):
            raise ShapeError(
                f"Declared shape {self.rows}x{self.cols} does not match the entries."
            )
        return self

    def to_matrix(self) -> Matrix:
        return Matrix.from_rows(
            self.field,
            [[scalar_parse(self.field, str(v)) for v in row] for row in self.entries],
            cols=self.cols,
        )

    @classmethod
    def from_matrix(cls, matrix: Matrix) -> "MatrixModel":
        return cls(
            field=matrix.field,
            rows=matrix.rows,
            cols=matrix.cols,
            entries=matrix.to_rows(),  # type: ignore
        )


class PairModel(BaseConfig):
    """An ordered pair of square matrices: (A, B), (X, Y) or the basis of a space"""

    A: MatrixModel
    B: MatrixModel

    def to_pair(self):
        from wildkit.deciders.similarity import MatrixPair

        return MatrixPair(self.A.to_matrix(), self.B.to_matrix())

    @classmethod
    def from_pair(cls, pair) -> "PairModel":
        return cls(A=MatrixModel.from_matrix(pair.A), B=MatrixModel.from_matrix(pair.B))


class WeakWitnessModel(BaseConfig):
    T: MatrixModel
    """The 2x2 pencil transform [[α, β], [γ, δ]]"""

    S: MatrixModel
    """The similarity applied after the pencil transform"""


class LieWitnessModel(BaseConfig):
    """A space similarity (S, P) with S·A·S⁻¹ = P₀₀A′ + P₁₀B′ and S·B·S⁻¹ = P₀₁A′ + P₁₁B′"""

    S: MatrixModel
    P: MatrixModel


class LieIsoModel(BaseConfig):
    phi: MatrixModel
    """The coordinate matrix of the map, columns are images of x, y, e_1, ..., e_n"""


class DecisionModel(BaseConfig):
    verdict: str
    certificate_kind: str
    witness: Optional[Union[MatrixModel, WeakWitnessModel]] = None
    budget_report: Dict[str, int] = {}
    warnings: List[str] = []

    @classmethod
    def from_decision(cls, decision) -> "DecisionModel":
        witness = decision.witness
        if isinstance(witness, Matrix):
            witness = MatrixModel.from_matrix(witness)
        elif isinstance(witness, tuple):
            T, S = witness
            witness = WeakWitnessModel(
                T=MatrixModel.from_matrix(getattr(T, "matrix", T)),
                S=MatrixModel.from_matrix(S),
            )
        return cls(
            verdict=decision.verdict.value,
            certificate_kind=decision.certificate_kind.value,
            witness=witness,
            budget_report=dict(decision.budget_report),
            warnings=list(decision.warnings),
        )


class ReductionModel(BaseConfig):
    """The output of a reduction together with the invariants checked on it"""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    kind: str
    size: int
    lambda_value: Optional[str] = Field(default=None, alias="lambda")
    pair: PairModel
    provenance: Dict[str, MatrixModel]
    invariants: Dict[str, Union[bool, int, None]] = {}
    warnings: List[str] = []


class StructureConstant(BaseConfig):
    i: int
    j: int
    vector: List[Entry]
    """Coordinates of [b_i, b_j] in the basis (x, y, e_1, ..., e_n)"""


class LieAlgebraModel(BaseConfig):
    dim: int
    field: FieldSpec
    structure: List[StructureConstant]
    """The nonzero structure constants, i < j"""

    space: PairModel
    """The basis (A, B) of the source space V"""


class DerivedModel(BaseConfig):
    dimension: int
    basis: List[List[Entry]]


class RecoveredSimilarityModel(BaseConfig):
    S: MatrixModel
    basis_map: MatrixModel


class SuiteFailure(BaseConfig):
    case: int
    reason: str
    inputs: Dict[str, Any] = {}


class SuiteReport(BaseConfig):
    suite: str
    run: int = Field(ge=0)
    passed: int = Field(ge=0)
    wall_time: float = Field(ge=0.0)
    failures: List[SuiteFailure] = []

    @model_validator(mode="after")
    def check_counts(self) -> "SuiteReport":
        if self.passed > self.run:
            raise ValueError("More cases passed than were run.")
        if bool(self.failures) != (self.passed < self.run):
            raise ValueError("Failures must be listed exactly when some case failed.")
        return self

    @property
    def ok(self) -> bool:
        return self.passed == self.run


class RandomMode(str, Enum):
    arbitrary_pair = "arbitrary-pair"
    commuting_pair = "commuting-pair"
    commuting_space_with_nonsingular = "commuting-space-with-nonsingular"


class RandomSpec(BaseConfig):
    field: FieldSpec
    n: int = Field(ge=0)
    count: int = Field(ge=0)
    seed: int = Field(default=7, ge=0, lt=2**64)
    mode: RandomMode = RandomMode.arbitrary_pair
    height: int = Field(default=3, ge=1)
    """Over the rationals, numerators lie in [-height, height] and denominators in [1, height]"""
