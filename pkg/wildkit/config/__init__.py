import json as jsonlib
from enum import Enum

from wildkit.config.models import (
    DecisionModel,
    LieAlgebraModel,
    LieIsoModel,
    MatrixModel,
    PairModel,
    RandomSpec,
    ReductionModel,
    SearchBudget,
    SuiteReport,
    WeakWitnessModel,
)


class SchemaTypes(str, Enum):
    matrix = "matrix"
    pair = "pair"
    decision = "decision"
    weak_witness = "weak-witness"
    reduction = "reduction"
    lie_algebra = "lie-algebra"
    lie_iso = "lie-iso"
    suite_report = "suite-report"
    budget = "budget"
    random_spec = "random-spec"


SCHEMA_MODELS = {
    SchemaTypes.matrix: MatrixModel,
    SchemaTypes.pair: PairModel,
    SchemaTypes.decision: DecisionModel,
    SchemaTypes.weak_witness: WeakWitnessModel,
    SchemaTypes.reduction: ReductionModel,
    SchemaTypes.lie_algebra: LieAlgebraModel,
    SchemaTypes.lie_iso: LieIsoModel,
    SchemaTypes.suite_report: SuiteReport,
    SchemaTypes.budget: SearchBudget,
    SchemaTypes.random_spec: RandomSpec,
}


def get_schemas(type: SchemaTypes, json=False):
    schema = SCHEMA_MODELS[type].model_json_schema()
    return jsonlib.dumps(schema, indent=2) if json else schema
