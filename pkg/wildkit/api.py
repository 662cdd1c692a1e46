"""
REST Web API for wildkit using FastAPI.

Every endpoint checks a witness or builds a reduction; none of them runs a search, so
each request costs a few exact matrix products. Spin it up for development with:
    uvicorn wildkit.api:app --reload
Once spun up, the documentation and API playground will be visible at
http://localhost:8000/api/v1/docs
"""

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from wildkit.config import SchemaTypes, get_schemas
from wildkit.config.models import (
    LieAlgebraModel,
    LieIsoModel,
    MatrixModel,
    PairModel,
    ReductionModel,
    WeakWitnessModel,
)
from wildkit.deciders.pencil import PencilTransform, verify_weak
from wildkit.deciders.similarity import verify_similarity
from wildkit.exceptions import InvariantError, WildkitError
from wildkit.lie import LieIso, lie_from_model, verify_lie_iso
from wildkit.reductions import gp_invariants, gp_reduce

app = FastAPI()

v1 = FastAPI()

app.mount("/api/v1", v1)


class SimilarityQuery(BaseModel):
    left: PairModel
    right: PairModel
    witness: MatrixModel


class WeakQuery(BaseModel):
    left: PairModel
    right: PairModel
    witness: WeakWitnessModel


class LieIsoQuery(BaseModel):
    left: LieAlgebraModel
    right: LieAlgebraModel
    iso: LieIsoModel


class Verification(BaseModel):
    verified: bool


@v1.exception_handler(WildkitError)
async def wildkit_error_handler(request, exc: WildkitError):
    status = 500 if isinstance(exc, InvariantError) else 422
    return JSONResponse(status_code=status, content={"detail": str(exc)})


@v1.get("/schema")
async def return_schema(type: SchemaTypes = SchemaTypes.pair):
    return get_schemas(type)


@v1.post("/verify/similarity")
async def verify_similarity_witness(query: SimilarityQuery) -> Verification:
    return Verification(
        verified=verify_similarity(
            query.left.to_pair(), query.right.to_pair(), query.witness.to_matrix()
        )
    )


@v1.post("/verify/weak")
async def verify_weak_witness(query: WeakQuery) -> Verification:
    return Verification(
        verified=verify_weak(
            query.left.to_pair(),
            query.right.to_pair(),
            PencilTransform(query.witness.T.to_matrix()),
            query.witness.S.to_matrix(),
        )
    )


@v1.post("/verify/lie-iso")
async def verify_lie_iso_witness(query: LieIsoQuery) -> Verification:
    return Verification(
        verified=verify_lie_iso(
            lie_from_model(query.left),
            lie_from_model(query.right),
            LieIso(query.iso.phi.to_matrix()),
        )
    )


@v1.post("/reduce/gp")
async def reduce_gp(pair: PairModel) -> ReductionModel:
    gp = gp_reduce(*pair.to_pair())
    invariants = gp_invariants(gp)
    if any(v is False for v in invariants.values()):
        raise HTTPException(status_code=500, detail=f"Invariant failed: {invariants}")
    return ReductionModel(
        kind="gp",
        size=gp.pair.n,
        pair=PairModel.from_pair(gp.pair),
        provenance={
            "X": MatrixModel.from_matrix(gp.X),
            "Y": MatrixModel.from_matrix(gp.Y),
        },
        invariants=invariants,
    )
