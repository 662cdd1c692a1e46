import json
import sys
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Any, List, Optional, Union

import typer
from loguru import logger
from pydantic import BaseModel, ValidationError
from rich import print
from rich.table import Table

from wildkit.config import SchemaTypes, get_schemas
from wildkit.config.models import (
    DecisionModel,
    DerivedModel,
    LieAlgebraModel,
    LieIsoModel,
    LieWitnessModel,
    MatrixModel,
    PairModel,
    RandomMode,
    RandomSpec,
    RecoveredSimilarityModel,
    ReductionModel,
    SearchBudget,
    SuiteReport,
)
from wildkit.deciders.pencil import (
    PencilTransform,
    TwoDimSpace,
    are_weakly_similar,
    spaces_similar,
)
from wildkit.deciders.similarity import (
    CertificateKind,
    Decision,
    Verdict,
    are_similar,
)
from wildkit.exceptions import InvariantError, WildkitError
from wildkit.generator import gen_random
from wildkit.lie import (
    LieIso,
    derived_subalgebra,
    iso_from_similarity,
    lie_build,
    lie_from_model,
    lie_to_model,
    similarity_from_iso,
    verify_lie_iso,
)
from wildkit.linalg.field import FieldSpec, Scalar, field_from_text, format_raw, scalar_parse
from wildkit.reductions import (
    build_M_pair,
    default_lambda,
    full_reduce,
    gp_invariants,
    gp_reduce,
    weak_invariants,
)
from wildkit.suites import DEFAULT_SEED, SuiteName, run_suite
from wildkit.utils import load_model_from_path, write_json

app = typer.Typer(rich_markup_mode="markdown", no_args_is_help=True)

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_INPUT = 2
EXIT_NO = 3
EXIT_INCONCLUSIVE = 4

VERDICT_EXIT_CODES = {
    Verdict.yes: EXIT_OK,
    Verdict.no: EXIT_NO,
    Verdict.inconclusive: EXIT_INCONCLUSIVE,
}

# loguru starts with a single stderr handler whose id is 0
_sink_id: Optional[int] = 0


def configure_logging(verbose: bool = False):
    """Replace the stderr sink so that successful commands stay quiet"""
    global _sink_id
    if _sink_id is not None:
        try:
            logger.remove(_sink_id)
        except ValueError:
            pass
    _sink_id = logger.add(sys.stderr, level="DEBUG" if verbose else "WARNING")


@app.callback()
def main(
    verbose: bool = typer.Option(
        False, "--verbose", help="Log the deciders' and reductions' progress to stderr."
    ),
):
    """
    ## wildkit: exact reductions between wild matrix problems\

    Reduce matrix pairs to commuting pairs, decide (weak) similarity with a checkable
    witness, and build the Lie algebras whose isomorphism problem is as hard as both.
    """
    configure_logging(verbose)


@contextmanager
def exit_on_error():
    """Map the package's exceptions onto the documented exit codes"""
    try:
        yield
    except InvariantError as e:
        logger.error(f"Internal invariant failed: {e}")
        raise typer.Exit(code=EXIT_INVARIANT)
    except (WildkitError, ValidationError, json.JSONDecodeError) as e:
        logger.error(str(e))
        raise typer.Exit(code=EXIT_INPUT)


def emit(data: Union[BaseModel, List[BaseModel]], out: Optional[Path]):
    if isinstance(data, list):
        payload: Any = [
            item.model_dump(mode="json", by_alias=True, exclude_none=True)
            for item in data
        ]
    else:
        payload = data.model_dump(mode="json", by_alias=True, exclude_none=True)
    if out is None:
        typer.echo(json.dumps(payload, indent=2, ensure_ascii=False))
    else:
        write_json(payload, out)


def parse_lambda(text: str, field: FieldSpec) -> Scalar:
    if text.strip().lower() == "auto":
        return default_lambda(field)
    return scalar_parse(field, text)


def read_budget(path: Optional[Path]) -> SearchBudget:
    return SearchBudget() if path is None else load_model_from_path(SearchBudget, path)


def _required(path: Optional[Path], flag: str) -> Path:
    if path is None:
        logger.error(f"This command needs {flag}.")
        raise typer.Exit(code=EXIT_INPUT)
    return path


InputOption = typer.Option(
    None, "--in", exists=True, dir_okay=False, readable=True, help="Input JSON file."
)
LeftOption = typer.Option(
    None, "--left", exists=True, dir_okay=False, readable=True, help="Left input JSON file."
)
RightOption = typer.Option(
    None, "--right", exists=True, dir_okay=False, readable=True, help="Right input JSON file."
)
OutOption = typer.Option(
    None, "--out", dir_okay=False, help="Write the JSON here instead of to stdout."
)


class ReductionKind(str, Enum):
    gp = "gp"
    weak = "weak"
    full = "full"


@app.command()
def reduce(
    kind: ReductionKind = typer.Argument(
        ..., help="gp: (X, Y) to (J, K_XY); weak: (A, B) to (M1(A), M2(B)); full: both."
    ),
    input_path: Optional[Path] = InputOption,
    lambda_text: str = typer.Option(
        "auto", "--lambda", help="λ for the weak and full reductions, or 'auto'."
    ),
    out: Optional[Path] = OutOption,
):
    """
    ## Reduce a pair of matrices\

    Prints the reduced pair with its provenance and the invariants checked on it
    (commutation, nilpotency, ranks).
    """
    with exit_on_error():
        pair = load_model_from_path(PairModel, _required(input_path, "--in")).to_pair()
        field = pair.field
        if kind == ReductionKind.gp:
            gp = gp_reduce(pair.A, pair.B)
            result = ReductionModel(
                kind=kind.value,
                size=gp.pair.n,
                pair=PairModel.from_pair(gp.pair),
                provenance={
                    "X": MatrixModel.from_matrix(gp.X),
                    "Y": MatrixModel.from_matrix(gp.Y),
                },
                invariants=gp_invariants(gp),
            )
        else:
            lambda_value = parse_lambda(lambda_text, field)
            if kind == ReductionKind.weak:
                wp = build_M_pair(pair.A, pair.B, lambda_value)
                provenance = {"A": wp.A, "B": wp.B}
            else:
                wp = full_reduce(pair.A, pair.B, lambda_value)
                provenance = {"X": pair.A, "Y": pair.B}
            result = ReductionModel(
                kind=kind.value,
                size=wp.size,
                lambda_value=format_raw(field, wp.lambda_value.value),
                pair=PairModel.from_pair(wp.pair),
                provenance={k: MatrixModel.from_matrix(v) for k, v in provenance.items()},
                invariants=weak_invariants(wp),
                warnings=list(wp.warnings),
            )
        if any(v is False for v in result.invariants.values()):
            raise InvariantError(f"A checked invariant failed: {result.invariants}")
        emit(result, out)


class CheckKind(str, Enum):
    similar = "similar"
    weak_similar = "weak-similar"
    space_similar = "space-similar"
    lie_iso = "lie-iso"


@app.command()
def check(
    kind: CheckKind = typer.Argument(..., help="Which equivalence to decide."),
    left: Optional[Path] = LeftOption,
    right: Optional[Path] = RightOption,
    budget: Optional[Path] = typer.Option(
        None, "--budget", exists=True, dir_okay=False, help="A SearchBudget JSON file."
    ),
    transforms: Optional[Path] = typer.Option(
        None,
        "--transforms",
        exists=True,
        dir_okay=False,
        help="A JSON list of 2x2 matrices to try as pencil transforms (weak-similar).",
    ),
    iso: Optional[Path] = typer.Option(
        None, "--iso", exists=True, dir_okay=False, help="A LieIso JSON file (lie-iso)."
    ),
    out: Optional[Path] = OutOption,
):
    """
    ## Decide an equivalence and print the decision with its witness\

    Exit code 0 means yes, 3 means no and 4 means inconclusive.
    """
    with exit_on_error():
        left_path, right_path = _required(left, "--left"), _required(right, "--right")
        if kind == CheckKind.lie_iso:
            L = lie_from_model(load_model_from_path(LieAlgebraModel, left_path))
            L2 = lie_from_model(load_model_from_path(LieAlgebraModel, right_path))
            phi = load_model_from_path(LieIsoModel, _required(iso, "--iso")).phi
            lie_iso = LieIso(phi.to_matrix())
            verified = verify_lie_iso(L, L2, lie_iso)
            decision = Decision(
                Verdict.yes if verified else Verdict.no,
                CertificateKind.exhaustive,
                lie_iso.phi if verified else None,
                {"brackets_checked": L.dim * L.dim},
            )
        else:
            search_budget = read_budget(budget)
            L_pair = load_model_from_path(PairModel, left_path).to_pair()
            R_pair = load_model_from_path(PairModel, right_path).to_pair()
            if kind == CheckKind.similar:
                decision = are_similar(L_pair, R_pair, search_budget)
            elif kind == CheckKind.weak_similar:
                candidates = None
                if transforms is not None:
                    candidates = [
                        PencilTransform(MatrixModel.model_validate(t).to_matrix())
                        for t in json.loads(transforms.read_text(encoding="utf8"))
                    ]
                decision = are_weakly_similar(L_pair, R_pair, search_budget, candidates)
            else:
                decision = spaces_similar(
                    TwoDimSpace(L_pair.A, L_pair.B),
                    TwoDimSpace(R_pair.A, R_pair.B),
                    search_budget,
                )
        emit(DecisionModel.from_decision(decision), out)
    raise typer.Exit(code=VERDICT_EXIT_CODES[decision.verdict])


class LieAction(str, Enum):
    build = "build"
    derived = "derived"
    iso = "iso"
    recover = "recover"


@app.command()
def lie(
    action: LieAction = typer.Argument(
        ...,
        help="build: L(V) from a space; derived: its derived subalgebra; iso: the isomorphism induced by (S, P); recover: (S, P) from an isomorphism.",
    ),
    input_path: Optional[Path] = InputOption,
    left: Optional[Path] = LeftOption,
    right: Optional[Path] = RightOption,
    witness: Optional[Path] = typer.Option(
        None, "--witness", exists=True, dir_okay=False, help="An (S, P) JSON file (iso)."
    ),
    iso: Optional[Path] = typer.Option(
        None, "--iso", exists=True, dir_okay=False, help="A LieIso JSON file (recover)."
    ),
    out: Optional[Path] = OutOption,
):
    """
    ## Work with the Lie algebra L(V) of a two-dimensional commuting space\
    """
    with exit_on_error():
        result: BaseModel
        if action == LieAction.build:
            pair = load_model_from_path(PairModel, _required(input_path, "--in")).to_pair()
            result = lie_to_model(lie_build(TwoDimSpace(pair.A, pair.B)))
        elif action == LieAction.derived:
            L = lie_from_model(
                load_model_from_path(LieAlgebraModel, _required(input_path, "--in"))
            )
            dimension, basis = derived_subalgebra(L)
            result = DerivedModel(
                dimension=dimension,
                basis=[[format_raw(L.field, c.value) for c in b] for b in basis],
            )
        elif action == LieAction.iso:
            V = load_model_from_path(PairModel, _required(left, "--left")).to_pair()
            V2 = load_model_from_path(PairModel, _required(right, "--right")).to_pair()
            sp = load_model_from_path(LieWitnessModel, _required(witness, "--witness"))
            lie_iso = iso_from_similarity(
                TwoDimSpace(V.A, V.B),
                TwoDimSpace(V2.A, V2.B),
                sp.S.to_matrix(),
                sp.P.to_matrix(),
            )
            result = LieIsoModel(phi=MatrixModel.from_matrix(lie_iso.phi))
        else:
            L = lie_from_model(
                load_model_from_path(LieAlgebraModel, _required(left, "--left"))
            )
            L2 = lie_from_model(
                load_model_from_path(LieAlgebraModel, _required(right, "--right"))
            )
            phi = load_model_from_path(LieIsoModel, _required(iso, "--iso")).phi
            S, P = similarity_from_iso(L, L2, LieIso(phi.to_matrix()))
            result = RecoveredSimilarityModel(
                S=MatrixModel.from_matrix(S), basis_map=MatrixModel.from_matrix(P)
            )
        emit(result, out)


@app.command()
def gen(
    field: str = typer.Option("GF(5)", "--field", help="QQ, GF(p) or p."),
    n: int = typer.Option(2, "--n", min=0, help="Matrix size."),
    count: int = typer.Option(1, "--count", min=0, help="Number of instances."),
    seed: int = typer.Option(DEFAULT_SEED, "--seed", min=0, help="Random seed."),
    mode: RandomMode = typer.Option(RandomMode.arbitrary_pair, "--mode"),
    height: int = typer.Option(
        3, "--height", min=1, help="Bound on numerators and denominators over QQ."
    ),
    out: Optional[Path] = OutOption,
):
    """
    ## Generate seeded random pairs or commuting spaces\

    The same flags always produce the same instances.
    """
    with exit_on_error():
        spec = RandomSpec(
            field=field_from_text(field),
            n=n,
            count=count,
            seed=seed,
            mode=mode,
            height=height,
        )
        instances = gen_random(spec)
        emit(
            [
                PairModel.from_pair(
                    instance.pair if isinstance(instance, TwoDimSpace) else instance
                )
                for instance in instances
            ],
            out,
        )


def print_report_table(report: SuiteReport):
    table = Table(title=f"Suite {report.suite}")
    table.add_column("run", justify="right")
    table.add_column("passed", justify="right")
    table.add_column("wall time (s)", justify="right")
    table.add_row(str(report.run), str(report.passed), f"{report.wall_time:.2f}")
    print(table)
    if report.failures:
        failures = Table(title="Failures")
        failures.add_column("case", justify="right")
        failures.add_column("reason")
        for failure in report.failures:
            failures.add_row(str(failure.case), failure.reason)
        print(failures)


@app.command()
def suite(
    name: SuiteName = typer.Argument(..., help="The verification suite to run."),
    count: Optional[int] = typer.Option(
        None, "--count", min=0, help="Number of cases; each suite has its own default."
    ),
    seed: int = typer.Option(DEFAULT_SEED, "--seed", min=0, help="Random seed."),
    jobs: int = typer.Option(1, "--jobs", help="Parallel workers (joblib)."),
    progress: bool = typer.Option(False, "--progress", help="Show a progress bar."),
    table: bool = typer.Option(
        False, "--table", help="Print a table instead of the JSON report."
    ),
    out: Optional[Path] = OutOption,
):
    """
    ## Run a verification suite\

    Exits with 0 when every case passes.
    """
    with exit_on_error():
        report = run_suite(name, count=count, seed=seed, jobs=jobs, progress=progress)
        if table:
            print_report_table(report)
            if out is not None:
                emit(report, out)
        else:
            emit(report, out)
    if not report.ok:
        raise typer.Exit(code=EXIT_INVARIANT)


@app.command(hidden=True)
def schema(
    type: SchemaTypes = typer.Argument(
        default=SchemaTypes.pair,
        help="The SchemaType to return.",
    ),
    output: Path = typer.Argument(
        exists=False,
        file_okay=True,
        dir_okay=False,
        help="The file path to write the JSON schema",
    ),  # type: ignore
):
    """
    ## Export the JSON Schema for wildkit's input and output formats\
    """
    schema = get_schemas(type)
    write_json(schema, output)
    return schema


if __name__ == "__main__":
    app()
