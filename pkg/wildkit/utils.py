import json
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Type, TypeVar

import joblib
from pydantic import BaseModel

ModelT = TypeVar("ModelT", bound=BaseModel)


@contextmanager
def tqdm_joblib_context(tqdm_instance):
    """Context manager to make tqdm compatible with joblib.Parallel

    Runs the parallel jobs using joblib, but displays the nicer tqdm progress bar

    Usage:
        with tqdm_joblib_context(tqdm(desc="my description", total=len(job_list))):
            joblib.Parallel(n_jobs=cpus)(delayed(fn)(item) for item in job_list)
    """

    class ParallelCallback(joblib.parallel.BatchCompletionCallBack):
        def __call__(self, *args, **kwargs):
            tqdm_instance.update(n=self.batch_size)
            return super().__call__(*args, **kwargs)

    old_callback = joblib.parallel.BatchCompletionCallBack
    joblib.parallel.BatchCompletionCallBack = ParallelCallback
    try:
        yield
    finally:
        tqdm_instance.close()
        joblib.parallel.BatchCompletionCallBack = old_callback


def load_json_from_path(path: Path) -> Any:
    with open(path, encoding="utf8") as f:
        return json.load(f)


def load_model_from_path(model: Type[ModelT], path: Path) -> ModelT:
    """Read a JSON file and validate it as the given pydantic model"""
    return model.model_validate(load_json_from_path(path))


def write_json(data: Any, path: Path):
    with open(path, "w", encoding="utf8") as f:
        json.dump(data, f, indent=2, ensure_ascii=False)
        f.write("\n")
