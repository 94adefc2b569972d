import os
from pathlib import Path

import numpy as np
import pytest

from qdtree.dataset import Dataset, load_csv, load_schema, parse_schema
from qdtree.experiment import DATA_DIR_ENV

HERE = Path(__file__).parent
REPO = HERE.parent
TOY_SCHEMA = HERE / "data" / "toy.schema"
TOY_DATA = HERE / "data" / "toy.data"


def data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, REPO / "data"))


@pytest.fixture
def toy():
    return load_csv(TOY_DATA, load_schema(TOY_SCHEMA))


@pytest.fixture(scope="session")
def car():
    from qdtree.experiment import bundled_schema

    return load_csv(data_dir() / "car.data", load_schema(bundled_schema("car")))


def random_dataset(rng, n_rows, sizes, n_classes, n_real=0):
    """Random categorical (and optionally real) dataset with the given domain sizes."""
    lines = [f"attribute c{i} categorical " + " ".join(f"v{k}" for k in range(t)) for i, t in enumerate(sizes)]
    lines += [f"attribute r{i} real" for i in range(n_real)]
    lines.append("class y " + " ".join(f"k{k}" for k in range(n_classes)))
    schema = parse_schema("\n".join(lines))
    cols = [rng.integers(0, t, n_rows).astype(np.int32) for t in sizes]
    cols += [rng.integers(0, 5, n_rows).astype(np.float64) / 2 for _ in range(n_real)]
    y = rng.integers(0, n_classes, n_rows).astype(np.int32)
    return Dataset(schema, tuple(cols), y)


_ACCEPTANCE: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::", 1)[1]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _ACCEPTANCE.append((name, report.outcome.upper()))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{outcome:<7} {name}")
