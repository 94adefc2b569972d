"""Classical-versus-QAOA tree equality experiments."""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

from .compare import compare_trees
from .dataset import load_csv, load_schema
from .qaoa import QaoaConfig
from .tree import EXHAUSTIVE, MULTIWAY, QAOA, GrowParams, count_nodes, grow_tree, serialize

log = logging.getLogger(__name__)

DATA_DIR_ENV = "QDTREE_DATA"


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    data: Path
    schema: Path
    heights: tuple[int, ...]
    qaoa: QaoaConfig = field(default_factory=QaoaConfig)

    def __post_init__(self):
        if not self.heights:
            raise ValueError("an experiment needs at least one height")


@dataclass
class ExperimentRow:
    height: int
    q: Optional[float] = None
    classical_nodes: Optional[int] = None
    quantum_nodes: Optional[int] = None
    seconds: float = 0.0
    error: Optional[str] = None


# data file name and height list for each dataset of the original study
BUILTIN = {
    "car": ("car.data", (3, 5, 7)),
    "nursery": ("nursery.data", (3, 5, 7, 10)),
    "abalone": ("abalone.data", (3, 5, 7, 10)),
    "connect-4": ("connect-4.data", (3, 5, 7, 10, 15)),
}


def bundled_schema(name: str) -> Path:
    return Path(str(resources.files("qdtree") / "schemas" / f"{name}.schema"))


def default_data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, "data"))


def resolve_spec(name_or_file: str, data_dir: Optional[Path] = None) -> ExperimentSpec:
    """A builtin experiment name, or a JSON file with keys
    ``name, data, schema, heights`` and optionally ``p, shots, seed, grid``."""
    data_dir = Path(data_dir) if data_dir is not None else default_data_dir()
    if name_or_file in BUILTIN:
        filename, heights = BUILTIN[name_or_file]
        return ExperimentSpec(name_or_file, data_dir / filename, bundled_schema(name_or_file), heights)
    path = Path(name_or_file)
    raw = json.loads(path.read_text(encoding="utf-8"))
    base = path.parent
    qaoa = QaoaConfig(**{k: raw[k] for k in ("p", "shots", "seed", "grid") if k in raw})
    return ExperimentSpec(
        raw["name"],
        base / raw["data"],
        base / raw["schema"],
        tuple(int(h) for h in raw["heights"]),
        qaoa,
    )


def run_experiment(spec: ExperimentSpec, out_dir: Optional[Path] = None, jobs: int = 1) -> list[ExperimentRow]:
    """Grow an exhaustive and a QAOA tree per height and compare them.

    A failure at one height is recorded in its row and the run moves on.
    """
    rows = []
    try:
        dataset = load_csv(spec.data, load_schema(spec.schema))
    except (OSError, ValueError) as exc:
        return [ExperimentRow(h, error=f"load failed: {exc}") for h in spec.heights]
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    for h in spec.heights:
        row = ExperimentRow(h)
        start = time.perf_counter()
        try:
            classical = grow_tree(dataset, GrowParams(h, EXHAUSTIVE, spec.qaoa, MULTIWAY), jobs=jobs)
            quantum = grow_tree(dataset, GrowParams(h, QAOA, spec.qaoa, MULTIWAY), jobs=jobs)
            report = compare_trees(classical, quantum)
            row.q = report.q
            row.classical_nodes = report.total
            row.quantum_nodes = count_nodes(quantum.root)
            if out_dir is not None:
                for tag, t in (("exhaustive", classical), ("qaoa", quantum)):
                    (out_dir / f"{spec.name}_h{h}_{tag}.tree").write_text(serialize(t), encoding="utf-8")
        except Exception as exc:  # noqa: BLE001 - one bad row must not end the run
            log.exception("height %d failed", h)
            row.error = str(exc)
        row.seconds = time.perf_counter() - start
        rows.append(row)
    return rows


def format_table(name: str, rows: list[ExperimentRow]) -> str:
    out = [f"experiment {name}", f"{'h':>4}  {'Q_tree':>8}  {'B_classic':>9}  {'B_qaoa':>7}  {'seconds':>8}"]
    for r in rows:
        if r.error is not None:
            out.append(f"{r.height:>4}  FAILED: {r.error}")
        else:
            out.append(
                f"{r.height:>4}  {r.q:>8.6f}  {r.classical_nodes:>9}  {r.quantum_nodes:>7}  {r.seconds:>8.2f}"
            )
    return "\n".join(out) + "\n"


def format_csv(name: str, rows: list[ExperimentRow]) -> str:
    out = ["dataset,h,q,classical_nodes,qaoa_nodes,seconds,error"]
    for r in rows:
        q = "" if r.q is None else f"{r.q:.6f}"
        out.append(
            f"{name},{r.height},{q},{r.classical_nodes or ''},{r.quantum_nodes or ''},"
            f"{r.seconds:.3f},{(r.error or '').replace(',', ';')}"
        )
    return "\n".join(out) + "\n"


def with_overrides(spec: ExperimentSpec, heights=None, **qaoa) -> ExperimentSpec:
    qaoa = {k: v for k, v in qaoa.items() if v is not None}
    return replace(
        spec,
        heights=tuple(heights) if heights else spec.heights,
        qaoa=replace(spec.qaoa, **qaoa),
    )
