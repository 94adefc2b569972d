"""Decision tree growth with a pluggable categorical-partition backend.

Depth convention: the root sits at depth 0 and no node is deeper than
``max_height``, so a tree has at most ``max_height`` edge levels.
"""

from __future__ import annotations

import math
from concurrent.futures import Future, ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from . import dataset as ds
from .criterion import SplitScore, exhaustive_best_partition, objective_table, twoing_rows
from .dataset import Dataset, Schema, SubsetView
from .qaoa import QaoaConfig, calibrate_angles, qaoa_best_partition, ramp_angles
from .qsim import PRNG_NAME

EXHAUSTIVE = "exhaustive"
QAOA = "qaoa"
MULTIWAY = "multiway"
BINARY = "binary"
THRESHOLD = "threshold"

THRESHOLD_EDGES = ("<", ">=")
BINARY_EDGES = ("d1", "d2")


@dataclass(frozen=True)
class GrowParams:
    max_height: int
    backend: str = EXHAUSTIVE
    qaoa: QaoaConfig = field(default_factory=QaoaConfig)
    split_mode: str = MULTIWAY

    def __post_init__(self):
        if self.max_height < 1:
            raise ValueError("max_height must be >= 1")
        if self.backend not in (EXHAUSTIVE, QAOA):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.split_mode not in (MULTIWAY, BINARY):
            raise ValueError(f"unknown split mode {self.split_mode!r}")


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Node:
    attr: int
    test: str
    children: tuple[tuple[str, "TreeNode"], ...]
    threshold: Optional[float] = None
    mask: Optional[int] = None


TreeNode = Union[Leaf, Node]


@dataclass(frozen=True)
class Split:
    attr: int
    score: SplitScore


@dataclass
class DecisionTree:
    root: TreeNode
    schema: Schema
    meta: dict[str, str] = field(default_factory=dict)


def sub_seed(seed: int, path: tuple[int, ...], attr: int) -> np.random.SeedSequence:
    """Seed for one QAOA call, a pure function of its position in the tree."""
    return np.random.SeedSequence(seed, spawn_key=(len(path), *path, attr))


def stop_criterion(view: SubsetView, depth: int, params: GrowParams) -> bool:
    if len(view) == 0 or depth >= params.max_height:
        return True
    y = view.y
    return bool((y == y[0]).all())


def process_categorical(view: SubsetView, attr: int, params: GrowParams, path=()) -> SplitScore:
    table = ds.contingency(view, attr)
    # one populated value: every partition leaves a side empty and scores 0
    if np.count_nonzero(table.value_totals) < 2:
        return SplitScore(0.0)
    if params.backend == EXHAUSTIVE:
        return exhaustive_best_partition(table)
    cfg = params.qaoa
    if cfg.angles is None:
        raise ValueError("QAOA backend needs calibrated angles; use grow_tree")
    return qaoa_best_partition(table, cfg.angles, cfg, seed=sub_seed(cfg.seed, tuple(path), attr))


def process_real(view: SubsetView, attr: int) -> SplitScore:
    """Best midpoint threshold by one sorted sweep; smallest threshold on ties."""
    values = view.column(attr)
    if len(values) < 2:
        return SplitScore(0.0)
    order = np.argsort(values, kind="stable")
    xs = values[order]
    ys = view.y[order]
    cuts = np.flatnonzero(xs[:-1] != xs[1:])
    if len(cuts) == 0:
        return SplitScore(0.0)
    m = view.dataset.n_classes
    below = np.cumsum(np.eye(m, dtype=np.int64)[ys], axis=0)[cuts]
    above = np.bincount(ys, minlength=m) - below
    scores = twoing_rows(below, above)
    lo, hi = xs[cuts], xs[cuts + 1]
    mid = (lo + hi) / 2
    thresholds = np.where(mid > lo, mid, hi)
    best = int(np.argmax(scores))
    return SplitScore(float(scores[best]), threshold=float(thresholds[best]))


def split_criterion(attr: int, view: SubsetView, params: GrowParams, path=()) -> SplitScore:
    if view.dataset.attributes[attr].is_categorical:
        return process_categorical(view, attr, params, path)
    return process_real(view, attr)


def choose_split(view: SubsetView, params: GrowParams, path=()) -> Optional[Split]:
    best = None
    best_value = 0.0
    for attr in range(len(view.dataset.attributes)):
        score = split_criterion(attr, view, params, path)
        if score.value > best_value:
            best, best_value = Split(attr, score), score.value
    return best


def _children_views(view: SubsetView, split: Split, params: GrowParams):
    a = view.dataset.attributes[split.attr]
    if not a.is_categorical:
        return THRESHOLD, THRESHOLD_EDGES, ds.subset_by_threshold(view, split.attr, split.score.threshold)
    if params.split_mode == MULTIWAY:
        return MULTIWAY, a.categories, ds.split_by_category(view, split.attr)
    mask = split.score.partition.mask
    return BINARY, BINARY_EDGES, ds.subset_by_mask(view, split.attr, mask)


def tree_growing(
    view: SubsetView,
    depth: int,
    parent_majority: int,
    params: GrowParams,
    path: tuple[int, ...] = (),
    _pool=None,
    _pool_depth: int = 0,
) -> TreeNode:
    majority = ds.majority_class(view) if len(view) else parent_majority
    if stop_criterion(view, depth, params):
        return Leaf(majority)
    split = choose_split(view, params, path)
    if split is None:
        return Leaf(majority)
    test, edges, subviews = _children_views(view, split, params)
    children = []
    for i, (edge, sub) in enumerate(zip(edges, subviews)):
        child_path = path + (i,)
        if _pool is not None and depth + 1 >= _pool_depth:
            child = _pool.submit(_grow_in_worker, sub.indices, depth + 1, majority, params, child_path)
        else:
            child = tree_growing(sub, depth + 1, majority, params, child_path, _pool, _pool_depth)
        children.append((edge, child))
    return Node(
        split.attr,
        test,
        tuple(children),
        threshold=split.score.threshold if test == THRESHOLD else None,
        mask=split.score.partition.mask if test == BINARY else None,
    )


_WORKER_DATASET: Optional[Dataset] = None


def _init_worker(dataset: Dataset):
    global _WORKER_DATASET
    _WORKER_DATASET = dataset


def _grow_in_worker(indices, depth, parent_majority, params, path):
    view = SubsetView(_WORKER_DATASET, indices)
    return tree_growing(view, depth, parent_majority, params, path)


def _resolve(node) -> TreeNode:
    if isinstance(node, Future):
        return node.result()
    if isinstance(node, Leaf):
        return node
    return replace(node, children=tuple((e, _resolve(c)) for e, c in node.children))


def calibration_angles(dataset: Dataset, config: QaoaConfig):
    """Angles fixed once before growth, from the root objective of the first
    categorical attribute with at least two values."""
    if config.angles is not None:
        return config.angles
    view = ds.full_view(dataset)
    for attr, a in enumerate(dataset.attributes):
        if a.is_categorical and a.size >= 2:
            return calibrate_angles(objective_table(ds.contingency(view, attr)), config)
    return ramp_angles(math.pi, math.pi / 2, config.p)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def grow_tree(dataset: Dataset, params: GrowParams, jobs: int = 1, pool_depth: int = 2) -> DecisionTree:
    meta = {
        "backend": params.backend,
        "split_mode": params.split_mode,
        "max_height": str(params.max_height),
    }
    if params.backend == QAOA:
        angles = calibration_angles(dataset, params.qaoa)
        params = replace(params, qaoa=replace(params.qaoa, angles=angles))
        cfg = params.qaoa
        meta.update({
            "qaoa.p": str(cfg.p),
            "qaoa.shots": str(cfg.shots),
            "qaoa.seed": str(cfg.seed),
            "qaoa.grid": str(cfg.grid),
            "qaoa.gammas": ",".join(_fmt(g) for g in angles.gammas),
            "qaoa.betas": ",".join(_fmt(b) for b in angles.betas),
            "qaoa.prng": PRNG_NAME,
        })
    view = ds.full_view(dataset)
    root_majority = ds.majority_class(view)
    if jobs <= 1:
        root = tree_growing(view, 0, root_majority, params)
    else:
        with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(dataset,)) as pool:
            root = _resolve(tree_growing(view, 0, root_majority, params, (), pool, pool_depth))
    return DecisionTree(root, dataset.schema, meta)


def predict(root: TreeNode, row) -> int:
    """Class index for one row of cells (category indices or floats)."""
    node = root
    while isinstance(node, Node):
        cell = row[node.attr]
        if node.test == MULTIWAY:
            branch = int(cell)
        elif node.test == THRESHOLD:
            branch = 0 if cell < node.threshold else 1
        else:
            branch = 0 if node.mask >> int(cell) & 1 else 1
        node = node.children[branch][1]
    return node.label


def iter_nodes(root: TreeNode, path=()):
    """Pre-order (path, node) pairs; a path lists child positions from the root."""
    yield path, root
    if isinstance(root, Node):
        for i, (_, child) in enumerate(root.children):
            yield from iter_nodes(child, path + (i,))


def count_nodes(root: TreeNode) -> int:
    return sum(1 for _ in iter_nodes(root))


def height(root: TreeNode) -> int:
    return max(len(p) for p, _ in iter_nodes(root))


# -- text format ------------------------------------------------------------

MAGIC = "qdtree-tree 1"


class TreeFormatError(ValueError):
    pass


def serialize(tree: DecisionTree) -> str:
    schema = tree.schema
    lines = [MAGIC]
    for key in sorted(tree.meta):
        lines.append(f"meta {key} {tree.meta[key]}")
    lines.extend("schema " + s for s in schema.to_text().splitlines())
    for node_id, (_, node) in enumerate(iter_nodes(tree.root)):
        if isinstance(node, Leaf):
            fields = ["leaf", "-", "-", "-", schema.class_labels[node.label]]
        else:
            a = schema.attributes[node.attr]
            if node.test == THRESHOLD:
                payload = _fmt(node.threshold)
            elif node.test == BINARY:
                payload = ",".join(a.categories[v] for v in range(a.size) if node.mask >> v & 1)
            else:
                payload = "-"
            fields = [node.test, a.name, payload, ",".join(e for e, _ in node.children), "-"]
        lines.append("\t".join([f"node {node_id}"] + fields))
    return "\n".join(lines) + "\n"


def deserialize(text: str) -> DecisionTree:
    lines = text.splitlines()
    if not lines or lines[0] != MAGIC:
        raise TreeFormatError("line 1: missing tree header")
    meta: dict[str, str] = {}
    schema_lines: list[str] = []
    records: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line.startswith("meta "):
            parts = line.split(" ", 2)
            if len(parts) != 3:
                raise TreeFormatError(f"line {lineno}: malformed meta record")
            meta[parts[1]] = parts[2]
        elif line.startswith("schema "):
            schema_lines.append(line[len("schema "):])
        elif line.startswith("node "):
            fields = line.split("\t")
            if len(fields) != 6:
                raise TreeFormatError(f"line {lineno}: node record needs 6 tab-separated fields")
            records.append((lineno, fields))
        elif line.strip():
            raise TreeFormatError(f"line {lineno}: unrecognised record")
    try:
        schema = ds.parse_schema("\n".join(schema_lines))
    except ds.SchemaError as exc:
        raise TreeFormatError(f"embedded schema: {exc}") from None
    if not records:
        raise TreeFormatError("no node records")

    pos = 0

    def build() -> TreeNode:
        nonlocal pos
        if pos >= len(records):
            raise TreeFormatError("truncated node list")
        lineno, (head, kind, attr_name, payload, edges, label) = records[pos]
        if head != f"node {pos}":
            raise TreeFormatError(f"line {lineno}: expected node {pos}")
        pos += 1
        if kind not in ("leaf", MULTIWAY, BINARY, THRESHOLD):
            raise TreeFormatError(f"line {lineno}: unknown node kind {kind!r}")
        if kind == "leaf":
            if label not in schema.class_labels:
                raise TreeFormatError(f"line {lineno}: unknown class label {label!r}")
            return Leaf(schema.class_labels.index(label))
        try:
            attr = schema.attribute_index(attr_name)
        except KeyError:
            raise TreeFormatError(f"line {lineno}: unknown attribute {attr_name!r}") from None
        a = schema.attributes[attr]
        if a.is_categorical == (kind == THRESHOLD):
            raise TreeFormatError(f"line {lineno}: {kind} test on {a.kind} attribute {attr_name!r}")
        edge_list = tuple(edges.split(","))
        threshold = mask = None
        if kind == THRESHOLD:
            try:
                threshold = float(payload)
            except ValueError:
                raise TreeFormatError(f"line {lineno}: bad threshold {payload!r}") from None
            expected = THRESHOLD_EDGES
        elif kind == BINARY:
            side = payload.split(",")
            unknown = [lab for lab in side if lab not in a.categories]
            if unknown:
                raise TreeFormatError(f"line {lineno}: unknown category {unknown[0]!r}")
            mask = sum(1 << a.categories.index(lab) for lab in side)
            expected = BINARY_EDGES
        else:
            expected = a.categories
        if edge_list != tuple(expected):
            raise TreeFormatError(f"line {lineno}: edge labels do not match the test")
        children = tuple((e, build()) for e in edge_list)
        return Node(attr, kind, children, threshold=threshold, mask=mask)

    root = build()
    if pos != len(records):
        raise TreeFormatError(f"line {records[pos][0]}: trailing node records")
    return DecisionTree(root, schema, meta)
