"""Q_tree: the share of a reference tree's nodes that a candidate tree reproduces."""

from __future__ import annotations

from dataclasses import dataclass, field

from .tree import DecisionTree, Leaf, Node, TreeNode, count_nodes, iter_nodes


class SchemaMismatch(ValueError):
    pass


@dataclass
class ComparisonReport:
    total: int
    matched: int
    mismatches: list[tuple[tuple[int, ...], str]] = field(default_factory=list)

    @property
    def q(self) -> float:
        return self.matched / self.total

    def to_text(self) -> str:
        lines = [f"B {self.total}", f"B_eq {self.matched}", f"q {self.q:.6f}"]
        for path, reason in self.mismatches:
            where = "/".join(str(i) for i in path) or "root"
            lines.append(f"mismatch {where}: {reason}")
        return "\n".join(lines) + "\n"


def _mismatch_reason(a: TreeNode, b: TreeNode):
    if isinstance(a, Leaf) and isinstance(b, Leaf):
        return None if a.label == b.label else f"leaf label {a.label} != {b.label}"
    if isinstance(a, Leaf) or isinstance(b, Leaf):
        return "leaf vs internal node"
    if a.attr != b.attr:
        return f"attribute {a.attr} != {b.attr}"
    if a.test != b.test:
        return f"test {a.test} != {b.test}"
    if a.threshold != b.threshold:
        return f"threshold {a.threshold!r} != {b.threshold!r}"
    if a.mask != b.mask:
        return f"partition {a.mask} != {b.mask}"
    return None


def node_equal(a: TreeNode, b: TreeNode) -> bool:
    """Same kind, same test and payload; children are not inspected."""
    return _mismatch_reason(a, b) is None


def q_tree(reference: TreeNode, candidate: TreeNode) -> ComparisonReport:
    report = ComparisonReport(count_nodes(reference), 0)

    def walk(a, b, path):
        reason = _mismatch_reason(a, b)
        if reason is not None:
            report.mismatches.append((path, reason))
            return
        report.matched += 1
        if isinstance(a, Node):
            for i, ((ea, ca), (eb, cb)) in enumerate(zip(a.children, b.children)):
                if ea != eb:
                    report.mismatches.append((path + (i,), f"edge {ea!r} != {eb!r}"))
                else:
                    walk(ca, cb, path + (i,))

    walk(reference, candidate, ())
    return report


def compare_trees(reference: DecisionTree, candidate: DecisionTree) -> ComparisonReport:
    if reference.schema.fingerprint() != candidate.schema.fingerprint():
        raise SchemaMismatch("trees were grown on different schemas")
    return q_tree(reference.root, candidate.root)

