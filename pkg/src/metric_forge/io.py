"""File formats: CSV matrices, graph files, flow instances, HST text.

Matrix CSV is n rows of n comma-separated decimals with no header. Graph
files start with "n m" and continue with m lines "u v length capacity"
(1-indexed vertices; capacity optional, default 1.0). A flow instance file
is a graph file followed by a line "k" and k lines "s t demand". All float
fields are written with repr-level precision so files round-trip exactly.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Union

import numpy as np

from .core import PointSet, WeightedGraph
from .errors import MalformedInput
from .flowcut import FlowInstance
from .hst import HstNode, HstTree

PathLike = Union[str, Path]


def write_matrix_csv(path: PathLike, matrix: np.ndarray) -> None:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise MalformedInput("matrix CSV requires a 2-d array")
    lines = [",".join(repr(float(v)) for v in row) for row in m]
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_csv(path: PathLike) -> np.ndarray:
    rows = []
    for ln, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            rows.append([float(tok) for tok in line.split(",")])
        except ValueError as exc:
            raise MalformedInput(f"line {ln}: {exc}") from exc
    if not rows:
        raise MalformedInput("empty matrix file")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise MalformedInput("ragged matrix rows")
    return np.array(rows, dtype=float)


write_metric_csv = write_matrix_csv
read_metric_csv = read_matrix_csv


def write_pointset_csv(path: PathLike, pts: PointSet) -> None:
    write_matrix_csv(path, pts.coords)


def read_pointset_csv(path: PathLike) -> PointSet:
    return PointSet.build(read_matrix_csv(path))


def write_graph_file(path: PathLike, g: WeightedGraph) -> None:
    lines = [f"{g.n} {g.m}"]
    for u, v, length, cap in g.edges:
        lines.append(f"{u + 1} {v + 1} {repr(float(length))} {repr(float(cap))}")
    Path(path).write_text("\n".join(lines) + "\n")


def _parse_graph_lines(lines: list[str], start: int) -> tuple[WeightedGraph, int]:
    header = lines[start].split()
    if len(header) != 2:
        raise MalformedInput(f"line {start + 1}: expected 'n m'")
    n, m = int(header[0]), int(header[1])
    edges = []
    for i in range(m):
        toks = lines[start + 1 + i].split()
        if len(toks) not in (3, 4):
            raise MalformedInput(
                f"line {start + 2 + i}: expected 'u v length [capacity]'"
            )
        u, v = int(toks[0]) - 1, int(toks[1]) - 1
        length = float(toks[2])
        cap = float(toks[3]) if len(toks) == 4 else 1.0
        edges.append((u, v, length, cap))
    return WeightedGraph.build(n, edges), start + 1 + m


def read_graph_file(path: PathLike) -> WeightedGraph:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise MalformedInput("empty graph file")
    g, consumed = _parse_graph_lines(lines, 0)
    if consumed != len(lines):
        raise MalformedInput("trailing content after the edge list")
    return g


def write_instance_file(path: PathLike, inst: FlowInstance) -> None:
    g = inst.graph
    lines = [f"{g.n} {g.m}"]
    for u, v, length, cap in g.edges:
        lines.append(f"{u + 1} {v + 1} {repr(float(length))} {repr(float(cap))}")
    lines.append(str(inst.k))
    for s, t, d in inst.commodities:
        lines.append(f"{s + 1} {t + 1} {repr(float(d))}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_instance_file(path: PathLike) -> FlowInstance:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise MalformedInput("empty instance file")
    g, pos = _parse_graph_lines(lines, 0)
    if pos >= len(lines):
        raise MalformedInput("missing commodity count")
    k = int(lines[pos])
    commodities = []
    for i in range(k):
        toks = lines[pos + 1 + i].split()
        if len(toks) != 3:
            raise MalformedInput(f"line {pos + 2 + i}: expected 's t demand'")
        commodities.append((int(toks[0]) - 1, int(toks[1]) - 1, float(toks[2])))
    return FlowInstance.build(g, commodities)


# -- HST text ------------------------------------------------------------------

def hst_to_text(tree: HstTree) -> str:
    """Parenthesized tree with per-level edge lengths plus the leaf order.

    Internal node: (<edge length to children> child child ...); leaf: L<point>.
    """

    def render(node: HstNode) -> str:
        if node.is_leaf:
            return f"L{node.point}"
        edge = tree.base_diameter * tree.length_scale * float(tree.edge_coefficient(node.depth))
        inner = " ".join(render(c) for c in node.children)
        return f"({repr(edge)} {inner})"

    leaf_order = ",".join(str(p) for p in tree.leaf_points())
    return (
        f"base {repr(tree.base_diameter * tree.length_scale)}\n"
        f"{render(tree.root)}\n"
        f"leaves {leaf_order}\n"
    )


def hst_from_text(text: str) -> HstTree:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 3 or not lines[0].startswith("base ") or not lines[2].startswith("leaves "):
        raise MalformedInput("HST text needs base, tree, and leaves lines")
    base = float(lines[0].split(maxsplit=1)[1])
    tokens = lines[1].replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def parse(depth: int) -> HstNode:
        nonlocal pos
        tok = tokens[pos]
        if tok == "(":
            pos += 1
            _edge = float(tokens[pos])  # implied by depth; kept for readability
            pos += 1
            children = []
            while tokens[pos] != ")":
                children.append(parse(depth + 1))
            pos += 1
            return HstNode(depth=depth, children=tuple(children))
        if tok.startswith("L"):
            pos += 1
            return HstNode(depth=depth, point=int(tok[1:]))
        raise MalformedInput(f"unexpected token {tok!r}")

    root = parse(0)
    if pos != len(tokens):
        raise MalformedInput("trailing tokens in HST text")
    leaves = [int(t) for t in lines[2].split(maxsplit=1)[1].split(",")]
    n = len(leaves)
    tree = HstTree(root, n, base)
    if tree.leaf_points() != leaves:
        raise MalformedInput("leaf order does not match the tree")
    return tree


def write_hst_file(path: PathLike, tree: HstTree) -> None:
    Path(path).write_text(hst_to_text(tree))


def read_hst_file(path: PathLike) -> HstTree:
    return hst_from_text(Path(path).read_text())
