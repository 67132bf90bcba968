"""Implication diagrams between a relation and its operator images.

Takes one base relation, builds the eight standard derived relations
(R, m(R), M(R), c(R), star(R), star(m(R)), star(M(R)), c(m(R))),
merges expressions with equal tables into one node, computes the
implication order between the merged nodes and emits its transitive
reduction as a DOT digraph.  Node order and therefore output bytes are
deterministic.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from .operators import apply_expr
from .relations import TernaryRelation, implies
from .sites import CapExceeded

DIAGRAM_EXPRESSIONS = (
    "R", "m(R)", "M(R)", "c(R)", "star(R)", "star(m(R))", "star(M(R))",
    "c(m(R))",
)

DIAGRAM_GROUND_CAP = 4


def diagram_nodes(rel: TernaryRelation):
    """Merged nodes: list of (expressions, relation), deterministic order."""
    if rel.site.n > DIAGRAM_GROUND_CAP:
        raise CapExceeded(
            f"diagram needs materialized tables; capped at n={DIAGRAM_GROUND_CAP}"
        )
    cache: Dict = {}
    by_table: Dict[bytes, List[str]] = {}
    tables: Dict[bytes, TernaryRelation] = {}
    for expr in DIAGRAM_EXPRESSIONS:
        out = apply_expr(expr, rel, cache=cache)
        key = out.table_bytes()
        by_table.setdefault(key, []).append(expr)
        tables.setdefault(key, out)
    nodes = []
    seen = set()
    for expr in DIAGRAM_EXPRESSIONS:
        for key, exprs in by_table.items():
            if expr == exprs[0] and key not in seen:
                seen.add(key)
                nodes.append((exprs, tables[key]))
    return nodes


def diagram_edges(nodes) -> List[Tuple[int, int]]:
    """Transitively reduced implication edges between merged nodes."""
    k = len(nodes)
    strict = [[False] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            if i != j and implies(nodes[i][1], nodes[j][1]).holds:
                strict[i][j] = True
    edges = []
    for i in range(k):
        for j in range(k):
            if not strict[i][j]:
                continue
            if any(strict[i][w] and strict[w][j] for w in range(k)
                   if w not in (i, j)):
                continue  # factored through an intermediate node
            edges.append((i, j))
    return edges


def diagram_dot(rel: TernaryRelation) -> str:
    """DOT text; an edge points from the stronger relation to the weaker."""
    nodes = diagram_nodes(rel)
    edges = diagram_edges(nodes)
    lines = ["digraph implications {"]
    for idx, (exprs, _) in enumerate(nodes):
        label = " = ".join(exprs)
        lines.append(f'  n{idx} [label="{label}"];')
    for i, j in edges:
        lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
