"""Graphviz DOT text for the epsilon-graph, thick-point categories, tower cones
and bundles.

Render with, for example:

    fluidcat bundle --input l5.json --epsilon 1.5 --levels 1 --format dot > b.gv
    dot -Tpng -O b.gv
"""

from __future__ import annotations

from collections.abc import Sequence

from .bundles import TowerBundle
from .delta import ThickCategory
from .info_space import InfoSpace, eps_graph, order
from .reports import base_object_id
from .towers import Tower


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _lines(kind: str, name: str, body: list[str]) -> str:
    return "\n".join([f"{kind} {_quote(name)} {{", *body, "}"]) + "\n"


def eps_graph_dot(space: InfoSpace, epsilon: float) -> str:
    graph = eps_graph(space, epsilon)
    body = ["\tnode [shape=circle];"]
    body.extend(f"\t{_quote(atom)};" for atom in space.atoms)
    for a, b in sorted(graph.edges, key=lambda edge: tuple(sorted(space.require(x) for x in edge))):
        left, right = order(space, (a, b))
        body.append(f'\t{_quote(left)} -- {_quote(right)} [label="{space.dist(left, right):g}"];')
    return _lines("graph", f"eps={epsilon:g}", body)


def thick_category_dot(space: InfoSpace, thick: ThickCategory) -> str:
    """One box per thick point; the codiscrete arrows are left implicit and
    drawn as a single undirected edge per pair."""
    body = ["\tnode [shape=box];"]
    for tp in thick.points:
        label = tp.ident + " {" + ",".join(order(space, tp.members)) + "}"
        body.append(f"\t{_quote(tp.ident)} [label={_quote(label)}];")
    for i, tp in enumerate(thick.points):
        for other in thick.points[i + 1 :]:
            body.append(f"\t{_quote(tp.ident)} -> {_quote(other.ident)} [dir=both];")
    return _lines("digraph", f"level {thick.level}", body)


def towers_dot(space: InfoSpace, towers: Sequence[Tower]) -> str:
    """Each tower as a cone: its sections stacked bottom-up inside a cluster."""
    body = ["\trankdir=BT;", "\tnode [shape=box];"]
    for t, tower in enumerate(towers):
        feet = ",".join(foot.ident for foot in tower.feet)
        body.append(f"\tsubgraph {_quote(f'cluster_{t}')} {{")
        body.append(f"\t\tlabel={_quote(feet)};")
        for k, section in enumerate(tower.sections):
            members = ",".join(order(space, section.members))
            body.append(f"\t\t{_quote(f'T{t}.{k}')} [label={_quote(f'{k}: {{{members}}}')}];")
        for k in range(len(tower.sections) - 1):
            body.append(f"\t\t{_quote(f'T{t}.{k}')} -> {_quote(f'T{t}.{k + 1}')};")
        body.append("\t}")
    return _lines("digraph", "towers", body)


def bundle_dot(bundle: TowerBundle) -> str:
    """Fibers drawn above their base objects; projections are dashed."""
    elements = bundle.elements
    body = ["\trankdir=BT;"]
    tower_ids: dict[Tower, str] = {}
    for c in bundle.base.objects:
        base_id = base_object_id(c)
        body.append(f"\t{_quote(base_id)} [shape=ellipse];")
        for _, tower in elements.fiber(c):
            tower_ids.setdefault(tower, f"T{len(tower_ids)}")
    for c in bundle.base.objects:
        base_id = base_object_id(c)
        body.append(f"\tsubgraph {_quote('cluster_' + base_id)} {{")
        for obj in elements.fiber(c):
            node = f"{base_id}/{tower_ids[obj[1]]}"
            body.append(f"\t\t{_quote(node)} [shape=box, label={_quote(tower_ids[obj[1]])}];")
        body.append("\t}")
        for obj in elements.fiber(c):
            node = f"{base_id}/{tower_ids[obj[1]]}"
            body.append(f"\t{_quote(node)} -> {_quote(base_id)} [style=dashed];")
    for f in bundle.base.morphisms:
        if f.src != f.dst:
            body.append(f"\t{_quote(base_object_id(f.src))} -> {_quote(base_object_id(f.dst))};")
    return _lines("digraph", f"bundle p={bundle.level} q={bundle.arity}", body)
