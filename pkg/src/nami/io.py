"""JSON and DOT serialization, plus the human-readable elimination trace."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .discrete import DiscreteBN, Factor
from .elimination import CliqueTree, MarkedGraph
from .errors import FactorError, GraphError
from .graph import BayesNet, Edge, moral_edges
from .inversion import InverseStructure, MODES

EN_DASH = "–"


def bn_to_json(bn: BayesNet) -> dict:
    return {
        "variables": [{"name": n, "observed": bn.is_observed(v)} for v, n in enumerate(bn.names)],
        "edges": [[bn.names[u], bn.names[v]] for u, v in bn.edges()],
    }


def bn_from_json(data: dict) -> BayesNet:
    try:
        variables = data["variables"]
        names = [str(v["name"]) for v in variables]
        observed = [str(v["name"]) for v in variables if v.get("observed", False)]
        edges = [(str(a), str(b)) for a, b in data.get("edges", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphError(f"malformed BN JSON: {exc}") from exc
    return BayesNet.from_edges(names, edges, observed)


def inverse_to_json(h: InverseStructure) -> dict:
    out = bn_to_json(h.graph)
    out["mode"] = h.mode
    out["elim_order"] = [h.names[v] for v in h.elim_order]
    out["models_observed"] = h.models_observed
    if h.groups is not None:
        out["groups"] = [[h.names[v] for v in g] for g in h.groups]
    return out


def inverse_from_json(data: dict) -> InverseStructure:
    """Load an inverse; a bare BN document is read as a fully specified custom inverse."""
    graph = bn_from_json(data)
    mode = data.get("mode", "custom")
    if mode not in MODES:
        raise GraphError(f"unknown inverse mode {mode!r}")
    order = tuple(graph.index(n) for n in data.get("elim_order", []))
    groups = data.get("groups")
    if groups is not None:
        groups = tuple(tuple(sorted(graph.index(n) for n in g)) for g in groups)
    models_observed = bool(data.get("models_observed", "mode" not in data))
    return InverseStructure(graph, mode, order, (), models_observed, groups)


def discrete_to_json(bn: DiscreteBN) -> dict:
    out = bn_to_json(bn.structure)
    names = bn.structure.names
    out["cpds"] = {
        names[v]: {
            "parents": [names[p] for p in bn.structure.parents[v]],
            "card": f.cards[-1],
            "table": f.values.ravel().tolist(),
        }
        for v, f in enumerate(bn.cpds)
    }
    return out


def discrete_from_json(data: dict) -> DiscreteBN:
    structure = bn_from_json(data)
    cpd_data = data.get("cpds")
    if not isinstance(cpd_data, dict):
        raise FactorError("model has no \"cpds\" section")
    cards = {}
    for v, name in enumerate(structure.names):
        if name not in cpd_data:
            raise FactorError(f"missing CPD for {name!r}")
        cards[v] = int(cpd_data[name]["card"])
    cpds = []
    for v, name in enumerate(structure.names):
        entry = cpd_data[name]
        pa = tuple(structure.index(p) for p in entry.get("parents", []))
        if set(pa) != set(structure.parents[v]):
            raise FactorError(f"CPD parents of {name!r} disagree with the edges")
        scope = pa + (v,)
        shape = tuple(cards[u] for u in scope)
        table = np.asarray(entry["table"], dtype=float).reshape(shape)
        # reorder the parent axes to the structure's ascending order
        perm = [scope.index(u) for u in structure.parents[v]] + [len(pa)]
        canon = tuple(structure.parents[v]) + (v,)
        cpds.append(Factor(canon, tuple(cards[u] for u in canon), np.transpose(table, perm)))
    return DiscreteBN(structure, tuple(cpds))


def load_json(path: str | Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj: Any, path: str | Path | None = None) -> str:
    text = json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


# -- trace -------------------------------------------------------------------

def _set(names: Sequence[str], ids) -> str:
    ids = sorted(ids)
    return "{" + ",".join(names[v] for v in ids) + "}" if ids else "∅"


def _edges(names: Sequence[str], edges: Sequence[Edge], sep: str = ", ") -> str:
    if not edges:
        return "∅"
    return "{" + sep.join(f"{names[a]}{EN_DASH}{names[b]}" for a, b in sorted(edges)) + "}"


def format_trace(bn: BayesNet, h: InverseStructure) -> str:
    """One line per elimination step, preceded by the moralization step."""
    names = bn.names
    lines = [f"0: moral={_edges(names, moral_edges(bn))}"]
    for i, s in enumerate(h.steps, start=1):
        lines.append(
            f"{i}: S={_set(names, s.frontier)} v={names[s.variable]} "
            f"fill={_edges(names, s.fills)} Pa={_set(names, s.parents)}"
        )
    return "\n".join(lines) + "\n"


# -- DOT ---------------------------------------------------------------------

def _q(name: str) -> str:
    return '"' + name.replace('"', '\\"') + '"'


def _node_lines(names: Sequence[str], observed, marked=()) -> list[str]:
    out = []
    for v, n in enumerate(names):
        if v in marked:
            out.append(f"  {_q(n)} [style=filled, fillcolor=black, fontcolor=white];")
        elif v in observed:
            out.append(f"  {_q(n)} [style=filled, fillcolor=gray80];")
        else:
            out.append(f"  {_q(n)};")
    return out


def bn_to_dot(bn: BayesNet, title: str = "G") -> str:
    lines = [f"digraph {_q(title)} {{", *_node_lines(bn.names, bn.observed)]
    lines += [f"  {_q(bn.names[u])} -> {_q(bn.names[v])};" for u, v in bn.edges()]
    return "\n".join(lines + ["}"]) + "\n"


def inverse_to_dot(h: InverseStructure) -> str:
    return bn_to_dot(h.graph, title=f"H_{h.mode}")


def induced_to_dot(j: MarkedGraph, bn: BayesNet) -> str:
    """Induced graph: fill edges dotted, eliminated nodes black, observed shaded."""
    fills = set(j.fill_log)
    lines = ["graph \"J\" {", *_node_lines(bn.names, bn.observed, j.marked)]
    for a, b in j.replay().edges():
        style = " [style=dotted]" if (a, b) in fills and (a, b) not in set(j.origin.edges()) else ""
        lines.append(f"  {_q(bn.names[a])} -- {_q(bn.names[b])}{style};")
    return "\n".join(lines + ["}"]) + "\n"


def clique_tree_to_dot(ct: CliqueTree, names: Sequence[str]) -> str:
    lines = ["graph \"cliques\" {"]
    for i, c in enumerate(ct.cliques):
        lines.append(f"  c{i} [label={_q(','.join(names[v] for v in sorted(c)))}];")
    for i, p in enumerate(ct.parent):
        if p is not None:
            lines.append(f"  c{i} -- c{p} [label={_q(','.join(names[v] for v in sorted(ct.sepsets[i])))}];")
    return "\n".join(lines + ["}"]) + "\n"
