"""Space/curve literals, the space-spec mini-language, and report output.

Space specs: ``circle:<d>``, ``torus:<d1>,<d2>[,...]``, ``sphere2``,
``graph:<path>``, ``mesh:<path>``, ``interval``.  Numbers accept ``pi``
expressions like ``pi/2`` or ``2*pi/3``.  All emitted artifacts embed
the resolved configuration and the tool version; identical configs and
seeds produce byte-identical output.
"""

from __future__ import annotations

import ast
import csv
import io
import json
import math

from .curves import ClosedCurve
from .errors import LengthSpaceError
from .graphspace import MetricGraph, interval_graph
from .meshspace import MeshSurface
from .spaces import Circle, FlatTorus, RoundSphere

VERSION = "0.1.0"


# ---------------------------------------------------------------- numbers

_ALLOWED_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div)


def parse_number(text):
    """Evaluate a constant arithmetic expression that may mention pi."""
    if isinstance(text, (int, float)):
        return float(text)

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and isinstance(node.op, _ALLOWED_BINOPS):
            a, b = ev(node.left), ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            return a / b
        raise ValueError(f"unsupported expression: {text!r}")

    return ev(ast.parse(str(text).strip(), mode="eval"))


# ----------------------------------------------------------------- spaces

def load_graph(path_or_data, name=None):
    if isinstance(path_or_data, dict):
        return MetricGraph.from_json(path_or_data, name=name)
    with open(path_or_data) as fh:
        return MetricGraph.from_json(json.load(fh), name=name or str(path_or_data))


def load_mesh(path_or_data, name=None):
    data = path_or_data
    if not isinstance(data, dict):
        with open(path_or_data) as fh:
            data = json.load(fh)
        name = name or str(path_or_data)
    mesh = MeshSurface(data["vertices"], data["triangles"],
                       steiner=data.get("steiner", 4), name=name)
    if "equator_vertices" in data:
        mesh.equator_vertices = list(data["equator_vertices"])
    return mesh


def parse_space_spec(spec):
    """Build a space from the CLI mini-language."""
    spec = spec.strip()
    if spec == "interval":
        return interval_graph()
    if spec == "sphere2":
        return RoundSphere(2)
    if ":" not in spec:
        if spec.endswith(".json"):  # bare path: treat as a graph file
            return load_graph(spec)
        raise LengthSpaceError(f"cannot parse space spec {spec!r}")
    head, rest = spec.split(":", 1)
    if head == "circle":
        return Circle(parse_number(rest))
    if head == "torus":
        return FlatTorus([parse_number(x) for x in rest.split(",")])
    if head == "graph":
        return load_graph(rest)
    if head == "mesh":
        return load_mesh(rest)
    raise LengthSpaceError(f"cannot parse space spec {spec!r}")


# ----------------------------------------------------------------- curves

def point_from_json(space, data):
    if isinstance(space, MetricGraph):
        if isinstance(data, dict) and "vertex" in data:
            return space.vertex(data["vertex"])
        return space.point(int(data["edge"]), parse_number(data["offset"]))
    if isinstance(space, Circle):
        return space.point(parse_number(data))
    if isinstance(space, FlatTorus):
        return space.point([parse_number(x) for x in data])
    if isinstance(space, RoundSphere):
        return space.point([parse_number(x) for x in data])
    if isinstance(space, MeshSurface):
        if isinstance(data, dict) and "node" in data:
            return space.node_point(int(data["node"]))
        return space.point(int(data["face"]), [parse_number(x) for x in data["bary"]])
    raise LengthSpaceError(f"points not supported on {space.kind}")


def witness_from_json(space, data):
    if data is None:
        return None
    if isinstance(space, MetricGraph):
        return [(int(e), int(d)) for e, d in data]
    if isinstance(space, Circle):
        return parse_number(data)
    if isinstance(space, FlatTorus):
        return [parse_number(x) for x in data]
    if isinstance(space, RoundSphere):
        return space.point([parse_number(x) for x in data])
    raise LengthSpaceError(f"witnesses not supported on {space.kind}")


def curve_from_json(data, space=None):
    """{"space": <spec or graph dict>, "breakpoints": [...], "witnesses": [...]}"""
    if space is None:
        ref = data["space"]
        space = load_graph(ref) if isinstance(ref, dict) else parse_space_spec(ref)
    if "walk" in data:
        return ClosedCurve.from_edge_walk(space,
                                          [(int(e), int(d)) for e, d in data["walk"]])
    pts = [point_from_json(space, p) for p in data["breakpoints"]]
    wits = data.get("witnesses")
    if wits is not None:
        wits = [witness_from_json(space, w) for w in wits]
    return ClosedCurve(space, pts, witnesses=wits)


# ---------------------------------------------------------------- reports

def artifact(config, payload):
    return {"version": VERSION, "config": config, "result": payload}


def dump_json(config, payload) -> str:
    return json.dumps(artifact(config, payload), sort_keys=True, indent=2) + "\n"


def spectrum_csv(spec) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["length", "minind", "opind", "open", "witnesses"])
    for e in spec.entries:
        writer.writerow([repr(e.length),
                         "" if e.minind is None else e.minind,
                         "" if e.opind is None else e.opind,
                         "" if e.open_flag is None else e.open_flag,
                         len(e.witnesses)])
    return buf.getvalue()


def plot_csv(report) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["param", "hausdorff", "gh_bound"])
    for row in report.plot_rows():
        writer.writerow([repr(float(row[0])), repr(float(row[1])),
                         "" if row[2] == "" else repr(float(row[2]))])
    return buf.getvalue()
