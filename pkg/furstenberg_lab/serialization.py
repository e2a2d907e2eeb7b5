"""
JSON codecs for lab artifacts.

Every artifact the lab writes carries a "kind" tag. Loaders also take
untagged records but refuse a tag naming another kind. Encoders emit
JSON-native values only (sorted lists, "num/den" rationals), so an
artifact written twice is byte-identical and decodes to an equal object.
"""

import json
from pathlib import Path
from typing import Any, Dict, Sequence

from .constructions import DeltaSystem, FurstenbergInstance, Witness
from .exceptions import FurstenbergLabException, ParameterError, ValidationError
from .ff_core import Field
from .geometry import Direction, Line, Point
from .lw_refine import GridSet
from .numerics import format_rational, parse_rational

KIND_INSTANCE = "furstenberg_instance"
KIND_DELTA = "delta_system"
KIND_GRID = "grid_set"


def dumps(data: Dict[str, Any]) -> str:
    """Deterministic JSON text (sorted keys, trailing newline)."""
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def load_artifact(path: str) -> Dict[str, Any]:
    """
    Read a JSON artifact from disk.

    Raises:
        FileNotFoundError: If the file does not exist
        ValidationError: If the file is not a JSON object
    """
    filepath = Path(path)
    if not filepath.exists():
        raise FileNotFoundError(f"Artifact not found: {path}")
    try:
        data = json.loads(filepath.read_text())
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path} is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise ValidationError(f"{path} does not hold a JSON object")
    return data


def _expect_kind(data: Dict[str, Any], kind: str) -> None:
    if not isinstance(data, dict):
        raise ValidationError(f"Expected a {kind} artifact, got {type(data).__name__}")
    if data.get("kind", kind) != kind:
        raise ValidationError(f"Expected a {kind} artifact, got kind {data['kind']!r}")


def point_to_json(f: Field, pt: Sequence[int]) -> list:
    return [f.encode_element(c) for c in pt]


def point_from_json(f: Field, value: Any, n: int) -> Point:
    if not isinstance(value, list) or len(value) != n:
        raise ValidationError(f"Expected a point with {n} coordinates, got {value!r}")
    return tuple(f.decode_element(c) for c in value)


def line_to_dict(f: Field, line: Line) -> Dict[str, Any]:
    return {"base": point_to_json(f, line.base), "dir": point_to_json(f, line.direction.vector)}


def line_from_dict(f: Field, data: Dict[str, Any], n: int) -> Line:
    """
    Decode a line, requiring the canonical direction and base.

    Raises:
        ValidationError: If the record is malformed or not canonical
    """
    try:
        vector = point_from_json(f, data["dir"], n)
        pivot = next((i for i, c in enumerate(vector) if c), 0)
        return Line(Direction(vector, pivot), point_from_json(f, data["base"], n))
    except (KeyError, TypeError) as e:
        raise ValidationError(f"Malformed line record {data!r}: {e}")
    except ParameterError as e:
        raise ValidationError(f"Invalid line record {data!r}: {e}")


def witness_to_dict(f: Field, witness: Witness) -> Dict[str, Any]:
    return {
        "dir": point_to_json(f, witness.direction.vector),
        "line": line_to_dict(f, witness.line),
        "count": witness.count,
    }


def witness_from_dict(f: Field, record: Dict[str, Any], n: int) -> Witness:
    """
    Decode a witness record.

    Both {"dir", "line": {"base", "dir"}, "count"} and the flat
    {"base", "dir", "count"} layout are accepted.

    Raises:
        ValidationError: If the record is malformed or its directions disagree
    """
    if not isinstance(record, dict):
        raise ValidationError(f"Malformed witness record {record!r}")
    if "line" in record:
        line = line_from_dict(f, record["line"], n)
        if "dir" in record and point_from_json(f, record["dir"], n) != line.direction.vector:
            raise ValidationError(f"Witness direction {record['dir']!r} is not the direction of its line")
    else:
        line = line_from_dict(f, record, n)
    try:
        count = int(record["count"])
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"Malformed witness count in {record!r}: {e}")
    return Witness(line.direction, line, count)


# ---------------------------------------------------------------------------
# Instances
# ---------------------------------------------------------------------------


def instance_to_dict(inst: FurstenbergInstance) -> Dict[str, Any]:
    f = inst.field
    return {
        "kind": KIND_INSTANCE,
        "field": f.to_dict(),
        "n": inst.n,
        "beta": format_rational(inst.beta),
        "K": inst.K,
        "construction": inst.construction,
        "threshold": inst.threshold,
        "size": inst.size,
        "size_bound": inst.size_bound,
        "points": [point_to_json(f, pt) for pt in sorted(inst.points)],
        "witnesses": [witness_to_dict(f, inst.witnesses[d]) for d in sorted(inst.witnesses)],
        "details": inst.details,
    }


def instance_from_dict(data: Dict[str, Any]) -> FurstenbergInstance:
    """
    Decode a FurstenbergInstance artifact.

    Raises:
        ValidationError: If the artifact is malformed
    """
    _expect_kind(data, KIND_INSTANCE)
    try:
        f = Field.from_dict(data["field"])
        n = int(data["n"])
        points = frozenset(point_from_json(f, v, n) for v in data["points"])
        witnesses = {}
        for record in data["witnesses"]:
            witness = witness_from_dict(f, record, n)
            witnesses[witness.direction] = witness
        inst = FurstenbergInstance(
            field=f,
            n=n,
            beta=parse_rational(data["beta"]),
            K=float(data["K"]),
            points=points,
            witnesses=witnesses,
            threshold=int(data["threshold"]),
            construction=data.get("construction", "prime"),
            size_bound=data.get("size_bound"),
            details=data.get("details", {}),
        )
    except ValidationError:
        raise
    except (KeyError, TypeError, ValueError, FurstenbergLabException) as e:
        raise ValidationError(f"Malformed instance artifact: {e}")
    if "size" in data and data["size"] != inst.size:
        raise ValidationError(f"Artifact declares {data['size']} points but lists {inst.size}")
    return inst


# ---------------------------------------------------------------------------
# Delta-systems
# ---------------------------------------------------------------------------


def delta_to_dict(d: DeltaSystem) -> Dict[str, Any]:
    f = d.field
    return {
        "kind": KIND_DELTA,
        "field": f.to_dict(),
        "delta": [f.encode_element(x) for x in d.delta],
        "mu": f.encode_element(d.mu),
        "recipe": d.recipe,
        "K": d.K,
    }


def delta_from_dict(data: Dict[str, Any]) -> DeltaSystem:
    _expect_kind(data, KIND_DELTA)
    try:
        f = Field.from_dict(data["field"])
        return DeltaSystem(
            field=f,
            delta=tuple(f.decode_element(x) for x in data["delta"]),
            mu=f.decode_element(data["mu"]),
            recipe=data.get("recipe", "manual"),
            K=float(data.get("K", 1.0)),
        )
    except (KeyError, TypeError, ValueError, ParameterError) as e:
        raise ValidationError(f"Malformed Delta-system artifact: {e}")


# ---------------------------------------------------------------------------
# Grids
# ---------------------------------------------------------------------------


def grid_to_dict(T: GridSet) -> Dict[str, Any]:
    return {
        "kind": KIND_GRID,
        "n": T.n,
        "axes": list(T.axes),
        "elements": [list(x) for x in sorted(T.elements)],
    }


def grid_from_dict(data: Dict[str, Any]) -> GridSet:
    _expect_kind(data, KIND_GRID)
    try:
        n = int(data["n"])
        elements = frozenset(tuple(int(c) for c in x) for x in data["elements"])
        axes = data.get("axes")
        return GridSet(n, elements, tuple(axes) if axes is not None else None)
    except (KeyError, TypeError, ValueError, ParameterError) as e:
        raise ValidationError(f"Malformed grid artifact: {e}")
