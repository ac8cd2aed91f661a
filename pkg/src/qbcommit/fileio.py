"""Reading and writing protocols, scan configs, and analysis reports.

Protocols travel as JSON with every complex entry written as an [re, im]
pair, row major. Report objects are rendered through ``jsonable`` so the
same dictionary backs the JSON output and the text rendering, and dumping is
byte deterministic (sorted keys, shortest float repr).
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from .errors import ProtocolFileError
from .families import FAMILY_REGISTRY
from .protocol import KrausFamily, ProtocolSpec, SecretStructure


def matrix_to_pairs(mat) -> list:
    """Nested [re, im] pairs for an array of any shape."""
    arr = np.asarray(mat, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def _pairs_to_array(data, what: str) -> np.ndarray:
    try:
        arr = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ProtocolFileError(f"{what}: entries are not numeric pairs ({exc})")
    if arr.ndim < 1 or arr.shape[-1] != 2:
        raise ProtocolFileError(
            f"{what}: expected [re, im] pairs on the innermost axis, "
            f"got shape {arr.shape}"
        )
    return arr[..., 0] + 1j * arr[..., 1]


def matrix_from_pairs(data, what: str = "matrix") -> np.ndarray:
    """Complex matrix from nested [re, im] pairs; shape is checked."""
    arr = _pairs_to_array(data, what)
    if arr.ndim != 2:
        raise ProtocolFileError(f"{what}: expected a matrix, got shape {arr.shape}")
    return arr


def _family_from_json(data, what: str) -> KrausFamily:
    if not isinstance(data, list) or not data:
        raise ProtocolFileError(f"{what}: expected a nonempty list of matrices")
    ops = [matrix_from_pairs(op, f"{what}[{i}]") for i, op in enumerate(data)]
    try:
        return KrausFamily.from_ops(ops)
    except ValueError as exc:
        raise ProtocolFileError(f"{what}: {exc}")


def _secret_from_json(data) -> SecretStructure:
    if not isinstance(data, dict):
        raise ProtocolFileError("secret: expected an object")
    probs = data.get("probabilities")
    counts = data.get("outcome_counts")
    if not isinstance(probs, list) or not isinstance(counts, list):
        raise ProtocolFileError(
            "secret: needs 'probabilities' and 'outcome_counts' lists"
        )
    if len(probs) != len(counts):
        raise ProtocolFileError(
            f"secret: {len(probs)} probabilities vs {len(counts)} outcome counts"
        )
    try:
        return SecretStructure.from_pairs(zip(probs, counts))
    except (TypeError, ValueError) as exc:
        raise ProtocolFileError(f"secret: {exc}")


def parse_protocol(data) -> ProtocolSpec:
    """Protocol from an already decoded JSON object."""
    if not isinstance(data, dict):
        raise ProtocolFileError("protocol file must hold a JSON object")
    label = data.get("label")
    if not isinstance(label, str) or not label:
        raise ProtocolFileError("protocol needs a nonempty string 'label'")
    for key in ("bit0", "bit1"):
        if key not in data:
            raise ProtocolFileError(f"protocol is missing '{key}'")
    bit0 = _family_from_json(data["bit0"], "bit0")
    bit1 = _family_from_json(data["bit1"], "bit1")
    for key, got in (("dim_in", bit0.dim_in), ("dim_out", bit0.dim_out)):
        if key in data and int(data[key]) != got:
            raise ProtocolFileError(
                f"declared {key}={data[key]} but the operators have {key}={got}"
            )
    secret = _secret_from_json(data["secret"]) if data.get("secret") else None
    try:
        return ProtocolSpec(label=label, bit0=bit0, bit1=bit1, secret=secret)
    except ValueError as exc:
        raise ProtocolFileError(str(exc))


def load_protocol(path) -> ProtocolSpec:
    """Protocol from a JSON file; malformed content raises ProtocolFileError."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ProtocolFileError(f"{path}: not valid JSON ({exc})")
    try:
        return parse_protocol(data)
    except ProtocolFileError as exc:
        raise ProtocolFileError(f"{path}: {exc}")


def serialize_protocol(spec: ProtocolSpec) -> dict:
    data = {
        "label": spec.label,
        "dim_in": spec.dim_in,
        "dim_out": spec.dim_out,
        "bit0": [matrix_to_pairs(op) for op in spec.bit0.ops],
        "bit1": [matrix_to_pairs(op) for op in spec.bit1.ops],
    }
    if spec.secret is not None:
        data["secret"] = {
            "probabilities": [p for p, _ in spec.secret.groups],
            "outcome_counts": [c for _, c in spec.secret.groups],
        }
    return data


def write_protocol_file(path, spec: ProtocolSpec) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_json(serialize_protocol(spec)))


@dataclasses.dataclass
class ScanConfig:
    """One resolved scan request: a family callable plus its parameter list."""

    family_name: str
    family: object
    params: list
    label: str
    options: dict


def load_scan_config(path) -> ScanConfig:
    """Scan config from JSON: family name, parameter list, optional options."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ProtocolFileError(f"{path}: not valid JSON ({exc})")
    if not isinstance(data, dict):
        raise ProtocolFileError(f"{path}: scan config must hold a JSON object")
    name = data.get("family")
    if name not in FAMILY_REGISTRY:
        known = ", ".join(sorted(FAMILY_REGISTRY))
        raise ProtocolFileError(
            f"{path}: unknown family {name!r}, known families: {known}"
        )
    params = data.get("params")
    if not isinstance(params, list) or not params:
        raise ProtocolFileError(f"{path}: 'params' must be a nonempty list")
    try:
        params = [float(p) for p in params]
    except (TypeError, ValueError):
        raise ProtocolFileError(f"{path}: 'params' entries must be numbers")
    options = data.get("options", {})
    if not isinstance(options, dict):
        raise ProtocolFileError(f"{path}: 'options' must be an object")
    base = FAMILY_REGISTRY[name]
    if options:
        def family(param, _base=base, _opts=options):
            return _base(param, **_opts)
    else:
        family = base
    label = data.get("label")
    if label is not None and not isinstance(label, str):
        raise ProtocolFileError(f"{path}: 'label' must be a string")
    return ScanConfig(
        family_name=name,
        family=family,
        params=params,
        label=label or f"{name}-scan",
        options=options,
    )


def jsonable(obj):
    """Plain JSON-ready data from reports, arrays, and numpy scalars.

    Complex arrays and scalars become nested [re, im] pairs; real arrays
    become plain lists; dataclasses become dictionaries of their fields.
    """
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {
            f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)
        }
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return matrix_to_pairs(obj)
        return obj.tolist()
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def dump_json(obj) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, newline end."""
    return json.dumps(jsonable(obj), sort_keys=True, indent=2) + "\n"
