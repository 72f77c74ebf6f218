"""JSON state documents: parsing, validation and deterministic serialization.

Complex numbers are ``[re, im]`` pairs.  Dense tensors are flat row-major
lists next to an explicit shape; two-level states may instead list nonzero
entries as ``{"idx": [j, i1, ...], "val": [re, im]}``.  Floats are written
with 17 significant digits so that ``parse(serialize(x)) == x`` exactly and
output is byte-stable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import fock_tree as ft
from .hier_core import ComponentState, HierState
from .measurement import ApparatusModel
from .tensor_states import ControlledOperator, TensorNode, TreeTensorState, TwoLevelState, INPUT_TOL
from .wavelet import SampledSignal, ScaleField

STATE_KINDS = ("hier", "two_level", "tree_tensor", "fock", "signal")
AUX_KINDS = ("matrix", "controlled_operator", "apparatus", "scale_field")


class ParseError(ValueError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


class ValidationError(ValueError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass(eq=False)
class StateDocument:
    kind: str
    payload: Any
    name: str | None = None
    comment: str | None = None
    extra: dict = field(default_factory=dict)

    def __eq__(self, other):
        if not isinstance(other, StateDocument):
            return NotImplemented
        return (
            (self.kind, self.name, self.comment) == (other.kind, other.name, other.comment)
            and _payload_equal(self.payload, other.payload)
            and self.extra == other.extra
        )


def _payload_equal(p, q) -> bool:
    if isinstance(p, np.ndarray) or isinstance(q, np.ndarray):
        return np.shape(p) == np.shape(q) and np.array_equal(p, q)
    if isinstance(p, ApparatusModel) and isinstance(q, ApparatusModel):
        return np.array_equal(p.gram, q.gram)
    if isinstance(p, tuple) and isinstance(q, tuple):
        return len(p) == len(q) and all(_payload_equal(a, b) for a, b in zip(p, q))
    return p == q


# ----------------------------------------------------------------------------
# writing


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    return format(x, ".17g")


def _is_flat(items) -> bool:
    return all(not isinstance(i, (dict, list)) for i in items)


def _is_pairs(items) -> bool:
    return all(isinstance(i, list) and _is_flat(i) for i in items)


def dumps(obj: Any, indent: int = 0) -> str:
    """Deterministic JSON text: dict keys in insertion order, floats at 17 digits."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{inner}{json.dumps(str(k), ensure_ascii=False)}: {dumps(v, indent + 1)}" for k, v in obj.items())
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        items = list(obj)
        if not items:
            return "[]"
        if _is_flat(items) or _is_pairs(items):
            return "[" + ", ".join(dumps(i) for i in items) + "]"
        body = ",\n".join(inner + dumps(i, indent + 1) for i in items)
        return "[\n" + body + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def cx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def cx_list(arr) -> list[list[float]]:
    return [cx(z) for z in np.asarray(arr).reshape(-1)]


def cx_matrix(m) -> list[list[list[float]]]:
    return [cx_list(row) for row in np.asarray(m)]


def _qnum_out(q):
    return q if isinstance(q, int) else str(q)


def _hier_to_json(s: HierState) -> dict:
    return {
        "label": s.root.label,
        "amps": cx_list(s.root.amps),
        "children": [_hier_to_json(c) for c in s.children],
    }


def _tensor_node_to_json(n: TensorNode) -> dict:
    return {
        "label": n.label,
        "shape": list(n.tensor.shape),
        "tensor": cx_list(n.tensor),
        "children": [_tensor_node_to_json(c) for c in n.children],
    }


def _fock_to_json(t) -> Any:
    if t is ft.VACUUM:
        return "vacuum"
    if t is ft.ZERO:
        return "zero"
    return {
        "label": t.label,
        "kind": t.kind,
        "qnumbers": [_qnum_out(q) for q in t.qnumbers],
        "children": [_fock_to_json(c) for c in t.children],
    }


def payload_to_json(kind: str, p: Any) -> dict:
    if kind == "hier":
        return {"tree": _hier_to_json(p)}
    if kind == "two_level":
        return {"macro_dim": p.macro_dim, "micro_dims": list(p.micro_dims), "coeffs": cx_list(p.coeffs)}
    if kind == "tree_tensor":
        return {"tree": _tensor_node_to_json(p.root)}
    if kind == "fock":
        return {"tree": _fock_to_json(p)}
    if kind == "signal":
        return {"x0": p.x0, "dx": p.dx, "values": cx_list(p.values)}
    if kind == "matrix":
        return {"matrix": cx_matrix(p)}
    if kind == "controlled_operator":
        return {"matrices": [cx_matrix(m) for m in p.matrices]}
    if kind == "apparatus":
        coeffs, app = p
        return {"coeffs": cx_list(coeffs), "gram": cx_matrix(app.gram)}
    if kind == "scale_field":
        out = {
            "x0": p.x0,
            "dx": p.dx,
            "n": p.n,
            "scales": [float(a) for a in p.scales],
            "translations": [float(b) for b in p.translations],
            "coeffs": cx_matrix(p.coeffs),
        }
        if p.lowpass is not None:
            out["lowpass"] = cx_list(p.lowpass)
        return out
    raise ValueError(f"unknown kind {kind!r}")


def document_to_json(doc: StateDocument) -> dict:
    out: dict[str, Any] = {"kind": doc.kind}
    if doc.name is not None:
        out["name"] = doc.name
    if doc.comment is not None:
        out["comment"] = doc.comment
    out.update(payload_to_json(doc.kind, doc.payload))
    out.update(doc.extra)
    return out


def serialize(doc: StateDocument) -> str:
    return dumps(document_to_json(doc)) + "\n"


# ----------------------------------------------------------------------------
# reading


def _get(obj: dict, key: str, path: str, types=None):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", path)
    if key not in obj:
        raise ParseError(f"missing field {key!r}", path)
    val = obj[key]
    if types is not None and not isinstance(val, types):
        raise ParseError(f"field {key!r} has wrong type {type(val).__name__}", f"{path}.{key}")
    return val


def _real(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"expected a number, got {v!r}", path)
    if not math.isfinite(v):
        raise ValidationError("number must be finite", path)
    return float(v)


def _int(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"expected an integer, got {v!r}", path)
    return v


def _complex(v, path: str) -> complex:
    if isinstance(v, list) and len(v) == 2:
        return complex(_real(v[0], path + "[0]"), _real(v[1], path + "[1]"))
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(_real(v, path), 0.0)
    raise ParseError(f"expected [re, im], got {v!r}", path)


def _complex_list(v, path: str) -> np.ndarray:
    if not isinstance(v, list):
        raise ParseError("expected a list of complex numbers", path)
    return np.array([_complex(z, f"{path}[{k}]") for k, z in enumerate(v)], dtype=np.complex128)


def _complex_matrix(v, path: str) -> np.ndarray:
    if not isinstance(v, list) or not v:
        raise ParseError("expected a nonempty list of rows", path)
    rows = [_complex_list(r, f"{path}[{k}]") for k, r in enumerate(v)]
    if len({r.size for r in rows}) != 1:
        raise ValidationError("rows have different lengths", path)
    return np.array(rows)


def _real_list(v, path: str) -> np.ndarray:
    if not isinstance(v, list):
        raise ParseError("expected a list of numbers", path)
    return np.array([_real(z, f"{path}[{k}]") for k, z in enumerate(v)], dtype=float)


def _dims(v, path: str, minimum: int = 1) -> tuple[int, ...]:
    if not isinstance(v, list):
        raise ParseError("expected a list of integers", path)
    out = []
    for k, d in enumerate(v):
        d = _int(d, f"{path}[{k}]")
        if d < minimum:
            raise ValidationError(f"dimension must be >= {minimum}, got {d}", f"{path}[{k}]")
        out.append(d)
    return tuple(out)


def _children(obj: dict, path: str) -> list:
    kids = obj.get("children", [])
    if not isinstance(kids, list):
        raise ParseError("children must be a list", f"{path}.children")
    return kids


def _parse_hier(obj, path: str) -> HierState:
    label = _get(obj, "label", path, str)
    amps = _complex_list(obj.get("amps", []), f"{path}.amps")
    kids = [_parse_hier(c, f"{path}.children[{k}]") for k, c in enumerate(_children(obj, path))]
    return HierState(ComponentState(label, amps), tuple(kids))


def _parse_two_level(obj, path: str) -> TwoLevelState:
    j = _int(_get(obj, "macro_dim", path), f"{path}.macro_dim")
    if j < 1:
        raise ValidationError(f"macro_dim must be >= 1, got {j}", f"{path}.macro_dim")
    dims = _dims(_get(obj, "micro_dims", path), f"{path}.micro_dims")
    if not dims:
        raise ValidationError("at least one micro subsystem is required", f"{path}.micro_dims")
    shape = (j, *dims)
    size = math.prod(shape)
    if "coeffs" in obj:
        flat = _complex_list(obj["coeffs"], f"{path}.coeffs")
        if flat.size != size:
            raise ValidationError(f"expected {size} coefficients, got {flat.size}", f"{path}.coeffs")
        c = flat.reshape(shape)
    elif "entries" in obj:
        c = np.zeros(shape, dtype=np.complex128)
        entries = obj["entries"]
        if not isinstance(entries, list):
            raise ParseError("entries must be a list", f"{path}.entries")
        for k, e in enumerate(entries):
            p = f"{path}.entries[{k}]"
            idx = _dims(_get(e, "idx", p), f"{p}.idx", minimum=0)
            if len(idx) != len(shape) or any(i >= n for i, n in zip(idx, shape)):
                raise ValidationError(f"index {list(idx)} outside shape {list(shape)}", f"{p}.idx")
            c[idx] += _complex(_get(e, "val", p), f"{p}.val")
    else:
        raise ParseError("need 'coeffs' or 'entries'", path)
    s = TwoLevelState(c)
    if obj.get("normalized", True) is not False and not s.is_normalized(INPUT_TOL):
        raise ValidationError(f"state declared normalized but sum |C|^2 = {s.norm_sq():.17g}", f"{path}.coeffs")
    return s


def _parse_tensor_node(obj, path: str) -> TensorNode:
    label = _get(obj, "label", path, str)
    shape = _dims(_get(obj, "shape", path), f"{path}.shape")
    flat = _complex_list(_get(obj, "tensor", path), f"{path}.tensor")
    if flat.size != math.prod(shape):
        raise ValidationError(f"tensor has {flat.size} entries, shape needs {math.prod(shape)}", f"{path}.tensor")
    kids = [_parse_tensor_node(c, f"{path}.children[{k}]") for k, c in enumerate(_children(obj, path))]
    try:
        return TensorNode(label, flat.reshape(shape), tuple(kids))
    except Exception as exc:
        raise ValidationError(str(exc), path) from exc


def _parse_qnum(q, path: str):
    if isinstance(q, bool):
        raise ParseError("quantum number cannot be boolean", path)
    if isinstance(q, int):
        return q
    if isinstance(q, str):
        try:
            return Fraction(q)
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad rational {q!r}", path) from None
    raise ParseError(f"quantum numbers are integers or 'p/q' strings, got {q!r}", path)


def _parse_fock(obj, path: str):
    if obj == "vacuum":
        return ft.VACUUM
    if obj == "zero":
        return ft.ZERO
    label = _get(obj, "label", path, str)
    kind = obj.get("kind", "composite")
    if kind not in ft.KINDS:
        raise ValidationError(f"kind must be one of {ft.KINDS}", f"{path}.kind")
    qn = obj.get("qnumbers", [])
    if not isinstance(qn, list):
        raise ParseError("qnumbers must be a list", f"{path}.qnumbers")
    qnums = tuple(_parse_qnum(q, f"{path}.qnumbers[{k}]") for k, q in enumerate(qn))
    kids = [_parse_fock(c, f"{path}.children[{k}]") for k, c in enumerate(_children(obj, path))]
    if any(isinstance(k, ft.Special) for k in kids):
        raise ValidationError("vacuum/zero can only appear at the top level", f"{path}.children")
    try:
        return ft.FockNode(label, kind, qnums, tuple(kids))
    except ft.DuplicateSibling as exc:
        raise ValidationError(str(exc), f"{path}.children") from exc


def _parse_payload(kind: str, obj: dict, path: str) -> Any:
    if kind == "hier":
        return _parse_hier(_get(obj, "tree", path), f"{path}.tree")
    if kind == "two_level":
        return _parse_two_level(obj, path)
    if kind == "tree_tensor":
        t = TreeTensorState(_parse_tensor_node(_get(obj, "tree", path), f"{path}.tree"))
        if obj.get("normalized", True) is not False:
            n2 = t.norm_sq()
            if abs(n2 - 1) > INPUT_TOL:
                raise ValidationError(f"state declared normalized but norm^2 = {n2:.17g}", f"{path}.tree")
        return t
    if kind == "fock":
        return _parse_fock(_get(obj, "tree", path), f"{path}.tree")
    if kind == "signal":
        x0 = _real(_get(obj, "x0", path), f"{path}.x0")
        dx = _real(_get(obj, "dx", path), f"{path}.dx")
        vals = _complex_list(_get(obj, "values", path), f"{path}.values")
        if dx <= 0:
            raise ValidationError("dx must be positive", f"{path}.dx")
        if vals.size < 2:
            raise ValidationError("need at least 2 samples", f"{path}.values")
        return SampledSignal(x0, dx, vals)
    if kind == "matrix":
        m = _complex_matrix(_get(obj, "matrix", path), f"{path}.matrix")
        if m.shape[0] != m.shape[1]:
            raise ValidationError(f"matrix must be square, got {m.shape}", f"{path}.matrix")
        return m
    if kind == "controlled_operator":
        mats = _get(obj, "matrices", path, list)
        if not mats:
            raise ValidationError("need at least one matrix", f"{path}.matrices")
        arrs = [_complex_matrix(m, f"{path}.matrices[{k}]") for k, m in enumerate(mats)]
        if len({a.shape for a in arrs}) != 1 or arrs[0].shape[0] != arrs[0].shape[1]:
            raise ValidationError("matrices must be square and equally sized", f"{path}.matrices")
        return ControlledOperator(np.array(arrs))
    if kind == "apparatus":
        c = _complex_list(_get(obj, "coeffs", path), f"{path}.coeffs")
        g = _complex_matrix(_get(obj, "gram", path), f"{path}.gram")
        try:
            app = ApparatusModel(g)
        except Exception as exc:
            raise ValidationError(str(exc), f"{path}.gram") from exc
        if c.size != app.n:
            raise ValidationError(f"{c.size} coefficients for a {app.n}-state apparatus", f"{path}.coeffs")
        n2 = float(np.sum(np.abs(c) ** 2))
        if abs(n2 - 1) > INPUT_TOL:
            raise ValidationError(f"sum |c|^2 = {n2:.17g}", f"{path}.coeffs")
        c.flags.writeable = False
        return (c, app)
    if kind == "scale_field":
        low = obj.get("lowpass")
        try:
            return ScaleField(
                _real_list(_get(obj, "scales", path), f"{path}.scales"),
                _real_list(_get(obj, "translations", path), f"{path}.translations"),
                _complex_matrix(_get(obj, "coeffs", path), f"{path}.coeffs"),
                _real(_get(obj, "x0", path), f"{path}.x0"),
                _real(_get(obj, "dx", path), f"{path}.dx"),
                _int(_get(obj, "n", path), f"{path}.n"),
                None if low is None else _complex_list(low, f"{path}.lowpass"),
            )
        except (ParseError, ValidationError):
            raise
        except Exception as exc:
            raise ValidationError(str(exc), path) from exc
    raise ParseError(f"unknown kind {kind!r}", f"{path}.kind")


_RESERVED = {
    "kind", "name", "comment", "tree", "macro_dim", "micro_dims", "coeffs", "entries",
    "x0", "dx", "values", "matrix", "matrices", "gram", "scales", "translations", "n", "lowpass",
}


def parse_state_file(data: bytes | str) -> StateDocument:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from None
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    kind = _get(obj, "kind", "$", str)
    if kind not in STATE_KINDS + AUX_KINDS:
        raise ParseError(f"unknown kind {kind!r}", "$.kind")
    name = obj.get("name")
    comment = obj.get("comment")
    for key, val in (("name", name), ("comment", comment)):
        if val is not None and not isinstance(val, str):
            raise ParseError(f"{key} must be a string", f"$.{key}")
    try:
        payload = _parse_payload(kind, obj, "$")
    except (ParseError, ValidationError):
        raise
    except Exception as exc:
        raise ValidationError(f"{type(exc).__name__}: {exc}") from exc
    extra = {k: v for k, v in obj.items() if k not in _RESERVED}
    return StateDocument(kind, payload, name, comment, extra)
