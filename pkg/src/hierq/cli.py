"""``hierq`` command-line front end.

Reads JSON state documents, runs one library operation and writes a JSON
result document to stdout.  Exit codes: 0 success, 1 parse/validation
error, 2 numeric contract violation (a produced matrix failed its own
invariants), 3 operation-level error (its class name is echoed).

Command-line indices follow the physics convention and start at 1
(``--subsystem``, ``--macro-set``); tree-tensor ``--path`` entries are
0-based child positions and Fock ``--path`` entries are labels.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import fock_tree as ft
from . import hier_core, measurement, oracle, tensor_states, wavelet
from .documents import (
    ParseError,
    StateDocument,
    ValidationError,
    cx,
    cx_list,
    cx_matrix,
    document_to_json,
    dumps,
    parse_state_file,
)
from .errors import HierError, NumericContractViolation
from .tensor_states import DensityMatrix

COMMANDS = (
    "norm", "inner", "combine", "reduce", "expect", "cexpect", "trace-apparatus", "project",
    "fock", "pauli", "cwt-forward", "cwt-inverse", "cwt-check", "flatten",
)


class UsageError(ValueError):
    """Bad flags or wrong document kinds; reported like a validation error."""


def _load(path: str) -> StateDocument:
    try:
        data = sys.stdin.buffer.read() if path == "-" else Path(path).read_bytes()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_state_file(data)


def _inputs(args, kinds: Sequence[Sequence[str]]) -> list[StateDocument]:
    paths = args.input or []
    if len(paths) != len(kinds):
        raise UsageError(f"{args.command} takes {len(kinds)} --input document(s), got {len(paths)}")
    docs = [_load(p) for p in paths]
    for doc, allowed, p in zip(docs, kinds, paths):
        if doc.kind not in allowed:
            raise UsageError(f"{p}: expected kind {'/'.join(allowed)}, got {doc.kind!r}")
    return docs


def _density_json(rho: DensityMatrix, tol: float) -> dict:
    bad = rho.violations(tol)
    if bad:
        raise NumericContractViolation("; ".join(bad))
    return {"kind": "density_matrix", "dim": rho.dim, "matrix": cx_matrix(rho.matrix), "trace": cx(rho.trace)}


def _scalar(z: complex, hermitian: bool) -> Any:
    return z.real if hermitian else cx(z)


def _one_based(values: Sequence[int], upper: int, what: str) -> list[int]:
    out = []
    for v in values:
        if not 1 <= v <= upper:
            raise UsageError(f"{what} {v} not in 1..{upper}")
        out.append(v - 1)
    return out


def _int_path(text: str | None) -> tuple[int, ...]:
    if not text:
        return ()
    try:
        return tuple(int(p) for p in text.strip("/").split("/"))
    except ValueError:
        raise UsageError(f"--path must be slash-separated child indices, got {text!r}") from None


def _label_path(text: str | None) -> tuple[str, ...]:
    return tuple(p for p in (text or "").split("/") if p)


def _qnumbers(text: str | None):
    if not text:
        return ()
    out = []
    for part in text.split(","):
        q = Fraction(part.strip())
        out.append(int(q) if q.denominator == 1 else q)
    return tuple(out)


# ----------------------------------------------------------------------------
# commands


def cmd_norm(args):
    (doc,) = _inputs(args, [("hier", "two_level", "tree_tensor", "signal")])
    p = doc.payload
    if doc.kind == "hier":
        value = hier_core.norm_sq(p)
    else:
        value = p.norm_sq()
    return {"norm_sq": value}


def cmd_inner(args):
    d1, d2 = _inputs(args, [("hier",), ("hier",)])
    return {"inner": cx(hier_core.inner_product(d1.payload, d2.payload))}


def cmd_combine(args):
    d1, d2 = _inputs(args, [("hier",), ("hier",)])
    s = hier_core.linear_combine(args.a, d1.payload, args.b, d2.payload)
    return {"state": document_to_json(StateDocument("hier", s)), "norm_sq": hier_core.norm_sq(s)}


def cmd_reduce(args):
    (doc,) = _inputs(args, [("two_level", "tree_tensor")])
    if doc.kind == "tree_tensor":
        if args.subsystem is not None:
            raise UsageError("tree_tensor states take --path, not --subsystem")
        rho = tensor_states.branch_reduced_density(doc.payload, _int_path(args.path))
    elif args.subsystem is None:
        rho = tensor_states.full_micro_density(doc.payload)
    else:
        (m,) = _one_based([args.subsystem], len(doc.payload.micro_dims), "--subsystem")
        rho = tensor_states.reduced_density(doc.payload, m)
    return {"density": _density_json(rho, args.tol)}


def cmd_expect(args):
    sdoc, adoc = _inputs(args, [("two_level",), ("matrix",)])
    z = tensor_states.expectation_micro(sdoc.payload, adoc.payload)
    herm = tensor_states.is_hermitian(adoc.payload, args.tol)
    return {"hermitian": herm, "value": _scalar(z, herm)}


def cmd_cexpect(args):
    sdoc, bdoc = _inputs(args, [("two_level",), ("controlled_operator",)])
    z = tensor_states.controlled_expectation(sdoc.payload, bdoc.payload)
    herm = all(tensor_states.is_hermitian(m, args.tol) for m in bdoc.payload.matrices)
    return {"hermitian": herm, "value": _scalar(z, herm)}


def cmd_trace_apparatus(args):
    (doc,) = _inputs(args, [("apparatus",)])
    c, app = doc.payload
    rho = measurement.trace_out_apparatus(measurement.entangle(c, app))
    out = {"density": _density_json(rho, args.tol)}
    out["purity"] = rho.purity
    return out


def cmd_project(args):
    (doc,) = _inputs(args, [("two_level",)])
    s = doc.payload
    if not args.macro_set:
        raise UsageError("project needs --macro-set")
    try:
        wanted = [int(v) for v in args.macro_set.split(",")]
    except ValueError:
        raise UsageError(f"--macro-set must be a comma list of integers, got {args.macro_set!r}") from None
    subset = _one_based(wanted, s.macro_dim, "--macro-set entry")
    prob, post = measurement.macro_project(s, subset)
    reduced = [_density_json(tensor_states.reduced_density(post, m), args.tol) for m in range(len(post.micro_dims))]
    return {
        "probability": prob,
        "post_state": document_to_json(StateDocument("two_level", post)),
        "reduced": reduced,
    }


def cmd_fock(args):
    (doc,) = _inputs(args, [("fock",)])
    t = doc.payload
    if args.op == "create":
        if not args.label:
            raise UsageError("fock create needs --label")
        out = ft.apply_creation(t, _label_path(args.path), args.label, args.kind, _qnumbers(args.qnumbers))
    elif args.op == "annihilate":
        out = ft.apply_annihilation(t, _label_path(args.path))
    else:
        raise UsageError("fock needs --op create|annihilate")
    return {"state": document_to_json(StateDocument("fock", out))}


def cmd_pauli(args):
    (doc,) = _inputs(args, [("fock",)])
    found = ft.pauli_check(doc.payload)
    return {
        "ok": not found,
        "violations": [
            {"parent": "/".join(v.parent_path), "label1": v.label1, "label2": v.label2} for v in found
        ],
    }


def _scales_for(args, f: wavelet.SampledSignal) -> np.ndarray:
    return wavelet.log_scales(f, args.scales, args.a_min, args.a_max)


def cmd_cwt_forward(args):
    (doc,) = _inputs(args, [("signal",)])
    w = wavelet.get_wavelet(args.wavelet)
    field_ = wavelet.forward_cwt(doc.payload, w, _scales_for(args, doc.payload), lowpass=not args.no_lowpass)
    return {"wavelet": w.name, "field": document_to_json(StateDocument("scale_field", field_))}


def cmd_cwt_inverse(args):
    (doc,) = _inputs(args, [("scale_field",)])
    w = wavelet.get_wavelet(args.wavelet)
    c_psi = wavelet.admissibility_constant(w)
    f = wavelet.inverse_cwt(doc.payload, w, c_psi)
    return {"wavelet": w.name, "c_psi": c_psi, "signal": document_to_json(StateDocument("signal", f))}


def cmd_cwt_check(args):
    (doc,) = _inputs(args, [("signal",)])
    f = doc.payload
    w = wavelet.get_wavelet(args.wavelet)
    c_psi = wavelet.admissibility_constant(w)
    field_ = wavelet.forward_cwt(f, w, _scales_for(args, f), lowpass=not args.no_lowpass)
    ratio = wavelet.parseval_ratio(f, field_)
    back = wavelet.inverse_cwt(field_, w, c_psi)
    return {
        "wavelet": w.name,
        "scales": args.scales,
        "c_psi": c_psi,
        "parseval_ratio": ratio,
        "ratio_relative_deviation": abs(ratio / c_psi - 1.0),
        "roundtrip_relative_l2_error": wavelet.relative_l2_error(f, back),
    }


def cmd_flatten(args):
    (doc,) = _inputs(args, [("two_level", "tree_tensor")])
    v = oracle.flatten(doc.payload)
    return {
        "kind": "flat",
        "factors": [{"role": f.role, "dim": f.dim} for f in v.factors],
        "vector": cx_list(v.vector),
    }


HANDLERS = {
    "norm": cmd_norm,
    "inner": cmd_inner,
    "combine": cmd_combine,
    "reduce": cmd_reduce,
    "expect": cmd_expect,
    "cexpect": cmd_cexpect,
    "trace-apparatus": cmd_trace_apparatus,
    "project": cmd_project,
    "fock": cmd_fock,
    "pauli": cmd_pauli,
    "cwt-forward": cmd_cwt_forward,
    "cwt-inverse": cmd_cwt_inverse,
    "cwt-check": cmd_cwt_check,
    "flatten": cmd_flatten,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hierq", description="Hierarchic quantum state toolkit.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--input", action="extend", nargs="+", metavar="FILE", help="input document(s); '-' reads stdin")
    p.add_argument("--subsystem", type=int, help="1-based micro subsystem for reduce")
    p.add_argument("--path", help="tree path: child indices (tree_tensor) or labels (fock), slash-separated")
    p.add_argument("--macro-set", help="comma list of 1-based macro indices for project")
    p.add_argument("--tol", type=float, default=1e-10, help="tolerance for output checks (default 1e-10)")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--a", type=complex, default=1 + 0j, help="first coefficient for combine")
    p.add_argument("--b", type=complex, default=1 + 0j, help="second coefficient for combine")
    p.add_argument("--op", choices=("create", "annihilate"), help="ladder operation for fock")
    p.add_argument("--label", help="entity label for fock create")
    p.add_argument("--kind", choices=ft.KINDS, default="composite", help="entity kind for fock create")
    p.add_argument("--qnumbers", help="comma list of integers or p/q rationals for fock create")
    p.add_argument("--wavelet", default="mexican_hat", choices=sorted(wavelet.WAVELETS))
    p.add_argument("--scales", type=int, default=64, help="number of log-spaced scales")
    p.add_argument("--a-min", type=float, help="smallest scale (default dx)")
    p.add_argument("--a-max", type=float, help="largest scale (default extent/8)")
    p.add_argument("--no-lowpass", action="store_true", help="truncate the scale integral at the largest scale")
    return p


def _text(obj: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat_pair(v):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_short(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_text(v, indent) if isinstance(v, dict) else f"{pad}- {_short(v)}" for v in obj)
    return pad + _short(obj)


def _flat_pair(v) -> bool:
    return isinstance(v, list) and len(v) == 2 and all(isinstance(x, float) for x in v)


def _short(v: Any) -> str:
    if _flat_pair(v):
        return f"{complex(v[0], v[1]):.6g}"
    if isinstance(v, float):
        return f"{v:.10g}"
    if isinstance(v, list):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    return str(v)


def _emit(doc: dict, fmt: str, stream) -> None:
    stream.write((_text(doc) if fmt == "text" else dumps(doc)) + "\n")


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        result = HANDLERS[args.command](args)
    except (ParseError, ValidationError, UsageError) as exc:
        _emit({"command": args.command, "error": type(exc).__name__, "message": str(exc)}, args.format, stdout)
        print(f"hierq: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    except NumericContractViolation as exc:
        _emit({"command": args.command, "error": "NumericContractViolation", "message": str(exc)}, args.format, stdout)
        print(f"hierq: internal numeric contract violated: {exc}", file=stderr)
        return 2
    except HierError as exc:
        _emit({"command": args.command, "error": type(exc).__name__, "message": str(exc)}, args.format, stdout)
        print(f"hierq: {type(exc).__name__}: {exc}", file=stderr)
        return 3
    except ValueError as exc:
        _emit({"command": args.command, "error": "UsageError", "message": str(exc)}, args.format, stdout)
        print(f"hierq: {exc}", file=stderr)
        return 1
    _emit({"command": args.command, "tol": args.tol, "result": result}, args.format, stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
