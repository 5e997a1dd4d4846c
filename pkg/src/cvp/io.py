"""Problem files (a small YAML subset) and deterministic JSON result files."""
from __future__ import annotations

import hashlib
import json
import math

import numpy as np
import yaml

from .errors import ParseError, ValidationError
from .model import InitialData, PointSpace, ProblemInstance

FIELDS = ("labels", "lagrangian", "s", "potential", "initial_measure", "initial_set")
VERSION = "0.1.0"


def _pos(node):
    m = node.start_mark
    return m.line + 1, m.column + 1


def _err(msg, node, path):
    line, col = _pos(node)
    return ParseError(msg, line, col, path)


def _number(node, path) -> float:
    if not isinstance(node, yaml.ScalarNode):
        raise _err("expected a number", node, path)
    try:
        x = float(node.value)
    except ValueError:
        raise _err(f"not a decimal number: {node.value!r}", node, path) from None
    if not math.isfinite(x):
        raise _err("numbers must be finite", node, path)
    return x


def _seq(node, path):
    if not isinstance(node, yaml.SequenceNode):
        raise _err("expected a list", node, path)
    return node.value


def _vector(node, path) -> list[float]:
    return [_number(x, f"{path}[{i}]") for i, x in enumerate(_seq(node, path))]


def parse_problem(data: bytes | str) -> ProblemInstance:
    """Parse and validate a problem file."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        raise ParseError(str(exc.problem), mark.line + 1 if mark else None, mark.column + 1 if mark else None) from None
    if root is None:
        raise ParseError("empty problem file", 1, 1)
    if not isinstance(root, yaml.MappingNode):
        raise _err("top level must be a mapping", root, "")
    fields = {}
    for k, v in root.value:
        key = k.value
        if key not in FIELDS:
            raise _err(f"unknown field {key!r}", k, key)
        if key in fields:
            raise _err(f"duplicate field {key!r}", k, key)
        fields[key] = v
    for req in ("labels", "lagrangian"):
        if req not in fields:
            raise ParseError(f"missing required field {req!r}", 1, 1, req)
    labels = []
    for i, x in enumerate(_seq(fields["labels"], "labels")):
        if not isinstance(x, yaml.ScalarNode):
            raise _err("labels must be strings", x, f"labels[{i}]")
        labels.append(x.value)
    rows = [_vector(r, f"lagrangian[{i}]") for i, r in enumerate(_seq(fields["lagrangian"], "lagrangian"))]
    n = len(labels)
    if len(rows) != n:
        raise _err(f"lagrangian has {len(rows)} rows for {n} labels", fields["lagrangian"], "lagrangian")
    for i, r in enumerate(rows):
        if len(r) != n:
            raise _err(f"row has {len(r)} entries, expected {n}", fields["lagrangian"].value[i], f"lagrangian[{i}]")
    s = _number(fields["s"], "s") if "s" in fields else 1.0
    phi = None
    if "potential" in fields:
        phi = _vector(fields["potential"], "potential")
        if len(phi) != n:
            raise _err(f"potential has {len(phi)} entries, expected {n}", fields["potential"], "potential")
    rho0 = None
    if "initial_measure" in fields:
        rho0 = _vector(fields["initial_measure"], "initial_measure")
        if len(rho0) != n:
            raise _err(f"initial_measure has {len(rho0)} entries, expected {n}", fields["initial_measure"], "initial_measure")
    I0 = set()
    if "initial_set" in fields:
        for i, x in enumerate(_seq(fields["initial_set"], "initial_set")):
            if not isinstance(x, yaml.ScalarNode) or x.value not in labels:
                raise _err(f"unknown label in initial_set: {getattr(x, 'value', x)!r}", x, f"initial_set[{i}]")
            I0.add(labels.index(x.value))
    initial = None
    if rho0 is not None or I0:
        initial = InitialData(np.array(rho0 if rho0 is not None else np.zeros(n)), frozenset(I0))
    return ProblemInstance(PointSpace(tuple(labels)), np.array(rows), s,
                           None if phi is None else np.array(phi), initial)


def fmt(x: float) -> str:
    """17 significant digits; round-trips every double."""
    x = float(x)
    if x == 0.0:
        return "0"
    return format(x, ".17g")


def _vec(v) -> str:
    return "[" + ", ".join(fmt(x) for x in v) + "]"


def render_problem(instance: ProblemInstance) -> str:
    lines = ["labels: [" + ", ".join(json.dumps(l) for l in instance.space.labels) + "]", "lagrangian:"]
    lines += ["  - " + _vec(r) for r in instance.lagrangian]
    lines.append(f"s: {fmt(instance.s)}")
    if instance.potential is not None:
        lines.append("potential: " + _vec(instance.potential))
    if instance.initial is not None:
        lines.append("initial_measure: " + _vec(instance.initial.rho0))
        labs = [json.dumps(instance.space.labels[i]) for i in sorted(instance.initial.I0)]
        lines.append("initial_set: [" + ", ".join(labs) + "]")
    return "\n".join(lines) + "\n"


def digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _encode(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_encode(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if all(isinstance(x, (int, float, str, np.floating, np.integer)) for x in obj):
            return "[" + ", ".join(_encode(x) for x in obj) + "]"
        items = [f"{pad}  {_encode(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return fmt(x)
    if isinstance(obj, str):
        return json.dumps(obj)
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps_result(obj) -> str:
    """Deterministic JSON text with 17-significant-digit numbers."""
    return _encode(obj) + "\n"


def record_block(rec, labels) -> dict:
    block = {
        "support": [labels[i] for i in rec.support],
        "weights": rec.rho,
        "potential": rec.phi,
        "action": rec.action,
        "el_sup_residual": rec.el_sup_residual,
        "psd_min_eigenvalue": rec.psd_min_eigenvalue,
        "degeneracy_dim": rec.degeneracy_dim,
        "certified": rec.certified_global,
    }
    if rec.family_basis is not None and rec.family_basis.shape[1]:
        block["family_basis"] = [rec.family_basis[:, j] for j in range(rec.family_basis.shape[1])]
    if not rec.converged:
        block["converged"] = False
    return block


def header(command: str, data: bytes | None, instance: ProblemInstance | None) -> dict:
    out = {"solver": {"name": "cvp", "version": VERSION}, "command": command}
    if data is not None:
        out["instance_digest"] = digest(data)
    if instance is not None:
        out["labels"] = list(instance.space.labels)
    return out


__all__ = ["parse_problem", "render_problem", "dumps_result", "record_block", "digest", "ValidationError"]
