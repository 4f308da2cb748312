"""
JSON documents holding a bracket and the structure it is paired with.

A document looks like::

    {
      "dim": 4,
      "basis_labels": ["X1", "X2", "X3", "X4"],
      "brackets": [
        [1, 2, 3, 1.0],
        [1, 3, 4, 1.0]
      ],
      "structure": {"kind": "symplectic", "maps": "standard"},
      "metadata": {}
    }

Each bracket entry ``[i, j, k, c]`` (one-based) means ``mu(X_i, X_j)`` has
coefficient ``c`` on ``X_k``.  Entries with ``i > j`` are accepted and
flipped; canonical output stores only ``i < j``, sorted, with nonzero
coefficients written in shortest round-trip form.  ``maps`` is either
``"standard"`` or a list of explicit ``dim x dim`` matrices.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import BracketTensor
from .errors import DocumentError
from .structures import GeomStructure, StructureKind, standard_structure


@dataclass
class BracketDocument:
    bracket: BracketTensor
    structure: GeomStructure
    basis_labels: list = None
    metadata: dict = field(default_factory=dict)
    standard_maps: bool = True

    @property
    def dim(self):
        return self.bracket.dim


def _int_field(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise DocumentError(f"expected an integer, got {value!r}", where)
    return value


def _float_field(value, where):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DocumentError(f"expected a number, got {value!r}", where)
    value = float(value)
    if not math.isfinite(value):
        raise DocumentError("coefficient must be finite", where)
    return value


def _parse_structure(raw, n):
    if raw is None:
        return standard_structure(StructureKind.NONE, n), True
    if not isinstance(raw, dict):
        raise DocumentError("expected an object with 'kind' and 'maps'", "structure")
    try:
        kind = StructureKind(raw.get("kind", "none"))
    except ValueError:
        raise DocumentError(f"unknown kind {raw.get('kind')!r}", "structure.kind") from None
    maps = raw.get("maps", "standard")
    try:
        if maps == "standard":
            return standard_structure(kind, n), True
        if not isinstance(maps, list):
            raise DocumentError("expected 'standard' or a list of matrices", "structure.maps")
        return GeomStructure(kind, n, tuple(np.array(m, dtype=float) for m in maps)), False
    except DocumentError:
        raise
    except (ValueError, TypeError) as exc:
        raise DocumentError(str(exc), "structure.maps") from None


def document_from_dict(data):
    """Validate a decoded JSON object and build a ``BracketDocument``."""
    if not isinstance(data, dict):
        raise DocumentError("document must be a JSON object")
    if "dim" not in data:
        raise DocumentError("missing field", "dim")
    n = _int_field(data["dim"], "dim")
    if n < 1:
        raise DocumentError(f"dimension must be positive, got {n}", "dim")
    labels = data.get("basis_labels")
    if labels is not None:
        if not isinstance(labels, list) or len(labels) != n or not all(isinstance(s, str) for s in labels):
            raise DocumentError(f"expected a list of {n} strings", "basis_labels")
    entries = data.get("brackets", [])
    if not isinstance(entries, list):
        raise DocumentError("expected a list of [i, j, k, c] entries", "brackets")
    seen = {}
    c = np.zeros((n, n, n))
    for pos, entry in enumerate(entries):
        where = f"brackets[{pos}]"
        if not isinstance(entry, list) or len(entry) != 4:
            raise DocumentError(f"expected [i, j, k, c], got {entry!r}", where)
        i, j, k = (_int_field(v, where) for v in entry[:3])
        coef = _float_field(entry[3], where)
        for idx in (i, j, k):
            if not 1 <= idx <= n:
                raise DocumentError(f"index {idx} out of range 1..{n}", where)
        if i == j:
            raise DocumentError(f"entry has i == j == {i}", where)
        if i > j:
            i, j, coef = j, i, -coef
        key = (i, j, k)
        if key in seen:
            prev_pos, prev = seen[key]
            if prev != coef:
                raise DocumentError(
                    f"mu(X{i}, X{j}) coefficient on X{k} is {coef!r} here but {prev!r} in brackets[{prev_pos}]"
                    " (entries must be antisymmetric in i, j)",
                    where,
                )
            continue
        seen[key] = (pos, coef)
        c[i - 1, j - 1, k - 1] = coef
        c[j - 1, i - 1, k - 1] = -coef
    gamma, standard = _parse_structure(data.get("structure"), n)
    metadata = data.get("metadata", {})
    if not isinstance(metadata, dict):
        raise DocumentError("expected an object", "metadata")
    return BracketDocument(BracketTensor(c), gamma, labels, metadata, standard)


def loads(text):
    """Parse a document from JSON text; syntax errors report the line and column."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, f"line {exc.lineno}, column {exc.colno}") from None
    return document_from_dict(data)


def load(path):
    with open(path) as fh:
        return loads(fh.read())


def document_for(mu, gamma, basis_labels=None, metadata=None):
    """Wrap a bracket and structure, recording whether ``gamma`` is the standard one."""
    standard = _is_standard(gamma)
    return BracketDocument(mu, gamma, basis_labels, dict(metadata or {}), standard)


def _is_standard(gamma):
    ref = standard_structure(gamma.kind, gamma.dim)
    return all(np.array_equal(a, b) for a, b in zip(ref.j_maps, gamma.j_maps))


def to_dict(doc):
    n = doc.dim
    c = doc.bracket.coeffs
    brackets = [
        [i + 1, j + 1, k + 1, float(c[i, j, k])]
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(n)
        if c[i, j, k] != 0.0
    ]
    out = {"dim": n}
    if doc.basis_labels is not None:
        out["basis_labels"] = list(doc.basis_labels)
    out["brackets"] = brackets
    maps = "standard" if doc.standard_maps else [m.tolist() for m in doc.structure.j_maps]
    out["structure"] = {"kind": doc.structure.kind.value, "maps": maps}
    out["metadata"] = doc.metadata
    return out


def dumps(doc):
    """Canonical text: one bracket entry per line, floats in shortest round-trip form."""
    d = to_dict(doc)
    lines = ["{", f'  "dim": {d["dim"]},']
    if "basis_labels" in d:
        lines.append(f'  "basis_labels": {json.dumps(d["basis_labels"])},')
    if d["brackets"]:
        rows = ",\n".join("    " + json.dumps(e) for e in d["brackets"])
        lines.append('  "brackets": [\n' + rows + "\n  ],")
    else:
        lines.append('  "brackets": [],')
    lines.append(f'  "structure": {json.dumps(d["structure"], sort_keys=True)},')
    lines.append(f'  "metadata": {json.dumps(d["metadata"], sort_keys=True)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dump(doc, path):
    with open(path, "w") as fh:
        fh.write(dumps(doc))
