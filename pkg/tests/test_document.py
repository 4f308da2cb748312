import json

import numpy as np
import pytest

from helpers import random_tensor
from nilgeom import BracketTensor, DocumentError, standard_structure
from nilgeom import catalog as C
from nilgeom import document


def test_emit_parse_roundtrip_is_exact():
    rng = np.random.default_rng(0)
    for kind, n in [("symplectic", 4), ("complex", 6), ("hypercomplex", 8), ("none", 5)]:
        mu = random_tensor(n, rng)
        doc = document.document_for(mu, standard_structure(kind, n), metadata={"seed": 0})
        back = document.loads(document.dumps(doc))
        assert np.array_equal(back.bracket.coeffs, mu.coeffs)
        assert back.structure.kind.value == kind
        assert back.metadata == {"seed": 0}


def test_parse_emit_is_bit_identical():
    text = document.dumps(document.document_for(C.m26_curve(0.4), standard_structure("symplectic", 6),
                                                basis_labels=[f"e{i}" for i in range(1, 7)]))
    assert document.dumps(document.loads(text)) == text


def test_canonical_layout():
    text = document.dumps(document.document_for(C.filiform4(), standard_structure("symplectic", 4)))
    assert text.splitlines()[:5] == [
        "{",
        '  "dim": 4,',
        '  "brackets": [',
        "    [1, 2, 3, 1.0],",
        "    [1, 3, 4, 1.0]",
    ]
    assert '"maps": "standard"' in text


def test_reversed_indices_are_flipped():
    doc = document.loads('{"dim": 3, "brackets": [[2, 1, 3, 2.5]]}')
    assert doc.bracket.coeffs[0, 1, 2] == -2.5
    assert doc.bracket.coeffs[1, 0, 2] == 2.5
    assert doc.structure.kind.value == "none"
    # a consistent duplicate written both ways is accepted
    doc = document.loads('{"dim": 3, "brackets": [[1, 2, 3, 1], [2, 1, 3, -1]]}')
    assert doc.bracket.coeffs[0, 1, 2] == 1.0


def test_non_antisymmetric_entries_rejected():
    with pytest.raises(DocumentError, match=r"brackets\[1\].*antisymmetric"):
        document.loads('{"dim": 3, "brackets": [[1, 2, 3, 1], [2, 1, 3, 1]]}')


@pytest.mark.parametrize("text, where", [
    ('{"brackets": []}', "dim"),
    ('{"dim": 3, "brackets": [[1, 1, 3, 1.0]]}', "brackets[0]"),
    ('{"dim": 3, "brackets": [[1, 2, 4, 1.0]]}', "brackets[0]"),
    ('{"dim": 3, "brackets": [[1, 2, 3]]}', "brackets[0]"),
    ('{"dim": 3, "brackets": [[1, 2, 3, "x"]]}', "brackets[0]"),
    ('{"dim": 3, "structure": {"kind": "kahler"}}', "structure.kind"),
    ('{"dim": 3, "structure": {"kind": "symplectic"}}', "structure.maps"),
    ('{"dim": 2, "basis_labels": ["a"]}', "basis_labels"),
])
def test_field_diagnostics(text, where):
    with pytest.raises(DocumentError) as info:
        document.loads(text)
    assert info.value.where == where
    assert str(info.value).startswith(where)


def test_syntax_errors_report_position():
    with pytest.raises(DocumentError) as info:
        document.loads('{\n  "dim": 3,\n  "brackets": [1, 2,]\n}')
    assert info.value.where.startswith("line 3, column")


def test_explicit_structure_maps():
    j = np.array([[0.0, -1.0], [1.0, 0.0]])
    data = {"dim": 2, "brackets": [], "structure": {"kind": "complex", "maps": [j.tolist()]}}
    doc = document.loads(json.dumps(data))
    assert not doc.standard_maps
    assert np.array_equal(doc.structure.J, j)
    again = document.loads(document.dumps(doc))
    assert np.array_equal(again.structure.J, j)
    bad = {"dim": 2, "structure": {"kind": "complex", "maps": [[[0.0, -2.0], [0.5, 0.0]]]}}
    with pytest.raises(DocumentError, match="orthogonal"):
        document.loads(json.dumps(bad))


def test_zero_bracket_document(tmp_path):
    path = tmp_path / "z.json"
    document.dump(document.document_for(BracketTensor.zero(4), standard_structure("symplectic", 4)), path)
    doc = document.load(path)
    assert doc.bracket.is_zero()
    assert '"brackets": []' in path.read_text()
