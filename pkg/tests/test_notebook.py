import json

import pytest

from askbook.errors import DuplicateId, MalformedDocument, UnknownCell
from askbook.notebook import (
    Cell,
    CellKind,
    Edit,
    Notebook,
    Output,
    OutputKind,
    apply_edit,
    parse_notebook,
    serialize_notebook,
)


def make_cell(cid, kind=CellKind.PYTHON, source="", binding=None):
    return Cell(id=cid, kind=kind, source=source, binding=binding)


def test_parse_empty_notebook():
    nb = parse_notebook(b'{"id":"nb1","revision":1,"cells":[]}')
    assert nb.id == "nb1"
    assert nb.revision == 1
    assert nb.cells == ()


def test_parse_duplicate_cell_id_rejected():
    doc = {"id": "nb1", "revision": 1, "cells": [
        {"id": "c1", "kind": "sql", "source": "SELECT 1"},
        {"id": "c1", "kind": "python", "source": "x = 1"},
    ]}
    with pytest.raises(MalformedDocument):
        parse_notebook(json.dumps(doc).encode())


@pytest.mark.parametrize("payload", [b"not json", b'{"id":"n"}', b'{"id":"n","revision":0}'])
def test_parse_malformed_documents(payload):
    with pytest.raises(MalformedDocument):
        parse_notebook(payload)


def test_parse_three_cell_fixture_kind_order(three_cell_doc):
    # independent JSON walk for the expected kinds, in document order
    raw = json.loads(three_cell_doc)
    expected = [c["kind"] for c in raw["cells"]]
    nb = parse_notebook(three_cell_doc)
    assert [c.kind.value for c in nb.cells] == expected == ["sql", "python", "markdown"]


def test_unknown_keys_preserved_on_round_trip():
    doc = {"id": "nb1", "revision": 3, "cells": [
        {"id": "c1", "kind": "chart", "source": "", "binding": "df1", "theme": "dark"},
    ], "workspace": "team-a"}
    nb = parse_notebook(json.dumps(doc).encode())
    out = json.loads(serialize_notebook(nb))
    assert out["workspace"] == "team-a"
    assert out["cells"][0]["theme"] == "dark"
    assert out["cells"][0]["binding"] == "df1"


def test_serialize_parse_identity():
    nb = Notebook(id="nb", revision=7, cells=(
        make_cell("a", CellKind.SQL, "SELECT 1", binding="df1"),
        Cell(id="b", kind=CellKind.PYTHON, source="x=1",
             outputs=(Output(OutputKind.TEXT, "ok", produced_at=4),)),
        make_cell("c", CellKind.MARKDOWN, "# hi"),
    ))
    assert parse_notebook(serialize_notebook(nb)) == nb


def test_serialize_is_canonical():
    nb = parse_notebook(b'{"revision":1,"cells":[],"id":"z","beta":2,"alpha":1}')
    once = serialize_notebook(nb)
    again = serialize_notebook(parse_notebook(once))
    assert once == again
    assert once.endswith(b"\n")
    assert b"\r" not in once


def test_markdown_cell_with_binding_rejected():
    with pytest.raises(MalformedDocument):
        Cell(id="m", kind=CellKind.MARKDOWN, source="x", binding="df")


def test_error_output_requires_message():
    with pytest.raises(MalformedDocument):
        Output(OutputKind.ERROR, "")


def test_effective_binding_default():
    sql = make_cell("c9", CellKind.SQL, "SELECT 1")
    assert sql.effective_binding() == "sql_result_c9"
    assert make_cell("p", CellKind.PYTHON).effective_binding() is None


def test_apply_edit_delete_only_cell():
    nb = Notebook(id="n", revision=1, cells=(make_cell("c1"),))
    nb2, change = apply_edit(nb, Edit(kind="delete", cell_id="c1"))
    assert nb2.cells == ()
    assert nb2.revision == 2
    assert change.kind == "delete"
    assert change.cell is None
    assert nb.cells  # original snapshot untouched


def test_apply_edit_modify_missing_cell():
    nb = Notebook(id="n", revision=1, cells=(make_cell("c1"),))
    with pytest.raises(UnknownCell):
        apply_edit(nb, Edit(kind="modify", cell_id="c9", new_cell=make_cell("c9")))


def test_apply_edit_create_preserves_order_and_emits_event():
    nb = Notebook(id="n", revision=1, cells=(make_cell("s1", CellKind.SQL, "SELECT 1"),))
    new = make_cell("p1", CellKind.PYTHON, "y = 2")
    nb2, change = apply_edit(nb, Edit(kind="create", cell_id="p1", new_cell=new))
    assert nb2.cell_ids() == ["s1", "p1"]
    assert (change.kind, change.cell_id, change.index) == ("create", "p1", 1)
    assert change.revision == nb2.revision == 2


def test_apply_edit_create_duplicate_id():
    nb = Notebook(id="n", revision=1, cells=(make_cell("c1"),))
    with pytest.raises(DuplicateId):
        apply_edit(nb, Edit(kind="create", cell_id="c1", new_cell=make_cell("c1")))


def test_apply_edit_modify_never_reorders():
    cells = tuple(make_cell(f"c{i}") for i in range(5))
    nb = Notebook(id="n", revision=1, cells=cells)
    nb2, _ = apply_edit(nb, Edit(kind="modify", cell_id="c2",
                                 new_cell=make_cell("c2", source="x=9")))
    assert nb2.cell_ids() == nb.cell_ids()


def test_revision_strictly_increases_over_sequence():
    nb = Notebook(id="n", revision=0)
    revs = [nb.revision]
    for i in range(5):
        nb, _ = apply_edit(nb, Edit(kind="create", cell_id=f"c{i}",
                                    new_cell=make_cell(f"c{i}")))
        revs.append(nb.revision)
    assert revs == sorted(set(revs))


def test_round_trip_on_corpus(corpus_notebooks):
    assert corpus_notebooks, "committed corpus must not be empty"
    for path in corpus_notebooks:
        data = path.read_bytes()
        nb = parse_notebook(data)
        assert parse_notebook(serialize_notebook(nb)) == nb


def test_round_trip_on_random_notebooks():
    import random
    from helpers.synth import synth_notebook
    rng = random.Random(31)
    for i in range(50):
        nb, _ = synth_notebook(rng, rng.randint(0, 50), nb_id=f"rt_{i}")
        assert parse_notebook(serialize_notebook(nb)) == nb
