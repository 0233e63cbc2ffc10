import pytest

from survopt import repro
from survopt.errors import ConfigurationError
from survopt.stats import SIGN_CONSISTENT


@pytest.mark.parametrize("table_id", repro.TABLE_IDS)
def test_every_table_has_no_failing_cell(table_id, tmp_path):
    res = repro.run_repro(table_id, tmp_path)
    assert not res.failures, [(d.ref.row, d.ref.column, d.computed) for d in res.failures]
    for p in res.paths.values():
        assert p.exists() and b"\r" not in p.read_bytes()


def test_reference_cells_resolve_to_computed_cells():
    for tid in repro.TABLE_IDS:
        cells = repro.compute_table(tid).cell_map()
        for ref in repro.load_reference(tid):
            assert (ref.row, ref.column) in cells, (tid, ref.row, ref.column)


def test_doc_cells_have_notes():
    for tid in repro.TABLE_IDS:
        for ref in repro.load_reference(tid):
            if ref.status == "DOC":
                assert ref.note


def test_compare_verdicts():
    t = repro.Table(("k", "v"), [("a", 1.0), ("b", 2.0)], ("k",))
    refs = [
        repro.ReferenceCell("a", "v", 1.005, 0.01, "PASS", ""),
        repro.ReferenceCell("b", "v", 3.0, 0.01, "PASS", ""),
        repro.ReferenceCell("b", "v", 3.0, 0.01, "DOC", "known"),
        repro.ReferenceCell("c", "v", 1.0, 0.01, "PASS", ""),
    ]
    assert [d.verdict for d in repro.compare(t, refs)] == ["PASS", "FAIL", "DOC", "FAIL"]


def test_fmt_is_deterministic():
    assert repro.fmt(None) == ""
    assert repro.fmt(True) == "true"
    assert repro.fmt(3) == "3"
    assert repro.fmt(0.1 + 0.2) == "0.3"
    assert repro.fmt(float("nan")) == "nan"
    assert repro.fmt(float("-inf")) == "-inf"
    assert repro.to_csv(("a", "b"), [(1, "x,y")]) == 'a,b\n1,"x,y"\n'


def test_conventions_differ_only_where_they_should():
    a = repro.compute_table("ch2-4.1").rows
    b = repro.compute_table("ch2-4.1", SIGN_CONSISTENT).rows
    assert a == b


def test_ch5_extras():
    t = repro.compute_table("ch5-table1")
    assert set(t.extras) == {"components", "replay"}
    assert [r[0] for r in t.rows] == [1, 2, 12]
    assert len(t.extras["replay"].rows) == 5


def test_unknown_table():
    with pytest.raises(ConfigurationError):
        repro.compute_table("ch9")
