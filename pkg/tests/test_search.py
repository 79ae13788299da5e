import json

import pytest

from hsdcodes.errors import TableFileMissing
from hsdcodes.search import (
    SearchPlan,
    evaluate,
    iter_table_ids,
    load_jsonl,
    load_table,
    records_csv,
    replay_record,
    reproduce_table,
    run_search,
    write_jsonl,
)
from hsdcodes.construct import construct_eq5
from hsdcodes.field import alpha_for_minus_one, field_from_order
from hsdcodes.linalg import identity


def summary(records):
    return [(r.spec.construction, r.length, r.d, r.status) for r in records]


def test_plan_validation():
    for bad in (dict(s=-1), dict(budget=0), dict(jobs=0), dict(constructions=("extended",))):
        with pytest.raises(ValueError):
            SearchPlan(9, (4,), **bad)
    with pytest.raises(ValueError):
        SearchPlan(9, (3,))
    with pytest.raises(ValueError):
        SearchPlan(10, (4,))


def test_zero_box_is_the_identity():
    recs = run_search(SearchPlan(9, (4, 5), ("eq5", "eq6"), s=0))
    assert summary(recs) == [
        ("eq5", 8, 2, "EXACT"), ("eq5", 10, 2, "EXACT"),
        ("eq6", 8, 2, "EXACT"), ("eq6", 10, 2, "EXACT"),
    ]
    assert all(r.spec.ijkl == (0, 0, 0, 0) for r in recs)


def test_best_distance_grows_with_box():
    prev = 0
    for s in range(3):
        (rec,) = run_search(SearchPlan(9, (5,), ("eq5",), s=s))
        assert rec.d >= prev
        prev = rec.d
    assert prev == 5


def test_pinned_transvection_reaches_optimal_gf9():
    (rec,) = run_search(SearchPlan(9, (5,), ("eq5",), s=2, abcd=["1", "0", "0", "w^2"]))
    assert (rec.length, rec.k, rec.d) == (10, 5, 6)
    assert rec.is_mds and replay_record(rec)


def test_bordered_cases_are_searched():
    recs = run_search(SearchPlan(9, (4,), ("bordered_minus",), s=1))
    assert len(recs) == 1 and recs[0].length == 10
    assert {"delta_case", "case", "gamma"} <= set(recs[0].spec.params)
    assert replay_record(recs[0])


def test_checkpoint_resume(tmp_path):
    plan = SearchPlan(9, (4, 5), ("eq5",), s=1)
    ck = tmp_path / "ck.json"
    first = run_search(plan, checkpoint=ck)
    data = json.loads(ck.read_text())
    assert set(data["bitmap"]) == {"1"}
    # drop half the cells and resume
    cells = dict(sorted(data["cells"].items())[:2])
    data["cells"] = cells
    data["bitmap"] = "".join("1" if str(i) in cells else "0" for i in range(len(data["bitmap"])))
    ck.write_text(json.dumps(data))
    assert records_csv(run_search(plan, checkpoint=ck)) == records_csv(first)
    # a checkpoint of another plan is ignored
    other = SearchPlan(9, (4, 5), ("eq6",), s=1)
    assert summary(run_search(other, checkpoint=ck))[0][0] == "eq6"


def test_csv_and_jsonl_round_trip(tmp_path):
    recs = run_search(SearchPlan(9, (4,), ("eq5", "eq6"), s=1))
    text = records_csv(recs)
    assert text.splitlines()[0] == "q2,n,length,k,d,construction,i,j,k,l,params,status"
    path = tmp_path / "r.jsonl"
    with open(path, "w") as fh:
        write_jsonl(recs, fh)
    again = load_jsonl(path, spot_check=len(recs))
    assert records_csv(again) == text


def test_evaluate_falls_back_to_mds():
    F = field_from_order(9)
    C = construct_eq5(identity(F, 4), alpha_for_minus_one(F))
    assert evaluate(C) == (2, "EXACT")
    assert evaluate(C, floor=2) == (None, "EXACT")
    assert evaluate(C, budget=1) == (None, "UNVERIFIED")


def test_table_one_replays_exactly():
    rep = reproduce_table(1, rows=[0, 1, 2, 3])
    assert rep.counts()["REPRODUCED_EXACT"] == 4
    assert rep.rows[0].convention["closure"] == 24192


def test_small_rows_of_table_three():
    rep = reproduce_table(3, rows=[2, 3])
    assert [r.status for r in rep.rows] == ["REPRODUCED_EXACT"] * 2
    assert all(r.record.d == r.row["expected"]["d"] for r in rep.rows)
    json.dumps(rep.to_json())


def test_missing_table(tmp_path):
    with pytest.raises(TableFileMissing):
        load_table(99)
    with pytest.raises(TableFileMissing):
        load_table(1, data_dir=tmp_path)
    assert 1 in set(iter_table_ids())
