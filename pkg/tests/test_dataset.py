import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigtype.dataset import (
    VARIANTS,
    apply_split_manifest,
    build_datapoints,
    get_variant,
    query_datapoints,
    read_datapoints,
    select_functions,
    split_train_test,
    to_datapoints,
    write_datapoints,
    write_split_manifest,
)
from sigtype.errors import EmptyDataset
from sigtype.extract import RawFunction

from conftest import functions_of

FULL = '''
def scale(values: list, factor: float, name) -> list:
    """Scale every value.

    Args:
        values: Numbers to scale.
        factor: Multiplier.

    Returns:
        Scaled numbers.
    """
    return [v * factor for v in values]
'''

PLAIN = '''
def join(a: str, b: str) -> str:
    """Join two strings."""
    return a + b
'''

BARE = '''
def twice(n: int) -> int:
    return n * 2
'''


def fn(src):
    (f,) = functions_of(src)
    return f


def kinds(points):
    return sorted((p.kind, p.provenance.rsplit("#", 1)[1]) for p in points)


def test_selection_requires_types_and_a_return_expression():
    untyped = fn("def f(a):\n    return a\n")
    no_return = fn("def f(a: int):\n    print(a)\n")
    only_literal = fn("def f(a: int) -> int:\n    return 1\n")
    kept = fn("def f(a: int):\n    return a\n")
    assert select_functions([untyped, no_return, only_literal, kept]) == [kept]


def test_selection_strips_self():
    (method,) = functions_of("class C:\n    def m(self, x: int):\n        return x\n")
    (out,) = select_functions([method])
    assert out.params == ["x"] and out.param_types == ["int"] and out.param_comments == [None]


def test_variant_1_needs_every_comment():
    f = fn(FULL)
    points = to_datapoints(f, 1)
    # ``name`` is untyped; ``values`` and ``factor`` are commented; the return has c_f and c_r
    assert kinds(points) == [("parameter", "param:factor"), ("parameter", "param:values"), ("return", "return")]


def test_variant_1_drops_uncommented_slots():
    assert to_datapoints(fn(PLAIN), 1) == []
    assert to_datapoints(fn(BARE), 1) == []


def test_variant_2_accepts_a_plain_docstring():
    assert kinds(to_datapoints(fn(PLAIN), 2)) == [
        ("parameter", "param:a"), ("parameter", "param:b"), ("return", "return")]
    assert kinds(to_datapoints(fn(BARE), 2)) == [("parameter", "param:n")]


def test_variant_3_takes_everything_typed():
    assert kinds(to_datapoints(fn(BARE), 3)) == [("parameter", "param:n"), ("return", "return")]


def test_any_and_none_labels_excluded():
    f = fn("def f(a: Any, b: int) -> None:\n    return b\n")
    assert kinds(to_datapoints(f, 3)) == [("parameter", "param:b")]
    g = fn("def g(a: Any) -> Any:\n    return a\n")
    assert to_datapoints(g, 3) == []


def test_variants_4_and_5_share_variant_1_points():
    f = fn(FULL)
    assert to_datapoints(f, 4) == to_datapoints(f, 1) == to_datapoints(f, 5)
    assert VARIANTS[4].zero_return_exprs and not VARIANTS[4].drop_return_expr_rows
    assert VARIANTS[5].drop_return_expr_rows


def test_variant_sizes_are_nested():
    fns = [fn(FULL), fn(PLAIN), fn(BARE)]
    sizes = [len(build_datapoints(fns, v)) for v in (1, 2, 3)]
    assert sizes == [3, 7, 8]


def test_datapoint_tokens():
    ret = [p for p in to_datapoints(fn(FULL), 1) if p.kind == "return"][0]
    assert ret.label == "list"
    assert ret.tokens["fname"] == ("scale",)
    assert ret.tokens["fcomment"] == ("scale", "every", "value")
    assert ret.tokens["rcomment"] == ("scale", "number")
    assert ret.tokens["retexprs"] == ("v", "factor", "for", "v", "in", "value")
    assert ret.tokens["paramnames"] == ("value", "factor", "name")


@pytest.mark.parametrize("bad", [0, 6, "x", None])
def test_unknown_variant(bad):
    with pytest.raises(ValueError):
        get_variant(bad)


def test_query_datapoints_cover_untyped_slots():
    points = query_datapoints(fn("def f(a, b: int):\n    return a\n"))
    assert [(p.kind, p.label) for p in points] == [("parameter", ""), ("parameter", "int"), ("return", "")]
    assert query_datapoints(fn("def g(a):\n    pass\n"))[-1].kind == "parameter"


# ---- splitting

def _points(n, projects=1):
    funcs = [
        RawFunction(f"p{i % projects}", "m.py", f"f{i}", i + 1, f"f{i}",
                    params=["a"], param_types=["int"], param_comments=[None], return_exprs=[["a"]])
        for i in range(n)
    ]
    return build_datapoints(funcs, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 200), st.integers(0, 10_000))
def test_split_sizes_and_partition(n, seed):
    points = _points(n)
    split = split_train_test(points, 0.8, seed)
    assert len(split.train) == math.floor(0.8 * n) == (4 * n) // 5
    ids = [p.provenance for p in split.train + split.test]
    assert sorted(ids) == sorted(p.provenance for p in points)


def test_split_is_seeded():
    points = _points(50)
    a, b, c = (split_train_test(points, 0.8, s) for s in (7, 7, 8))
    assert a.manifest() == b.manifest()
    assert a.manifest() != c.manifest()


def test_split_by_project_keeps_projects_whole():
    split = split_train_test(_points(60, projects=6), 0.8, 3, by_project=True)
    train_projects = {p.project for p in split.train}
    test_projects = {p.project for p in split.test}
    assert train_projects.isdisjoint(test_projects)
    assert len(split.train) >= 48


def test_split_empty():
    with pytest.raises(EmptyDataset):
        split_train_test([], 0.8, 0)


def test_datapoint_and_manifest_round_trip(tmp_path):
    points = _points(10)
    write_datapoints(points, tmp_path / "d.jsonl")
    back = read_datapoints(tmp_path / "d.jsonl")
    assert back == points
    split = split_train_test(back, 0.8, 1)
    write_split_manifest(split, tmp_path / "s.json")
    again = apply_split_manifest(back, json.loads((tmp_path / "s.json").read_text()))
    assert again.train == split.train and again.test == split.test
