import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdtree import dataset as ds
from qdtree.dataset import DataError, SchemaError, parse_csv, parse_schema
from qdtree.experiment import bundled_schema

from .conftest import data_dir, random_dataset


def test_car_schema_has_six_categorical_attributes():
    schema = ds.load_schema(bundled_schema("car"))
    assert [a.name for a in schema.attributes] == ["buying", "maint", "doors", "persons", "lug_boot", "safety"]
    assert all(a.is_categorical for a in schema.attributes)
    assert schema.class_labels == ("unacc", "acc", "good", "vgood")


def test_real_attribute_has_no_categories():
    schema = parse_schema("attribute w real\nclass y a b\n")
    assert schema.attributes[0].kind == "real"
    assert schema.attributes[0].categories == ()


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("attribute a real\nattribute a real\nclass y p q\n", "duplicate attribute"),
        ("attribute a categorical\nclass y p q\n", "line 1"),
        ("attribute a real\nbogus line\nclass y p q\n", "line 2"),
        ("attribute a categorical u u\nclass y p\n", "duplicate category"),
        ("attribute a real\n", "no class"),
    ],
)
def test_schema_errors(text, fragment):
    with pytest.raises(SchemaError, match=fragment):
        parse_schema(text)


def test_class_position_is_declared():
    schema = parse_schema("attribute a categorical u v\nclass y p q\nattribute b real\n")
    data = parse_csv("u,p,1.5\nv,q,2\n", schema)
    assert data.y.tolist() == [0, 1]
    assert data.columns[0].tolist() == [0, 1]
    assert data.columns[1].tolist() == [1.5, 2.0]


@pytest.mark.parametrize(
    "row, fragment",
    [
        ("u,p", "expected 3 cells"),
        ("w,p,1", "unknown category"),
        ("u,z,1", "unknown class"),
        ("u,p,abc", "weight"),
        ("u,p,nan", "non-finite"),
        ("u,p,inf", "non-finite"),
    ],
)
def test_row_errors_name_the_row(row, fragment):
    schema = parse_schema("attribute a categorical u v\nclass y p q\nattribute weight real\n")
    with pytest.raises(DataError, match=fragment) as info:
        parse_csv("u,p,1\n" + row + "\n", schema)
    assert "row 2" in str(info.value)


def test_empty_file_is_rejected(tmp_path):
    schema = parse_schema("attribute a real\nclass y p\n")
    (tmp_path / "empty.data").write_text("")
    with pytest.raises(DataError):
        ds.load_csv(tmp_path / "empty.data", schema)


def test_car_data(car):
    assert car.n_rows == 1728
    assert len(car.attributes) == 6
    hist = ds.class_histogram(ds.full_view(car))
    assert hist.sum() == 1728
    # class totals of the UCI car file
    assert hist.tolist() == [1210, 384, 69, 65]


def test_full_view(toy):
    assert ds.full_view(toy).indices.tolist() == list(range(6))
    single = parse_csv("u,p\n", parse_schema("attribute a categorical u\nclass y p\n"))
    assert ds.full_view(single).indices.tolist() == [0]


def _view(values, classes):
    t = max(values) + 1
    schema = parse_schema(
        "attribute a categorical " + " ".join(f"v{i}" for i in range(t)) + "\nclass y c0 c1 c2\n"
    )
    text = "".join(f"v{v},c{c}\n" for v, c in zip(values, classes))
    return ds.full_view(parse_csv(text, schema))


def test_subset_by_category():
    view = _view([0, 1, 0, 2], [0, 0, 0, 0])
    assert ds.subset_by_category(view, 0, 0).indices.tolist() == [0, 2]
    sub = ds.subset_by_category(view, 0, 1)
    assert len(ds.subset_by_category(sub, 0, 0)) == 0


def test_subset_by_threshold():
    schema = parse_schema("attribute w real\nclass y a\n")
    view = ds.full_view(parse_csv("1.0,a\n2.0,a\n3.0,a\n", schema))
    lo, hi = ds.subset_by_threshold(view, 0, 2.0)
    assert (lo.indices.tolist(), hi.indices.tolist()) == ([0], [1, 2])
    lo, hi = ds.subset_by_threshold(view, 0, 0.5)
    assert (len(lo), len(hi)) == (0, 3)
    lo, hi = ds.subset_by_threshold(view, 0, 9.0)
    assert (len(lo), len(hi)) == (3, 0)


def test_kind_contract(toy):
    view = ds.full_view(toy)
    with pytest.raises(TypeError):
        ds.subset_by_category(view, 2, 0)
    with pytest.raises(TypeError):
        ds.subset_by_threshold(view, 0, 1.0)
    with pytest.raises(TypeError):
        ds.contingency(view, 2)


def test_histogram_and_majority():
    view = _view([0, 0, 0], [0, 0, 1])
    assert ds.class_histogram(view).tolist() == [2, 1, 0]
    empty = ds.subset_by_category(_view([0, 1], [0, 0]), 0, 1)
    empty = ds.subset_by_category(empty, 0, 0)
    assert ds.class_histogram(empty).tolist() == [0, 0, 0]
    assert ds.majority_class(view) == 0
    assert ds.majority_class(_view([0] * 6, [0, 0, 0, 1, 1, 1])) == 0
    assert ds.majority_class(_view([0] * 10, [1] * 5 + [2] * 5)) == 1
    with pytest.raises(ValueError):
        ds.majority_class(empty)


def test_contingency_small():
    table = ds.contingency(_view([0, 0, 1], [0, 0, 1]), 0)
    assert table.counts[:, :2].tolist() == [[2, 0], [0, 1]]
    assert table.total == 3


def test_contingency_matches_row_scan():
    rng = np.random.default_rng(5)
    data = random_dataset(rng, 100, [4, 3], 3)
    view = ds.full_view(data)
    table = ds.contingency(view, 0)
    expected = np.zeros((4, 3), dtype=int)
    for i in range(100):
        expected[data.columns[0][i], data.y[i]] += 1
    assert table.counts.tolist() == expected.tolist()
    assert table.total == 100
    assert table.counts.sum(axis=0).tolist() == ds.class_histogram(view).tolist()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 60), st.floats(-1, 3))
def test_view_partition_properties(seed, n, threshold):
    rng = np.random.default_rng(seed)
    data = random_dataset(rng, n, [3], 2, n_real=1)
    view = ds.subset_by_category(ds.full_view(data), 0, int(data.columns[0][0]))
    view = ds.full_view(data) if seed % 2 else view
    parts = ds.split_by_category(view, 0)
    seen = np.concatenate([p.indices for p in parts])
    assert sorted(seen.tolist()) == view.indices.tolist()
    assert len(set(seen.tolist())) == len(seen)
    for v, p in enumerate(parts):
        assert p.indices.tolist() == ds.subset_by_category(view, 0, v).indices.tolist()
    lo, hi = ds.subset_by_threshold(view, 1, threshold)
    assert len(lo) + len(hi) == len(view)
    table = ds.contingency(view, 0)
    assert table.total == len(view)
    assert table.counts.sum(axis=0).tolist() == ds.class_histogram(view).tolist()


def test_round_trip(toy, car):
    for data in (toy, car):
        again = parse_csv(data.to_csv(), data.schema)
        assert again.to_csv() == data.to_csv()
        assert np.array_equal(again.y, data.y)
        for a, b in zip(again.columns, data.columns):
            assert np.array_equal(a, b)
    # car cells are all labels, so the shipped file is already canonical
    assert car.to_csv() == (data_dir() / "car.data").read_text()


def test_schema_round_trip():
    for name in ("car", "nursery", "abalone", "connect-4"):
        schema = ds.load_schema(bundled_schema(name))
        assert parse_schema(schema.to_text()) == schema
        assert parse_schema(schema.to_text()).to_text() == schema.to_text()
    mixed = parse_schema("attribute a real\nclass y p q\nattribute b categorical u v\n")
    assert parse_schema(mixed.to_text()) == mixed


def test_bundled_schemas_match_dataset_shapes():
    nursery = ds.load_schema(bundled_schema("nursery"))
    assert len(nursery.attributes) == 8
    abalone = ds.load_schema(bundled_schema("abalone"))
    assert len(abalone.attributes) == 8
    assert [a.kind for a in abalone.attributes].count("real") == 7
    connect = ds.load_schema(bundled_schema("connect-4"))
    assert len(connect.attributes) == 42
