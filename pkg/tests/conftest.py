import pytest

from subgroup_mcts.dataset import NOMINAL, NUMERICAL, Dataset

# 6-object toy table: three numeric attributes, three class labels
TOY_COLUMNS = {
    "a": [150.0, 128.0, 136.0, 152.0, 151.0, 142.0],
    "b": [21.0, 29.0, 24.0, 23.0, 27.0, 27.0],
    "c": [11.0, 9.0, 10.0, 11.0, 12.0, 10.0],
}
TOY_LABELS = ["l1", "l2", "l2", "l3", "l2", "l1"]


def make_toy() -> Dataset:
    return Dataset.from_columns(
        "toy", [(name, NUMERICAL) for name in TOY_COLUMNS],
        TOY_LABELS, list(TOY_COLUMNS.values()))


@pytest.fixture
def toy() -> Dataset:
    return make_toy()


def make_items(n: int) -> Dataset:
    """Itemset-style dataset: n single-valued nominal attributes, one object."""
    names = [chr(ord("a") + i) for i in range(n)]
    return Dataset.from_columns(
        "items", [(name, NOMINAL) for name in names], ["x"], [["1"]] * n)


def write_toy_csv(tmp_path):
    """Write the toy table plus its schema sidecar; returns the csv path."""
    rows = ["a,b,c,class"]
    for i in range(6):
        rows.append(f"{int(TOY_COLUMNS['a'][i])},{int(TOY_COLUMNS['b'][i])},"
                    f"{int(TOY_COLUMNS['c'][i])},{TOY_LABELS[i]}")
    csv_path = tmp_path / "toy.csv"
    csv_path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    schema = "\n".join(["a=numerical", "b=numerical", "c=numerical", "class=label"])
    (tmp_path / "toy.schema").write_text(schema + "\n", encoding="utf-8")
    return csv_path


@pytest.fixture
def toy_csv(tmp_path):
    return write_toy_csv(tmp_path)
