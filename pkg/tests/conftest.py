from __future__ import annotations

import pytest

from vizguide.profiling import load_dataset, load_fixture


@pytest.fixture(scope="session")
def movies():
    return load_fixture("movies")


@pytest.fixture(scope="session")
def colleges():
    return load_fixture("colleges")


def make_dataset(header: list[str], rows: list[list], name: str = "test"):
    """Assemble a small dataset from literal cells (None becomes empty)."""
    def cell(v):
        return "" if v is None else str(v)

    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(cell(v) for v in row))
    return load_dataset("\n".join(lines) + "\n", name)


@pytest.fixture
def tiny():
    return make_dataset(
        ["Year", "Group", "Score", "Size"],
        [
            [2001, "A", 1.0, 10],
            [2001, "B", 2.0, 20],
            [2002, "A", 3.0, 30],
            [2002, "B", 4.0, 40],
            [2003, "A", 5.0, 50],
            [2003, "C", 6.0, 60],
        ],
    )
