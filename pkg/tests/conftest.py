import numpy as np
import pytest

from bfspart.graph import load_edge_list
from bfspart.partition import Partition

# Ten-vertex example traversal. From vertex 1 the frontiers are
# {1}, {6}, {2,7,5}, {4,10,3,8}, {9}; vertex 8 is discovered twice.
SMALL_EDGES = """\
% labels 1..10
1 6
6 2
6 7
6 5
7 4
7 8
2 8
5 3
5 10
4 9
"""
SMALL_BLOCKS = {1: 0, 2: 0, 3: 0, 4: 1, 5: 1, 6: 1, 7: 2, 8: 2, 9: 2, 10: 2}


def first_seen_ids(text):
    ids = {}
    for line in text.splitlines():
        if not line.strip() or line.lstrip()[0] in "%#":
            continue
        for tok in line.split()[:2]:
            ids.setdefault(int(tok), len(ids))
    return ids


@pytest.fixture
def small():
    """The ten-vertex graph, a label -> id map and the three-block partition."""
    g = load_edge_list(SMALL_EDGES.splitlines())
    ids = first_seen_ids(SMALL_EDGES)
    block_of = np.empty(g.n, dtype=np.int64)
    for label, b in SMALL_BLOCKS.items():
        block_of[ids[label]] = b
    return g, ids, Partition(block_of, 3, epsilon=1.0)


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
