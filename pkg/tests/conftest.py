import itertools

import pytest

from mddkit import Gcs, TupleSequence, build_from_gcs, build_from_tuples, delete_set, full_mdd

ABC_TUPLES = [(0, 0), (0, 1), (2, 0), (2, 1), (2, 2)]   # a=0, b=1, c=2
SLAB_GCS = [(1,), (0, 1, 2, 3), (1,)]


@pytest.fixture
def abc():
    return build_from_tuples((3, 3), ABC_TUPLES)


@pytest.fixture
def cube_minus_slab():
    m = full_mdd((4, 4, 4))
    delete_set(m, build_from_gcs(Gcs((4, 4, 4), SLAB_GCS)))
    return m


@pytest.fixture
def sample_seq():
    # values 1..4 stored in a domain of size 5
    g = Gcs((5,) * 4, [(1, 2, 3, 4)] * 4)
    return TupleSequence(g, (1, 2, 2, 2), (3, 1, 4, 2))


def universe(domains):
    return list(itertools.product(*(range(d) for d in domains)))


# one line per acceptance criterion, printed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
