import pytest

from unicity import Dataset, InvertedIndex


@pytest.fixture(scope="session")
def toy3():
    """Three records {1,2,3},{2,3},{3}: Omega^2 has 3 states, H1(K=2)=2/3."""
    return Dataset.from_records([[1, 2, 3], [2, 3], [3]])


@pytest.fixture(scope="session")
def toy3_index(toy3):
    return InvertedIndex(toy3)


@pytest.fixture(scope="session")
def toy6():
    """Six records of mixed sizes: Omega^2 has 21 states, H1* = 1/3."""
    return Dataset.from_records(
        [
            [1, 2, 3, 4],
            [2, 3, 4, 5],
            [3, 4, 5, 6],
            [1, 3, 5],
            [2, 4, 6],
            [1, 2, 3, 4, 5, 6, 7],
        ]
    )


@pytest.fixture(scope="session")
def skew10():
    """Ten records {0,1,x} sharing the popular pair {0,1}, unique tails.

    Exact unicity at K=2 is 20/21; the record-first estimator's
    expectation is 2/3, so the bias gap is 20/21 - 2/3.
    """
    return Dataset.from_records([["a", "b", f"t{i}"] for i in range(10)])
