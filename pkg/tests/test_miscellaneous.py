import threading

import numpy as np

from bosonstar.miscellaneous import Record, parallel_map, seeded
from bosonstar.spectral_core import RadialField, RadialGrid


def test_record():
    record = Record(a=1)
    record.b = 2
    assert record == {"a": 1, "b": 2}
    assert record["b"] == record.b
    copy = record.copy()
    copy.a = 3
    assert record.a == 1
    assert type(copy) is Record


def test_summary_leaves_fields_out():
    grid = RadialGrid(8, 1.0)
    record = Record(u=RadialField(grid, np.ones(8)), x=1.0, nested=Record(y=2, v=RadialField(grid, np.ones(8))))
    assert record.summary() == {"x": 1.0, "nested": {"y": 2}}


def test_seeded():
    np.random.seed(0)
    with seeded(3) as random:
        a = random.rand(4)
    after = np.random.rand()
    with seeded(3) as random:
        b = random.rand(4)
    np.random.seed(0)
    assert np.array_equal(a, b)
    assert after == np.random.rand()


def test_seeded_private_generator():
    with seeded(5, np.random.RandomState()) as random:
        a = random.randn(3)
    with seeded(5, np.random.RandomState()) as random:
        b = random.randn(3)
    assert np.array_equal(a, b)


def test_parallel_map():
    names = parallel_map(lambda i: (i, threading.current_thread().name), range(6), processes=3)
    assert [i for i, _ in names] == list(range(6))
    assert parallel_map(lambda i: i**2, [1, 2, 3], processes=1) == [1, 4, 9]
    assert parallel_map(lambda i: i, []) == []
