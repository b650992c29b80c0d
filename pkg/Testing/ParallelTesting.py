import pytest

from QInterference import Parallel


def test_pmap_keeps_order():
    Parallel.set_workers(4)
    try:
        assert Parallel.get_workers() == 4
        assert Parallel.pmap(lambda x: x * x, range(20)) == [x * x for x in range(20)]
    finally:
        Parallel.set_workers(1)


def test_pmap_inline():
    assert Parallel.pmap(str, [1, 2]) == ["1", "2"]
    assert Parallel.pmap(str, []) == []


def test_set_workers_validates():
    with pytest.raises(ValueError):
        Parallel.set_workers(0)
    with pytest.raises(ValueError):
        Parallel.set_workers("many")
    assert Parallel.get_workers() == 1
