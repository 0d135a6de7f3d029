import random

import pytest

from tstrat.timedomain import INF, Interval, format_time, min_time, monus, plus


def test_plus():
    assert plus(3, 4) == 7
    assert plus(0, 7) == 7
    assert plus(INF, 5) is INF
    assert plus(5, INF) is INF
    assert plus(INF, INF) is INF


def test_monus():
    assert monus(5, 3) == 2
    assert monus(3, 5) == 0
    assert monus(INF, 7) is INF
    assert monus(4, 4) == 0
    with pytest.raises(ValueError):
        monus(3, INF)


def test_min():
    assert min_time(5, INF) == 5
    assert min_time(INF, 5) == 5
    assert min_time(0, 9) == 0
    assert min_time(INF, INF) is INF


def test_comparisons():
    assert 3 < INF
    assert not (INF < 3)
    assert INF <= INF
    assert INF >= 7
    assert not INF == 7
    assert INF == INF
    assert not (INF > INF)


def test_interval_membership():
    iv = Interval(5000, 10000)
    assert iv.contains(5000)
    assert not iv.contains(4999)
    assert iv.contains(10000)
    assert not iv.contains(10001)
    assert Interval(0, INF).contains(7)


def test_interval_validation():
    with pytest.raises(ValueError):
        Interval(5, 3)
    with pytest.raises(ValueError):
        Interval(-1, 3)


def test_format():
    assert format_time(INF) == "INF"
    assert format_time(12) == "12"
    assert str(Interval(0, INF)) == "[0, INF]"


def test_monus_composition_randomized():
    rng = random.Random(11)
    for _ in range(2000):
        x = INF if rng.random() < 0.2 else rng.randrange(0, 1000)
        a, b = rng.randrange(0, 200), rng.randrange(0, 200)
        assert monus(monus(x, a), b) == monus(x, a + b)


def test_monus_min_distributes():
    rng = random.Random(12)
    for _ in range(2000):
        x = INF if rng.random() < 0.2 else rng.randrange(0, 500)
        y = INF if rng.random() < 0.2 else rng.randrange(0, 500)
        t = rng.randrange(0, 200)
        assert monus(min_time(x, y), t) == min_time(monus(x, t), monus(y, t))


def test_plus_monoid_laws():
    rng = random.Random(13)
    for _ in range(2000):
        vals = [INF if rng.random() < 0.2 else rng.randrange(0, 500)
                for _ in range(3)]
        a, b, c = vals
        assert plus(a, plus(b, c)) == plus(plus(a, b), c)
        assert plus(a, b) == plus(b, a)
        assert plus(a, 0) == a
