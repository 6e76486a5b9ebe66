import numpy as np
import pytest
from fractions import Fraction

from tiler.arcs import ArcSet, circular_distance


def test_empty_and_full():
    assert ArcSet.empty().length() == 0
    assert ArcSet.full().length() == 1
    assert not ArcSet.empty().contains(0.3)
    assert ArcSet.full().contains(0.0)
    assert ArcSet.full().contains(0.999)


def test_half_open_membership():
    s = ArcSet.from_pairs([(0.25, 0.75)])
    assert s.contains(0.25)
    assert not s.contains(0.75)
    assert s.contains(0.5)
    assert not s.contains(0.0)


def test_wraparound_arc():
    s = ArcSet.from_pairs([(0.75, 0.25)])
    assert s.contains(0.9)
    assert s.contains(0.0)
    assert s.contains(0.1)
    assert not s.contains(0.5)
    assert float(s.length()) == 0.5


def test_degenerate_pair_rejected():
    with pytest.raises(ValueError):
        ArcSet.from_pairs([(0.3, 0.3)])


def test_from_start_width_full_circle():
    s = ArcSet.from_start_width(0.3, 1)
    assert s.length() == 1


def test_adjacent_arcs_coalesce():
    s = ArcSet.from_pairs([(0.0, 0.25), (0.25, 0.5)])
    assert s.endpoints() == [0.0, 0.5]
    assert s.length() == Fraction(1, 2)


def test_complement_partitions_circle():
    s = ArcSet.from_pairs([(0.1, 0.3), (0.6, 0.9)])
    c = s.complement()
    assert s.length() + c.length() == 1
    assert s.intersection(c).length() == 0
    assert s.union(c).length() == 1


def test_de_morgan_exact():
    a = ArcSet.from_pairs([(0.0, 0.5)])
    b = ArcSet.from_pairs([(0.25, 0.75)])
    lhs = a.union(b).complement()
    rhs = a.complement().intersection(b.complement())
    assert lhs.endpoints() == rhs.endpoints()


def test_symmetric_difference():
    a = ArcSet.from_pairs([(0.0, 0.5)])
    b = ArcSet.from_pairs([(0.25, 0.75)])
    d = a.symmetric_difference(b)
    assert float(d.length()) == 0.5
    assert d.contains(0.1)
    assert d.contains(0.6)
    assert not d.contains(0.3)


def test_contains_arc():
    s = ArcSet.from_pairs([(0.2, 0.8)])
    assert s.contains_arc(0.3, 0.2)
    assert s.contains_arc(0.2, 0.6)
    assert not s.contains_arc(0.1, 0.2)
    assert not s.contains_arc(0.7, 0.2)


def test_json_roundtrip():
    s = ArcSet.from_pairs([(0.1, 0.4), (0.6, 0.05)])
    t = ArcSet.from_json(s.to_json())
    assert s.endpoints() == t.endpoints()


def test_circular_distance():
    assert circular_distance(0.1, 0.9) == pytest.approx(0.2)
    assert circular_distance(0.0, 0.5) == pytest.approx(0.5)
    assert circular_distance(0.3, 0.3) == 0.0


def test_random_boolean_algebra():
    # set identities checked pointwise on a fixed probe grid
    rng = np.random.default_rng(11)
    probes = rng.uniform(0, 1, size=64)
    for _ in range(50):
        pairs_a = [(rng.uniform(), rng.uniform()) for _ in range(2)]
        pairs_b = [(rng.uniform(), rng.uniform()) for _ in range(2)]
        a = ArcSet.from_pairs([p for p in pairs_a if p[0] != p[1]])
        b = ArcSet.from_pairs([p for p in pairs_b if p[0] != p[1]])
        union = a.union(b)
        inter = a.intersection(b)
        sym = a.symmetric_difference(b)
        for x in probes:
            ia, ib = a.contains(x), b.contains(x)
            assert union.contains(x) == (ia or ib)
            assert inter.contains(x) == (ia and ib)
            assert sym.contains(x) == (ia != ib)
            assert a.complement().contains(x) == (not ia)


def test_random_length_additivity():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = ArcSet.from_pairs([(rng.uniform(), rng.uniform())])
        b = ArcSet.from_pairs([(rng.uniform(), rng.uniform())])
        total = a.union(b).length() + a.intersection(b).length()
        assert total == a.length() + b.length()
