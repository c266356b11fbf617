from hypothesis import given
from hypothesis import strategies as st

from congames.domains import Domain


def test_construction_sorts_and_dedupes():
    d = Domain([3, 1, 2, 3, 1])
    assert d.values == (1, 2, 3)
    assert d.min == 1 and d.max == 3


def test_range_and_singleton():
    assert Domain.range(2, 5).values == (2, 3, 4, 5)
    assert Domain.singleton(7).fixed_value == 7
    assert Domain.range(4, 4).fixed_value == 4
    assert Domain.of(1, 3).fixed_value is None


def test_membership_uses_binary_search():
    d = Domain.range(0, 100)
    assert 50 in d
    assert 101 not in d
    assert -1 not in d


def test_empty_domain_is_representable():
    d = Domain(())
    assert d.is_empty
    assert len(d) == 0


def test_filters_return_same_object_when_unchanged():
    d = Domain.range(1, 5)
    assert d.keep_ge(0) is d
    assert d.keep_le(9) is d
    assert d.without(7) is d
    assert d.intersect({1, 2, 3, 4, 5, 9}) is d


@given(
    st.sets(st.integers(-20, 20), min_size=1, max_size=15),
    st.integers(-25, 25),
    st.integers(-25, 25),
)
def test_filters_match_set_semantics(values, lo, hi):
    d = Domain(values)
    assert set(d.keep_ge(lo)) == {v for v in values if v >= lo}
    assert set(d.keep_le(hi)) == {v for v in values if v <= hi}
    assert set(d.keep_between(lo, hi)) == {v for v in values if lo <= v <= hi}
    assert set(d.without(lo)) == values - {lo}


@given(st.sets(st.integers(-20, 20), min_size=1, max_size=15))
def test_iteration_is_sorted(values):
    d = Domain(values)
    assert list(d) == sorted(values)
