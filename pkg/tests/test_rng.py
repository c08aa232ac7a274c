from hypothesis import given, strategies as st

from tfpart import rng


def test_xoshiro_reference_outputs():
    gen = rng.Xoshiro256(0)
    gen.s = [1, 2, 3, 4]
    assert [gen.next_u64() for _ in range(4)] == [11520, 0, 1509978240, 1215971899390074240]


def test_splitmix_reference_output():
    assert rng._splitmix64(0)[1] == 0xE220A8397B1DCDAF


def test_streams_are_reproducible_and_distinct():
    assert rng.stream(1, 0).next_u64() == 17154914556750032435
    assert rng.stream(1, 0).next_u64() == rng.stream(1, 0).next_u64()
    assert rng.stream(1, 0).next_u64() != rng.stream(1, 1).next_u64()


@given(st.integers(0, 2**64 - 1), st.integers(1, 1000))
def test_below_in_range(seed, bound):
    gen = rng.Xoshiro256(seed)
    assert all(0 <= gen.below(bound) < bound for _ in range(20))


@given(st.integers(0, 2**32), st.integers(0, 30))
def test_sample_is_distinct_subset(seed, size):
    items = list(range(30))
    picked = rng.Xoshiro256(seed).sample(items, size)
    assert len(set(picked)) == size and set(picked) <= set(items)


def test_shuffle_is_permutation():
    items = list(range(50))
    rng.Xoshiro256(7).shuffle(items)
    assert sorted(items) == list(range(50)) and items != list(range(50))
