import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polyjacobi.sequence import Sequence

sequences = st.builds(
    Sequence,
    st.integers(-30, 30),
    st.lists(st.floats(-100, 100, allow_nan=False), max_size=20),
)


def test_canonical_trimming():
    s = Sequence(-3, [0, 0, 1.5, 0, 2.0, 0])
    assert s.offset == -1 and s.values.tolist() == [1.5, 0, 2.0]
    assert s.support == (-1, 1)


def test_zero_sequence():
    z = Sequence(5, [0, 0])
    assert z.is_zero and z == Sequence() and z.support is None
    assert z.norm() == 0 and z.norm(np.inf) == 0


def test_indexing_and_window():
    s = Sequence(2, [1, 2, 3])
    assert s[1] == 0 and s[3] == 2 and s[10] == 0
    assert s.window(0, 5).tolist() == [0, 0, 1, 2, 3, 0]
    assert s.window(3, 3).tolist() == [2]


def test_integer_dtype_kept():
    assert Sequence(0, [1, -2]).values.dtype == np.int64
    assert Sequence(0, [1.0]).values.dtype == np.float64


def test_immutable():
    s = Sequence(0, [1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 3.0


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        Sequence(0, [np.inf])


def test_from_entries_sums_duplicates():
    s = Sequence.from_entries([(0, 1.0), (3, 2.0), (0, 0.5)])
    assert s[0] == 1.5 and s[3] == 2.0 and s.support == (0, 3)


def test_shift_and_norms():
    s = Sequence(0, [3.0, -4.0])
    assert s.shift(5).support == (5, 6)
    assert s.norm() == 5.0 and s.norm(np.inf) == 4.0 and s.norm(1) == 7.0
    assert s.power_sum(3) == pytest.approx(27 + 64)


@given(sequences, sequences)
def test_add_sub_roundtrip(a, b):
    assert (a + b) - b == a or np.allclose(((a + b) - b - a).values, 0, atol=1e-12)


@given(sequences, sequences)
def test_dot_matches_dense(a, b):
    lo, hi = -60, 60
    dense = float(np.dot(a.window(lo, hi), b.window(lo, hi)))
    assert a.dot(b) == pytest.approx(dense, abs=1e-9)


@given(sequences)
def test_equality_and_hash(a):
    b = Sequence(a.offset - 2, np.concatenate([[0.0, 0.0], a.values.astype(float)]))
    assert a == b and hash(a) == hash(b)
