import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from halfchain.core import (ISING, Alphabet, BoundaryCondition, CapExceeded, FreeBoundaryQueried,
                            InvalidSite, OverlapOrGap, Window, WindowConfig, code_matrix, concat,
                            enumerate_configs, spin_matrix, tail_codes, tail_value)


def test_window_basics():
    w = Window(-3, -1)
    assert w.size == 3
    assert list(w.sites) == [-3, -2, -1]
    assert -2 in w and 0 not in w
    with pytest.raises(InvalidSite):
        Window(-1, 1)
    with pytest.raises(ValueError):
        Window(-1, -2)


def test_alphabet():
    assert ISING.is_binary
    assert ISING.encode(-1) == 0 and ISING.encode(1) == 1
    a3 = Alphabet.of_size(3)
    assert len(a3) == 3 and a3.decode(2) == a3.symbols[2]
    with pytest.raises(ValueError):
        ISING.encode(0)


def test_enumeration_order_is_lexicographic():
    w = Window(-2, 0)
    got = [c.values for c in enumerate_configs(w)]
    assert got == list(itertools.product((-1, 1), repeat=3))
    assert np.array_equal(spin_matrix(3), np.array(got))
    assert code_matrix(2, 3).tolist() == [list(t) for t in itertools.product(range(3), repeat=2)]


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        next(enumerate_configs(Window(-30, 0)))


@given(st.integers(-12, 0), st.integers(0, 2**12 - 1))
def test_index_roundtrip(l, idx):
    w = Window(l, 0)
    idx %= 2**w.size
    cfg = WindowConfig.from_index(idx, w)
    assert cfg.index() == idx
    assert WindowConfig.from_string(cfg.to_string(), l) == cfg


def test_concat_and_restrict():
    a = WindowConfig.from_string("+-", -4)
    b = WindowConfig.from_string("++-", -2)
    c = concat(a, b)
    assert c.window == Window(-4, 0) and c.to_string() == "+-++-"
    assert c.restrict(Window(-3, -2)).to_string() == "-+"
    assert concat(WindowConfig.empty(), b) == b
    with pytest.raises(OverlapOrGap):
        concat(a, WindowConfig.from_string("+", 0))


def test_tail_values():
    plus, minus = BoundaryCondition.all_plus(), BoundaryCondition.all_minus()
    assert tail_value(plus, -9, -3) == 1 and tail_value(minus, -9, -3) == -1
    per = BoundaryCondition.periodic((1, -1, -1))
    # the last pattern entry sits at attach - 1
    assert [tail_value(per, s, 0) for s in (-1, -2, -3, -4)] == [-1, -1, 1, -1]
    assert tail_codes(per, -4, -1, 0).tolist() == [0, 1, 0, 0]
    with pytest.raises(FreeBoundaryQueried):
        tail_value(BoundaryCondition.free(), -2, 0)
    with pytest.raises(ValueError):
        tail_value(plus, 0, 0)
    assert per.flipped().pattern == (-1, 1, 1)
