import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vilenkin_mra.exceptions import ParameterError
from vilenkin_mra.grid import DigitGrid, StepFunction, all_words, flat_index, format_word, h0_shifts, parse_word
from vilenkin_mra.group import GroupElement


def test_all_words_order():
    w = all_words(2, 3)
    assert w.shape == (9, 2)
    assert w[1].tolist() == [0, 1]
    assert (flat_index(w, 3) == np.arange(9)).all()
    assert all_words(0, 3).shape == (1, 0)


def test_word_strings():
    assert format_word((1, 0, 2), 3) == "102"
    assert parse_word("a1", 11) == (10, 1)
    with pytest.raises(ParameterError):
        parse_word("3", 3)
    with pytest.raises(ParameterError):
        parse_word("?", 3)


@given(st.integers(0, 26), st.integers(0, 26))
@settings(max_examples=50, deadline=None)
def test_sub_matches_group_elements(i, j):
    p = 3
    x_digits = all_words(3, p)[i]      # indices -2, -1, 0
    h_digits = all_words(3, p)[j]      # indices -3, -2, -1
    g = DigitGrid(p, -2, x_digits).sub(h_digits, -3)
    x = GroupElement({-2 + k: int(a) for k, a in enumerate(x_digits)}, p)
    h = GroupElement({-3 + k: int(a) for k, a in enumerate(h_digits)}, p)
    got = GroupElement({g.lo + k: int(a) for k, a in enumerate(g.digits)}, p)
    assert got == x - h
    back = g.add(h_digits, -3)
    assert GroupElement({back.lo + k: int(a) for k, a in enumerate(back.digits)}, p) == x


def test_dilate_shifts_indices():
    g = DigitGrid(3, 0, [[1, 2]])
    assert g.dilate().lo == -1 and g.dilate().dilate_inv().lo == 0
    assert g.extend(-2, 3).digits.tolist() == [[0, 0, 1, 2, 0]]


def test_step_function_evaluation():
    p = 3
    # indicator of G_0 at resolution G_1
    f = StepFunction(p, 0, 1, np.array([1.0, 2.0, 3.0]))
    grid = DigitGrid.full(p, -1, 2)
    v = f.evaluate(grid)
    assert v.shape == (27,)
    words = grid.digits
    expected = np.where(words[:, 0] == 0, words[:, 1] + 1.0, 0)
    assert np.allclose(v, expected)
    with pytest.raises(ParameterError):
        f.evaluate(DigitGrid.full(p, -1, 0))
    with pytest.raises(ParameterError):
        StepFunction(p, 0, 2, np.zeros(5))


def test_h0_shifts_layout():
    s = h0_shifts(2, 3)
    assert s.shape == (9, 2)
    # last column is the digit at index -1
    assert s[1].tolist() == [0, 1]
