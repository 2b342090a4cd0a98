import json
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import SAMPLE_WINDOWS, duplicate_window_tree, sample_tree, haar_tree
from oracles import beta_by_solve
from vilenkin_mra.cyclotomic import CycloArray, RootScalar
from vilenkin_mra.exceptions import InvalidTreeError, MaskError, ParameterError
from vilenkin_mra.group import Character
from vilenkin_mra.mask import (
    CoefficientTable,
    delta_mask,
    check_mask,
    mask_from_coefficients,
    mask_from_tree,
    mask_from_windows,
    mask_value,
    solve_coefficients,
    wavelet_shift_masks,
)
from vilenkin_mra.tree import allowed_windows, build_nvalid

FROZEN = json.loads((Path(__file__).parent / "data" / "frozen.json").read_text())


def frozen_c(name, key):
    return np.array([complex(*z) for z in FROZEN[name][key]])


@st.composite
def tree_and_phases(draw):
    p, N = draw(st.sampled_from([(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3)]))
    strategy = draw(st.sampled_from(["debruijn-path", "greedy-branch", "min-height"]))
    T = build_nvalid(p, N, strategy, seed=draw(st.integers(0, 99)))
    wins = sorted(allowed_windows(T))
    zero = (0,) * (N + 1)
    phases = {w: (0 if w == zero else draw(st.integers(0, p - 1))) for w in wins}
    return T, phases


def test_sample_mask_support():
    m = mask_from_tree(sample_tree())
    assert m.exact
    assert m.nonzero_windows() == SAMPLE_WINDOWS
    assert int(m.support.sum()) == 9
    assert check_mask(m).passed


def test_mask_value_reads_window():
    m = mask_from_tree(sample_tree())
    # root-side-first window (0, 2, 1) means alpha_0 = 0, alpha_-1 = 2, alpha_-2 = 1
    chi = Character({-2: 1, -1: 2, 3: 1}, 3)
    assert mask_value(m, chi) == RootScalar(3, 0)
    assert mask_value(m, Character({-2: 2, -1: 2, 0: 1}, 3)).is_zero


@pytest.mark.parametrize("name,tree", [("sample", sample_tree), ("haar", haar_tree)])
def test_beta_matches_frozen_oracle(name, tree):
    m = mask_from_tree(tree())
    beta = solve_coefficients(m)
    assert beta.exact
    assert np.allclose(beta.complex_values(), frozen_c(name, "beta"), atol=1e-11)


def test_haar_beta_closed_form():
    beta = solve_coefficients(mask_from_tree(haar_tree()))
    assert beta.nonzero_shifts() == [(0, 0), (0, 1), (0, 2)]
    assert beta.values.equals(CycloArray.from_int([1, 1, 1, 0, 0, 0, 0, 0, 0], 3)).all()


@given(tree_and_phases())
@settings(max_examples=40, deadline=None)
def test_mask_properties(data):
    T, phases = data
    m = mask_from_tree(T, phases)
    rep = check_mask(m)
    assert rep.passed, rep.summary()
    # every row of p entries has exactly one nonzero
    assert (m.support.reshape(-1, m.p).sum(axis=1) == 1).all()
    beta = solve_coefficients(m)
    assert beta.energy().equals(CycloArray.from_int([m.p], m.p).sum()).all()
    back = mask_from_coefficients(beta)
    assert back.equals(m.table()).all()


@given(tree_and_phases())
@settings(max_examples=15, deadline=None)
def test_beta_agrees_with_dense_solve(data):
    T, phases = data
    m = mask_from_tree(T, phases)
    beta = solve_coefficients(m)
    assert np.allclose(beta.complex_values(), beta_by_solve(m), atol=1e-10)


def test_energy_is_exactly_p():
    beta = solve_coefficients(mask_from_tree(sample_tree()))
    e = beta.energy()
    assert e.equals(CycloArray.from_int([3], 3).sum()).all()


def test_complex_phases_give_complex_mode():
    T = haar_tree()
    z = np.exp(0.3j)
    m = mask_from_tree(T, {(0, 0): 0, (0, 1): [z.real, z.imag], (0, 2): 2})
    assert not m.exact
    assert check_mask(m).passed
    beta = solve_coefficients(m)
    assert np.isclose(beta.energy(), 3)


def test_phase_table_errors():
    T = haar_tree()
    with pytest.raises(ParameterError):
        mask_from_tree(T, {(0, 0): 0, (0, 1): 1})
    with pytest.raises(ParameterError):
        mask_from_tree(T, {(0, 0): 1, (0, 1): 1, (0, 2): 1})
    with pytest.raises(ParameterError):
        mask_from_tree(T, {(0, 0): 0, (0, 1): 0.5, (0, 2): 1})
    with pytest.raises(ParameterError):
        mask_from_windows({(0, 3)}, 3, 1)


def test_duplicate_tree_rejected_unless_raw():
    with pytest.raises(InvalidTreeError):
        mask_from_tree(duplicate_window_tree())
    m = mask_from_tree(duplicate_window_tree(), validate=False)
    rep = check_mask(m)
    assert not rep.passed
    chk = rep["row sums of squared modulus equal one"]
    assert not chk.passed and chk.details["violated_rows"]


def test_wavelet_shift_masks_are_disjoint_rolls():
    m = mask_from_tree(sample_tree())
    shifted = wavelet_shift_masks(m)
    assert len(shifted) == 2
    union = m.support.astype(int) + sum(s.support.astype(int) for s in shifted)
    assert (union == 1).all()
    with pytest.raises(MaskError):
        wavelet_shift_masks(mask_from_tree(duplicate_window_tree(), validate=False))


def test_with_phase_matches_rolled_mask():
    m = mask_from_tree(sample_tree())
    beta = solve_coefficients(m)
    for l in range(3):
        assert mask_from_coefficients(beta.with_phase(l)).equals(m.rolled(l).table()).all()


def test_delta_mask_and_table_shapes():
    m = delta_mask(3, 2)
    assert m.shape == (3, 3, 3)
    assert not check_mask(m).passed
    with pytest.raises(ParameterError):
        CoefficientTable(3, 1, np.zeros(4))
    assert solve_coefficients(mask_from_tree(haar_tree())).as_tensor().shape == (3, 3)


def test_exact_beta_scale_is_rational():
    beta = solve_coefficients(mask_from_tree(sample_tree()))
    assert isinstance(beta.values.scale, Fraction)
