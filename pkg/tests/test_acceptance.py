"""Acceptance criteria 1-10, each at its stated tolerance and time budget.

Every test prints one ``[criterion k] PASS|FAIL`` line (visible in
``pytest -v`` output) before asserting.
"""

import json
import time

import numpy as np
import pytest

from conftest import SAMPLE_SUPPORT, SAMPLE_WINDOWS, duplicate_window_tree, sample_tree, haar_tree
from vilenkin_mra import derive, verify_bank
from vilenkin_mra.cli import main as cli_main
from vilenkin_mra.cyclotomic import CycloArray
from vilenkin_mra.mask import check_mask, mask_from_coefficients, mask_from_tree, solve_coefficients
from vilenkin_mra.refinable import (
    is_elementary,
    support_set,
    support_set_bruteforce,
    verify_refinement,
    verify_shift_orthonormality,
)
from vilenkin_mra.transform import FiniteSignal, TransformPlan, analyze, energy_report, project, synthesize
from vilenkin_mra.tree import (
    allowed_windows,
    build_nvalid,
    enumerate_nvalid,
    height,
    to_json,
    tree_from_support,
    validate_nvalid,
)
from vilenkin_mra.wavelet import wavelet_support_sets

GRAM_TOL = 1e-10


def report(capsys, k, title, passed, elapsed, budget=None, detail=""):
    timing = f"{elapsed * 1e3:.3g} ms" if elapsed < 1 else f"{elapsed:.2f} s"
    if budget is not None:
        timing += f" (budget {budget * 1e3:.3g} ms)" if budget < 1 else f" (budget {budget:g} s)"
    line = f"[criterion {k}] {'PASS' if passed else 'FAIL'}: {title}; {timing}"
    if detail:
        line += f"; {detail}"
    with capsys.disabled():
        print("\n" + line)
    return line


def within(elapsed, budget):
    return budget is None or elapsed <= budget


def unit_phases(T, rng):
    zero = (0,) * (T.N + 1)
    return {w: (1 + 0j if w == zero else complex(np.exp(2j * np.pi * rng.random())))
            for w in allowed_windows(T)}


def test_criterion_1_example_tree(capsys):
    T = sample_tree()
    best = float("inf")
    for _ in range(5):
        t = time.perf_counter()
        rep = validate_nvalid(T)
        wins = allowed_windows(T)
        best = min(best, time.perf_counter() - t)
    ok = rep.valid and rep.height == 6 and height(T) == 6 and len(wins) == 9 and wins == SAMPLE_WINDOWS
    budget = 1e-3
    report(capsys, 1, "example tree (p=3, N=2) is 2-valid, height 6, 9 allowed windows", ok and within(best, budget),
           best, budget, f"valid={rep.valid} height={rep.height} windows={len(wins)} (best of 5 runs)")
    assert ok and within(best, budget)


def test_criterion_2_support_oracle(capsys):
    t = time.perf_counter()
    mismatches = []
    count = 0
    trees = [("sample", sample_tree())]
    for p, N in [(2, 1), (3, 1), (2, 2), (3, 2)]:
        trees += [(f"{p},{N}#{i}", T) for i, T in enumerate(enumerate_nvalid(p, N))]
    for name, T in trees:
        m = mask_from_tree(T)
        E = support_set(m)
        if support_set_bruteforce(m, E.M).cosets != E.cosets:
            mismatches.append(name)
        count += 1
    E1 = support_set(mask_from_tree(sample_tree()))
    listed = E1.words_high_first() == SAMPLE_SUPPORT
    elem = is_elementary(E1).passed and (E1.N, E1.M) == (2, 2)
    elapsed = time.perf_counter() - t
    ok = not mismatches and listed and elem
    report(capsys, 2, "support walk equals exhaustive search; example set is the listed (2,2)-elementary set",
           ok and within(elapsed, 1.0), elapsed, 1.0,
           f"{count} masks, {len(mismatches)} mismatches, listed={listed}, elementary={elem}")
    assert ok and within(elapsed, 1.0)


def test_criterion_3_orthonormality(capsys):
    t = time.perf_counter()
    masks = [mask_from_tree(sample_tree()), mask_from_tree(haar_tree())]
    for p, N in [(2, 1), (3, 1), (2, 2), (3, 2)]:
        masks += [mask_from_tree(T) for T in enumerate_nvalid(p, N)]
    masks += [mask_from_tree(build_nvalid(p, N, s)) for p, N in [(5, 1), (2, 3)]
              for s in ("debruijn-path", "greedy-branch", "min-height")]
    row_fail = 0
    for m in masks:
        chk = check_mask(m)["row sums of squared modulus equal one"]
        row_fail += not (chk.passed and chk.exact)
    exact = verify_shift_orthonormality(derive(sample_tree()).phi, 3)
    g_exact = exact["shift Gram matrix is the identity"]
    rows_exact = exact["Fourier-side row sums equal one"]
    rng = np.random.default_rng(3)
    cx = verify_shift_orthonormality(derive(sample_tree(), unit_phases(sample_tree(), rng)).phi, 3, GRAM_TOL)
    g_cx = cx["shift Gram matrix is the identity"]
    elapsed = time.perf_counter() - t
    ok = (row_fail == 0 and g_exact.passed and g_exact.exact and g_exact.max_deviation == 0.0
          and g_exact.details["shifts"] == 27 and rows_exact.passed
          and g_cx.passed and not g_cx.exact and g_cx.max_deviation <= GRAM_TOL)
    report(capsys, 3, "row sums equal one; 27-shift Gram is the identity", ok and within(elapsed, 5.0),
           elapsed, 5.0, f"{len(masks)} masks with {row_fail} row failures; exact Gram deviation "
           f"{g_exact.max_deviation}; complex Gram deviation {g_cx.max_deviation:.2e}")
    assert ok and within(elapsed, 5.0)


def test_criterion_4_refinement(capsys):
    t = time.perf_counter()
    names = []
    ok = True
    for name, T in [("sample", sample_tree()), ("haar", haar_tree())]:
        mra = derive(T)
        rep = verify_refinement(mra.phi, mra.mask, mra.beta)
        freq = rep["frequency-side refinement identity"]
        shell = rep["mask product vanishes on the shell above G_M-perp"]
        good = freq.passed and freq.exact and shell.passed and shell.exact
        ok &= good and rep.passed
        names.append(f"{name}:{'ok' if good else 'fail'}")
    elapsed = time.perf_counter() - t
    report(capsys, 4, "refinement identity on G_(M+1)-perp cosets, product vanishes on the outer shell",
           ok, elapsed, None, ", ".join(names) + " (exact)")
    assert ok


def test_criterion_5_coefficient_round_trip(capsys):
    t = time.perf_counter()
    ok = True
    for T in [sample_tree(), haar_tree(), build_nvalid(5, 1, "greedy", seed=1), build_nvalid(2, 3)]:
        m = mask_from_tree(T)
        beta = solve_coefficients(m)
        ok &= bool(mask_from_coefficients(beta).equals(m.table()).all())
        ok &= bool(beta.energy().equals(CycloArray.from_int([T.p], T.p).sum()).all())
    hb = solve_coefficients(mask_from_tree(haar_tree()))
    haar_ok = (hb.nonzero_shifts() == [(0, 0), (0, 1), (0, 2)]
               and bool(hb.values.equals(CycloArray.from_int([1, 1, 1, 0, 0, 0, 0, 0, 0], 3)).all()))
    elapsed = time.perf_counter() - t
    report(capsys, 5, "beta reproduces the mask, energy equals p, Haar beta = (1,1,1)", ok and haar_ok,
           elapsed, None, "exact cyclotomic comparison")
    assert ok and haar_ok


def test_criterion_6_wavelet_orthonormality(capsys):
    t = time.perf_counter()
    parts_ok = True
    worst = 0.0
    set_notes = []
    sets_ok = True
    for name, T in [("haar", haar_tree()), ("sample", sample_tree())]:
        mra = derive(T)
        rep = verify_bank(mra, mra.bank(), depth=2, tol=GRAM_TOL)
        gram = [c for c in rep.checks if "shifts orthogonal" in c.name or "shifts orthonormal" in c.name]
        parts_ok &= all(c.passed for c in gram) and len(gram) == (T.p - 1) + (T.p - 1) * (T.p - 2) // 2 + (T.p - 1)
        worst = max([worst] + [c.max_deviation for c in gram])
        tiles = {c.name: c.passed for c in rep.checks if c.name.startswith("E A intersected")}
        for l, S in wavelet_support_sets(mra.mask, mra.E).items():
            if l == 0:
                continue
            er = is_elementary(S)
            sets_ok &= er.passed
            failed = [c.name for c in er.failed]
            tiled = tiles.get(f"E A intersected with X_0 r_0^{l} tiles G_0-perp", False)
            set_notes.append(f"{name} l={l}: {len(S)} cosets, tiles G_0-perp={tiled}, "
                             + ("elementary" if er.passed else "not elementary (" + "; ".join(failed) + ")"))
    elapsed = time.perf_counter() - t
    ok = parts_ok and sets_ok and within(elapsed, 30.0)
    report(capsys, 6, "parts (a)-(c) over H_0^(2); E A intersected with X_0 r_0^l is elementary",
           ok, elapsed, 30.0, f"(a)-(c) {'pass' if parts_ok else 'FAIL'} (max deviation {worst}); "
           + " | ".join(set_notes))
    assert parts_ok, "Gram parts (a)-(c) failed"
    assert sets_ok, "set-level clause: " + " | ".join(set_notes)
    assert within(elapsed, 30.0)


def test_criterion_7_tree_inverse(capsys):
    t = time.perf_counter()
    count = 0
    bad = 0
    for p, N in [(2, 1), (3, 1), (5, 1), (7, 1), (2, 2), (3, 2), (2, 3)]:
        if p ** N > 9:
            continue
        for T in enumerate_nvalid(p, N):
            count += 1
            back = tree_from_support(allowed_windows(T), p, N)
            bad += allowed_windows(back) != allowed_windows(T)
    elapsed = time.perf_counter() - t
    report(capsys, 7, "tree_from_support inverts allowed_windows for every tree with p^N <= 9", bad == 0,
           elapsed, None, f"{count} trees, {bad} mismatches")
    assert bad == 0


def test_criterion_8_n1_bound(capsys):
    t = time.perf_counter()
    count = 0
    bad = []
    for p in (3, 5):
        for T in enumerate_nvalid(p, 1):
            count += 1
            M = support_set(mask_from_tree(T)).M
            H = height(T)
            if not (M == H - 2 and M <= p - 2):
                bad.append((p, H, M))
    elapsed = time.perf_counter() - t
    report(capsys, 8, "every 1-valid tree over p in {3,5} has M = H - 2 <= p - 2", not bad, elapsed, None,
           f"{count} trees, {len(bad)} violations")
    assert not bad


def test_criterion_9_transform(capsys):
    t = time.perf_counter()
    rng = np.random.default_rng(9)
    worst_rec = 0.0
    worst_parseval = 0.0
    worst_idem = 0.0
    parseval_ok = True
    n_signals = 0
    for T in (haar_tree(), sample_tree()):
        bank = derive(T).bank()
        for levels in (1, 2, 3):
            R, S = bank.N + levels, bank.M + 1
            plan = TransformPlan(bank, R, S, levels)
            # 100 random in-span signals per bank, split over the three depths
            count = 34 if levels < 3 else 32
            for _ in range(count):
                C = rng.normal(size=(1, plan.n_coefficients)) + 1j * rng.normal(size=(1, plan.n_coefficients))
                f = FiniteSignal(bank.p, R, S, plan.synthesize(*plan.unflatten(C))[0])
                c = analyze(f, bank, levels, plan)
                back = synthesize(c, bank, plan)
                worst_rec = max(worst_rec, float(np.max(np.abs(back.samples - f.samples))))
                rep = energy_report(f, c, bank, in_span=True, tol=GRAM_TOL)
                parseval_ok &= rep.passed
                worst_parseval = max(worst_parseval, abs(c.energy() - f.norm2()) / max(f.norm2(), 1.0))
                n_signals += 1
        # off-span signals: finer resolution than the bank
        for _ in range(10):
            R, S = bank.N + 2, bank.M + 2
            x = rng.normal(size=bank.p ** (R + S)) + 1j * rng.normal(size=bank.p ** (R + S))
            f = FiniteSignal(bank.p, R, S, x)
            P1 = project(f, bank, 2)
            P2 = project(P1, bank, 2)
            worst_idem = max(worst_idem, float(np.max(np.abs(P1.samples - P2.samples))))
    elapsed = time.perf_counter() - t
    ok = worst_rec <= 1e-10 and parseval_ok and worst_parseval <= 1e-10 and worst_idem <= 1e-10
    report(capsys, 9, "perfect reconstruction, Parseval, idempotent projection", ok and within(elapsed, 60.0),
           elapsed, 60.0, f"{n_signals} in-span signals: max reconstruction error {worst_rec:.2e}, "
           f"max relative Parseval gap {worst_parseval:.2e}; idempotence gap {worst_idem:.2e}")
    assert ok and within(elapsed, 60.0)


def test_criterion_10_negative_control(capsys, tmp_path):
    t = time.perf_counter()
    tree = tmp_path / "dup.json"
    tree.write_text(to_json(duplicate_window_tree()))
    bundle = tmp_path / "dup-mra.json"
    code_strict = cli_main(["mra", "derive", str(tree)])
    code_derive = cli_main(["mra", "derive", str(tree), "--no-validate", "-o", str(bundle)])
    report_path = tmp_path / "dup-report.json"
    code_verify = cli_main(["mra", "verify", str(bundle), "--depth", "2", "-o", str(report_path)])
    capsys.readouterr()
    rep = json.loads(report_path.read_text())
    failed = {c["name"] for c in rep.get("checks", []) if not c["passed"]}
    mask_fails = "row sums of squared modulus equal one" in failed
    gram_fails = "shift Gram matrix is the identity" in failed
    elapsed = time.perf_counter() - t
    ok = code_strict == 2 and code_derive == 0 and code_verify == 2 and mask_fails and gram_fails
    report(capsys, 10, "duplicated-window tree is detected (exit code 2)", ok, elapsed, None,
           f"derive exit {code_strict}, verify exit {code_verify}, row-sum check failed={mask_fails}, "
           f"Gram check failed={gram_fails}")
    assert ok
