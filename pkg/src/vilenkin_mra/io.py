"""JSON and CSV layouts for trees, masks, tables, banks and signals.

Digit words are written as strings, one character per digit
(``0-9a-z``), lowest group index first.  Exact tables keep their
cyclotomic coefficients so a round trip through a file is lossless.
"""

from __future__ import annotations

import csv
import io as _io
import json
from fractions import Fraction

import numpy as np

from .cyclotomic import CycloArray
from .exceptions import ParameterError
from .grid import StepFunction, all_words, format_word, h0_shifts, parse_word, flat_index
from .group import CharCoset
from .mask import CoefficientTable, Mask, mask_from_windows
from .refinable import ElementarySet, PhiTable
from .tree import PTree, from_json as tree_from_json, to_json as tree_to_json
from .wavelet import WaveletBank

__all__ = [
    "dumps",
    "encode_table",
    "decode_table",
    "mask_to_dict",
    "mask_from_dict",
    "mask_to_csv",
    "coefficients_to_csv",
    "load_phases",
    "mra_to_dict",
    "mra_from_dict",
    "bank_to_dict",
    "bank_from_dict",
    "signal_to_csv",
    "signal_from_csv",
]


def dumps(obj) -> str:
    """Deterministic JSON text (sorted keys, fixed indentation)."""
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


# tables -------------------------------------------------------------------------

def encode_table(values, words, p: int) -> dict:
    """Table keyed by digit-word strings, in the order of ``words``."""
    words = [w if isinstance(w, str) else format_word(w, p) for w in words]
    if isinstance(values, CycloArray):
        return {
            "encoding": "cyclotomic",
            "p": values.p,
            "scale": str(values.scale),
            "values": {w: [int(c) for c in row] for w, row in zip(words, values.coef.reshape(-1, values.p))},
        }
    values = np.asarray(values, dtype=complex).reshape(-1)
    return {"encoding": "complex", "values": {w: [float(z.real), float(z.imag)] for w, z in zip(words, values)}}


def decode_table(data: dict, words, p: int):
    """Values in the order of ``words`` (string keys or digit tuples)."""
    keys = [w if isinstance(w, str) else format_word(w, p) for w in words]
    table = data.get("values", {})
    missing = [k for k in keys if k not in table]
    if missing:
        raise ParameterError(f"table lacks entry {missing[0]!r} ({len(missing)} missing)")
    if len(table) != len(keys):
        raise ParameterError(f"table has {len(table)} entries, expected {len(keys)}")
    enc = data.get("encoding")
    if enc == "cyclotomic":
        coef = np.array([table[k] for k in keys], dtype=np.int64).reshape(len(keys), p)
        return CycloArray(coef, p, Fraction(data.get("scale", "1")))
    if enc == "complex":
        return np.array([complex(*table[k]) for k in keys], dtype=complex)
    raise ParameterError(f"unknown table encoding {enc!r}")


def _step_to_dict(f: StepFunction) -> dict:
    d = encode_table(f.values, all_words(f.hi - f.lo, f.p), f.p)
    d.update(lo=f.lo, hi=f.hi)
    return d


def _step_from_dict(d: dict, p: int) -> StepFunction:
    lo, hi = int(d["lo"]), int(d["hi"])
    return StepFunction(p, lo, hi, decode_table(d, all_words(hi - lo, p), p))


# masks ------------------------------------------------------------------------

def _mask_header(N: int) -> list:
    return [f"alpha_{-k}" for k in range(N, 0, -1)] + ["alpha_0"]


def mask_to_dict(m: Mask) -> dict:
    rows = []
    for idx in m.nonzero_indices():
        if m.exact:
            rows.append(list(idx) + [int(m.phase[idx])])
        else:
            z = complex(m.complex_table()[idx])
            rows.append(list(idx) + [z.real, z.imag])
    return {
        "p": m.p,
        "N": m.N,
        "encoding": "phase" if m.exact else "complex",
        "columns": _mask_header(m.N) + (["phase"] if m.exact else ["re", "im"]),
        "entries": rows,
    }


def mask_from_dict(d: dict) -> Mask:
    try:
        p, N = int(d["p"]), int(d["N"])
        enc = d.get("encoding", "phase")
        windows = []
        phases = {}
        for row in d["entries"]:
            idx = tuple(int(a) for a in row[:N + 1])
            win = idx[::-1]
            windows.append(win)
            if enc == "phase":
                phases[win] = int(row[N + 1]) if len(row) > N + 1 else 0
            else:
                phases[win] = [float(row[N + 1]), float(row[N + 2])]
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ParameterError(f"malformed mask JSON: {exc}") from None
    zero = (0,) * (N + 1)
    if zero in phases and enc == "complex":
        z = complex(*phases[zero])
        if abs(z - 1) > 1e-12:
            # keep the file's value so that check_mask can report it
            return _raw_complex_mask(p, N, phases)
    if zero in phases and enc == "phase" and phases[zero] != 0:
        return _raw_phase_mask(p, N, phases)
    return mask_from_windows(windows, p, N, phases)


def _raw_phase_mask(p, N, phases):
    sup = np.zeros((p,) * (N + 1), dtype=bool)
    ph = np.zeros(sup.shape, dtype=np.int64)
    for w, k in phases.items():
        sup[w[::-1]] = True
        ph[w[::-1]] = k
    return Mask(p, N, sup, phase=ph)


def _raw_complex_mask(p, N, phases):
    sup = np.zeros((p,) * (N + 1), dtype=bool)
    val = np.zeros(sup.shape, dtype=complex)
    for w, z in phases.items():
        sup[w[::-1]] = True
        val[w[::-1]] = complex(*z)
    return Mask(p, N, sup, values=val)


def mask_to_csv(m: Mask) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_mask_header(m.N) + ["re", "im"])
    table = m.complex_table()
    for idx in all_words(m.N + 1, m.p):
        z = complex(table[tuple(idx)])
        w.writerow([int(a) for a in idx] + [repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def coefficients_to_csv(beta: CoefficientTable) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"a_{-k}" for k in range(1, beta.N + 2)] + ["re", "im"])
    for digits, z in zip(beta.shifts, beta.complex_values()):
        w.writerow([int(a) for a in digits[::-1]] + [repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def load_phases(data: dict, p: int) -> dict:
    """Phase file: window string (root-side label first) -> int phase or ``[re, im]``."""
    if not isinstance(data, dict):
        raise ParameterError("phase file must be a JSON object mapping windows to phases")
    return {parse_word(k, p): v for k, v in data.items()}


# bundles --------------------------------------------------------------------------

def _coefficients_to_dict(beta: CoefficientTable) -> dict:
    return encode_table(beta.values, beta.shifts, beta.p)


def _coefficients_from_dict(d: dict, p: int, N: int) -> CoefficientTable:
    return CoefficientTable(p, N, decode_table(d, h0_shifts(N + 1, p), p))


def mra_to_dict(mra) -> dict:
    p, N, M = mra.p, mra.N, mra.M
    return {
        "kind": "mra",
        "p": p,
        "N": N,
        "M": M,
        "tree": json.loads(tree_to_json(mra.tree)) if mra.tree is not None else None,
        "mask": mask_to_dict(mra.mask),
        "support": [format_word(w, p) for w in mra.E.words()],
        "phi_hat": encode_table(mra.phi.hat, all_words(N + M, p), p),
        "phi": _step_to_dict(mra.phi.function()),
        "beta": _coefficients_to_dict(mra.beta),
    }


def mra_from_dict(d: dict):
    from .pipeline import MRA

    try:
        if d.get("kind") not in ("mra", "wavelet-bank"):
            raise ParameterError(f"expected an MRA bundle, got kind {d.get('kind')!r}")
        if d.get("kind") == "wavelet-bank":
            d = d["mra"]
        p, N, M = int(d["p"]), int(d["N"]), int(d["M"])
        mask = mask_from_dict(d["mask"])
        E = ElementarySet.from_cosets(p, N, (CharCoset(N, parse_word(w, p)) for w in d["support"]), M)
        hat = decode_table(d["phi_hat"], all_words(N + M, p), p)
        phi = _step_from_dict(d["phi"], p)
        if (phi.lo, phi.hi) != (-N, M):
            raise ParameterError(f"phi table covers G_{phi.lo}/G_{phi.hi}, expected G_{-N}/G_{M}")
        beta = _coefficients_from_dict(d["beta"], p, N)
        tree = tree_from_json(d["tree"]) if d.get("tree") else None
    except KeyError as exc:
        raise ParameterError(f"bundle lacks field {exc}") from None
    return MRA(mask, E, beta, PhiTable(p, N, M, E, hat, phi.values), tree)


def bank_to_dict(bank: WaveletBank, mra=None) -> dict:
    out = {
        "kind": "wavelet-bank",
        "p": bank.p,
        "N": bank.N,
        "M": bank.M,
        "phi": _step_to_dict(bank.phi),
        "beta": _coefficients_to_dict(bank.beta),
        "beta_l": {str(l): _coefficients_to_dict(b) for l, b in enumerate(bank.beta_l, start=1)},
        "psi": {str(l): _step_to_dict(f) for l, f in enumerate(bank.psi, start=1)},
    }
    if mra is not None:
        out["mra"] = mra_to_dict(mra)
    return out


def bank_from_dict(d: dict) -> WaveletBank:
    try:
        if d.get("kind") != "wavelet-bank":
            raise ParameterError(f"expected a wavelet bank, got kind {d.get('kind')!r}")
        p, N, M = int(d["p"]), int(d["N"]), int(d["M"])
        beta = _coefficients_from_dict(d["beta"], p, N)
        beta_l = [_coefficients_from_dict(d["beta_l"][str(l)], p, N) for l in range(1, p)]
        psi = [_step_from_dict(d["psi"][str(l)], p) for l in range(1, p)]
        phi = _step_from_dict(d["phi"], p)
    except KeyError as exc:
        raise ParameterError(f"bank lacks field {exc}") from None
    return WaveletBank(p, N, M, beta, beta_l, psi, phi)


# signals --------------------------------------------------------------------------

def signal_to_csv(samples, p: int, R: int, S: int) -> str:
    samples = np.asarray(samples, dtype=complex).reshape(-1)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["digits", "re", "im"])
    for word, z in zip(all_words(R + S, p), samples):
        w.writerow([format_word(word, p), repr(float(z.real)), repr(float(z.imag))])
    return buf.getvalue()


def signal_from_csv(text: str, p: int) -> tuple:
    """``(samples, n_digits)``; rows may come in any order but must cover every word once."""
    rows = list(csv.reader(_io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["digits", "re", "im"]:
        raise ParameterError("signal CSV must start with the header 'digits,re,im'")
    body = [r for r in rows[1:] if r]
    if not body:
        raise ParameterError("signal CSV has no samples")
    length = len(body[0][0].strip())
    n = p ** length
    if len(body) != n:
        raise ParameterError(f"signal CSV has {len(body)} rows, expected {n} for {length}-digit words")
    samples = np.zeros(n, dtype=complex)
    seen = np.zeros(n, dtype=bool)
    for r in body:
        try:
            word = parse_word(r[0], p)
            z = complex(float(r[1]), float(r[2]))
        except (IndexError, ValueError):
            raise ParameterError(f"bad signal row {r!r}") from None
        if len(word) != length:
            raise ParameterError(f"digit word {r[0]!r} has the wrong length")
        i = int(flat_index(word, p))
        if seen[i]:
            raise ParameterError(f"digit word {r[0]!r} appears twice")
        seen[i] = True
        samples[i] = z
    return samples, length
