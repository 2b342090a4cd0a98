"""Command-line front end.

Exit status: 0 when everything checked passes, 1 for usage or I/O
problems, 2 when a mathematical verification fails.  Reports go to
standard output as JSON; one-line summaries go to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as vio
from .exceptions import (
    InvalidTreeError,
    MaskError,
    ParameterError,
    ResourceError,
    StructureError,
    VilenkinError,
)
from .pipeline import derive, verify_bank, verify_mra
from .report import GRAM_TOL, Report
from .transform import CoefficientBundle, FiniteSignal, TransformPlan, analyze, synthesize
from .tree import (
    STRATEGIES,
    build_nvalid,
    enumerate_nvalid,
    export,
    from_json,
    height,
    to_json,
    tree_from_support,
    validate_nvalid,
)

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# small helpers ---------------------------------------------------------------------

def _read_text(path: str) -> str:
    try:
        return sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from None


def _check_out(path):
    if path and path != "-":
        parent = Path(path).resolve().parent
        if not parent.is_dir():
            raise UsageError(f"output directory {parent} does not exist")


def _write(path, text: str):
    if not path or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _emit(obj, out=None):
    """JSON document to ``out`` (a file) or standard output."""
    _write(out, vio.dumps(obj))


def _say(msg: str):
    print(msg, file=sys.stderr)


def _report_exit(rep: Report, out=None) -> int:
    _emit(rep.to_dict(), out)
    _say(rep.summary())
    return EXIT_OK if rep.passed else EXIT_FAIL


def _tol(value):
    tol = float(value)
    if not tol > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return tol


# tree ----------------------------------------------------------------------------------

def cmd_tree_build(a) -> int:
    _check_out(a.output)
    T = build_nvalid(a.p, a.N, a.strategy, seed=a.seed)
    _write(a.output, to_json(T))
    _say(f"built {a.strategy} tree: {len(T)} nodes, height {height(T)}")
    return EXIT_OK


def cmd_tree_validate(a) -> int:
    try:
        T = from_json(_read_text(a.tree))
    except StructureError as exc:
        _emit({"valid": False, "messages": [str(exc)], "node_ids": exc.node_ids})
        _say(f"INVALID: {exc}")
        return EXIT_FAIL
    except json.JSONDecodeError as exc:
        raise UsageError(f"{a.tree} is not valid JSON: {exc}") from None
    rep = validate_nvalid(T)
    _emit(rep.to_dict(), a.output)
    _say(rep.summary())
    for w in rep.missing[:20]:
        _say(f"  missing window {''.join(map(str, w))}")
    for w in rep.duplicated[:20]:
        _say(f"  duplicated window {''.join(map(str, w))}")
    return EXIT_OK if rep.valid else EXIT_FAIL


def cmd_tree_enumerate(a) -> int:
    _check_out(a.output)
    trees = [json.loads(to_json(T)) for T in enumerate_nvalid(a.p, a.N, limit=a.limit)]
    _emit({"p": a.p, "N": a.N, "count": len(trees), "trees": trees}, a.output)
    _say(f"{len(trees)} trees")
    return EXIT_OK


def cmd_tree_from_mask(a) -> int:
    _check_out(a.output)
    data = _read_json(a.mask)
    if data.get("kind") in ("mra", "wavelet-bank"):
        data = (data if data["kind"] == "mra" else data["mra"])["mask"]
    m = vio.mask_from_dict(data)
    T = tree_from_support(m.nonzero_windows(), m.p, m.N)
    _write(a.output, to_json(T))
    _say(f"recovered tree: {len(T)} nodes, height {height(T)}")
    return EXIT_OK


def cmd_tree_export(a) -> int:
    _check_out(a.output)
    T = from_json(_read_text(a.tree))
    _write(a.output, export(T, a.format).decode())
    return EXIT_OK


# mra --------------------------------------------------------------------------------

def cmd_mra_derive(a) -> int:
    _check_out(a.output)
    T = from_json(_read_text(a.tree))
    phases = vio.load_phases(_read_json(a.phases), T.p) if a.phases else None
    mra = derive(T, phases, strict=not a.no_validate)
    _emit(vio.mra_to_dict(mra), a.output)
    _say(f"derived: |E| = {len(mra.E)}, M = {mra.M}, p = {mra.p}, N = {mra.N}")
    return EXIT_OK


def cmd_mra_verify(a) -> int:
    mra = vio.mra_from_dict(_read_json(a.bundle))
    rep = verify_mra(mra, depth=a.depth, tol=a.tol, jobs=a.jobs)
    return _report_exit(rep, a.output)


# wavelet --------------------------------------------------------------------------

def _load_mra_and_bank(path):
    data = _read_json(path)
    mra = vio.mra_from_dict(data)
    bank = vio.bank_from_dict(data) if data.get("kind") == "wavelet-bank" else mra.bank()
    return mra, bank


def cmd_wavelet_derive(a) -> int:
    _check_out(a.output)
    mra = vio.mra_from_dict(_read_json(a.bundle))
    bank = mra.bank()
    _emit(vio.bank_to_dict(bank, mra), a.output)
    _say(f"derived {len(bank.psi)} wavelets with {len(bank.psi[0].values)} values each")
    return EXIT_OK


def cmd_wavelet_verify(a) -> int:
    mra, bank = _load_mra_and_bank(a.bundle)
    rep = verify_bank(mra, bank, depth=a.depth, tol=a.tol)
    return _report_exit(rep, a.output)


# transform ----------------------------------------------------------------------------

def _bank_for_transform(path):
    data = _read_json(path)
    if data.get("kind") == "wavelet-bank":
        return vio.bank_from_dict(data)
    return vio.mra_from_dict(data).bank()


def cmd_transform_analyze(a) -> int:
    _check_out(a.output)
    bank = _bank_for_transform(a.bank)
    samples, digits = vio.signal_from_csv(_read_text(a.signal), bank.p)
    S = bank.M + 1 if a.resolution is None else a.resolution
    R = digits - S
    f = FiniteSignal(bank.p, R, S, samples)
    plan = TransformPlan(bank, R, S, a.levels)
    c = analyze(f, bank, a.levels, plan)
    back = synthesize(c, bank, plan)
    err = float(np.max(np.abs(back.samples - f.samples)))
    doc = c.to_dict()
    doc["projection_error"] = err
    doc["signal_energy"] = f.norm2()
    doc["coefficient_energy"] = c.energy()
    _emit(doc, a.output)
    _say(f"analyzed G_-{R}/G_{S} signal over {a.levels} level(s); "
         f"projection max deviation {err:.3e}")
    return EXIT_OK


def cmd_transform_synthesize(a) -> int:
    _check_out(a.output)
    bank = _bank_for_transform(a.bank)
    c = CoefficientBundle.from_dict(_read_json(a.coefficients))
    f = synthesize(c, bank)
    _write(a.output, vio.signal_to_csv(f.samples, f.p, f.R, f.S))
    _say(f"synthesized {len(f.samples)} samples on G_-{f.R}/G_{f.S}")
    return EXIT_OK


# parser ----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="vilenkin-mra", description="Tree-generated wavelets on Vilenkin groups.")
    top = ap.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def out(p):
        p.add_argument("-o", "--output", help="output file (default: standard output)")

    tree = top.add_parser("tree", help="build, validate and convert N-valid trees")
    ts = tree.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    b = ts.add_parser("build")
    b.add_argument("--p", type=int, required=True)
    b.add_argument("--N", type=int, required=True)
    b.add_argument("--strategy", default="debruijn-path",
                   choices=STRATEGIES + ("debruijn", "greedy", "bfs"))
    b.add_argument("--seed", type=int, default=0)
    out(b)
    b.set_defaults(func=cmd_tree_build)
    v = ts.add_parser("validate")
    v.add_argument("tree")
    out(v)
    v.set_defaults(func=cmd_tree_validate)
    e = ts.add_parser("enumerate")
    e.add_argument("--p", type=int, required=True)
    e.add_argument("--N", type=int, required=True)
    e.add_argument("--limit", type=int)
    out(e)
    e.set_defaults(func=cmd_tree_enumerate)
    fm = ts.add_parser("from-mask")
    fm.add_argument("mask", help="mask JSON or an MRA bundle")
    out(fm)
    fm.set_defaults(func=cmd_tree_from_mask)
    x = ts.add_parser("export")
    x.add_argument("tree")
    x.add_argument("--format", choices=("json", "dot"), default="dot")
    out(x)
    x.set_defaults(func=cmd_tree_export)

    mra = top.add_parser("mra", help="derive and verify the scaling side")
    ms = mra.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    d = ms.add_parser("derive")
    d.add_argument("tree")
    d.add_argument("--phases", help="JSON map from window strings to phases")
    d.add_argument("--no-validate", action="store_true",
                   help="accept a tree that is not N-valid (for negative controls)")
    out(d)
    d.set_defaults(func=cmd_mra_derive)
    vv = ms.add_parser("verify")
    vv.add_argument("bundle")
    vv.add_argument("--depth", type=int, default=3)
    vv.add_argument("--tol", type=_tol, default=GRAM_TOL)
    vv.add_argument("--jobs", type=int, default=1)
    out(vv)
    vv.set_defaults(func=cmd_mra_verify)

    wav = top.add_parser("wavelet", help="derive and verify the wavelet bank")
    ws = wav.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    wd = ws.add_parser("derive")
    wd.add_argument("bundle")
    out(wd)
    wd.set_defaults(func=cmd_wavelet_derive)
    wv = ws.add_parser("verify")
    wv.add_argument("bundle", help="MRA bundle or wavelet bank")
    wv.add_argument("--depth", type=int, default=2)
    wv.add_argument("--tol", type=_tol, default=GRAM_TOL)
    out(wv)
    wv.set_defaults(func=cmd_wavelet_verify)

    tr = top.add_parser("transform", help="finite wavelet transform of CSV signals")
    trs = tr.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    an = trs.add_parser("analyze")
    an.add_argument("bank", help="wavelet bank or MRA bundle")
    an.add_argument("signal", help="CSV with header digits,re,im")
    an.add_argument("--levels", type=int, default=1)
    an.add_argument("--resolution", type=int, help="S, the finest subgroup index (default M+1)")
    out(an)
    an.set_defaults(func=cmd_transform_analyze)
    sy = trs.add_parser("synthesize")
    sy.add_argument("bank")
    sy.add_argument("coefficients")
    out(sy)
    sy.set_defaults(func=cmd_transform_synthesize)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", 1) is not None and getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be at least 1")
        if getattr(args, "depth", 1) < 0:
            raise UsageError("--depth must be nonnegative")
        return args.func(args)
    except UsageError as exc:
        _say(f"usage error: {exc}")
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (InvalidTreeError, MaskError) as exc:
        _emit({"passed": False, "error": type(exc).__name__, "message": str(exc)})
        _say(f"verification failed: {exc}")
        return EXIT_FAIL
    except (ParameterError, ResourceError, StructureError, VilenkinError) as exc:
        _say(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
