"""N-valid rooted trees on the label set ``{0, ..., p-1}``.

A tree is N-valid when its root and the next N-1 levels form a single chain
of zeros and every word of N labels occurs exactly once as N consecutive
vertices on a root-to-leaf path.

Useful reformulation: the node at which an N-window ends can be named by
that window, and its parent by the window one step closer to the root.  So
N-valid trees are exactly the spanning out-arborescences of the de Bruijn
graph on N-words (edge ``w -> w[1:] + (c,)``) rooted at ``0^N``, hung below
a chain of N-1 zeros.  Construction and enumeration work in that picture.
"""

from __future__ import annotations

import itertools
import json
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .exceptions import (
    InvalidTreeError,
    NotValidMaskSupportError,
    ParameterError,
    ResourceError,
    StructureError,
)
from .validation import check_depth, check_prime

__all__ = [
    "PTree",
    "ValidationReport",
    "validate_nvalid",
    "height",
    "n_windows",
    "allowed_windows",
    "build_nvalid",
    "de_bruijn_sequence",
    "path_tree",
    "tree_from_parents",
    "tree_from_paths",
    "enumerate_nvalid",
    "tree_from_support",
    "export",
    "to_json",
    "from_json",
    "to_dot",
]

STRATEGIES = ("debruijn-path", "greedy-branch", "min-height")
ENUMERATION_GUARD = 16


@dataclass(frozen=True)
class _Node:
    id: int
    label: int
    parent: Optional[int]


class PTree:
    """Rooted tree with integer labels below ``p``.

    Structural soundness (one root, existing parents, no cycles, labels in
    range) is enforced on construction; N-validity is not, see
    :func:`validate_nvalid`.
    """

    def __init__(self, p: int, N: int, nodes: Iterable):
        self.p = check_prime(p)
        self.N = check_depth(N)
        recs = []
        for rec in nodes:
            if isinstance(rec, dict):
                rec = _Node(int(rec["id"]), int(rec["label"]),
                            None if rec.get("parent") is None else int(rec["parent"]))
            elif not isinstance(rec, _Node):
                rec = _Node(*rec)
            recs.append(rec)
        self._nodes = {}
        for rec in recs:
            if rec.id in self._nodes:
                raise StructureError(f"duplicate node id {rec.id}", [rec.id])
            self._nodes[rec.id] = rec
        bad_labels = [r.id for r in recs if not 0 <= r.label < self.p]
        if bad_labels:
            raise StructureError(f"labels outside 0..{self.p - 1}", bad_labels)
        roots = [r.id for r in recs if r.parent is None]
        if len(roots) != 1:
            raise StructureError(f"expected exactly one root, found {len(roots)}", roots)
        dangling = [r.id for r in recs if r.parent is not None and r.parent not in self._nodes]
        if dangling:
            raise StructureError("parent ids that do not exist", dangling)
        self.root = roots[0]
        self._children = {i: [] for i in self._nodes}
        for r in recs:
            if r.parent is not None:
                self._children[r.parent].append(r.id)
        for kids in self._children.values():
            kids.sort(key=lambda i: (self._nodes[i].label, i))
        seen = set()
        stack = [self.root]
        while stack:
            i = stack.pop()
            seen.add(i)
            stack.extend(self._children[i])
        unreachable = sorted(set(self._nodes) - seen)
        if unreachable:
            raise StructureError("nodes not reachable from the root (cycle or detached part)",
                                 unreachable)

    # accessors --------------------------------------------------------------

    def __len__(self):
        return len(self._nodes)

    @property
    def node_ids(self):
        return list(self._nodes)

    def label(self, i: int) -> int:
        return self._nodes[i].label

    def parent(self, i: int) -> Optional[int]:
        return self._nodes[i].parent

    def children(self, i: int) -> list:
        return list(self._children[i])

    def preorder(self) -> list:
        out = []
        stack = [self.root]
        while stack:
            i = stack.pop()
            out.append(i)
            stack.extend(reversed(self._children[i]))
        return out

    def depth(self, i: int) -> int:
        d = 0
        while self._nodes[i].parent is not None:
            i = self._nodes[i].parent
            d += 1
        return d

    def path_labels(self, i: int) -> tuple:
        """Labels from the root down to node ``i``."""
        out = []
        while i is not None:
            out.append(self._nodes[i].label)
            i = self._nodes[i].parent
        return tuple(reversed(out))

    def leaves(self) -> list:
        return [i for i in self.preorder() if not self._children[i]]

    def edges(self) -> list:
        return [(self._nodes[i].parent, i) for i in self.preorder() if self._nodes[i].parent is not None]

    # canonical form ---------------------------------------------------------

    def _key(self, i=None):
        i = self.root if i is None else i
        return (self._nodes[i].label, tuple(self._key(c) for c in self._children[i]))

    def canonical(self) -> PTree:
        """Same tree with ids renumbered in preorder, children by ascending label."""
        order = self.preorder()
        new_id = {old: k for k, old in enumerate(order)}
        recs = [_Node(new_id[i], self._nodes[i].label,
                      None if self._nodes[i].parent is None else new_id[self._nodes[i].parent])
                for i in order]
        return PTree(self.p, self.N, recs)

    def __eq__(self, other):
        return (isinstance(other, PTree) and self.p == other.p and self.N == other.N
                and self._key() == other._key())

    def __hash__(self):
        return hash((self.p, self.N, self._key()))

    def __repr__(self):
        return f"PTree(p={self.p}, N={self.N}, nodes={len(self)})"


@dataclass
class ValidationReport:
    valid: bool
    p: int
    N: int
    counts: dict = field(default_factory=dict)
    missing: list = field(default_factory=list)
    duplicated: list = field(default_factory=list)
    zero_prefix_ok: bool = True
    height: int = 0
    messages: list = field(default_factory=list)

    @property
    def found(self) -> int:
        return sum(1 for c in self.counts.values() if c >= 1)

    def summary(self) -> str:
        total = self.p ** self.N
        state = "valid" if self.valid else "INVALID"
        return f"{state}: {self.found}/{total} windows, height {self.height}"

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "p": self.p,
            "N": self.N,
            "windows_found": self.found,
            "windows_total": self.p ** self.N,
            "missing": [list(w) for w in self.missing],
            "duplicated": [list(w) for w in self.duplicated],
            "zero_prefix_ok": self.zero_prefix_ok,
            "height": self.height,
            "messages": list(self.messages),
        }


def _window_walk(T: PTree, size: int) -> Iterator[tuple]:
    """Every run of ``size`` consecutive labels along root-to-leaf direction."""
    stack = [(T.root, (T.label(T.root),))]
    while stack:
        i, tail = stack.pop()
        if len(tail) == size:
            yield tail
        for c in T.children(i):
            stack.append((c, (tail + (T.label(c),))[-size:]))


def n_windows(T: PTree, size: Optional[int] = None) -> Counter:
    return Counter(_window_walk(T, T.N if size is None else size))


def _zero_prefix_ok(T: PTree) -> bool:
    i = T.root
    for level in range(T.N):
        if T.label(i) != 0:
            return False
        if level < T.N - 1:
            kids = T.children(i)
            if len(kids) != 1:
                return False
            i = kids[0]
    return True


def height(T: PTree) -> int:
    """Number of vertices on the longest root-to-leaf path."""
    best = 0
    stack = [(T.root, 1)]
    while stack:
        i, d = stack.pop()
        best = max(best, d)
        stack.extend((c, d + 1) for c in T.children(i))
    return best


def validate_nvalid(T: PTree) -> ValidationReport:
    counts = n_windows(T)
    words = list(itertools.product(range(T.p), repeat=T.N))
    full = {w: counts.get(w, 0) for w in words}
    missing = [w for w in words if full[w] == 0]
    duplicated = [w for w in words if full[w] > 1]
    zp = _zero_prefix_ok(T)
    msgs = []
    if not zp:
        msgs.append(f"root and the first {T.N - 1} levels must be a single chain of zeros")
    if missing:
        msgs.append(f"{len(missing)} windows missing")
    if duplicated:
        msgs.append(f"{len(duplicated)} windows occur more than once")
    return ValidationReport(valid=zp and not missing and not duplicated, p=T.p, N=T.N,
                            counts=full, missing=missing, duplicated=duplicated,
                            zero_prefix_ok=zp, height=height(T), messages=msgs)


def allowed_windows(T: PTree) -> frozenset:
    """(N+1)-label windows of ``T`` plus the all-zero window.

    The all-zero window stands for the zero extension above the root chain;
    it carries the mask value at the trivial coset.
    """
    wins = set(_window_walk(T, T.N + 1))
    wins.add((0,) * (T.N + 1))
    if len(wins) != T.p ** T.N:
        raise InvalidTreeError(f"tree has {len(wins)} allowed windows, expected {T.p ** T.N}")
    return frozenset(wins)


# construction ----------------------------------------------------------------

def de_bruijn_sequence(p: int, n: int) -> list:
    """Lexicographically least cyclic de Bruijn sequence B(p, n); starts with ``0^n``."""
    a = [0] * (p * n + 1)
    seq = []

    def db(t, period):
        if t > n:
            if n % period == 0:
                seq.extend(a[1:period + 1])
            return
        a[t] = a[t - period]
        db(t + 1, period)
        for j in range(a[t - period] + 1, p):
            a[t] = j
            db(t + 1, t)

    db(1, 1)
    return seq


def path_tree(labels: Iterable[int], p: int, N: int) -> PTree:
    labels = list(labels)
    recs = [_Node(k, lab, None if k == 0 else k - 1) for k, lab in enumerate(labels)]
    return PTree(p, N, recs)


def tree_from_parents(p: int, N: int, parent: dict) -> PTree:
    """PTree from an arborescence on N-words: ``parent[w]`` for every ``w != 0^N``."""
    zero = (0,) * N
    recs = [_Node(k, 0, None if k == 0 else k - 1) for k in range(N)]
    ids = {zero: N - 1}
    kids = {}
    for w, u in parent.items():
        kids.setdefault(u, []).append(w)
    queue = deque([zero])
    while queue:
        u = queue.popleft()
        for w in sorted(kids.get(u, [])):
            ids[w] = len(recs)
            recs.append(_Node(ids[w], w[-1], ids[u]))
            queue.append(w)
    if len(ids) != p ** N:
        raise InvalidTreeError("parent map does not reach every window from the zero window")
    return PTree(p, N, recs)


def _successors(w: tuple, p: int) -> list:
    return [w[1:] + (c,) for c in range(p)]


def build_nvalid(p: int, N: int, strategy: str = "debruijn-path", seed: Optional[int] = None) -> PTree:
    """Construct an N-valid tree.

    ``debruijn-path``
        a single path along the linearised de Bruijn sequence; height ``p^N + N - 1``.
    ``greedy-branch``
        randomised depth-first growth: a window is attached under the first
        node whose last N-1 labels match it; backtracking happens through
        the DFS stack.  Deterministic for a given ``seed``.
    ``min-height``
        breadth-first growth, which places every window at its least
        possible depth; the resulting height ``2N`` is minimal because a word
        without zeros cannot end before depth ``2N``.
    """
    p = check_prime(p)
    N = check_depth(N)
    strategy = {"debruijn": "debruijn-path", "greedy": "greedy-branch", "bfs": "min-height"}.get(
        strategy, strategy)
    zero = (0,) * N
    if strategy == "debruijn-path":
        seq = de_bruijn_sequence(p, N)
        return path_tree(seq + seq[:N - 1], p, N)
    if strategy == "greedy-branch":
        rng = random.Random(seed)
        parent = {}
        visited = {zero}
        succ = _successors(zero, p)
        rng.shuffle(succ)
        stack = [(zero, iter(succ))]
        while stack:
            u, it = stack[-1]
            for w in it:
                if w not in visited:
                    visited.add(w)
                    parent[w] = u
                    nxt = _successors(w, p)
                    rng.shuffle(nxt)
                    stack.append((w, iter(nxt)))
                    break
            else:
                stack.pop()
        return tree_from_parents(p, N, parent)
    if strategy == "min-height":
        parent = {}
        visited = {zero}
        queue = deque([zero])
        while queue:
            u = queue.popleft()
            for w in _successors(u, p):
                if w not in visited:
                    visited.add(w)
                    parent[w] = u
                    queue.append(w)
        return tree_from_parents(p, N, parent)
    raise ParameterError(f"unknown strategy {strategy!r}; choose from {', '.join(STRATEGIES)}")


def enumerate_nvalid(p: int, N: int, limit: Optional[int] = None) -> Iterator[PTree]:
    """Yield every N-valid tree once (children in ascending label order).

    Each tree is a choice of parent window for every nonzero N-word such
    that following parents always ends at ``0^N``; the choices are explored
    in lexicographic order with an incremental cycle check.
    """
    p = check_prime(p)
    N = check_depth(N)
    if p ** N > ENUMERATION_GUARD:
        raise ResourceError(f"enumeration guarded to p^N <= {ENUMERATION_GUARD}, got {p ** N}")
    if limit is not None and limit <= 0:
        return
    zero = (0,) * N
    words = [w for w in itertools.product(range(p), repeat=N) if w != zero]
    options = {w: [(c,) + w[:-1] for c in range(p) if (c,) + w[:-1] != w] for w in words}
    parent = {}
    emitted = 0

    def closes_cycle(w):
        u = parent[w]
        for _ in range(len(words)):
            if u == w:
                return True
            if u == zero or u not in parent:
                return False
            u = parent[u]
        return True

    def rec(k):
        nonlocal emitted
        if k == len(words):
            yield tree_from_parents(p, N, dict(parent))
            emitted += 1
            return
        w = words[k]
        for u in options[w]:
            parent[w] = u
            if not closes_cycle(w):
                yield from rec(k + 1)
                if limit is not None and emitted >= limit:
                    del parent[w]
                    return
            del parent[w]

    yield from rec(0)


def tree_from_paths(paths: Iterable[tuple], p: int, N: int) -> PTree:
    """Grow a tree by inserting root-to-node label paths one at a time.

    Each path is matched against the current tree from the root for as long
    as labels agree; the unmatched tail is grafted below the last matched
    vertex.  A path that is already present leaves the tree unchanged.
    """
    recs = [_Node(k, 0, None if k == 0 else k - 1) for k in range(N)]
    child = {}
    for path in paths:
        path = tuple(path)
        if path[:N] != (0,) * N:
            raise ParameterError(f"path {path} does not start with {N} zeros")
        at = N - 1
        for lab in path[N:]:
            nxt = child.get((at, lab))
            if nxt is None:
                nxt = len(recs)
                recs.append(_Node(nxt, lab, at))
                child[(at, lab)] = nxt
            at = nxt
    return PTree(p, N, recs)


def tree_from_support(support: Iterable[tuple], p: int, N: int) -> PTree:
    """Rebuild the tree whose allowed windows are ``support``.

    Requires the all-zero window and exactly one window for each leaf-side
    N-suffix.  For each N-word the root path is recovered by stepping to the
    window's root-side label repeatedly; the paths are then inserted with
    :func:`tree_from_paths`.
    """
    p = check_prime(p)
    N = check_depth(N)
    support = {tuple(int(a) for a in w) for w in support}
    zero = (0,) * N
    for w in support:
        if len(w) != N + 1 or any(not 0 <= a < p for a in w):
            raise NotValidMaskSupportError(f"window {w} is not a word of {N + 1} labels below {p}")
    if zero + (0,) not in support:
        raise NotValidMaskSupportError("support must contain the all-zero window")
    by_suffix = {}
    for w in support:
        if w[1:] in by_suffix:
            raise NotValidMaskSupportError(
                f"two windows end in {w[1:]}: {by_suffix[w[1:]]} and {w}")
        by_suffix[w[1:]] = w
    if len(by_suffix) != p ** N:
        missing = [s for s in itertools.product(range(p), repeat=N) if s not in by_suffix]
        raise NotValidMaskSupportError(f"no window ends in {missing[0]} ({len(missing)} suffixes uncovered)")
    paths = []
    for w in sorted(by_suffix):
        if w == zero:
            continue
        tail = []
        u = w
        for _ in range(p ** N):
            if u == zero:
                break
            tail.append(u[-1])
            u = by_suffix[u][:N]
        else:
            raise NotValidMaskSupportError(f"stepping rootward from {w} never reaches the zero window")
        paths.append(zero + tuple(reversed(tail)))
    return tree_from_paths(paths, p, N)


# export ------------------------------------------------------------------------

def to_json(T: PTree) -> str:
    C = T.canonical()
    nodes = [{"id": i, "label": C.label(i), "parent": C.parent(i)} for i in C.preorder()]
    return json.dumps({"p": C.p, "N": C.N, "nodes": nodes}, indent=1) + "\n"


def from_json(text) -> PTree:
    data = json.loads(text) if isinstance(text, (str, bytes)) else text
    try:
        return PTree(data["p"], data["N"], data["nodes"])
    except KeyError as exc:
        raise ParameterError(f"tree JSON lacks field {exc}") from None


def to_dot(T: PTree, name: str = "T") -> str:
    C = T.canonical()
    lines = [f"digraph {name} {{", "  rankdir=TB;", "  node [shape=circle];"]
    for i in C.preorder():
        lines.append(f'  n{i} [label="{C.label(i)}"];')
    for u, v in C.edges():
        lines.append(f"  n{u} -> n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export(T: PTree, fmt: str = "json") -> bytes:
    if fmt == "json":
        return to_json(T).encode()
    if fmt == "dot":
        return to_dot(T).encode()
    raise ParameterError(f"unknown export format {fmt!r}; use 'json' or 'dot'")
