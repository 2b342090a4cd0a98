"""Slow reference computations that avoid the package's fast paths.

Each routine reaches its answer by a different road than the library:

* windows are read off every root-to-leaf path of the tree;
* the support set is the full (untruncated) product of mask values,
  evaluated on :class:`Character` objects with repeated dilation;
* beta comes from a dense linear solve of the mask formula;
* phi comes from the cascade iteration ``phi <- sum_h beta_h phi(A . - h)``
  started at the indicator of ``G_0``;
* the shift Gram matrix comes from the frequency side (Plancherel).
"""

from __future__ import annotations

import itertools

import numpy as np

from vilenkin_mra.group import Character, GroupElement, char_dilate_inv, dilate_inv, pair


def windows_by_paths(T, size):
    """Every ``size``-run of labels on every root-to-leaf path (set)."""
    out = set()

    def walk(i, path):
        path = path + [T.label(i)]
        kids = T.children(i)
        if not kids:
            for k in range(len(path) - size + 1):
                out.add(tuple(path[k:k + size]))
        for c in kids:
            walk(c, path)

    walk(T.root, [])
    return out


def tree_count(p, N):
    """Number of N-valid trees by the matrix-tree theorem on the de Bruijn graph.

    N-valid trees correspond to spanning arborescences rooted at ``0^N``
    (self-loops play no part); their number is the determinant of the
    in-degree Laplacian with the root's row and column removed.
    """
    words = list(itertools.product(range(p), repeat=N))
    index = {w: i for i, w in enumerate(words)}
    L = np.zeros((len(words), len(words)))
    for u in words:
        for c in range(p):
            v = u[1:] + (c,)
            if v != u:
                L[index[v], index[v]] += 1
                L[index[u], index[v]] -= 1
    root = index[(0,) * N]
    keep = [i for i in range(len(words)) if i != root]
    return int(round(np.linalg.det(L[np.ix_(keep, keep)])))


def mask_at(m, chi):
    idx = tuple(chi[k] for k in range(-m.N, 1))
    return complex(m.complex_table()[idx])


def full_product(m, chi, max_steps=64):
    """``prod_{n>=0} m(chi A^-n)`` evaluated until the character leaves every window."""
    val = 1 + 0j
    for _ in range(max_steps):
        if chi.highest is None or chi.highest < -m.N:
            return val
        val *= mask_at(m, chi)
        if val == 0:
            return 0j
        chi = char_dilate_inv(chi)
    raise RuntimeError("product did not terminate")


def support_by_product(m, M_bound):
    """Words over indices ``-N .. M_bound-1`` with a nonzero full product."""
    p, N = m.p, m.N
    out = set()
    for word in itertools.product(range(p), repeat=N + M_bound):
        chi = Character({-N + i: a for i, a in enumerate(word)}, p)
        if full_product(m, chi) != 0:
            w = list(word)
            while w and w[-1] == 0:
                w.pop()
            out.add(tuple(w))
    return out


def beta_by_solve(m):
    """Solve ``m(chi_k) = (1/p) sum_j beta_j conj((chi_k, A^-1 h_j))`` densely."""
    p, N = m.p, m.N
    chis = list(itertools.product(range(p), repeat=N + 1))          # alpha_-N .. alpha_0
    hs = list(itertools.product(range(p), repeat=N + 1))            # a_-N-1 .. a_-1
    Q = np.zeros((len(chis), len(hs)), dtype=complex)
    for k, al in enumerate(chis):
        chi = Character({-N + i: a for i, a in enumerate(al)}, p)
        for j, h in enumerate(hs):
            x = dilate_inv(GroupElement({-N - 1 + i: a for i, a in enumerate(h)}, p))
            Q[k, j] = np.conj(pair(chi, x).to_complex()) / p
    rhs = np.array([mask_at(m, Character({-N + i: a for i, a in enumerate(al)}, p)) for al in chis])
    return np.linalg.solve(Q, rhs)


def cascade_phi(beta_complex, p, N, M, steps=None):
    """Cascade iteration on digit tuples; returns phi on ``G_-N / G_M`` (C order, a_-N first).

    ``beta_complex`` is ordered like ``h0_shifts(N+1)``.
    """
    steps = M + N + 2 if steps is None else steps
    hs = list(itertools.product(range(p), repeat=N + 1))
    lo = -N
    # current function: dict from digit tuple on indices lo .. hi-1 to value
    hi = 0
    cur = {d: (1.0 + 0j if all(a == 0 for a in d[:N]) else 0j)
           for d in itertools.product(range(p), repeat=hi - lo)}
    for _ in range(steps):
        new_hi = hi + 1
        nxt = {}
        for x in itertools.product(range(p), repeat=new_hi - lo):
            total = 0j
            for b, h in zip(beta_complex, hs):
                if b == 0:
                    continue
                # A x has digit x_{k+1} at index k; it spans indices lo-1 .. new_hi-2
                ax = {lo - 1 + i: a for i, a in enumerate(x)}
                for i, a in enumerate(h):
                    k = -N - 1 + i
                    ax[k] = (ax.get(k, 0) - a) % p
                if ax.get(lo - 1, 0) != 0:
                    continue
                key = tuple(ax.get(k, 0) for k in range(lo, hi))
                total += b * cur[key]
            nxt[x] = total
        cur, hi = nxt, new_hi
    # restrict to resolution M (must be constant on the finer cosets)
    out = np.zeros(p ** (M + N), dtype=complex)
    for d, v in cur.items():
        head = d[:M + N]
        idx = 0
        for a in head:
            idx = idx * p + a
        if all(a == 0 for a in d[M + N:]):
            out[idx] = v
    return out


def gram_by_plancherel(E_words, hat_on_E, p, N, s):
    """``<phi(. - h), phi(. - g)>`` for h, g in ``H_0^(s)`` from the Fourier side.

    The inner product is ``int |phi_hat|^2 (chi, g - h) dnu``; each coset of
    ``G_-N^perp`` contributes ``p^-N (zeta, g - h)`` when ``g - h`` lies in
    ``G_-N`` and nothing otherwise.
    """
    shifts = list(itertools.product(range(p), repeat=s))   # a_-s .. a_-1
    G = np.zeros((len(shifts), len(shifts)), dtype=complex)
    for i, h in enumerate(shifts):
        for j, g in enumerate(shifts):
            diff = GroupElement({-s + k: (g[k] - h[k]) % p for k in range(s)}, p)
            if not diff.in_subgroup(-N):
                continue
            total = 0j
            for w, v in zip(E_words, hat_on_E):
                zeta = Character({-N + k: a for k, a in enumerate(w)}, p)
                total += abs(v) ** 2 * pair(zeta, diff).to_complex()
            G[i, j] = total / p ** N
    return G
