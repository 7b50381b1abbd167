"""Color coding for decorated cycles and paths.

A coloring assigns every vertex one of k colors; a subgraph is colorful when
its vertices carry pairwise distinct colors. Colorful sums are computed by
dynamic programming over (used-color subset, current endpoint, decoration
state) and checked against an exhaustive oracle.

Two engines share one "program" format, a list of steps where each step maps
decoration states to decoration states through X- or Y-edges:

* the anchored engine handles closed walks. Every colorful cycle has exactly
  one vertex of color 0; walks start there, so each cycle is met exactly
  twice (once per direction). Vertices are permuted so colors occupy
  contiguous blocks; the table for a subset S only stores the columns of
  S-colored vertices and every step is a sum of block products.
* the stacked engine handles walks from one source vertex. All subsets of
  one size are stacked into a single matrix so a step costs one product.

Word programs follow one fixed decoration word. Weighted programs carry the
current (and for cycles the first) decoration in the state and multiply by
lam, mu and rho on the fly, which sums weight * count over every word in one
pass.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InstanceTooLargeError, ParameterError
from .graphfam import DecoratedClass, Family, orbit

BRUTE_FORCE_LIMIT = 10**8


@dataclass(frozen=True)
class Coloring:
    """Vertex colors; for bipartite instances the first ``n_a`` entries
    color the row side [n] and the rest the column side [N]."""
    k: int
    colors: np.ndarray
    n_a: Optional[int] = None

    def __post_init__(self):
        c = np.asarray(self.colors)
        if self.k < 1:
            raise ParameterError("palette must be nonempty")
        if c.ndim != 1 or (c.size and (c.min() < 0 or c.max() >= self.k)):
            raise ParameterError("colors must be a vector over range(k)")
        object.__setattr__(self, "colors", c.astype(np.int64))

    @property
    def sides(self):
        if self.n_a is None:
            return (self.colors,)
        return (self.colors[: self.n_a], self.colors[self.n_a:])


@dataclass(frozen=True)
class ColorfulSum:
    value: float
    cls: DecoratedClass
    coloring_id: int


def random_coloring(n_vertices: int, k: int, seed, n_a: Optional[int] = None) -> Coloring:
    if k < 1:
        raise ParameterError("palette must be nonempty")
    rng = np.random.default_rng(seed)
    return Coloring(k, rng.integers(0, k, size=n_vertices), n_a)


def all_colorings(n_vertices: int, k: int, n_a: Optional[int] = None):
    """Every coloring of ``n_vertices`` with ``k`` colors (k**n of them)."""
    for c in itertools.product(range(k), repeat=n_vertices):
        yield Coloring(k, np.array(c), n_a)


def colorful_probability(m: int, k: Optional[int] = None) -> float:
    """Chance that m fixed vertices get distinct colors out of k (default k=m)."""
    k = m if k is None else k
    if m < 0 or k < 1:
        raise ParameterError("need m >= 0 and k >= 1")
    if m > k:
        return 0.0
    return math.exp(math.lgamma(k + 1) - math.lgamma(k - m + 1) - m * math.log(k))


def default_colorings(m: int, cap: int = 500) -> int:
    """min(ceil(1/r), cap) colorings for an m-vertex motif."""
    return int(min(math.ceil(1.0 / colorful_probability(m)), cap))


# ------------------------------------------------------------------ programs
#
# A step is (src_side, dst_side, transitions) with transitions a tuple of
# (p, q, d, coeff): from state p (None = start) to state q through an edge of
# matrix d (0 for X, 1 for Y). Cycle programs end with closing edges
# (p, d, coeff) back to the anchor; path programs end with accepting states
# (p, coeff).

@dataclass(frozen=True)
class Program:
    steps: tuple
    final: tuple
    anchor_side: int = 0


_D = {"b": 0, "c": 1}


def _cycle_word_program(word: str) -> Program:
    steps = [(0, 0, ((None if i == 0 else 0, 0, _D[ch], 1.0),))
             for i, ch in enumerate(word[:-1])]
    return Program(tuple(steps), ((0, _D[word[-1]], 1.0),))


def _cycle_weighted_program(ell, lam, mu, rho) -> Program:
    wt = (lam, mu)
    st = [(f, d) for f in (0, 1) for d in (0, 1)]
    steps = [(0, 0, tuple((None, (d, d), d, wt[d]) for d in (0, 1)))]
    mid = tuple(((f, p), (f, d), d, wt[d] * (rho if p != d else 1.0))
                for (f, p) in st for d in (0, 1))
    steps += [(0, 0, mid)] * (ell - 2)
    final = tuple(((f, p), d, wt[d] * (rho if p != d else 1.0) * (rho if d != f else 1.0))
                  for (f, p) in st for d in (0, 1))
    return Program(tuple(steps), final)


def _bip_cycle_word_programs(word: str):
    ell = len(word)
    # anchor on the row side: hats in order, last half-hat closes
    a_steps = []
    for j, ch in enumerate(word):
        a_steps.append((0, 1, ((None if j == 0 else 0, 0, _D[ch], 1.0),)))
        if j < ell - 1:
            a_steps.append((1, 0, ((0, 0, _D[ch], 1.0),)))
    prog_a = Program(tuple(a_steps), ((0, _D[word[-1]], 1.0),), 0)
    # anchor on the column side: start inside hat 1, close with its first half
    b_steps = [(1, 0, ((None, 0, _D[word[0]], 1.0),))]
    for ch in word[1:]:
        b_steps.append((0, 1, ((0, 0, _D[ch], 1.0),)))
        b_steps.append((1, 0, ((0, 0, _D[ch], 1.0),)))
    prog_b = Program(tuple(b_steps), ((0, _D[word[0]], 1.0),), 1)
    return prog_a, prog_b


def _bip_cycle_weighted_programs(ell, lam, mu, rho):
    wt = (lam, mu)
    st = [(f, d) for f in (0, 1) for d in (0, 1)]
    start = tuple((None, (d, d), d, wt[d]) for d in (0, 1))
    hat = tuple(((f, p), (f, d), d, wt[d] * (rho if p != d else 1.0))
                for (f, p) in st for d in (0, 1))
    keep = tuple((s, s, s[1], 1.0) for s in st)

    a_steps = [(0, 1, start)]
    for _ in range(ell - 1):
        a_steps += [(1, 0, keep), (0, 1, hat)]
    a_final = tuple(((f, d), d, rho if d != f else 1.0) for (f, d) in st)
    prog_a = Program(tuple(a_steps), a_final, 0)

    b_steps = [(1, 0, start)]
    for _ in range(ell - 1):
        b_steps += [(0, 1, hat), (1, 0, keep)]
    b_final = tuple(((f, p), f, rho if p != f else 1.0) for (f, p) in st)
    prog_b = Program(tuple(b_steps), b_final, 1)
    return prog_a, prog_b


def _path_word_program(word: str) -> Program:
    steps = [(0, 0, ((None if i == 0 else 0, 0, _D[ch], 1.0),)) for i, ch in enumerate(word)]
    return Program(tuple(steps), ((0, 1.0),))


def _path_weighted_program(ell, lam, mu, rho) -> Program:
    wt = (lam, mu)
    steps = [(0, 0, ((None, 0, 0, lam),))]
    mid = tuple((p, d, d, wt[d] * (rho if p != d else 1.0)) for p in (0, 1) for d in (0, 1))
    steps += [(0, 0, mid)] * (ell - 1)
    return Program(tuple(steps), ((0, 1.0),))


def _bip_path_word_program(word: str) -> Program:
    steps = []
    for j, ch in enumerate(word):
        steps.append((0, 1, ((None if j == 0 else 0, 0, _D[ch], 1.0),)))
        steps.append((1, 0, ((0, 0, _D[ch], 1.0),)))
    return Program(tuple(steps), ((0, 1.0),))


def _bip_path_weighted_program(ell, lam, mu, rho) -> Program:
    wt = (lam, mu)
    hat = tuple((p, d, d, wt[d] * (rho if p != d else 1.0)) for p in (0, 1) for d in (0, 1))
    keep = tuple((d, d, d, 1.0) for d in (0, 1))
    steps = [(0, 1, ((None, 0, 0, lam),)), (1, 0, keep)]
    for _ in range(ell - 1):
        steps += [(0, 1, hat), (1, 0, keep)]
    return Program(tuple(steps), ((0, 1.0),))


def _group(transitions):
    """Group transitions by decoration and target: {d: [(q, [(p, coeff)])]}."""
    out = {}
    for p, q, d, c in transitions:
        if c == 0.0:
            continue
        targets = out.setdefault(d, {})
        targets.setdefault(q, []).append((p, c))
    return {d: list(t.items()) for d, t in sorted(out.items())}


def _combine(table, sources):
    acc = None
    for p, c in sources:
        arr = table.get(p)
        if arr is None:
            continue
        acc = c * arr if acc is None else acc + c * arr
    return acc


# ------------------------------------------------------------ anchored engine

def _compile(prog: Program):
    """Order states per step and build state-mixing matrices.

    Returns a list of (src, dst, in_states, out_states, groups) where groups
    maps decoration d to (row slice of out_states, mixing matrix C_d) with
    C_d[i, j] the coefficient from in_states[j] to the i-th target.
    """
    compiled = []
    in_states = [None]
    for src, dst, trans in prog.steps:
        dec_of = {}
        for p, q, d, c in trans:
            if dec_of.setdefault(q, d) != d:
                raise ParameterError("a target state must have a single incoming decoration")
        out_states = sorted(dec_of, key=lambda q: (dec_of[q], repr(q)))
        pos_in = {p: j for j, p in enumerate(in_states)}
        pos_out = {q: i for i, q in enumerate(out_states)}
        groups = {}
        for d in sorted(set(dec_of.values())):
            idx = [i for i, q in enumerate(out_states) if dec_of[q] == d]
            C = np.zeros((len(idx), len(in_states)))
            for p, q, dd, c in trans:
                if dd == d and p in pos_in:
                    C[pos_out[q] - idx[0], pos_in[p]] += c
            if np.any(C):
                groups[d] = (slice(idx[0], idx[-1] + 1), C)
        compiled.append((src, dst, in_states, out_states, groups))
        in_states = out_states
    final = [(in_states.index(p), d, c) for p, d, c in prog.final if p in in_states and c != 0.0]
    return compiled, final


class _Blocks:
    """Vertices of one side sorted by color so each color is a contiguous
    block ``[start[c], start[c + 1])`` of the permuted order."""

    def __init__(self, colors: np.ndarray, k: int):
        self.perm = np.argsort(colors, kind="stable")
        self.size = np.bincount(colors, minlength=k)
        self.start = np.concatenate(([0], np.cumsum(self.size)))

    def block(self, c: int) -> slice:
        return slice(int(self.start[c]), int(self.start[c + 1]))

    def width(self, mask: int) -> int:
        return int(sum(self.size[c + 1] for c in _bits(mask)))

    def offset(self, mask: int, color_bit: int) -> int:
        """Column of the ``color_bit`` block inside a table for ``mask``."""
        return int(sum(self.size[c + 1] for c in _bits(mask) if c < color_bit))


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _popcount_order(nbits: int):
    masks = list(range(1 << nbits))
    return [[m for m in masks if bin(m).count("1") == i] for i in range(nbits + 1)]


def _anchored_walks(mats, side_colors, k: int, prog: Program) -> float:
    """Weighted count of closed colorful walks from color-0 anchors.

    Colors 1..k-1 are tracked by a bitmask (bit c-1 for color c); the anchor
    color 0 is never revisited, which makes every visited vertex distinct.
    A table entry for mask S stacks all states: rows (state, anchor), columns
    the vertices with colors in S in color-block order. Matrices are permuted
    once so that every (color, color) block is a strided view.
    """
    compiled, final = _compile(prog)
    blocks = [_Blocks(c, k) for c in side_colors]
    a_side = prog.anchor_side
    R = int(blocks[a_side].size[0])
    if R == 0:
        return 0.0
    pm = {key: M[np.ix_(blocks[key[0]].perm, blocks[key[1]].perm)]
          for key, M in mats.items()}
    nb = k - 1
    full = (1 << nb) - 1
    layers = _popcount_order(nb)
    table = {0: np.eye(R)}
    for i, (src, dst, in_states, out_states, groups) in enumerate(compiled):
        s_in, s_out = len(in_states), len(out_states)
        sb, db = blocks[src], blocks[dst]
        new = {}
        for mask in layers[i]:
            cur = table.get(mask)
            if cur is None:
                continue
            # column blocks of the current table: (matrix-row slice, table columns)
            if i == 0:
                parts = [(sb.block(0), slice(0, R))]
            else:
                parts, lo = [], 0
                for c in _bits(mask):
                    size = int(sb.size[c + 1])
                    if size:
                        parts.append((sb.block(c + 1), slice(lo, lo + size)))
                    lo += size
            free = full ^ mask
            flat = cur.reshape(s_in, -1)
            w = cur.shape[1]
            for d, (sl, C) in groups.items():
                mixed = (C @ flat).reshape(-1, w)
                M = pm[(src, dst, d)]
                for c in _bits(free):
                    size = int(db.size[c + 1])
                    if size == 0:
                        continue
                    m2 = mask | (1 << c)
                    arr = new.get(m2)
                    if arr is None:
                        arr = new[m2] = np.zeros((s_out * R, db.width(m2)))
                    off = db.offset(m2, c)
                    col = db.block(c + 1)
                    acc = None
                    for rows, cols in parts:
                        term = mixed[:, cols] @ M[rows, col]
                        if acc is None:
                            acc = term
                        else:
                            acc += term
                    arr[sl.start * R:sl.stop * R, off:off + size] = acc
        table = new
    last = table.get(full)
    if last is None:
        return 0.0
    src = compiled[-1][1] if compiled else a_side
    tail = slice(int(blocks[src].start[1]), int(blocks[src].start[-1]))
    total = 0.0
    for j, d, c in final:
        back = pm[(src, a_side, d)][tail, blocks[a_side].block(0)]
        total += c * float(np.einsum("rj,jr->", last[j * R:(j + 1) * R], back))
    return total


# ------------------------------------------------------------- stacked engine

def _subset_tables(universe: Sequence[int], k: int):
    """Subsets of ``universe`` by size, with gather indices between sizes."""
    u = list(universe)
    by_size = [[] for _ in range(len(u) + 1)]
    for r in range(len(u) + 1):
        for combo in itertools.combinations(u, r):
            by_size[r].append(sum(1 << c for c in combo))
    index = [{m: j for j, m in enumerate(level)} for level in by_size]
    gathers = []
    for r in range(1, len(u) + 1):
        g = np.full((len(by_size[r]), k), -1, dtype=np.int64)
        for j, m in enumerate(by_size[r]):
            for c in u:
                if m >> c & 1:
                    g[j, c] = index[r - 1][m ^ (1 << c)]
        gathers.append(g)
    return by_size, gathers


def _source_walks(mats, side_colors, k: int, prog: Program, source: int) -> np.ndarray:
    """Weighted colorful walks from ``source`` (row side) to every end vertex."""
    c0 = int(side_colors[0][source])
    universe = [c for c in range(k) if c != c0]
    _, gathers = _subset_tables(universe, k)
    table = None
    for i, (src, dst, trans) in enumerate(prog.steps):
        groups = _group(trans)
        ncol = side_colors[dst].size
        g = gathers[i][:, side_colors[dst]]
        valid = g >= 0
        gi = np.where(valid, g, 0)
        cols = np.arange(ncol)
        new = {}
        for d, targets in groups.items():
            for q, sources in targets:
                if i == 0:
                    acc = sum(c for _, c in sources) * mats[(src, dst, d)][source:source + 1]
                else:
                    acc = _combine(table, sources)
                    if acc is None:
                        continue
                    acc = acc @ mats[(src, dst, d)]
                moved = np.where(valid, acc[gi, cols], 0.0)
                new[q] = new[q] + moved if q in new else moved
        table = new
    out = np.zeros(side_colors[prog.steps[-1][1]].size)
    for p, c in prog.final:
        if p in table:
            out += c * table[p][0]
    return out


# ---------------------------------------------------------------- validation

def _check_square(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape != Y.shape:
        raise ParameterError("X and Y must be square matrices of equal size")
    return X, Y


def _check_rect(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or X.shape != Y.shape:
        raise ParameterError("X and Y must be matrices of equal shape")
    return X, Y


def _uni_mats(X, Y):
    return {(0, 0, 0): X, (0, 0, 1): Y}


def _bip_mats(X, Y):
    return {(0, 1, 0): X, (0, 1, 1): Y, (1, 0, 0): X.T, (1, 0, 1): Y.T}


def _check_coloring(coloring: Coloring, k: int, sizes):
    if coloring.k != k:
        raise ParameterError(f"palette must have {k} colors, got {coloring.k}")
    got = tuple(s.size for s in coloring.sides)
    if got != tuple(sizes):
        raise ParameterError(f"coloring covers {got} vertices, expected {tuple(sizes)}")


def _check_tag(cls: DecoratedClass, *tags):
    if cls.family_tag not in tags:
        raise ParameterError(f"class tag {cls.family_tag.value} not in {[t.value for t in tags]}")


# ------------------------------------------------------------- per-class DPs

def dp_cycle_sum(X, Y, cls: DecoratedClass, coloring: Coloring) -> float:
    """Colorful sum over labeled copies of the cycle class ``cls``."""
    X, Y = _check_square(X, Y)
    _check_tag(cls, Family.H)
    _check_coloring(coloring, cls.ell, (X.shape[0],))
    mats = _uni_mats(X, Y)
    total = 0.0
    for w in orbit(cls.word, cls.canonical_word.topology):
        total += _anchored_walks(mats, coloring.sides, coloring.k, _cycle_word_program(w))
    return 0.5 * total


def dp_bipartite_cycle_sum(X, Y, cls: DecoratedClass, coloring: Coloring) -> float:
    X, Y = _check_rect(X, Y)
    _check_tag(cls, Family.G)
    _check_coloring(coloring, 2 * cls.ell, X.shape)
    mats = _bip_mats(X, Y)
    total = 0.0
    for w in orbit(cls.word, cls.canonical_word.topology):
        for prog in _bip_cycle_word_programs(w):
            total += _anchored_walks(mats, coloring.sides, coloring.k, prog)
    return 0.5 * total


def _path_row(X, Y, cls, coloring, u, bipartite):
    if bipartite:
        X, Y = _check_rect(X, Y)
        _check_tag(cls, Family.I, Family.ISTAR)
        _check_coloring(coloring, 2 * cls.ell + 1, X.shape)
        mats, build = _bip_mats(X, Y), _bip_path_word_program
    else:
        X, Y = _check_square(X, Y)
        _check_tag(cls, Family.J, Family.JSTAR)
        _check_coloring(coloring, cls.ell + 1, (X.shape[0],))
        mats, build = _uni_mats(X, Y), _path_word_program
    if not 0 <= u < X.shape[0]:
        raise ParameterError("endpoint out of range")
    w = cls.word
    fwd = _source_walks(mats, coloring.sides, coloring.k, build(w), u)
    bwd = fwd if w == w[::-1] else _source_walks(mats, coloring.sides, coloring.k, build(w[::-1]), u)
    # walks v -> u reading w are reversals of walks u -> v reading rev(w)
    return (fwd + bwd) / cls.aut


def dp_path_row(X, Y, cls, coloring, u) -> np.ndarray:
    """dp_path_sum for every second endpoint at once (entry u is zero)."""
    return _path_row(X, Y, cls, coloring, u, False)


def dp_path_sum(X, Y, cls: DecoratedClass, coloring: Coloring, u: int, v: int) -> float:
    """Colorful sum over copies of the path class with leaf set {u, v}."""
    if u == v:
        raise ParameterError("endpoints must differ")
    return float(dp_path_row(X, Y, cls, coloring, u)[v])


def dp_bipartite_path_row(X, Y, cls, coloring, u) -> np.ndarray:
    return _path_row(X, Y, cls, coloring, u, True)


def dp_bipartite_path_sum(X, Y, cls: DecoratedClass, coloring: Coloring, u: int, v: int) -> float:
    if u == v:
        raise ParameterError("endpoints must differ")
    return float(dp_bipartite_path_row(X, Y, cls, coloring, u)[v])


# -------------------------------------------------------- weighted (fused) DPs

def weighted_cycle_sum(X, Y, ell, lam, mu, rho, coloring: Coloring) -> float:
    """sum over classes H of Xi(H) times the colorful class sum, in one pass."""
    X, Y = _check_square(X, Y)
    _check_coloring(coloring, ell, (X.shape[0],))
    prog = _cycle_weighted_program(ell, lam, mu, rho)
    return 0.5 * _anchored_walks(_uni_mats(X, Y), coloring.sides, coloring.k, prog)


def weighted_bipartite_cycle_sum(X, Y, ell, lam, mu, rho, coloring: Coloring) -> float:
    X, Y = _check_rect(X, Y)
    _check_coloring(coloring, 2 * ell, X.shape)
    mats = _bip_mats(X, Y)
    total = 0.0
    for prog in _bip_cycle_weighted_programs(ell, lam, mu, rho):
        total += _anchored_walks(mats, coloring.sides, coloring.k, prog)
    return 0.5 * total


def weighted_path_row(X, Y, ell, lam, mu, rho, coloring: Coloring, u: int) -> np.ndarray:
    """sum over J classes of Xi(H) * colorful sum with leaves {u, v}, for all v.

    Every leaf-pinned copy is reached once from u, so no orbit bookkeeping is
    needed: the weighted walk count already equals the class-weighted sum.
    """
    X, Y = _check_square(X, Y)
    _check_coloring(coloring, ell + 1, (X.shape[0],))
    prog = _path_weighted_program(ell, lam, mu, rho)
    return _source_walks(_uni_mats(X, Y), coloring.sides, coloring.k, prog, u)


def weighted_bipartite_path_row(X, Y, ell, lam, mu, rho, coloring: Coloring, u: int) -> np.ndarray:
    X, Y = _check_rect(X, Y)
    _check_coloring(coloring, 2 * ell + 1, X.shape)
    prog = _bip_path_weighted_program(ell, lam, mu, rho)
    return _source_walks(_bip_mats(X, Y), coloring.sides, coloring.k, prog, u)


# ------------------------------------------------------------ brute force

def _perm_chunks(n, m, chunk=200_000):
    it = itertools.permutations(range(n), m)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.int64).reshape(len(block), m)


def _n_injective(n, m):
    return math.perm(n, m) if m <= n else 0


def _colorful_mask(col_arrays):
    c = np.sort(np.concatenate(col_arrays, axis=1), axis=1)
    return np.all(c[:, 1:] != c[:, :-1], axis=1) if c.shape[1] > 1 else np.ones(c.shape[0], bool)


def brute_force_sum(X, Y, cls: DecoratedClass, coloring: Optional[Coloring] = None,
                    endpoints: Optional[tuple] = None) -> float:
    """Exhaustive sum over injective placements of the class, divided by |Aut|.

    With ``coloring`` only colorful placements count; with ``endpoints`` only
    placements whose leaves are exactly that pair count (paths only).
    """
    tag = cls.family_tag
    if tag is Family.ISTARSTAR:
        raise ParameterError("Istarstar has no brute-force oracle")
    word = cls.word
    if tag is Family.H and len(word) < 3:
        raise ParameterError("cycle below family minimum length")
    mat = {"b": 0, "c": 1}
    if tag.bipartite:
        X, Y = _check_rect(X, Y)
    else:
        X, Y = _check_square(X, Y)
    M = (X, Y)
    path = tag.topology.value == "Path"
    if endpoints is not None and not path:
        raise ParameterError("endpoints only apply to paths")
    ell = len(word)
    total = 0.0

    if not tag.bipartite:
        n = X.shape[0]
        m = ell + 1 if path else ell
        if _n_injective(n, m) > BRUTE_FORCE_LIMIT:
            raise InstanceTooLargeError("too many placements")
        for seq in _perm_chunks(n, m):
            if endpoints is not None:
                u, v = endpoints
                keep = ((seq[:, 0] == u) & (seq[:, -1] == v)) | ((seq[:, 0] == v) & (seq[:, -1] == u))
                seq = seq[keep]
            if coloring is not None:
                seq = seq[_colorful_mask([coloring.sides[0][seq]])]
            if seq.shape[0] == 0:
                continue
            prod = np.ones(seq.shape[0])
            for i, ch in enumerate(word):
                j = (i + 1) % m
                prod *= M[mat[ch]][seq[:, i], seq[:, j]]
            total += math.fsum(prod.tolist())
        return total / cls.aut

    n, N = X.shape
    ma = ell + 1 if path else ell
    if _n_injective(n, ma) * _n_injective(N, ell) > BRUTE_FORCE_LIMIT:
        raise InstanceTooLargeError("too many placements")
    bseqs = np.array(list(itertools.permutations(range(N), ell)), dtype=np.int64).reshape(-1, ell)
    for aseq in _perm_chunks(n, ma, chunk=max(1, 200_000 // max(1, len(bseqs)))):
        if endpoints is not None:
            u, v = endpoints
            keep = ((aseq[:, 0] == u) & (aseq[:, -1] == v)) | ((aseq[:, 0] == v) & (aseq[:, -1] == u))
            aseq = aseq[keep]
        if aseq.shape[0] == 0 or bseqs.shape[0] == 0:
            continue
        A = np.repeat(aseq, len(bseqs), axis=0)
        B = np.tile(bseqs, (aseq.shape[0], 1))
        if coloring is not None:
            ca, cb = coloring.sides
            keep = _colorful_mask([ca[A], cb[B]])
            A, B = A[keep], B[keep]
        if A.shape[0] == 0:
            continue
        prod = np.ones(A.shape[0])
        for j, ch in enumerate(word):
            Mj = M[mat[ch]]
            nxt = (j + 1) % ma
            prod *= Mj[A[:, j], B[:, j]] * Mj[A[:, nxt], B[:, j]]
        total += math.fsum(prod.tolist())
    return total / cls.aut
