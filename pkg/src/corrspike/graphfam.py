"""Decorated cycle and path families, their weights and normalizers.

Words are strings over ``"b"`` (bullet, an X-edge) and ``"c"`` (circle, a
Y-edge). A cycle of length l is encoded by its l edge letters in traversal
order, a path likewise. Bipartite families (G, I, Istar) are stored through
their hat encoding: each letter stands for two bipartite edges that meet at a
b-side vertex and share one decoration, so the same word machinery applies.
"""
from __future__ import annotations

import enum
import functools
import itertools
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import ParameterError

MAX_ELL = 20


class Family(str, enum.Enum):
    H = "H"
    G = "G"
    J = "J"
    JSTAR = "Jstar"
    I = "I"
    ISTAR = "Istar"
    ISTARSTAR = "Istarstar"

    @property
    def bipartite(self) -> bool:
        return self in (Family.G, Family.I, Family.ISTAR, Family.ISTARSTAR)

    @property
    def topology(self) -> "Topology":
        return Topology.CYCLE if self in (Family.H, Family.G) else Topology.PATH


class Topology(str, enum.Enum):
    CYCLE = "Cycle"
    PATH = "Path"


@dataclass(frozen=True)
class DecorationWord:
    word: str
    topology: Topology

    def __post_init__(self):
        if set(self.word) - {"b", "c"}:
            raise ParameterError(f"word must be over 'b'/'c': {self.word!r}")
        minimum = 2 if self.topology is Topology.CYCLE else 1
        if len(self.word) < minimum:
            raise ParameterError(f"{self.topology.value} words need length >= {minimum}")

    def __len__(self):
        return len(self.word)

    def __str__(self):
        return self.word


def _cyclic_diff(word: str) -> int:
    return sum(word[i] != word[i - 1] for i in range(len(word)))


def _linear_diff(word: str) -> int:
    return sum(word[i] != word[i + 1] for i in range(len(word) - 1))


@dataclass(frozen=True)
class DecoratedClass:
    """One isomorphism class of decorated cycles or paths.

    For bipartite tags the word is the hat encoding and ``e_bullet`` /
    ``e_circ`` count bipartite edges, i.e. twice the letters. ``first_side``
    is only used by Istarstar, whose members need not start on the a-side.
    """
    canonical_word: DecorationWord
    aut: int
    e_bullet: int
    e_circ: int
    diff: int
    family_tag: Family
    first_side: Optional[str] = None

    @property
    def word(self) -> str:
        return self.canonical_word.word

    @property
    def ell(self) -> int:
        return len(self.canonical_word)

    @property
    def n_vertices(self) -> int:
        k = len(self.canonical_word)
        tag = self.family_tag
        if tag is Family.H:
            return k
        if tag is Family.G:
            return 2 * k
        if tag in (Family.J, Family.JSTAR):
            return k + 1
        if tag is Family.ISTARSTAR:
            return k + 1
        return 2 * k + 1

    def to_dict(self, lam=None, mu=None, rho=None) -> dict:
        d = {"canonical_word": self.word, "aut": self.aut, "diff": self.diff}
        if self.first_side is not None:
            d["first_side"] = self.first_side
        if lam is not None:
            d["weight"] = class_weight(self, lam, mu, rho)
        return d


@dataclass(frozen=True)
class FamilyTable:
    ell: int
    tag: Family
    classes: tuple
    beta: Optional[float] = None
    weights: Optional[np.ndarray] = field(default=None, compare=False)
    params: Optional[tuple] = None

    def __len__(self):
        return len(self.classes)

    def __iter__(self):
        return iter(self.classes)

    def with_weights(self, lam, mu, rho) -> "FamilyTable":
        w = np.array([class_weight(c, lam, mu, rho) for c in self.classes])
        b = math.fsum(float(x) ** 2 / c.aut for x, c in zip(w, self.classes))
        return replace(self, beta=b, weights=w, params=(lam, mu, rho))

    def to_json(self) -> str:
        rows = []
        for i, c in enumerate(self.classes):
            d = c.to_dict()
            if self.weights is not None:
                d["weight"] = float(self.weights[i])
            rows.append(d)
        out = {"ell": self.ell, "tag": self.tag.value, "classes": rows}
        if self.beta is not None:
            out["beta"] = self.beta
            out["params"] = dict(zip(("lambda", "mu", "rho"), self.params))
        return json.dumps(out, indent=2)


# ---------------------------------------------------------------- enumeration

def _bits_to_word(w: int, ell: int) -> str:
    return "".join("c" if (w >> (ell - 1 - i)) & 1 else "b" for i in range(ell))


def _word_to_bits(word: str) -> int:
    return int(word.replace("b", "0").replace("c", "1"), 2) if word else 0


def _reverse_bits(w: np.ndarray, ell: int) -> np.ndarray:
    r = np.zeros_like(w)
    for i in range(ell):
        r |= ((w >> i) & 1) << (ell - 1 - i)
    return r


def _popcount(w: np.ndarray) -> np.ndarray:
    c = np.zeros_like(w)
    while np.any(w):
        c += w & 1
        w = w >> 1
    return c


@functools.lru_cache(maxsize=None)
def _cycle_arrays(ell: int):
    """Canonical representatives of binary words under the dihedral group.

    Letters map to bits with the first letter most significant, so integer
    order is lexicographic order and the minimum image is the canonical word.
    """
    mask = (1 << ell) - 1
    w = np.arange(1 << ell, dtype=np.int64)
    best = w.copy()
    stab = np.zeros_like(w)
    for start in (w, _reverse_bits(w, ell)):
        g = start
        for _ in range(ell):
            best = np.minimum(best, g)
            stab += g == w
            g = ((g << 1) | (g >> (ell - 1))) & mask
    reps = np.nonzero(best == w)[0]
    ones = _popcount(reps)
    rot = ((reps << 1) | (reps >> (ell - 1))) & mask
    diff = _popcount(reps ^ rot)
    return reps, stab[reps], ones, diff


@functools.lru_cache(maxsize=None)
def _path_arrays(ell: int, pinned: bool):
    w = np.arange(1 << ell, dtype=np.int64)
    if pinned:
        # first and last letters both "b" (bit 0)
        w = w[((w >> (ell - 1)) & 1) == 0]
        w = w[(w & 1) == 0]
    rev = _reverse_bits(w, ell)
    keep = w <= rev
    reps = w[keep]
    aut = np.where(reps == rev[keep], 2, 1)
    ones = _popcount(reps)
    if ell > 1:
        diff = _popcount((reps ^ (reps >> 1)) & ((1 << (ell - 1)) - 1))
    else:
        diff = np.zeros_like(reps)
    return reps, aut, ones, diff


def _istarstar_classes(ell: int):
    """Bipartite paths of length 2l-1 or 2l whose b-vertices are not in diff."""
    found = {}
    for m in (2 * ell - 1, 2 * ell):
        for side in "ab":
            sides = [side if i % 2 == 0 else ("b" if side == "a" else "a")
                     for i in range(m + 1)]
            # group edges sharing an internal b-vertex: one letter per group
            groups, i = [], 0
            while i < m:
                if sides[i + 1] == "b" and i + 1 < m:
                    groups.append(2)
                    i += 2
                else:
                    groups.append(1)
                    i += 1
            for letters in itertools.product("bc", repeat=len(groups)):
                word = "".join(ch * g for ch, g in zip(letters, groups))
                key = (sides[0], word)
                rkey = (sides[-1], word[::-1])
                canon = min(key, rkey)
                if canon in found:
                    continue
                diff = sum(1 for j in range(1, m) if sides[j] == "a"
                           and word[j - 1] != word[j])
                found[canon] = (2 if key == rkey else 1, diff)
    out = []
    for (side, word), (aut, diff) in sorted(found.items(), key=lambda kv: (len(kv[0][1]), kv[0])):
        nb = word.count("b")
        out.append(DecoratedClass(DecorationWord(word, Topology.PATH), aut, nb,
                                  len(word) - nb, diff, Family.ISTARSTAR, side))
    return tuple(out)


@functools.lru_cache(maxsize=None)
def enumerate_family(tag, ell: int) -> FamilyTable:
    """All isomorphism classes of ``tag`` at length ``ell``."""
    tag = Family(tag)
    topo = tag.topology
    lo = 3 if tag is Family.H else (2 if tag is Family.G else 1)
    if not lo <= ell <= MAX_ELL:
        raise ParameterError(f"ell={ell} outside [{lo}, {MAX_ELL}] for family {tag.value}")
    if tag is Family.ISTARSTAR:
        return FamilyTable(ell, tag, _istarstar_classes(ell))
    if topo is Topology.CYCLE:
        reps, aut, ones, diff = _cycle_arrays(ell)
    else:
        reps, aut, ones, diff = _path_arrays(ell, tag in (Family.J, Family.I))
    scale = 2 if tag.bipartite else 1
    classes = tuple(
        DecoratedClass(DecorationWord(_bits_to_word(int(w), ell), topo), int(a),
                       scale * (ell - int(o)), scale * int(o), int(d), tag)
        for w, a, o, d in zip(reps, aut, ones, diff))
    return FamilyTable(ell, tag, classes)


def symmetry_images(word: str, topology: Topology):
    """All images of ``word`` under the symmetry group (with multiplicity)."""
    topology = Topology(topology)
    if topology is Topology.PATH:
        return [word, word[::-1]]
    out = []
    for w in (word, word[::-1]):
        for k in range(len(w)):
            out.append(w[k:] + w[:k])
    return out


def orbit(word: str, topology: Topology):
    """Distinct words equivalent to ``word``."""
    return sorted(set(symmetry_images(word, topology)))


def aut_count(cls) -> int:
    """Number of symmetries fixing the word, recomputed by brute force."""
    if isinstance(cls, DecoratedClass):
        if cls.family_tag is Family.ISTARSTAR:
            return cls.aut
        word, topo = cls.word, cls.canonical_word.topology
    else:
        word, topo = cls.word, cls.topology
    return sum(img == word for img in symmetry_images(word, topo))


def make_class(word: str, tag) -> DecoratedClass:
    """Class of an arbitrary word (not necessarily canonical) in family ``tag``."""
    tag = Family(tag)
    if tag is Family.ISTARSTAR:
        raise ParameterError("use enumerate_family for Istarstar")
    if tag is Family.H and len(word) < 3:
        raise ParameterError("cycles in H need length >= 3")
    topo = tag.topology
    canon = min(symmetry_images(word, topo))
    dw = DecorationWord(canon, topo)
    if tag in (Family.J, Family.I) and not (canon[0] == "b" and canon[-1] == "b"):
        raise ParameterError("J and I classes need bullet end edges")
    scale = 2 if tag.bipartite else 1
    diff = _cyclic_diff(canon) if topo is Topology.CYCLE else _linear_diff(canon)
    nb = canon.count("b")
    return DecoratedClass(dw, aut_count(dw), scale * nb, scale * (len(canon) - nb),
                          diff, tag)


# -------------------------------------------------------------------- weights

def xi_weight(cls: DecoratedClass, lam, mu, rho) -> float:
    """lam^{E_b} mu^{E_c} rho^{diff} with 0^0 = 1."""
    return float(lam) ** cls.e_bullet * float(mu) ** cls.e_circ * float(rho) ** cls.diff


def upsilon_weight(cls: DecoratedClass, lam, mu, rho) -> float:
    """Half-exponent weight used for bipartite classes."""
    return (float(lam) ** (cls.e_bullet / 2) * float(mu) ** (cls.e_circ / 2)
            * float(rho) ** cls.diff)


def class_weight(cls: DecoratedClass, lam, mu, rho) -> float:
    if cls.family_tag.bipartite:
        return upsilon_weight(cls, lam, mu, rho)
    return xi_weight(cls, lam, mu, rho)


def word_weight(word: str, topology, lam, mu, rho) -> float:
    """Weight of a single word, letter exponents taken once per letter."""
    topology = Topology(topology)
    diff = _cyclic_diff(word) if topology is Topology.CYCLE else _linear_diff(word)
    nb = word.count("b")
    return float(lam) ** nb * float(mu) ** (len(word) - nb) * float(rho) ** diff


def _beta_enumerated(tag: Family, ell: int, lam, mu, rho) -> float:
    if tag is Family.ISTARSTAR:
        fam = enumerate_family(tag, ell)
        return math.fsum(class_weight(c, lam, mu, rho) ** 2 / c.aut for c in fam)
    topo = tag.topology
    if topo is Topology.CYCLE:
        _, aut, ones, diff = _cycle_arrays(ell)
    else:
        _, aut, ones, diff = _path_arrays(ell, tag in (Family.J, Family.I))
    # bipartite weights take half of the doubled edge counts: same monomial
    w = (float(lam) ** (ell - ones).astype(float) * float(mu) ** ones.astype(float)
         * float(rho) ** diff.astype(float))
    return math.fsum((w * w / aut).tolist())


# ------------------------------------------------------------ transfer matrix

@dataclass(frozen=True)
class TransferMatrix:
    M: np.ndarray
    a_plus: float
    a_minus: float


def transfer_matrix(lam, mu, rho) -> TransferMatrix:
    l2, m2, r2 = lam * lam, mu * mu, rho * rho
    M = np.array([[l2, l2 * r2], [m2 * r2, m2]])
    ap = a_plus(lam, mu, rho)
    det = l2 * m2 * (1.0 - r2 * r2)
    am = det / ap if ap > 0 else 0.0
    return TransferMatrix(M, ap, am)


def a_plus(lam, mu, rho) -> float:
    """Top eigenvalue of the transfer matrix."""
    l2, m2 = lam * lam, mu * mu
    disc = (l2 - m2) ** 2 + 4.0 * rho**4 * l2 * m2
    return 0.5 * (l2 + m2 + math.sqrt(disc))


def beta_closed_form(tag, ell: int, lam, mu, rho) -> float:
    """Transfer-matrix expressions for the class sums.

    Cycles: the word sum is tr(M^l) = A+^l + A-^l and every word has an orbit
    of size 2l/aut. Paths: the pinned boundary vector gives the word sum and
    every path word has an orbit of size 2/aut.
    """
    tag = Family(tag)
    T = transfer_matrix(lam, mu, rho)
    if tag in (Family.H, Family.G):
        return (T.a_plus**ell + T.a_minus**ell) / (2 * ell)
    P = np.linalg.matrix_power(T.M, ell - 1)
    if tag in (Family.J, Family.I):
        return lam * lam * P[0, 0] / 2.0
    if tag in (Family.JSTAR, Family.ISTAR):
        return float(np.ones(2) @ P @ np.array([lam * lam, mu * mu])) / 2.0
    raise ParameterError(f"no closed form for {tag.value}")


VERIFICATION_GRID = tuple(itertools.product((0.5, 0.9, 1.3), (0.4, 0.8, 1.1),
                                            (0.0, 0.6, 0.95)))


@functools.lru_cache(maxsize=1)
def closed_forms_verified(rtol: float = 1e-9) -> bool:
    """Check the closed forms against enumeration on the verification grid."""
    for ell in range(3, 13):
        for lam, mu, rho in VERIFICATION_GRID:
            for tag in (Family.H, Family.J):
                ref = _beta_enumerated(tag, ell, lam, mu, rho)
                fast = beta_closed_form(tag, ell, lam, mu, rho)
                if abs(fast - ref) > rtol * abs(ref):
                    return False
    return True


def beta(tag, ell: int, lam, mu, rho, *, fast: bool = False) -> float:
    """sum over classes of weight^2 / aut.

    With ``fast=True`` the transfer-matrix formula is used for H, G, J, I,
    provided ``closed_forms_verified()`` holds; otherwise enumeration.
    """
    tag = Family(tag)
    if fast and tag in (Family.H, Family.G, Family.J, Family.I) and closed_forms_verified():
        return beta_closed_form(tag, ell, lam, mu, rho)
    enumerate_family(tag, ell)  # bounds check
    return _beta_enumerated(tag, ell, lam, mu, rho)


# ------------------------------------------------------------------ threshold

def f_threshold(lam, mu, rho, gamma) -> float:
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    l2, m2, r2 = lam * lam, mu * mu, rho * rho

    def term(s2):
        if s2 * r2 == 0:
            return 0.0
        den = gamma - s2 + s2 * r2
        if den <= 0:
            return math.inf
        return s2 * r2 / den

    return max(l2 / gamma, m2 / gamma, term(l2) + term(m2))


class Method(str, enum.Enum):
    SUBGRAPH = "Subgraph"
    PLS = "PLS"
    CCA = "CCA"


def success(method, lam, mu, rho, gamma) -> bool:
    from . import baselines

    method = Method(method)
    if method is Method.SUBGRAPH:
        return f_threshold(lam, mu, rho, gamma) > 1.0
    if method is Method.PLS:
        return baselines.pls_threshold(lam, mu, rho) <= gamma
    return baselines.cca_condition(lam, mu, rho, gamma)


def critical_mu(lam, rho, gamma, method=Method.SUBGRAPH, *, mu_max: float = 10.0,
                tol: float = 1e-6, scan: int = 400) -> float:
    """Smallest mu in [0, mu_max] at which ``method`` succeeds, else inf.

    A coarse scan locates the first success, then bisection refines the
    bracket to ``tol``.
    """
    if lam < 0:
        raise ParameterError("lambda must be nonnegative")

    def ok(m):
        return success(method, lam, m, rho, gamma)

    if ok(0.0):
        return 0.0
    grid = np.linspace(0.0, mu_max, scan + 1)
    hit = next((i for i in range(1, scan + 1) if ok(float(grid[i]))), None)
    if hit is None:
        return math.inf
    lo, hi = float(grid[hit - 1]), float(grid[hit])
    while hi - lo > tol / 4:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
