"""Structural subsets, congruences, regular permutations and isomorphisms."""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import (
    InternalInconsistency, NotCongruence, NotF, NotNK, NotNormal, SizeCapExceeded,
)
from .laws import Law, is_f_quasigroup, is_moufang, sweep
from .qcore import (
    CayleyTable, FiniteLoop, Permutation, as_table, extend_sub, from_table,
    generate_group, generate_sub, subtable,
)

__all__ = [
    "SubsetReport", "Congruence", "RegularPair", "generate_sub",
    "nucleus", "moufang_center", "commutant", "center", "m_set",
    "is_NK", "nk_decompose", "nk_char_holds", "pflugfelder_holds",
    "principal_congruence", "congruence_from_subloop", "is_congruence", "quotient",
    "quotient_loop", "sub_loop", "regular_pairs", "regular_permutations",
    "rho_congruence", "is_FG", "is_homomorphism", "is_isomorphic",
    "isomorphisms", "automorphisms", "multiplication_group", "is_simple",
]

SIMPLE_CAP = 64
ISO_CAP = 128


@dataclass(frozen=True)
class SubsetReport:
    kind: str
    members: tuple
    is_subloop: bool
    is_normal: Optional[bool] = None

    def __contains__(self, x):
        return x in self._set

    @property
    def _set(self):
        return frozenset(self.members)

    def __len__(self):
        return len(self.members)

    def to_json(self) -> dict:
        return {"is_normal": self.is_normal, "is_subloop": self.is_subloop,
                "kind": self.kind, "members": list(self.members)}


@dataclass(frozen=True)
class Congruence:
    block_of: tuple
    blocks: tuple

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Congruence":
        """Canonical congruence object: blocks numbered by their least element."""
        renumber = {}
        block_of = []
        for lab in labels:
            if lab not in renumber:
                renumber[lab] = len(renumber)
            block_of.append(renumber[lab])
        blocks = [[] for _ in renumber]
        for x, b in enumerate(block_of):
            blocks[b].append(x)
        return cls(tuple(block_of), tuple(tuple(b) for b in blocks))

    @property
    def size(self) -> int:
        return len(self.blocks)

    def is_universal(self) -> bool:
        return len(self.blocks) == 1

    def is_identity(self) -> bool:
        return len(self.blocks) == len(self.block_of)

    def to_json(self) -> dict:
        return {"block_of": list(self.block_of), "blocks": [list(b) for b in self.blocks]}


@dataclass(frozen=True)
class RegularPair:
    family: str
    p: Permutation
    q: Permutation


# -- subsets -----------------------------------------------------------------

def _closed(q: CayleyTable, members) -> bool:
    if not members:
        return False
    idx = np.asarray(sorted(members), dtype=np.intp)
    mask = np.zeros(q.order, dtype=bool)
    mask[idx] = True
    sub = np.ix_(idx, idx)
    return bool(mask[q.table[sub]].all() and mask[q.ldiv_table[sub]].all()
                and mask[q.rdiv_table[sub]].all())


def _normal(q: CayleyTable, members) -> bool:
    try:
        congruence_from_subloop(q, members)
    except NotNormal:
        return False
    return True


def _report(kind, q: CayleyTable, members) -> SubsetReport:
    members = tuple(sorted(members))
    closed = _closed(q, members)
    return SubsetReport(kind, members, closed, _normal(q, members) if closed else None)


def _nucleus_members(loop: FiniteLoop) -> list:
    T = loop.table
    n = loop.order
    out = []
    for a in range(n):
        Ta = T[a]
        # (a+x)+y = a+(x+y)
        if not (T[Ta, :] == Ta[T]).all():
            continue
        # (x+a)+y = x+(a+y)
        if not (T[T[:, a], :] == T[:, Ta]).all():
            continue
        # x+(y+a) = (x+y)+a
        if not (T[:, T[:, a]] == T[T, a]).all():
            continue
        out.append(a)
    return out


def nucleus(loop: FiniteLoop) -> SubsetReport:
    members = _nucleus_members(loop)
    report = _report("nucleus", loop.base, members)
    if not report.is_subloop:
        raise InternalInconsistency("nucleus is not closed")
    return report


def _k_members(loop: FiniteLoop, left: bool) -> list:
    T = loop.table
    out = []
    for a in range(loop.order):
        aa = T[a, a]
        if left:
            # (a+a)+(x+y) = (a+x)+(a+y)
            ok = (T[aa][T] == T[T[a][:, None], T[a][None, :]]).all()
        else:
            # (x+y)+(a+a) = (x+a)+(y+a)
            ok = (T[T, aa] == T[T[:, a][:, None], T[:, a][None, :]]).all()
        if ok:
            out.append(a)
    return out


def moufang_center(loop: FiniteLoop) -> SubsetReport:
    left = _k_members(loop, True)
    right = _k_members(loop, False)
    if left != right:
        raise InternalInconsistency(f"Moufang centre displays disagree: {left} vs {right}")
    return _report("moufang_center", loop.base, left)


def _commutant_members(loop: FiniteLoop) -> list:
    T = loop.table
    return [a for a in range(loop.order) if (T[a, :] == T[:, a]).all()]


def commutant(loop: FiniteLoop) -> SubsetReport:
    return _report("commutant", loop.base, _commutant_members(loop))


def center(loop: FiniteLoop) -> SubsetReport:
    n_set = set(_nucleus_members(loop))
    by_c = sorted(n_set & set(_commutant_members(loop)))
    by_k = sorted(n_set & set(moufang_center(loop).members))
    if by_c != by_k:
        raise InternalInconsistency(f"N∩C = {by_c} but N∩K = {by_k}")
    return _report("center", loop.base, by_c)


def m_set(q) -> SubsetReport:
    """Elements a with xa.yx = xy.ax for all x, y."""
    q = as_table(q)
    T = q.table
    out = []
    for a in range(q.order):
        xa = T[:, a]
        ax = T[a, :]
        # rows index x, columns index y
        lhs = T[xa[:, None], T.T]
        rhs = T[T, ax[:, None]]
        if (lhs == rhs).all():
            out.append(a)
    return _report("m_set", q, out)


# -- NK-loops ----------------------------------------------------------------

def is_NK(loop: FiniteLoop) -> bool:
    n_set = _nucleus_members(loop)
    k_set = set(moufang_center(loop).members)
    ld = loop.base.ldiv_rows
    return all(any(ld[a][x] in k_set for a in n_set) for x in range(loop.order))


def nk_decompose(loop: FiniteLoop, x: int, n_set=None, k_set=None) -> tuple:
    """Lexicographically least (n, k) with n in N, k in K and x = n + k."""
    if n_set is None:
        n_set = _nucleus_members(loop)
    if k_set is None:
        k_set = moufang_center(loop).members
    k_set = set(k_set)
    ld = loop.base.ldiv_rows
    for a in sorted(n_set):
        k = ld[a][x]
        if k in k_set:
            return a, k
    raise NotNK(f"{x} is not a sum of a nuclear and a Moufang-central element")


def _map_law(name, variables, fn, mapping, n) -> Law:
    A = np.asarray(mapping, dtype=np.intp) if n ** len(variables) > 1500 else tuple(mapping)
    return Law(name, variables, lambda m, al, be, *v: fn(m, A, *v))


@functools.lru_cache(maxsize=1024)
def _moufang_profile(loop: FiniteLoop) -> tuple:
    """(is Moufang, N, K) of a loop, cached for repeated map sweeps."""
    if not is_moufang(loop):
        return False, frozenset(), frozenset()
    return True, frozenset(_nucleus_members(loop)), frozenset(moufang_center(loop).members)


def nk_char_holds(loop: FiniteLoop, A: Sequence[int]) -> tuple:
    """(identity condition, structural condition) for the NK characterisation.

    The first component sweeps ``(x+A(x))+(y+z) = (x+y)+(A(x)+z)``; the second
    is "Moufang, A(x) in K and -x+A(x) in N for all x".
    """
    n = loop.order
    law = _map_law("nk_char", ("x", "y", "z"),
                   lambda m, A, x, y, z: [(m(m(x, A[x]), m(y, z)), m(m(x, y), m(A[x], z)))],
                   A, n)
    cond1 = sweep(loop, law) is None
    cond2 = False
    moufang, n_set, k_set = _moufang_profile(loop)
    if moufang:
        ld = loop.base.ldiv_rows
        # -x + A(x) = x \ A(x) in a loop with the inverse property
        cond2 = all(A[x] in k_set and ld[x][A[x]] in n_set for x in range(n))
    return cond1, cond2


def pflugfelder_holds(loop: FiniteLoop, A: Sequence[int]) -> tuple:
    n = loop.order
    law1 = _map_law("pflug1", ("x", "y", "z"),
                    lambda m, A, x, y, z: [(m(m(x, y), m(z, A[x])), m(x, m(m(y, z), A[x])))],
                    A, n)
    law2 = _map_law("pflug2", ("x", "y", "z"),
                    lambda m, A, x, y, z: [(m(m(x, y), m(z, A[x])), m(m(x, m(y, z)), A[x]))],
                    A, n)
    c1 = sweep(loop, law1) is None
    c2 = sweep(loop, law2) is None
    c3 = False
    moufang, n_set, _ = _moufang_profile(loop)
    if moufang:
        ld = loop.base.ldiv_rows
        c3 = all(ld[x][A[x]] in n_set for x in range(n))
    return c1, c2, c3


# -- congruences ---------------------------------------------------------------

class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if rx < ry:
            rx, ry = ry, rx
        self.parent[rx] = ry
        return True


def principal_congruence(q, pairs) -> Congruence:
    """Least congruence containing ``pairs``.

    Worklist closure: each merged pair is pushed through the six translation
    rules (left/right multiplication, and both divisions on each side).
    """
    q = as_table(q)
    n = q.order
    rows, ld, rd = q.rows, q.ldiv_rows, q.rdiv_rows
    uf = _UnionFind(n)
    queue = [(x, y) for x, y in pairs if uf.union(x, y)]
    while queue:
        x, y = queue.pop()
        rx, ry, lx, ly = rows[x], rows[y], ld[x], ld[y]
        dx, dy = rd[x], rd[y]
        for z in range(n):
            for u, v in ((rows[z][x], rows[z][y]), (rx[z], ry[z]),
                         (ld[z][x], ld[z][y]), (lx[z], ly[z]),
                         (dx[z], dy[z]), (rd[z][x], rd[z][y])):
                if uf.union(u, v):
                    queue.append((u, v))
    return Congruence.from_labels([uf.find(x) for x in range(n)])


def congruence_from_subloop(q, members) -> Congruence:
    members = sorted(set(members))
    if not members:
        raise ValueError("empty subset")
    base = members[0]
    c = principal_congruence(q, [(base, m) for m in members])
    block = c.blocks[c.block_of[base]]
    if list(block) != members:
        raise NotNormal(f"closure grows the block to {len(block)} elements")
    return c


def is_congruence(q, c: Congruence) -> bool:
    q = as_table(q)
    B = np.asarray(c.block_of, dtype=np.intp)
    reps = np.asarray([b[0] for b in c.blocks], dtype=np.intp)
    for T in (q.table, q.ldiv_table, q.rdiv_table):
        small = B[T[np.ix_(reps, reps)]]
        if not (B[T] == small[B[:, None], B[None, :]]).all():
            return False
    return True


def quotient(q, c: Congruence) -> CayleyTable:
    q = as_table(q)
    if len(c.block_of) != q.order or not is_congruence(q, c):
        raise NotCongruence("partition is not compatible with the operations")
    reps = [b[0] for b in c.blocks]
    rows = q.rows
    return from_table(len(reps), [[c.block_of[rows[a][b]] for b in reps] for a in reps])


def quotient_loop(loop: FiniteLoop, c: Congruence) -> FiniteLoop:
    return FiniteLoop(quotient(loop.base, c), c.block_of[loop.zero])


def sub_loop(loop: FiniteLoop, members) -> FiniteLoop:
    members = sorted(members)
    return FiniteLoop(subtable(loop.base, members), members.index(loop.zero))


# -- regular permutations --------------------------------------------------

def _candidate_pairs(q: CayleyTable, family: str):
    T, L, R = q.table, q.ldiv_table, q.rdiv_table
    n = q.order
    for t in range(n):
        if family == "A":
            # p(xy) = q(x)y, anchored at x0 = 0, y0 = 0
            p = T[t][L[0]]
            qq = R[p[T[:, 0]], 0]
            ok = (p[T] == T[qq, :]).all()
        elif family == "B":
            # p(xy) = x q(y), anchored at y0 = 0, x0 = 0
            p = T[R[:, 0], t]
            qq = L[0][p[T[0]]]
            ok = (p[T] == T[:, qq]).all()
        elif family == "C":
            # p(x)y = x q(y), anchored at y0 = 0, x0 = 0
            p = R[T[:, t], 0]
            qq = L[0][T[p[0]]]
            ok = (T[p, :] == T[:, qq]).all()
        else:
            raise ValueError(f"family must be A, B or C, not {family!r}")
        if ok and len(set(p.tolist())) == n and len(set(qq.tolist())) == n:
            yield Permutation(p.tolist()), Permutation(qq.tolist())


def regular_pairs(q, family: str) -> list:
    """All pairs (p, q) of the given family, sorted by images.

    Once the value of q (or p) at one base point is chosen, both maps are
    forced; each of the n candidates is rebuilt and verified exhaustively.
    """
    q = as_table(q)
    pairs = sorted(_candidate_pairs(q, family), key=lambda pq: (pq[0].images, pq[1].images))
    found = {(p.images, r.images) for p, r in pairs}
    for p1, q1 in pairs:
        for p2, q2 in pairs:
            # p1 p2 (x) y = x q2 q1 (y) in family C; the others compose in step
            second = q2 * q1 if family == "C" else q1 * q2
            if ((p1 * p2).images, second.images) not in found:
                raise InternalInconsistency(f"family {family} is not closed under composition")
    return [RegularPair(family, p, r) for p, r in pairs]


def regular_permutations(q, family: str, side: str = "l") -> set:
    """The set family_l (first components) or family_r (second components)."""
    pairs = regular_pairs(q, family)
    return {pr.p if side == "l" else pr.q for pr in pairs}


def orbit_partition(n: int, perms) -> Congruence:
    uf = _UnionFind(n)
    for p in perms:
        for x in range(n):
            uf.union(x, p(x))
    return Congruence.from_labels([uf.find(x) for x in range(n)])


def rho_congruence(q) -> Congruence:
    """Orbits of all regular permutations; a congruence for F-quasigroups."""
    q = as_table(q)
    if not is_f_quasigroup(q):
        raise NotF("rho is defined here for F-quasigroups only")
    perms = []
    for family in "ABC":
        for pr in regular_pairs(q, family):
            perms.extend((pr.p, pr.q))
    c = orbit_partition(q.order, perms)
    if not is_congruence(q, c):
        raise InternalInconsistency("regular-permutation orbits are not a congruence")
    return c


def _image_reps(values) -> list:
    seen = {}
    for u, v in enumerate(values):
        seen.setdefault(v, u)
    return sorted(seen.values())


def is_FG(q) -> bool:
    """F-quasigroup whose loop isotopes are groups, via three equivalent identities."""
    q = as_table(q)
    if not is_f_quasigroup(q):
        raise NotF("is_FG needs an F-quasigroup")
    n = range(q.order)
    ua = _image_reps(q.alpha_map)
    ub = _image_reps(q.beta_map)
    c4 = sweep(q, "fg_alpha", ranges=[n, n, n, ua]) is None
    c5 = sweep(q, "fg_beta", ranges=[n, n, n, ub]) is None
    c6 = sweep(q, "fg_mixed", ranges=[n, n, ua, ub]) is None
    if not c4 == c5 == c6:
        raise InternalInconsistency(f"FG conditions disagree: {c4}, {c5}, {c6}")
    return c4


# -- homomorphisms and isomorphisms ----------------------------------------

def is_homomorphism(src, dst, mapping) -> bool:
    src, dst = as_table(src), as_table(dst)
    phi = np.asarray([mapping[x] for x in range(src.order)], dtype=np.intp)
    return bool((phi[src.table] == dst.table[phi[:, None], phi[None, :]]).all())


def _signatures(q: CayleyTable) -> list:
    rows = q.rows
    n = q.order
    sigs = []
    for x in range(n):
        lt = Permutation(rows[x]).cycle_type()
        rt = Permutation(tuple(rows[y][x] for y in range(n))).cycle_type()
        sigs.append((lt, rt, rows[x][x] == x, q.alpha_map[x] == x, q.beta_map[x] == x))
    return sigs


def _generating_set(q: CayleyTable, sigs) -> list:
    counts = {}
    for s in sigs:
        counts[s] = counts.get(s, 0) + 1
    order = sorted(range(q.order), key=lambda x: (counts[sigs[x]], x))
    gens, closed = [], set()
    for x in order:
        if x not in closed:
            gens.append(x)
            closed = extend_sub(q, closed, [x])
            if len(closed) == q.order:
                break
    return gens


def _extend(q1, q2, phi, inv, domain, g, h):
    """Extend the partial homomorphism phi with g -> h; False on conflict."""
    r1, r2 = q1.rows, q2.rows
    if phi[g] != -1:
        return phi[g] == h
    if inv[h] != -1:
        return False
    phi[g], inv[h] = h, g
    queue = [g]
    while queue:
        u = queue.pop()
        domain.append(u)
        for v in list(domain):
            for a, b in ((u, v), (v, u)):
                w = r1[a][b]
                img = r2[phi[a]][phi[b]]
                if phi[w] == -1:
                    if inv[img] != -1:
                        return False
                    phi[w], inv[img] = img, w
                    queue.append(w)
                elif phi[w] != img:
                    return False
    return True


def isomorphisms(q1, q2, limit: Optional[int] = None, rng: Optional[random.Random] = None) -> list:
    """Isomorphisms q1 -> q2 found by backtracking over generator images."""
    q1, q2 = as_table(q1), as_table(q2)
    if q1.order != q2.order:
        return []
    if q1.order > ISO_CAP:
        raise SizeCapExceeded(f"isomorphism search capped at order {ISO_CAP}")
    s1, s2 = _signatures(q1), _signatures(q2)
    if sorted(s1) != sorted(s2):
        return []
    gens = _generating_set(q1, s1)
    n = q1.order
    found = []

    def dfs(i, phi, inv, domain):
        if limit is not None and len(found) >= limit:
            return
        if i == len(gens):
            if len(domain) == n:
                found.append(Permutation(phi))
            return
        g = gens[i]
        cands = [h for h in range(n) if s2[h] == s1[g]]
        if rng is not None:
            rng.shuffle(cands)
        for h in cands:
            phi2, inv2, dom2 = list(phi), list(inv), list(domain)
            if _extend(q1, q2, phi2, inv2, dom2, g, h):
                dfs(i + 1, phi2, inv2, dom2)
                if limit is not None and len(found) >= limit:
                    return

    dfs(0, [-1] * n, [-1] * n, [])
    return found


def is_isomorphic(q1, q2) -> Optional[Permutation]:
    found = isomorphisms(q1, q2, limit=1)
    if not found:
        return None
    if not is_homomorphism(q1, q2, found[0].images):
        raise InternalInconsistency("isomorphism search returned a non-homomorphism")
    return found[0]


def automorphisms(loop, limit: Optional[int] = None, rng: Optional[random.Random] = None) -> list:
    return isomorphisms(loop, loop, limit=limit, rng=rng)


def multiplication_group(q, cap: int = 10**5) -> set:
    q = as_table(q)
    gens = [q.translation(a, "left") for a in range(q.order)]
    gens += [q.translation(a, "right") for a in range(q.order)]
    return generate_group(gens, cap=cap)


def is_simple(q, cap: int = SIMPLE_CAP) -> bool:
    """True iff the only congruences are the identity and the universal one.

    Congruence blocks of a quasigroup all have the same size, so any
    nontrivial congruence contains a pair (0, y) with y != 0; checking the
    principal congruences of those pairs is enough.
    """
    q = as_table(q)
    if q.order > cap:
        raise SizeCapExceeded(f"simplicity check capped at order {cap}")
    if q.order < 2:
        return False
    return all(principal_congruence(q, [(0, y)]).is_universal() for y in range(1, q.order))
