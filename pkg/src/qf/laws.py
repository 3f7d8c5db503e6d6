"""Decidable checkers for quasigroup and loop identities.

Every law is a finite list of equations in named variables.  A sweep runs the
variables over the carrier in lexicographic order and stops at the first
violated assignment, so reported witnesses are deterministic.  Small sweeps
use plain Python; larger ones are vectorised over all but the leading
variable.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import SizeCapExceeded, UnknownLaw
from .qcore import CayleyTable, FiniteLoop, Permutation, as_table, extend_sub, generate_group

DEFAULT_WORK_CAP = 10**8

# sweeps with at most this many assignments run in pure Python
_PY_SWEEP_LIMIT = 1500


def work_cap() -> int:
    value = os.environ.get("QF_WORK_CAP")
    return int(value) if value else DEFAULT_WORK_CAP


@dataclass(frozen=True)
class LawReport:
    law: str
    holds: bool
    witness: Optional[tuple] = None
    generators: Optional[tuple] = None
    detail: Optional[str] = None

    def __post_init__(self):
        if self.holds and self.witness is not None:
            raise ValueError("a law that holds carries no witness")
        if not self.holds and self.witness is None:
            raise ValueError("a failed law needs a witness")

    def __bool__(self):
        return self.holds

    def to_json(self) -> dict:
        out = {"holds": self.holds, "law": self.law,
               "witness": list(self.witness) if self.witness is not None else None}
        if self.generators is not None:
            out["generators"] = list(self.generators)
        if self.detail is not None:
            out["detail"] = self.detail
        return out


@dataclass(frozen=True)
class Law:
    name: str
    variables: tuple
    # body(m, al, be, *vars) -> sequence of (lhs, rhs); must work on ints and arrays
    body: Callable


def _f_left(m, al, be, x, y, z):
    return [(m(x, m(y, z)), m(m(x, y), m(al[x], z)))]


def _f_right(m, al, be, x, y, z):
    return [(m(m(z, y), x), m(m(z, be[x]), m(y, x)))]


def _moufang1(m, al, be, x, y, z):
    return [(m(x, m(y, m(x, z))), m(m(m(x, y), x), z))]


def _moufang2(m, al, be, x, y, z):
    return [(m(x, m(m(y, z), x)), m(m(x, y), m(z, x)))]


def _moufang3(m, al, be, x, y, z):
    return [(m(m(m(z, x), y), x), m(z, m(x, m(y, x))))]


def _moufang4(m, al, be, x, y, z):
    return [(m(m(x, m(y, z)), x), m(m(x, y), m(z, x)))]


def _medial(m, al, be, x, a, b, y):
    return [(m(m(x, a), m(b, y)), m(m(x, b), m(a, y)))]


def _distributive(m, al, be, x, y, z):
    return [(m(x, m(y, z)), m(m(x, y), m(x, z))),
            (m(m(z, y), x), m(m(z, x), m(y, x)))]


def _symmetric(m, al, be, x, y):
    return [(m(x, y), m(y, x)), (m(x, m(x, y)), y)]


def _idempotent(m, al, be, x):
    return [(m(x, x), x)]


def _unipotent(m, al, be, x, y):
    return [(m(x, x), m(y, y))]


def _associative(m, al, be, x, y, z):
    return [(m(m(x, y), z), m(x, m(y, z)))]


def _commutative(m, al, be, x, y):
    return [(m(x, y), m(y, x))]


def _left_semimedial(m, al, be, x, y):
    # xx.yx = xy.xx: the two-variable instance of mediality used for F-quasigroups
    return [(m(m(x, x), m(y, x)), m(m(x, y), m(x, x)))]


def _square_medial(m, al, be, x, y):
    return [(m(m(x, x), m(y, y)), m(m(x, y), m(x, y)))]


def _fg_alpha(m, al, be, x, y, z, u):
    return [(m(m(x, al[u]), m(y, z)), m(m(x, y), m(al[u], z)))]


def _fg_beta(m, al, be, x, y, z, u):
    return [(m(m(x, be[u]), m(y, z)), m(m(x, y), m(be[u], z)))]


def _fg_mixed(m, al, be, x, z, u, v):
    return [(m(m(x, al[u]), m(be[v], z)), m(m(x, be[v]), m(al[u], z)))]


LAWS = {law.name: law for law in [
    Law("f_left", ("x", "y", "z"), _f_left),
    Law("f_right", ("x", "y", "z"), _f_right),
    Law("moufang1", ("x", "y", "z"), _moufang1),
    Law("moufang2", ("x", "y", "z"), _moufang2),
    Law("moufang3", ("x", "y", "z"), _moufang3),
    Law("moufang4", ("x", "y", "z"), _moufang4),
    Law("medial", ("x", "a", "b", "y"), _medial),
    Law("distributive", ("x", "y", "z"), _distributive),
    Law("symmetric", ("x", "y"), _symmetric),
    Law("idempotent", ("x",), _idempotent),
    Law("unipotent", ("x", "y"), _unipotent),
    Law("associative", ("x", "y", "z"), _associative),
    Law("commutative", ("x", "y"), _commutative),
    # auxiliary identities (not part of the stable public law list)
    Law("semimedial_xx_yx", ("x", "y"), _left_semimedial),
    Law("semimedial_xx_yy", ("x", "y"), _square_medial),
    Law("fg_alpha", ("x", "y", "z", "u"), _fg_alpha),
    Law("fg_beta", ("x", "y", "z", "u"), _fg_beta),
    Law("fg_mixed", ("x", "z", "u", "v"), _fg_mixed),
]}

PUBLIC_LAWS = (
    "f_left", "f_right", "moufang1", "moufang2", "moufang3", "moufang4",
    "medial", "distributive", "symmetric", "idempotent", "unipotent",
    "associative", "commutative",
)


def get_law(law) -> Law:
    if isinstance(law, Law):
        return law
    try:
        return LAWS[law]
    except KeyError:
        raise UnknownLaw(law) from None


class RawOps:
    """Minimal stand-in for a CayleyTable built from raw rows (no validation)."""

    __slots__ = ("order", "rows", "alpha_map", "beta_map")

    def __init__(self, rows):
        n = len(rows)
        self.order = n
        self.rows = rows
        self.alpha_map = tuple(rows[x].index(x) for x in range(n))
        self.beta_map = tuple(next(z for z in range(n) if rows[z][x] == x) for x in range(n))


def _sweep_py(q, law: Law, ranges) -> Optional[tuple]:
    rows = q.rows

    def m(a, b):
        return rows[a][b]

    al, be, body = q.alpha_map, q.beta_map, law.body
    for assignment in itertools.product(*ranges):
        for lhs, rhs in body(m, al, be, *assignment):
            if lhs != rhs:
                return assignment
    return None


def _sweep_np_block(q: CayleyTable, law: Law, ranges, leading) -> Optional[tuple]:
    T = q.table

    def m(a, b):
        return T[a, b]

    al = np.asarray(q.alpha_map, dtype=np.intp)
    be = np.asarray(q.beta_map, dtype=np.intp)
    rest = [np.asarray(r, dtype=np.intp) for r in ranges[1:]]
    k = len(rest)
    grids = [r.reshape([-1 if i == j else 1 for j in range(k)]) for i, r in enumerate(rest)]
    for x0 in leading:
        bad = None
        for lhs, rhs in law.body(m, al, be, x0, *grids):
            diff = np.broadcast_to(np.asarray(lhs) != np.asarray(rhs), tuple(len(r) for r in rest))
            bad = diff if bad is None else (bad | diff)
        if bad is not None and bad.any():
            pos = np.unravel_index(int(np.argmax(bad)), bad.shape) if k else ()
            return (int(x0),) + tuple(int(rest[i][p]) for i, p in enumerate(pos))
    return None


def sweep(q, law, ranges=None, cap=None, workers: int = 1) -> Optional[tuple]:
    """First assignment (lexicographic) violating ``law``, or None."""
    law = get_law(law)
    q = as_table(q)
    n = q.order
    if ranges is None:
        ranges = [range(n)] * len(law.variables)
    ranges = [list(r) for r in ranges]
    total = 1
    for r in ranges:
        total *= len(r)
    if total == 0:
        return None
    cap = work_cap() if cap is None else cap
    if total > cap:
        raise SizeCapExceeded(f"{law.name}: {total} evaluations exceed the work cap {cap}")
    if total <= _PY_SWEEP_LIMIT or not isinstance(q, CayleyTable):
        return _sweep_py(q, law, ranges)
    leading = ranges[0]
    if workers <= 1 or len(leading) < 2:
        return _sweep_np_block(q, law, ranges, leading)
    chunks = [leading[i::workers] for i in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        found = list(pool.map(lambda c: _sweep_np_block(q, law, ranges, c), chunks))
    # each chunk returns its own first witness; the global first is the minimum
    found = [w for w in found if w is not None]
    return min(found) if found else None


def check_law(q, law, cap=None, workers: int = 1) -> LawReport:
    law = get_law(law)
    witness = sweep(q, law, cap=cap, workers=workers)
    return LawReport(law.name, witness is None, witness)


def law_holds(q, law) -> bool:
    return sweep(q, law) is None


def evaluate_law(q, law, assignment) -> bool:
    """True iff every equation of ``law`` holds at the single ``assignment``."""
    law = get_law(law)
    q = as_table(q)
    rows = q.rows
    return all(lhs == rhs for lhs, rhs in law.body(
        lambda a, b: rows[a][b], q.alpha_map, q.beta_map, *assignment))


def is_f_quasigroup(q) -> bool:
    return law_holds(q, "f_left") and law_holds(q, "f_right")


def is_moufang(q) -> bool:
    return all(law_holds(q, f"moufang{i}") for i in range(1, 5))


# generated subalgebras ---------------------------------------------------

def every_k_generated(q, k: int, check: Callable) -> Optional[tuple]:
    """Search generator sets of size <= k for a subquasigroup failing ``check``.

    ``check(members)`` receives the sorted member list of a generated
    subquasigroup and returns a witness (in original labels) or None.  The
    property must be hereditary: once a subquasigroup passes, generator sets
    whose closure lies inside it are skipped.  Returns ``(generators,
    witness)`` for the first failure, or None.
    """
    q = as_table(q)
    n = q.order
    cache = {}

    def test(members):
        key = frozenset(members)
        if key not in cache:
            cache[key] = check(sorted(members))
        return cache[key]

    def visit(prefix, members):
        bad = test(members)
        if bad is not None:
            return prefix, bad
        if len(prefix) == k:
            return None
        covering = [members]
        for z in range(prefix[-1] + 1, n):
            if any(z in s for s in covering):
                continue
            grown = extend_sub(q, members, [z])
            found = visit(prefix + (z,), grown)
            if found is not None:
                return found
            covering.append(grown)
        return None

    covering = []
    for z in range(n):
        if any(z in s for s in covering):
            continue
        members = extend_sub(q, (), [z])
        found = visit((z,), members)
        if found is not None:
            return found
        covering.append(members)
    return None


def _law_inside(q: CayleyTable, law: str) -> Callable:
    from .qcore import subtable

    def check(members):
        sub = subtable(q, members)
        w = sweep(sub, law)
        return None if w is None else tuple(members[i] for i in w)
    return check


_K_NAMES = {1: "monomedial", 2: "dimedial", 3: "trimedial"}


def k_medial(q, k: int, exhaustive: bool = False) -> LawReport:
    """Mediality of every subquasigroup generated by at most ``k`` elements.

    F-quasigroups take a fast path unless ``exhaustive``: they are always
    monomedial, and di-/trimedial exactly when ``xx.yx = xy.xx``.
    """
    if k not in _K_NAMES:
        raise ValueError("k must be 1, 2 or 3")
    q = as_table(q)
    name = _K_NAMES[k]
    if not exhaustive and is_f_quasigroup(q):
        if k == 1:
            return LawReport(name, True, detail="F-quasigroup fast path")
        w = sweep(q, "semimedial_xx_yx")
        if w is None:
            return LawReport(name, True, detail="F-quasigroup fast path")
        x, y = w
        return LawReport(name, False, (x, x, y, x), generators=(x, y),
                         detail="F-quasigroup fast path")
    found = every_k_generated(q, k, _law_inside(q, "medial"))
    if found is None:
        return LawReport(name, True, detail="exhaustive")
    gens, witness = found
    return LawReport(name, False, witness, generators=gens, detail="exhaustive")


def verify_k_medial_witness(q, report: LawReport) -> bool:
    """True iff the report's witness lies in the generated sub and breaks mediality."""
    from .qcore import generate_sub
    sub = set(generate_sub(q, report.generators))
    return set(report.witness) <= sub and not evaluate_law(q, "medial", report.witness)


def is_diassociative(loop) -> LawReport:
    q = as_table(loop)
    found = every_k_generated(q, 2, _law_inside(q, "associative"))
    if found is None:
        return LawReport("diassociative", True)
    gens, witness = found
    return LawReport("diassociative", False, witness, generators=gens)


# inner mappings ----------------------------------------------------------

def is_automorphism(q, f: Permutation) -> bool:
    T = as_table(q).table
    p = f.as_array()
    return bool((p[T] == T[p[:, None], p[None, :]]).all())


def automorphism_failure(q, f: Permutation) -> Optional[tuple]:
    T = as_table(q).table
    p = f.as_array()
    bad = p[T] != T[p[:, None], p[None, :]]
    if not bad.any():
        return None
    x, y = np.unravel_index(int(np.argmax(bad)), bad.shape)
    return int(x), int(y)


def inner_generators(loop: FiniteLoop) -> list:
    """The standard generators L(x,y), R(x,y), T(x) of the inner mapping group."""
    q = loop.base
    n = q.order
    rows, ld, rd = q.rows, q.ldiv_rows, q.rdiv_rows
    gens = {}
    for x in range(n):
        for y in range(n):
            yx = rows[y][x]
            xy = rows[x][y]
            # L(x,y) = L_{yx}^{-1} L_y L_x ; R(x,y) = R_{xy}^{-1} R_y R_x
            lxy = tuple(ld[yx][rows[y][rows[x][t]]] for t in range(n))
            rxy = tuple(rd[rows[rows[t][x]][y]][xy] for t in range(n))
            gens.setdefault(lxy, ("L", x, y))
            gens.setdefault(rxy, ("R", x, y))
        # T(x) = L_x^{-1} R_x
        tx = tuple(ld[x][rows[t][x]] for t in range(n))
        gens.setdefault(tx, ("T", x, x))
    return [(Permutation(p), tag) for p, tag in gens.items()]


def inner_mappings(loop: FiniteLoop, cap: int = 10**5) -> set:
    """The inner mapping group (stabiliser of zero in the multiplication group)."""
    return generate_group([p for p, _ in inner_generators(loop)], cap=cap)


def is_A_loop(loop: FiniteLoop) -> LawReport:
    """Every inner mapping is an automorphism.

    Automorphisms form a group, so checking the generators of the inner
    mapping group suffices.
    """
    for perm, (kind, x, y) in inner_generators(loop):
        bad = automorphism_failure(loop, perm)
        if bad is not None:
            return LawReport("a_loop", False, bad,
                             generators=(x, y), detail=f"inner map {kind}({x},{y})")
    return LawReport("a_loop", True)


def is_pseudoautomorphism(loop: FiniteLoop, f: Permutation, c: int, side: str = "left") -> bool:
    T = loop.table
    p = f.as_array()
    fxy = p[T]
    if side == "left":
        # c + f(x+y) = (c + f(x)) + f(y)
        lhs = T[c][fxy]
        rhs = T[T[c][p][:, None], p[None, :]]
    elif side == "right":
        # f(x+y) + c = f(x) + (f(y) + c)
        lhs = T[fxy, c]
        rhs = T[p[:, None], T[p, c][None, :]]
    else:
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    return bool((lhs == rhs).all())
