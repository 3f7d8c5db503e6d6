"""Exhaustive Latin-square enumeration, builtin examples and random forms."""

from __future__ import annotations

import heapq
import itertools
import math
import random
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .errors import ExampleSanityFailed, ExhaustedAttempts, QFError, SizeCapExceeded
from .forms import ArithmeticForm, loop_structure, principal_isotope, verify_form
from .laws import RawOps, get_law, is_automorphism, law_holds
from .qcore import (
    CayleyTable, FiniteLoop, Permutation, as_table, from_table, relabel,
)
from .structure import automorphisms

ENUM_CAPS = {"all": 5, "reduced": 6, "loops": 6}
PRODUCT_CAP = 4096


# -- enumeration ---------------------------------------------------------------

@dataclass(frozen=True)
class EnumSpec:
    """What to enumerate.

    ``mode`` is ``"all"`` (every Latin square), ``"reduced"`` (first row and
    first column in natural order) or ``"loops"`` (Latin squares with some
    two-sided neutral element).
    """

    order: int
    mode: str = "all"
    filter: tuple = ()
    limit: Optional[int] = None

    def __post_init__(self):
        if self.mode not in ENUM_CAPS:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.order < 1:
            raise ValueError("order must be positive")
        if self.order > ENUM_CAPS[self.mode]:
            raise SizeCapExceeded(
                f"mode {self.mode!r} is capped at order {ENUM_CAPS[self.mode]}")
        object.__setattr__(self, "filter", tuple(get_law(f).name for f in self.filter))


def _fixed_cells(n: int, mode: str) -> list:
    """One dict of pre-filled cells per independent search."""
    if mode == "all":
        return [{}]
    if mode == "reduced":
        fixed = {c: c for c in range(n)}
        fixed.update({r * n: r for r in range(n)})
        return [fixed]
    out = []
    for e in range(n):
        fixed = {e * n + c: c for c in range(n)}
        fixed.update({r * n + e: r for r in range(n)})
        out.append(fixed)
    return out


def _search(n: int, fixed: dict, prefix: Sequence[int] = ()) -> Iterator[tuple]:
    """Latin squares extending ``fixed`` and ``prefix`` in row-major lexicographic order.

    ``prefix`` gives the values of the first ``len(prefix)`` cells.
    """
    N = n * n
    full = (1 << n) - 1
    rowmask = [0] * n
    colmask = [0] * n
    vals = [-1] * N

    def place(i, v):
        r, c = divmod(i, n)
        bit = 1 << v
        if rowmask[r] & bit or colmask[c] & bit:
            return False
        rowmask[r] |= bit
        colmask[c] |= bit
        vals[i] = v
        return True

    for i, v in fixed.items():
        if not place(i, v):
            return
    for i, v in enumerate(prefix):
        if i in fixed:
            if fixed[i] != v:
                return
        elif not (0 <= v < n and place(i, v)):
            return

    free = [i for i in range(len(prefix), N) if i not in fixed]
    if not free:
        yield tuple(tuple(vals[r * n:(r + 1) * n]) for r in range(n))
        return
    rows = [i // n for i in free]
    cols = [i % n for i in free]
    last = len(free) - 1
    avail = [0] * len(free)
    placed = [0] * len(free)
    j = 0
    avail[0] = full & ~(rowmask[rows[0]] | colmask[cols[0]])
    while j >= 0:
        r, c = rows[j], cols[j]
        bit = placed[j]
        if bit:
            rowmask[r] ^= bit
            colmask[c] ^= bit
            placed[j] = 0
        a = avail[j]
        if not a:
            j -= 1
            continue
        bit = a & -a
        avail[j] = a ^ bit
        rowmask[r] |= bit
        colmask[c] |= bit
        placed[j] = bit
        vals[free[j]] = bit.bit_length() - 1
        if j == last:
            yield tuple(tuple(vals[k * n:(k + 1) * n]) for k in range(n))
            continue
        j += 1
        avail[j] = full & ~(rowmask[rows[j]] | colmask[cols[j]])


def iter_tables(spec: EnumSpec, prefix: Sequence[int] = ()) -> Iterator[tuple]:
    """Stream the tables selected by ``spec`` as tuples of rows."""
    n = spec.order
    streams = [_search(n, fixed, prefix) for fixed in _fixed_cells(n, spec.mode)]
    source = streams[0] if len(streams) == 1 else _dedup(heapq.merge(*streams))
    laws = [get_law(f) for f in spec.filter]
    emitted = 0
    for rows in source:
        if laws:
            ops = RawOps(rows)
            if not all(law_holds(ops, law) for law in laws):
                continue
        yield rows
        emitted += 1
        if spec.limit is not None and emitted >= spec.limit:
            return


def _dedup(stream):
    # a loop has exactly one neutral element, so the merged streams are
    # disjoint; the guard only matters for order 1
    prev = None
    for item in stream:
        if item != prev:
            yield item
        prev = item


def enumerate_tables(spec: EnumSpec, consumer: Optional[Callable] = None,
                     prefix: Sequence[int] = ()) -> int:
    """Feed every selected table to ``consumer``; return how many were streamed."""
    count = 0
    for rows in iter_tables(spec, prefix):
        if consumer is not None:
            consumer(rows)
        count += 1
    return count


def prefixes(spec: EnumSpec, depth: int) -> list:
    """All feasible value tuples for the first ``depth`` cells, for splitting work."""
    n = spec.order
    found = set()
    for fixed in _fixed_cells(n, spec.mode):
        for rows in _search_partial(n, fixed, depth):
            found.add(rows)
    return sorted(found)


def _search_partial(n, fixed, depth):
    def rec(prefix, rowmask, colmask):
        i = len(prefix)
        if i == depth:
            yield tuple(prefix)
            return
        r, c = divmod(i, n)
        choices = [fixed[i]] if i in fixed else range(n)
        for v in choices:
            bit = 1 << v
            if rowmask[r] & bit or colmask[c] & bit:
                continue
            if i not in fixed and (
                any(fixed.get(r * n + cc) == v for cc in range(n))
                or any(fixed.get(rr * n + c) == v for rr in range(n))
            ):
                continue
            rowmask[r] |= bit
            colmask[c] |= bit
            yield from rec(prefix + [v], rowmask, colmask)
            rowmask[r] ^= bit
            colmask[c] ^= bit

    yield from rec([], [0] * n, [0] * n)


def _count_prefix(args):
    spec, prefix = args
    return enumerate_tables(spec, prefix=prefix)


def count_parallel(spec: EnumSpec, workers: int = 2, depth: Optional[int] = None) -> int:
    """Count selected tables, splitting the search by cell prefixes across processes."""
    if depth is None:
        depth = spec.order + 2
    if spec.limit is not None or workers <= 1:
        return enumerate_tables(spec)
    jobs = [(spec, p) for p in prefixes(spec, depth)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_count_prefix, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


# -- builtin examples ----------------------------------------------------------

def _parse_id(text: str):
    """Parse ``name(arg, ...)`` where args are ints or nested ids."""
    pos = 0
    text = text.replace(" ", "")

    def parse():
        nonlocal pos
        m = re.match(r"[A-Za-z_][A-Za-z_0-9]*|-?\d+", text[pos:])
        if not m:
            raise QFError(f"cannot parse example id at {text[pos:]!r}")
        tok = m.group(0)
        pos += len(tok)
        if tok.lstrip("-").isdigit():
            return int(tok)
        args = []
        if pos < len(text) and text[pos] == "(":
            pos += 1
            while True:
                args.append(parse())
                if pos >= len(text):
                    raise QFError(f"unterminated example id {text!r}")
                if text[pos] == ",":
                    pos += 1
                    continue
                if text[pos] == ")":
                    pos += 1
                    break
                raise QFError(f"unexpected {text[pos]!r} in example id")
        return (tok.lower(), args)

    node = parse()
    if pos != len(text) or isinstance(node, int):
        raise QFError(f"cannot parse example id {text!r}")
    return node


def _require(cond: bool, what: str, name: str):
    if not cond:
        raise ExampleSanityFailed(f"{name}: {what}")


def _cyclic(n: int) -> CayleyTable:
    if n < 1:
        raise QFError("cyclic(n) needs n >= 1")
    i = np.arange(n)
    return from_table(n, (i[:, None] + i[None, :]) % n)


def _zlin(n: int, f: int, g: int, e: int) -> CayleyTable:
    if math.gcd(f, n) != 1 or math.gcd(g, n) != 1:
        raise QFError(f"zlin({n},{f},{g},{e}) needs f and g prime to n")
    i = np.arange(n)
    return from_table(n, (f * i[:, None] + g * i[None, :] + e) % n)


def _s3() -> CayleyTable:
    perms = list(itertools.permutations(range(3)))
    index = {p: i for i, p in enumerate(perms)}
    # (p q)(i) = p(q(i))
    return from_table(6, [[index[tuple(p[j] for j in q)] for q in perms] for p in perms])


def _chein(g: CayleyTable) -> CayleyTable:
    n = g.order
    e = g.neutral()
    if e is None or not law_holds(g, "associative"):
        raise QFError("chein(G) needs a group")
    T = g.table
    inv = g.ldiv_table[:, e]
    x = np.arange(n)
    out = np.empty((2 * n, 2 * n), dtype=np.intp)
    out[:n, :n] = T                                   # (g,0)(h,0) = (gh,0)
    out[:n, n:] = n + T.T                             # (g,0)(h,1) = (hg,1)
    out[n:, :n] = n + T[x[:, None], inv[None, :]]     # (g,1)(h,0) = (gh^-1,1)
    out[n:, n:] = T[inv[None, :], x[:, None]]         # (g,1)(h,1) = (h^-1 g,0)
    return from_table(2 * n, out)


def _cml81_table() -> np.ndarray:
    idx = np.arange(81)
    d = np.stack([(idx // 3 ** i) % 3 for i in range(4)], axis=1)
    x = d[:, None, :]
    y = d[None, :, :]
    s = (x + y) % 3
    twist = (x[..., 2] - y[..., 2]) * (x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0])
    s[..., 3] = (s[..., 3] + twist) % 3
    return s[..., 0] + 3 * s[..., 1] + 9 * s[..., 2] + 27 * s[..., 3]


def _cml81() -> CayleyTable:
    return from_table(81, _cml81_table())


def _sd81() -> CayleyTable:
    T = _cml81_table()
    idx = np.arange(81)
    d = np.stack([(idx // 3 ** i) % 3 for i in range(4)], axis=1)
    neg = ((-d) % 3) @ np.array([1, 3, 9, 27])
    return from_table(81, neg[T])


def direct_product(q1, q2) -> CayleyTable:
    """Componentwise product; (i, j) is encoded as i * n2 + j."""
    q1, q2 = as_table(q1), as_table(q2)
    n1, n2 = q1.order, q2.order
    if n1 * n2 > PRODUCT_CAP:
        raise SizeCapExceeded(f"product order {n1 * n2} exceeds {PRODUCT_CAP}")
    T1 = np.repeat(np.repeat(q1.table, n2, axis=0), n2, axis=1)
    T2 = np.tile(q2.table, (n1, n1))
    return from_table(n1 * n2, T1 * n2 + T2)


def _sanity(name: str, q: CayleyTable, args) -> None:
    if name == "cyclic":
        _require(law_holds(q, "associative") and law_holds(q, "commutative"), "not an abelian group", name)
        _require(q.neutral() == 0, "0 is not neutral", name)
    elif name == "s3":
        _require(law_holds(q, "associative"), "not associative", name)
        _require(not law_holds(q, "commutative"), "commutative", name)
        _require(q.neutral() is not None, "no identity", name)
    elif name == "zlin":
        _require(law_holds(q, "medial"), "not medial", name)
        _require(law_holds(q, "f_left") and law_holds(q, "f_right"), "not an F-quasigroup", name)
    elif name == "chein":
        _require(q.neutral() is not None, "not a loop", name)
        _require(all(law_holds(q, f"moufang{i}") for i in range(1, 5)), "not Moufang", name)
        base_abelian = law_holds(_build(args[0]), "commutative")
        _require(law_holds(q, "associative") == base_abelian,
                 "associativity should match commutativity of the base group", name)
    elif name == "cml81":
        _require(q.neutral() == 0, "0 is not neutral", name)
        _require(law_holds(q, "commutative"), "not commutative", name)
        _require(all(law_holds(q, f"moufang{i}") for i in range(1, 5)), "not Moufang", name)
        _require(all(q.mul(q.mul(x, x), x) == 0 for x in range(81)), "exponent is not 3", name)
        _require(not law_holds(q, "associative"), "associative", name)
        centre = [x for x in range(81) if (q.table[x] == q.table[:, x]).all()
                  and law_holds_nuclear(q, x)]
        _require(centre == [0, 27, 54], f"centre is {centre}", name)
    elif name == "sd81":
        _require(law_holds(q, "symmetric"), "not symmetric", name)
        _require(law_holds(q, "distributive"), "not distributive", name)
        _require(not law_holds(q, "medial"), "medial", name)
    elif name == "shifted":
        _require(q.neutral() is not None, "isotope is not a loop", name)
    elif name == "product":
        pass
    else:
        raise QFError(f"no sanity suite for {name}")


def law_holds_nuclear(q: CayleyTable, a: int) -> bool:
    T = q.table
    Ta = T[a]
    return bool((T[Ta, :] == Ta[T]).all() and (T[T[:, a], :] == T[:, Ta]).all()
                and (T[:, T[:, a]] == T[T, a]).all())


def _build(node) -> CayleyTable:
    name, args = node
    ints = [a for a in args if isinstance(a, int)]
    if name == "cyclic" and len(args) == 1 and ints:
        return _cyclic(args[0])
    if name == "s3" and not args:
        return _s3()
    if name == "zlin" and len(args) == 4 and len(ints) == 4:
        return _zlin(*args)
    if name == "chein" and len(args) == 1 and not ints:
        return _chein(_build(args[0]))
    if name == "cml81" and not args:
        return _cml81()
    if name == "sd81" and not args:
        return _sd81()
    if name == "shifted" and len(args) == 3 and len(ints) == 2 and not isinstance(args[0], int):
        base = _build(args[0])
        return principal_isotope(base, args[1], args[2]).base
    if name == "product" and len(args) == 2 and not ints:
        return direct_product(_build(args[0]), _build(args[1]))
    raise QFError(f"unknown builtin {name}{tuple(args) if args else ''}")


BUILTIN_NAMES = ("cyclic(n)", "s3", "zlin(n,f,g,e)", "chein(G)", "cml81", "sd81",
                 "shifted(Q,a,b)", "product(Q1,Q2)")


def builtin(example_id: str) -> CayleyTable:
    """Construct a named example and run its sanity suite.

    ``zlin(n,f,g,e)`` is ``f x + g y + e`` over Z_n; ``shifted(Q,a,b)`` is the
    loop isotope ``(x/a)(b\\y)`` of Q; ``product`` is the direct product.
    """
    node = _parse_id(example_id)
    q = _build(node)
    _sanity(node[0], q, node[1])
    return q


# -- random arithmetic forms ---------------------------------------------------

SMALL_ZOO = (
    "cyclic(2)", "cyclic(3)", "cyclic(4)", "cyclic(5)", "cyclic(6)", "cyclic(7)",
    "cyclic(8)", "cyclic(9)", "product(cyclic(2),cyclic(2))",
    "product(cyclic(3),cyclic(3))", "product(cyclic(2),cyclic(4))", "s3",
    "product(s3,cyclic(2))", "product(s3,cyclic(3))",
)
LARGE_ZOO = ("cml81",)


_POOL_CACHE: dict = {}


def _admissible_pool(loop_id: str) -> tuple:
    """The loop and its automorphisms f with x + f(x) in N and -x + f(x) in K."""
    if loop_id not in _POOL_CACHE:
        loop = FiniteLoop.of(builtin(loop_id))
        n = loop.order
        limit = None if n <= 32 else 48
        pool = automorphisms(loop, limit=limit, rng=random.Random(n))
        for p in (Permutation.identity(n), Permutation([loop.neg(x) for x in range(n)])):
            if p not in pool and is_automorphism(loop, p):
                pool.append(p)
        st = loop_structure(loop)
        add, neg = loop.add, loop.neg
        keep = [f for f in pool
                if all(add(x, f(x)) in st.nucleus and add(neg(x), f(x)) in st.moufang_center
                       for x in range(n))]
        keep.sort(key=lambda p: p.images)
        _POOL_CACHE[loop_id] = (loop, keep)
    return _POOL_CACHE[loop_id]


def random_form(seed: int, zoo: Optional[Sequence[str]] = None,
                include_large: bool = False, attempts: int = 200,
                strong: Optional[bool] = None) -> ArithmeticForm:
    """A random arithmetic form over a zoo of NK-loops, randomly relabelled.

    ``strong`` forces e into the centre (True) or out of it (False); the
    default draws e from the whole nucleus.
    """
    rng = random.Random(seed)
    if zoo is None:
        zoo = SMALL_ZOO + (LARGE_ZOO if include_large else ())
    for _ in range(attempts):
        loop_id = rng.choice(list(zoo))
        loop, pool = _admissible_pool(loop_id)
        if not pool:
            continue
        f, g = rng.choice(pool), rng.choice(pool)
        if f * g != g * f:
            continue
        st = loop_structure(loop)
        if strong is None:
            choices = st.nucleus
        elif strong:
            choices = st.center
        else:
            choices = st.nucleus - st.center
        if not choices:
            continue
        e = rng.choice(sorted(choices))
        perm = list(range(loop.order))
        rng.shuffle(perm)
        p = Permutation(perm)
        pi = p.inverse()
        new_loop = FiniteLoop(relabel(loop.base, p), p(loop.zero))
        form = ArithmeticForm(new_loop, p * f * pi, p * g * pi, p(e))
        if not verify_form(form).ok:
            raise ExampleSanityFailed(f"relabelled form over {loop_id} fails its axioms")
        return form
    raise ExhaustedAttempts(f"no admissible form after {attempts} attempts (seed {seed})")
