"""Cayley-table quasigroups, loops and permutations.

Elements are dense indices ``0..n-1``.  Tables are stored as read-only numpy
arrays (for vectorised sweeps) and mirrored as tuples of tuples (for the
scalar inner loops, where numpy indexing is slower than plain tuples).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadSymbol, NotLatin, QFError, SizeCapExceeded

MAX_ORDER = 4096

LEFT = "left"
RIGHT = "right"


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.intp)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``0..n-1`` given by its image tuple."""

    images: tuple

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a permutation: {images}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(n)))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __len__(self):
        return len(self.images)

    def __mul__(self, other: "Permutation") -> "Permutation":
        # (p * q)(x) = p(q(x))
        p = self.images
        return Permutation(tuple(p[i] for i in other.images))

    def compose(self, other: "Permutation") -> "Permutation":
        return self * other

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def fixed_points(self) -> list:
        return [i for i, j in enumerate(self.images) if i == j]

    def cycle_type(self) -> tuple:
        seen = [False] * len(self.images)
        lengths = []
        for start in range(len(self.images)):
            if seen[start]:
                continue
            length = 0
            i = start
            while not seen[i]:
                seen[i] = True
                i = self.images[i]
                length += 1
            lengths.append(length)
        return tuple(sorted(lengths, reverse=True))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.images, dtype=np.intp)

    def __repr__(self):
        return f"Permutation({list(self.images)})"


def compose(p: Permutation, q: Permutation) -> Permutation:
    return p * q


def inverse(p: Permutation) -> Permutation:
    return p.inverse()


class CayleyTable:
    """A finite quasigroup given by a validated Latin square.

    Construct with :func:`from_table`; instances are immutable and hashable.
    """

    __slots__ = (
        "order", "table", "ldiv_table", "rdiv_table",
        "rows", "ldiv_rows", "rdiv_rows", "alpha_map", "beta_map", "_hash",
    )

    def __init__(self, table: np.ndarray):
        n = table.shape[0]
        self.order = n
        self.table = _frozen(table)
        idx = np.arange(n)
        ld = np.empty((n, n), dtype=np.intp)
        rd = np.empty((n, n), dtype=np.intp)
        ld[idx[:, None], table] = idx[None, :]
        rd[table, idx[None, :]] = idx[:, None]
        self.ldiv_table = _frozen(ld)
        self.rdiv_table = _frozen(rd)
        self.rows = tuple(tuple(r) for r in table.tolist())
        self.ldiv_rows = tuple(tuple(r) for r in ld.tolist())
        self.rdiv_rows = tuple(tuple(r) for r in rd.tolist())
        self.alpha_map = tuple(self.ldiv_rows[x][x] for x in range(n))
        self.beta_map = tuple(self.rdiv_rows[x][x] for x in range(n))
        self._hash = hash(self.table.tobytes())

    # -- basic operations -------------------------------------------------
    def mul(self, x: int, y: int) -> int:
        return self.rows[x][y]

    def ldiv(self, x: int, y: int) -> int:
        """The unique z with x*z = y."""
        return self.ldiv_rows[x][y]

    def rdiv(self, x: int, y: int) -> int:
        """The unique z with z*y = x."""
        return self.rdiv_rows[x][y]

    def alpha(self, x: int) -> int:
        return self.alpha_map[x]

    def beta(self, x: int) -> int:
        return self.beta_map[x]

    def translation(self, a: int, side: str = LEFT) -> Permutation:
        if side == LEFT:
            return Permutation(self.rows[a])
        if side == RIGHT:
            return Permutation(tuple(r[a] for r in self.rows))
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")

    def neutral(self):
        """Index of the two-sided neutral element, or None."""
        for e in range(self.order):
            if self.rows[e] == tuple(range(self.order)) and all(
                self.rows[x][e] == x for x in range(self.order)
            ):
                return e
        return None

    def elements(self) -> range:
        return range(self.order)

    def __len__(self):
        return self.order

    def __eq__(self, other):
        return isinstance(other, CayleyTable) and self.rows == other.rows

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"CayleyTable(order={self.order})"


def _check_latin(a: np.ndarray) -> None:
    n = a.shape[0]
    if n and (a.min() < 0 or a.max() >= n):
        bad = np.argwhere((a < 0) | (a >= n))[0]
        raise BadSymbol(int(bad[0]), int(bad[1]), int(a[bad[0], bad[1]]))
    target = np.arange(n)
    row_ok = (np.sort(a, axis=1) == target).all(axis=1)
    if not row_ok.all():
        raise NotLatin("row", int(np.argmin(row_ok)))
    col_ok = (np.sort(a, axis=0) == target[:, None]).all(axis=0)
    if not col_ok.all():
        raise NotLatin("column", int(np.argmin(col_ok)))


def from_table(order: int, entries) -> CayleyTable:
    """Validate ``entries`` as an ``order``-by-``order`` Latin square."""
    if order < 1:
        raise ValueError("order must be positive")
    if order > MAX_ORDER:
        raise SizeCapExceeded(f"order {order} exceeds the table cap {MAX_ORDER}")
    a = np.asarray(entries)
    if a.shape != (order, order):
        raise ValueError(f"expected a {order}x{order} table, got shape {a.shape}")
    if not np.issubdtype(a.dtype, np.integer):
        raise ValueError("table entries must be integers")
    a = a.astype(np.intp)
    _check_latin(a)
    return CayleyTable(a)


def table_from_function(n: int, op) -> CayleyTable:
    return from_table(n, [[op(x, y) for y in range(n)] for x in range(n)])


class FiniteLoop:
    """A quasigroup together with the index of its neutral element.

    The loop is written additively: ``add`` is the table product and
    ``neg(x)`` is the right inverse, ``x + neg(x) = zero``.
    """

    __slots__ = ("base", "zero")

    def __init__(self, base: CayleyTable, zero: int):
        rows = base.rows
        n = base.order
        if not 0 <= zero < n:
            raise ValueError(f"zero {zero} out of range")
        if rows[zero] != tuple(range(n)) or any(rows[x][zero] != x for x in range(n)):
            raise QFError(f"element {zero} is not neutral")
        self.base = base
        self.zero = zero

    @classmethod
    def from_table(cls, order: int, entries, zero=None) -> "FiniteLoop":
        q = from_table(order, entries)
        if zero is None:
            zero = q.neutral()
            if zero is None:
                raise QFError("table has no neutral element")
        return cls(q, zero)

    @classmethod
    def of(cls, q: CayleyTable) -> "FiniteLoop":
        zero = q.neutral()
        if zero is None:
            raise QFError("table has no neutral element")
        return cls(q, zero)

    @property
    def order(self) -> int:
        return self.base.order

    @property
    def table(self) -> np.ndarray:
        return self.base.table

    @property
    def rows(self):
        return self.base.rows

    def add(self, x: int, y: int) -> int:
        return self.base.rows[x][y]

    def neg(self, x: int) -> int:
        return self.base.ldiv_rows[x][self.zero]

    def sub(self, x: int, y: int) -> int:
        """x + (-y)."""
        return self.base.rows[x][self.neg(y)]

    def neg_array(self) -> np.ndarray:
        return self.base.ldiv_table[:, self.zero]

    def __eq__(self, other):
        return isinstance(other, FiniteLoop) and self.zero == other.zero and self.base == other.base

    def __hash__(self):
        return hash((self.base, self.zero))

    def __repr__(self):
        return f"FiniteLoop(order={self.order}, zero={self.zero})"


def as_table(q) -> CayleyTable:
    return q.base if isinstance(q, FiniteLoop) else q


# free functions mirroring the methods -----------------------------------

def mul(q, x, y):
    return as_table(q).mul(x, y)


def ldiv(q, x, y):
    return as_table(q).ldiv(x, y)


def rdiv(q, x, y):
    return as_table(q).rdiv(x, y)


def translation(q, a, side=LEFT):
    return as_table(q).translation(a, side)


def alpha(q, x):
    return as_table(q).alpha(x)


def beta(q, x):
    return as_table(q).beta(x)


# subalgebras and relabelling --------------------------------------------

def generate_sub(q, gens: Iterable[int]) -> list:
    """Least subset containing ``gens`` closed under the product.

    For finite quasigroups closure under multiplication already gives closure
    under both divisions (translations restricted to the subset are injective,
    hence onto).
    """
    return sorted(extend_sub(as_table(q), (), gens))


def extend_sub(q: CayleyTable, closed: Iterable[int], extra: Iterable[int]) -> set:
    """Close ``closed`` (already a subquasigroup, possibly empty) plus ``extra``."""
    rows = q.rows
    members = set(closed)
    order = list(members)
    pending = [g for g in dict.fromkeys(extra) if g not in members]
    if not pending and not members:
        raise ValueError("need at least one generator")
    for g in pending:
        members.add(g)
    queue = list(pending)
    while queue:
        u = queue.pop()
        order.append(u)
        ru = rows[u]
        for v in order:
            for w in (ru[v], rows[v][u]):
                if w not in members:
                    members.add(w)
                    queue.append(w)
    return members


def subtable(q, members: Sequence[int]) -> CayleyTable:
    """The subquasigroup on ``members`` relabelled as ``0..m-1`` (sorted order)."""
    q = as_table(q)
    members = sorted(members)
    index = {x: i for i, x in enumerate(members)}
    rows = q.rows
    try:
        entries = [[index[rows[x][y]] for y in members] for x in members]
    except KeyError:
        raise QFError("subset is not closed under the product") from None
    return from_table(len(members), entries)


def relabel(q, perm: Permutation) -> CayleyTable:
    """The isomorphic copy of ``q`` transported along ``perm``."""
    q = as_table(q)
    p = perm.as_array()
    new = np.empty_like(q.table)
    new[p[:, None], p[None, :]] = p[q.table]
    return CayleyTable(new)


def generate_group(gens: Iterable[Permutation], cap: int = 10**6) -> set:
    """Closure of a set of permutations under composition."""
    gens = list(dict.fromkeys(g.images for g in gens))
    if not gens:
        raise ValueError("need at least one generator")
    n = len(gens[0])
    ident = tuple(range(n))
    seen = {ident}
    queue = [ident]
    while queue:
        p = queue.pop()
        for g in gens:
            r = tuple(g[i] for i in p)
            if r not in seen:
                seen.add(r)
                if len(seen) > cap:
                    raise SizeCapExceeded(f"permutation group exceeds cap {cap}")
                queue.append(r)
    return {Permutation(p) for p in seen}
