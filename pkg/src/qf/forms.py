"""Loop isotopes and arithmetic forms ``x*y = f(x) + e + g(y)`` of F-quasigroups."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    BadShift, InternalAssertionFailed, InvalidForm, NotF, NotStrongInput,
)
from .laws import LawReport, automorphism_failure, is_f_quasigroup
from .qcore import CayleyTable, FiniteLoop, Permutation, as_table, from_table
from .structure import (
    _commutant_members, _nucleus_members, moufang_center, nk_decompose,
)

AXIOMS = (
    (1, "nk_loop"),
    (2, "commuting_automorphisms"),
    (3, "sum_in_nucleus"),
    (4, "difference_in_moufang_center"),
    (5, "e_in_nucleus"),
    (6, "reconstruction"),
    (7, "e_in_center"),
)


@dataclass(frozen=True)
class LoopStructure:
    nucleus: frozenset
    moufang_center: frozenset
    center: frozenset


@functools.lru_cache(maxsize=512)
def loop_structure(loop: FiniteLoop) -> LoopStructure:
    n_set = frozenset(_nucleus_members(loop))
    k_set = frozenset(moufang_center(loop).members)
    z_set = n_set & frozenset(_commutant_members(loop))
    return LoopStructure(n_set, k_set, z_set)


@dataclass(frozen=True)
class ArithmeticForm:
    loop: FiniteLoop
    f: Permutation
    g: Permutation
    e: int

    @property
    def order(self) -> int:
        return self.loop.order

    @property
    def zero(self) -> int:
        return self.loop.zero

    def product(self, x: int, y: int) -> int:
        add = self.loop.add
        return add(add(self.f(x), self.e), self.g(y))

    def table(self) -> np.ndarray:
        """Cayley table of ``(f(x) + e) + g(y)``."""
        T = self.loop.table
        fe = T[self.f.as_array(), self.e]
        return T[fe[:, None], self.g.as_array()[None, :]]

    def is_strong(self) -> bool:
        return self.e in loop_structure(self.loop).center

    def to_json(self) -> dict:
        return {
            "e": self.e,
            "f": list(self.f.images),
            "g": list(self.g.images),
            "loop_table": [list(r) for r in self.loop.rows],
            "order": self.order,
            "strong": self.is_strong(),
            "zero": self.zero,
        }

    @classmethod
    def from_json(cls, data: dict) -> "ArithmeticForm":
        n = data["order"]
        loop = FiniteLoop(from_table(n, data["loop_table"]), data["zero"])
        form = cls(loop, Permutation(data["f"]), Permutation(data["g"]), data["e"])
        if "strong" in data and data["strong"] != form.is_strong():
            raise InvalidForm("strong flag does not match the loop centre")
        return form


@dataclass(frozen=True)
class FormTrace:
    r: int
    a: int
    b: int
    h: Permutation
    k: Permutation
    c: int
    d: int
    # p = h k alpha h^-1 and q = k h beta k^-1 are maps, not always bijective
    p: tuple
    q: tuple


@dataclass
class FormReport:
    axioms: dict = field(default_factory=dict)
    strong_required: bool = False

    @property
    def ok(self) -> bool:
        required = [name for num, name in AXIOMS if num <= 6 or self.strong_required]
        return all(self.axioms[name].holds for name in required)

    @property
    def strong(self) -> bool:
        return self.axioms["e_in_center"].holds

    def failures(self) -> list:
        return [name for name, rep in self.axioms.items() if not rep.holds]

    def to_json(self) -> dict:
        return {"axioms": {k: v.to_json() for k, v in self.axioms.items()},
                "ok": self.ok, "strong": self.strong}


def _first(mask: np.ndarray) -> Optional[tuple]:
    if not mask.any():
        return None
    return tuple(int(i) for i in np.unravel_index(int(np.argmax(mask)), mask.shape))


def verify_form(form: ArithmeticForm, strong: bool = False,
                quasigroup: Optional[CayleyTable] = None) -> FormReport:
    """Check each arithmetic-form axiom independently, with witnesses."""
    loop = form.loop
    T = loop.table
    n = loop.order
    st = loop_structure(loop)
    f, g = form.f.as_array(), form.g.as_array()
    neg = loop.neg_array()
    report = FormReport(strong_required=strong)
    ax = report.axioms

    ld = loop.base.ldiv_rows
    bad = next((x for x in range(n) if not any(ld[a][x] in st.moufang_center for a in st.nucleus)), None)
    ax["nk_loop"] = LawReport("nk_loop", bad is None, None if bad is None else (bad,))

    witness = automorphism_failure(loop, form.f) or automorphism_failure(loop, form.g)
    if witness is None:
        w = _first(f[g] != g[f])
        witness = None if w is None else (w[0], w[0])
    ax["commuting_automorphisms"] = LawReport("commuting_automorphisms", witness is None, witness)

    n_mask = np.zeros(n, dtype=bool)
    n_mask[list(st.nucleus)] = True
    k_mask = np.zeros(n, dtype=bool)
    k_mask[list(st.moufang_center)] = True
    x = np.arange(n)
    w = _first(~n_mask[T[x, f]] | ~n_mask[T[x, g]])
    ax["sum_in_nucleus"] = LawReport("sum_in_nucleus", w is None, w)
    w = _first(~k_mask[T[neg, f]] | ~k_mask[T[neg, g]])
    ax["difference_in_moufang_center"] = LawReport("difference_in_moufang_center", w is None, w)

    ax["e_in_nucleus"] = LawReport("e_in_nucleus", form.e in st.nucleus,
                                   None if form.e in st.nucleus else (form.e,))

    left = T[T[f, form.e][:, None], g[None, :]]
    mask = left != T[f[:, None], T[form.e, g][None, :]]
    if strong:
        # the other ordering f(x) + g(y) + e agrees when e is central
        mask |= left != T[T[f[:, None], g[None, :]], form.e]
    if quasigroup is not None:
        mask |= left != as_table(quasigroup).table
    w = _first(mask)
    ax["reconstruction"] = LawReport("reconstruction", w is None, w)

    ax["e_in_center"] = LawReport("e_in_center", form.e in st.center,
                                  None if form.e in st.center else (form.e,))
    return report


def principal_isotope(q, a: int, b: int) -> FiniteLoop:
    """The loop x + y = (x/a)(b\\y) with neutral element ba."""
    q = as_table(q)
    T = q.table
    table = T[q.rdiv_table[:, a][:, None], q.ldiv_table[b][None, :]]
    return FiniteLoop(CayleyTable(table), q.mul(b, a))


def _perm(a) -> Permutation:
    return Permutation(np.asarray(a).tolist())


def form_at(q, r: int = 0) -> tuple:
    """Strong arithmetic form built from the loop isotope at a = alpha(r), b = beta(r).

    Returns ``(form, trace)``.  Every conclusion of the construction is
    re-checked; a failure raises InternalAssertionFailed.
    """
    q = as_table(q)
    if not is_f_quasigroup(q):
        raise NotF("form_at needs an F-quasigroup")
    a, b = q.alpha(r), q.beta(r)
    loop = principal_isotope(q, a, b)
    zero = loop.zero
    T = q.table
    h = T[:, a]                     # R_a
    k = T[b, :]                     # L_b
    h_inv = q.rdiv_table[:, a]
    k_inv = q.ldiv_table[b]
    al = np.asarray(q.alpha_map)
    be = np.asarray(q.beta_map)
    f = h[T[h_inv, q.beta(a)]]      # h R_{beta(a)} h^-1
    g = k[T[q.alpha(b), k_inv]]     # k L_{alpha(b)} k^-1
    p = h[k[al[h_inv]]]
    qq = k[h[be[k_inv]]]
    c, d = int(h[zero]), int(k[zero])
    ba = q.mul(b, a)
    e = q.mul(ba, ba)

    checks = {
        "c = ba.a": c == q.mul(ba, a),
        "d = b.ba": d == q.mul(b, ba),
        "e = c + d": e == loop.add(c, d),
        "hk = kh": bool((h[k] == k[h]).all()),
        "x = f(x) + p(x)": bool((loop.table[f, p] == np.arange(q.order)).all()),
        "x = q(x) + g(x)": bool((loop.table[qq, g] == np.arange(q.order)).all()),
    }
    form = ArithmeticForm(loop, _perm(f), _perm(g), e)
    report = verify_form(form, strong=True, quasigroup=q)
    failed = [name for name, ok in checks.items() if not ok] + report.failures()
    if failed:
        raise InternalAssertionFailed(f"form_at(r={r}) broke: {', '.join(failed)}")
    trace = FormTrace(r, a, b, _perm(h), _perm(k), c, d,
                      tuple(int(v) for v in p), tuple(int(v) for v in qq))
    return form, trace


def form_table(form: ArithmeticForm) -> CayleyTable:
    return from_table(form.order, form.table())


def psi(form: ArithmeticForm) -> tuple:
    """The pointed F-quasigroup ``(Q, zero)`` with product (f(x) + e) + g(y)."""
    report = verify_form(form)
    if not report.ok:
        raise InvalidForm(f"axioms fail: {', '.join(report.failures())}")
    q = form_table(form)
    if not is_f_quasigroup(q):
        raise InternalAssertionFailed("linear quasigroup over an NK-loop is not F")
    loop = form.loop
    T = loop.table
    neg = loop.neg_array()
    f, g = form.f.as_array(), form.g.as_array()
    fi, gi = form.f.inverse().as_array(), form.g.inverse().as_array()
    # alpha(x) = -g^-1(e) + (-g^-1 f(x) + g^-1(x))
    alpha = T[neg[gi[form.e]], T[neg[gi[f]], gi]]
    # beta(x) = (f^-1(x) - f^-1 g(x)) - f^-1(e)
    beta = T[T[fi, neg[fi[g]]], neg[fi[form.e]]]
    if tuple(alpha.tolist()) != q.alpha_map or tuple(beta.tolist()) != q.beta_map:
        raise InternalAssertionFailed("local units disagree with their closed forms")
    return q, loop.zero


def _transport(loop: FiniteLoop, tau: np.ndarray) -> FiniteLoop:
    new = np.empty_like(loop.table)
    new[tau[:, None], tau[None, :]] = tau[loop.table]
    return FiniteLoop(CayleyTable(new), int(tau[loop.zero]))


def basepoint_shift(form: ArithmeticForm, a: int, b: int) -> ArithmeticForm:
    """Move the neutral element to a + b (a in K, b in N) by tau(x) = (x + b) + a."""
    loop = form.loop
    st = loop_structure(loop)
    if form.e not in st.center:
        raise NotStrongInput("basepoint_shift needs a strong form")
    if a not in st.moufang_center or b not in st.nucleus:
        raise BadShift(f"need a in K and b in N, got a={a}, b={b}")
    T = loop.table
    neg = loop.neg_array()
    n = loop.order
    x = np.arange(n)
    tau = T[T[:, b], a]
    new_loop = _transport(loop, tau)
    S = new_loop.table
    f, g = form.f.as_array(), form.g.as_array()
    tau_inv = np.empty_like(tau)
    tau_inv[tau] = x
    h = tau[f[tau_inv]]
    k = tau[g[tau_inv]]
    w = new_loop.zero
    e1 = form.product(w, w)
    new = ArithmeticForm(new_loop, _perm(h), _perm(k), int(e1))

    failed = []
    # x * y = ((x - b) + y) - a
    star = T[T[T[:, neg[b]][:, None], x[None, :]], neg[a]]
    if not (star == S).all():
        failed.append("operation formula")
    if w != loop.add(a, b) or w != loop.add(b, a):
        failed.append("neutral element a + b")
    # h(x) = (f(x) + (b - f(b))) + (a - f(a))
    closed_h = T[T[f, T[b, neg[f[b]]]], T[a, neg[f[a]]]]
    closed_k = T[T[g, T[b, neg[g[b]]]], T[a, neg[g[a]]]]
    if not ((closed_h == h).all() and (closed_k == k).all()):
        failed.append("closed form of the new automorphisms")
    if not (h[k] == k[h]).all():
        failed.append("hk = kh")
    new_st = loop_structure(new_loop)
    if new_st.nucleus != frozenset(int(v) for v in tau[list(st.nucleus)]):
        failed.append("N(*) = tau(N)")
    if new_st.moufang_center != frozenset(int(v) for v in tau[list(st.moufang_center)]):
        failed.append("K(*) = tau(K)")
    report = verify_form(new, quasigroup=form_table(form))
    failed += report.failures() if not report.ok else []
    if report.strong != (b in st.center):
        failed.append("strong iff b in Z")
    if failed:
        raise InternalAssertionFailed(f"basepoint_shift(a={a}, b={b}) broke: {', '.join(failed)}")
    return new


def shift_constant_closed_form(form: ArithmeticForm, a: int, b: int) -> int:
    """The constant 2b + a + s of a shifted form, evaluated in the old loop.

    Here s = -3a + (a + f(a)) + (a + g(a)) + r and
    r = (f(b) - b) + (g(b) - b) + e; every summand of s is central.
    """
    loop = form.loop
    add, neg = loop.add, loop.neg
    f, g, e = form.f, form.g, form.e
    r = add(add(add(f(b), neg(b)), add(g(b), neg(b))), e)
    minus_three_a = neg(add(add(a, a), a))
    s = add(add(add(minus_three_a, add(a, f(a))), add(a, g(a))), r)
    return add(add(add(b, b), a), s)


def phi(q, w: int, base: Optional[ArithmeticForm] = None, cross_check: bool = True) -> ArithmeticForm:
    """The unique arithmetic form of q whose loop has neutral element w."""
    q = as_table(q)
    if base is None:
        base, _ = form_at(q, 0)
    st = loop_structure(base.loop)
    n_el, k_el = nk_decompose(base.loop, w, st.nucleus, st.moufang_center)
    form = basepoint_shift(base, k_el, n_el)
    if cross_check:
        ld = base.loop.base.ldiv_rows
        others = [(m, ld[m][w]) for m in sorted(st.nucleus, reverse=True)
                  if ld[m][w] in st.moufang_center and m != n_el]
        if others:
            m, kk = others[0]
            if basepoint_shift(base, kk, m) != form:
                raise InternalAssertionFailed(f"two decompositions of {w} give different forms")
    return form


def companion_quasigroup(form: ArithmeticForm) -> CayleyTable:
    """The isotope x o y = f(x) + g(y), in which the loop zero is idempotent."""
    if not form.is_strong():
        raise InvalidForm("companion quasigroup needs a strong form")
    T = form.loop.table
    q = from_table(form.order, T[form.f.as_array()[:, None], form.g.as_array()[None, :]])
    if not is_f_quasigroup(q):
        raise InternalAssertionFailed("companion quasigroup is not F")
    z = form.zero
    if q.mul(z, z) != z:
        raise InternalAssertionFailed("zero is not idempotent in the companion quasigroup")
    return q
