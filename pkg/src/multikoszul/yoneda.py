"""Yoneda products and the A∞ structure on J and its graded dual.

Basis conventions: an element of J is addressed by ``(i, n, k)``: the k-th
basis vector of (J_i)_n.  The dual basis of J^# uses the same triples, so
every table below is a sparse matrix between these labels.  Cohomological
degree of a dual element (i, n, k) is i.

Signs come from the c-map (``c_sign``), the graded dual of a map and the
summation signs of the Stasheff identities, all following the Koszul rule on
the (co)homological degree.  Adams degrees never contribute to signs.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .jspaces import JFamily
from .linalg import Echelon, Vector, axpy
from .presentation import TruncatedAlgebra
from .tensoralg import InputError

Elem = Tuple[int, int, int]
Tensor = Dict[Tuple[Elem, ...], object]

FORMAL_NOTE = "formal tables, no theorem applies"


class HypothesisError(InputError):
    """Raised when product tables are requested for an algebra that is not
    known to be multi-Koszul and no override was given."""


def _check_hypothesis(koszul: Optional[bool], force: bool) -> List[str]:
    if koszul:
        return []
    if not force:
        raise HypothesisError("the algebra is not known to be multi-Koszul; "
                              "pass force=True to compute formal tables")
    warnings.warn(FORMAL_NOTE)
    return [FORMAL_NOTE]


def odd_tuples(total: int, parts: int) -> Iterable[Tuple[int, ...]]:
    """Ordered tuples of `parts` positive odd integers summing to `total`."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(1, total - (parts - 1) + 1, 2):
        for rest in odd_tuples(total - first, parts - 1):
            yield (first,) + rest


def c_sign(degrees: Tuple[int, ...]) -> int:
    """Sign of c(f_1⊗…⊗f_n)(w_1⊗…⊗w_n) when deg w_l = deg f_l = degrees[l]."""
    s, tail = 0, 0
    for d in reversed(degrees):
        s += d * tail
        tail += d
    return -1 if s % 2 else 1


# -- A∞ coalgebra on J ------------------------------------------------------

class AInfStructure:
    """Coproducts Δ_n on J (2 ≤ n ≤ n_max) and the dual products m_n on J^#.

    Δ_n is computed lazily per basis element and cached.  m_n = Δ_n^#∘c,
    where the graded dual of a map of degree d carries (−1)^{d·deg λ}; with
    ``dual_sign=False`` that factor (−1)^{(n−2)·Σ i_l} is dropped.  It only
    changes each Stasheff identity by a global sign.
    """

    def __init__(self, jf: JFamily, H: int, n_max: int = 4, D: Optional[int] = None,
                 dual_sign: bool = True, notes: Optional[List[str]] = None):
        self.jf = jf
        self.F = jf.F
        self.H = H
        self.n_max = n_max
        self.D = jf.D if D is None else min(D, jf.D)
        self.dual_sign = dual_sign
        self.notes = list(notes or [])
        self._delta: Dict[Tuple[int, Elem], Tensor] = {}
        self.fault: Optional[Tuple[int, Elem]] = None  # flip the sign of Δ_n at one element
        jf.upto(H)

    # basis -------------------------------------------------------------------
    def elements(self, i: int) -> List[Elem]:
        J = self.jf[i]
        return [(i, n, k) for n in J.support() if n <= self.D for k in range(J[n].dim)]

    # coproducts -------------------------------------------------------------
    def delta(self, n: int, x: Elem) -> Tensor:
        key = (n, x)
        hit = self._delta.get(key)
        if hit is None:
            hit = self._delta[key] = self._compute_delta(n, x)
        if self.fault == (n, x):
            return {t: -c for t, c in hit.items()}
        return hit

    def _compute_delta(self, n: int, x: Elem) -> Tensor:
        i, q, k = x
        out: Tensor = {}
        if n < 2:
            return out
        if n == 2:
            for l in range(i + 1):
                img = self.jf.iota2(l, i - l, q).get(k, {})
                for ((a, ka), (b, kb)), c in img.items():
                    out[((l, a, ka), (i - l, b, kb))] = c
            return out
        if i % 2:
            return out
        for tup in odd_tuples(i + n - 2, n):
            if any(self.jf[t].is_zero() for t in tup):
                continue
            img = self.jf.iota_multi(tup, q).get(k, {})
            for lab, c in img.items():
                out[tuple((t, a, ka) for t, (a, ka) in zip(tup, lab))] = c
        return out

    def delta_matrix(self, n: int, i: int) -> Dict[Elem, Tensor]:
        return {x: self.delta(n, x) for x in self.elements(i)}

    # dual products ------------------------------------------------------------
    def m_sign(self, tup: Tuple[Elem, ...]) -> int:
        degs = tuple(e[0] for e in tup)
        s = c_sign(degs)
        if self.dual_sign and ((len(tup) - 2) * sum(degs)) % 2:
            s = -s
        return s

    def m_table(self, n: int, i: int) -> Dict[Tuple[Elem, ...], Vector]:
        """m_n restricted to inputs whose product lands in Ext^i: input tuple -> {output: c}."""
        out: Dict[Tuple[Elem, ...], Vector] = {}
        for w in self.elements(i):
            for tup, c in self.delta(n, w).items():
                axpy(out.setdefault(tup, {}), self.m_sign(tup) * c, {w: 1}, self.F)
        return {t: v for t, v in out.items() if v}

    def m(self, inputs: Tuple[Elem, ...]) -> Vector:
        """m_n(f_1, …, f_n) on dual basis elements."""
        n = len(inputs)
        i = sum(e[0] for e in inputs) + 2 - n
        if i < 0 or i > self.H:
            return {}
        return dict(self.m_table(n, i).get(tuple(inputs), {}))


def ainf_coproducts(jf: JFamily, n_max: int = 4, D: Optional[int] = None, H: Optional[int] = None,
                    koszul: Optional[bool] = None, force: bool = False,
                    dual_sign: bool = True) -> AInfStructure:
    notes = _check_hypothesis(koszul, force)
    H = len(jf.J) - 1 if H is None else H
    return AInfStructure(jf, H, n_max, D, dual_sign, notes)


# -- Stasheff identities ------------------------------------------------------

@dataclass
class StasheffReport:
    ok: bool
    checked: Dict[int, int] = field(default_factory=dict)  # identity n -> number of evaluations
    violations: List[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": {str(k): v for k, v in sorted(self.checked.items())},
                "violations": self.violations[:20]}


def _koszul(s_deg: int, prefix: Iterable[Elem]) -> int:
    return -1 if (s_deg * sum(e[0] for e in prefix)) % 2 else 1


def stasheff_value(s: AInfStructure, n: int, w: Elem, dual: bool = False) -> Tensor:
    """Left-hand side of the n-th Stasheff identity evaluated on w ∈ J.

    Coalgebra form: Σ (−1)^{rs+t} (id^r⊗Δ_s⊗id^t)∘Δ_{r+1+t}(w).
    With ``dual`` the entries are the matrix of Σ (−1)^{r+st} m_{r+1+t}∘(id^r⊗m_s⊗id^t)
    paired against w, indexed by the input tuple.
    """
    F = s.F
    out: Tensor = {}
    for sd in range(2, n):
        outer = n - sd + 1
        for tup, c in s.delta(outer, w).items():
            for r in range(outer):
                t = outer - 1 - r
                for sub, d in s.delta(sd, tup[r]).items():
                    new = tup[:r] + sub + tup[r + 1:]
                    if dual:
                        sign = (-1) ** ((r + sd * t) % 2) * _koszul(sd - 2, tup[:r])
                        sign *= s.m_sign(tup) * s.m_sign(sub)
                    else:
                        sign = (-1) ** ((r * sd + t) % 2) * _koszul(sd - 2, tup[:r])
                    out[new] = F.norm(out.get(new, 0) + sign * c * d)
    return {k: v for k, v in out.items() if v}


def _reduced_delta2(s: AInfStructure, x: Elem) -> Tensor:
    return {t: c for t, c in s.delta(2, x).items() if t[0][0] and t[1][0]}


def reduced_value(s: AInfStructure, n: int, w: Elem) -> Tensor:
    """Σ_r (−1)^r (id^r⊗Δ̄_2⊗id)Δ_n − (id⊗Δ_n)Δ̄_2 + (−1)^n (Δ_n⊗id)Δ̄_2 on w.

    Δ̄_2 drops the counit legs; this is the n+1 identity after removing the
    terms that vanish for parity reasons.
    """
    F = s.F
    out: Tensor = {}

    def add(key, v):
        out[key] = F.norm(out.get(key, 0) + v)

    for tup, c in s.delta(n, w).items():
        for r in range(n):
            for sub, d in _reduced_delta2(s, tup[r]).items():
                add(tup[:r] + sub + tup[r + 1:], (-1) ** r * c * d)
    for (x1, x2), c in _reduced_delta2(s, w).items():
        for sub, d in s.delta(n, x2).items():
            add((x1,) + sub, -_koszul(n - 2, (x1,)) * c * d)
        for sub, d in s.delta(n, x1).items():
            add(sub + (x2,), (-1) ** n * c * d)
    return {k: v for k, v in out.items() if v}


def check_stasheff(s: AInfStructure, n_max: Optional[int] = None, dual: bool = False,
                   reduced: bool = False) -> StasheffReport:
    """Check identities 1..n_max+1 (the last one still only involves Δ_{≤ n_max})."""
    n_max = s.n_max if n_max is None else n_max
    rep = StasheffReport(True)
    for n in range(3, n_max + 2):
        if reduced and n - 1 < 3:
            continue
        count = 0
        for i in range(s.H + 1):
            for w in s.elements(i):
                val = reduced_value(s, n - 1, w) if reduced else stasheff_value(s, n, w, dual)
                count += 1
                if val:
                    rep.ok = False
                    key, c = min(val.items())
                    rep.violations.append({"n": n, "i": i, "adams": w[1], "element": list(w),
                                           "entry": [list(e) for e in key], "value": str(c)})
        rep.checked[n] = count
    return rep


def check_counit(s: AInfStructure) -> bool:
    """(id⊗ε)Δ_2 = id = (ε⊗id)Δ_2, ε kills higher Δ_n legs, Δ_n(1) = 0 for n ≠ 2."""
    unit = (0, 0, 0)
    if s.delta(2, unit) != {(unit, unit): 1}:
        return False
    for n in range(3, s.n_max + 1):
        if s.delta(n, unit):
            return False
    for i in range(1, s.H + 1):
        for w in s.elements(i):
            d2 = s.delta(2, w)
            if d2.get((unit, w)) != 1 or d2.get((w, unit)) != 1:
                return False
            others = [t for t in d2 if unit in t and t not in ((unit, w), (w, unit))]
            if others:
                return False
            for n in range(3, s.n_max + 1):
                if any(unit in t for t in s.delta(n, w)):
                    return False
    return True


# -- product tables -------------------------------------------------------------

@dataclass
class ProductTable:
    """m_2 : Ext^i ⊗ Ext^{i'} → Ext^{i+i'} in the dual bases, for i + i' ≤ i_max."""
    i_max: int
    entries: Dict[Tuple[int, int], Dict[Tuple[Elem, Elem], Vector]]
    F: object
    notes: List[str] = field(default_factory=list)
    dims: Dict[int, Dict[int, int]] = field(default_factory=dict)

    def product(self, f: Elem, g: Elem) -> Vector:
        return dict(self.entries.get((f[0], g[0]), {}).get((f, g), {}))

    def product_vec(self, u: Vector, v: Vector) -> Vector:
        out: Vector = {}
        for f, a in u.items():
            for g, b in v.items():
                axpy(out, a * b, self.product(f, g), self.F)
        return out

    def to_json(self) -> dict:
        blocks = {}
        for (i, j), tab in sorted(self.entries.items()):
            blocks[f"{i},{j}"] = [
                {"left": list(f), "right": list(g),
                 "value": [[list(w), str(c)] for w, c in sorted(v.items())]}
                for (f, g), v in sorted(tab.items())]
        return {"i_max": self.i_max, "products": blocks, "notes": self.notes}


def yoneda_products(jf: JFamily, i_max: int, D: Optional[int] = None, koszul: Optional[bool] = None,
                    force: bool = False, structure: Optional[AInfStructure] = None) -> ProductTable:
    """Products of the dual basis: m_2(f⊗g) = (−1)^{i·i'} ι_{i,i'}^#-coefficient."""
    s = structure or ainf_coproducts(jf, 2, D, i_max, koszul, force)
    entries: Dict[Tuple[int, int], Dict[Tuple[Elem, Elem], Vector]] = {}
    for tot in range(i_max + 1):
        for (f, g), v in s.m_table(2, tot).items():
            entries.setdefault((f[0], g[0]), {})[(f, g)] = v
    dims = {i: {n: jf[i][n].dim for n in jf[i].support() if n <= s.D} for i in range(i_max + 1)}
    return ProductTable(i_max, entries, jf.F, list(s.notes), dims)


def check_associativity(t: ProductTable) -> bool:
    """(fg)h = f(gh) on all basis triples with total degree ≤ i_max."""
    basis = {i: [(i, n, k) for n, d in row.items() for k in range(d)] for i, row in t.dims.items()}
    for a in range(1, t.i_max + 1):
        for b in range(1, t.i_max + 1 - a):
            for c in range(1, t.i_max + 1 - a - b):
                for f in basis[a]:
                    for g in basis[b]:
                        fg = t.product(f, g)
                        for h in basis[c]:
                            if t.product_vec(fg, {h: 1}) != t.product_vec({f: 1}, t.product(g, h)):
                                return False
    return True


def check_unit(t: ProductTable) -> bool:
    unit = (0, 0, 0)
    for i, row in t.dims.items():
        for n, d in row.items():
            for k in range(d):
                f = (i, n, k)
                if t.product(unit, f) != {f: 1} or t.product(f, unit) != {f: 1}:
                    return False
    return True


@dataclass
class K2Report:
    ok: bool
    per_degree: Dict[Tuple[int, int], Tuple[int, int]] = field(default_factory=dict)  # (i, n) -> (span, dim)
    first_failure: Optional[Tuple[int, int]] = None

    def to_json(self) -> dict:
        return {"ok": self.ok,
                "first_failure": list(self.first_failure) if self.first_failure else None,
                "cells": [[i, n, s, d] for (i, n), (s, d) in sorted(self.per_degree.items())]}


def k2_check(t: ProductTable, i_max: Optional[int] = None) -> K2Report:
    """Ext^i = Ext^1·Ext^{i−1} + Ext^2·Ext^{i−2} for 3 ≤ i ≤ i_max, degree by degree.

    Given the lower degrees are generated, this is exactly generation of
    Ext^i by Ext^1 and Ext^2.
    """
    i_max = t.i_max if i_max is None else i_max
    rep = K2Report(True)
    for i in range(3, i_max + 1):
        spans: Dict[int, Echelon] = {}
        for a in (1, 2):
            for (f, g), v in t.entries.get((a, i - a), {}).items():
                spans.setdefault(f[1] + g[1], Echelon(t.F)).add(dict(v))
        for n, d in sorted(t.dims.get(i, {}).items()):
            got = len(spans[n]) if n in spans else 0
            rep.per_degree[(i, n)] = (got, d)
            if got != d and rep.ok:
                rep.ok = False
                rep.first_failure = (i, n)
    return rep


# -- twisted tensor product ------------------------------------------------------

@dataclass
class TwistedReport:
    equal: bool
    plain_sign_pattern: bool
    mismatches: List[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"equal": self.equal, "plain_equals_signed_right_differential": self.plain_sign_pattern,
                "mismatches": self.mismatches[:20]}


def twisted_differential(s: AInfStructure, A: TruncatedAlgebra, x: Elem, signed: bool = True) -> Vector:
    """d_τ on the generator x⊗1 of J_i⊗A, with τ = π on J_1 and zero elsewhere.

    Keys follow the right complex: (n, k, normal word).  With ``signed`` the
    sum carries the factor (−1)^{|c_(0)|+1} = (−1)^i.
    """
    F = A.F
    i = x[0]
    out: Vector = {}
    for n in range(2, s.n_max + 1):
        for tup, c in s.delta(n, x).items():
            head, legs = tup[0], tup[1:]
            if head[0] != i - 1 or any(e[0] != 1 for e in legs):
                continue
            prod: Vector = {(): 1}
            for e in legs:
                prod = A.mul(prod, A.project(s.jf.basis(1, e[1])[e[2]]))
            for word, a in prod.items():
                axpy(out, c * a, {(head[1], head[2], word): 1}, F)
    if signed and i % 2:
        out = {k: F.neg(v) for k, v in out.items()}
    return out


def twisted_complex_check(s: AInfStructure, A: TruncatedAlgebra, H: Optional[int] = None) -> TwistedReport:
    """Compare d_τ on every generator of J_i⊗A (1 ≤ i ≤ H) with the right complex."""
    from .komplex import build_bimodule_complex, left_right_complexes
    H = s.H if H is None else H
    bi = build_bimodule_complex(A, s.jf, H)
    _, right = left_right_complexes(bi)
    rep = TwistedReport(True, True)
    F = A.F
    for i in range(1, H + 1):
        sgn = -1 if i % 2 else 1
        for x in s.elements(i):
            ref = {k: v for k, v in right.images[i].get((x[1], x[2]), {}).items() if v}
            got = twisted_differential(s, A, x, signed=True)
            plain = twisted_differential(s, A, x, signed=False)
            if got != ref:
                rep.equal = False
                rep.mismatches.append({"i": i, "adams": x[1], "index": x[2]})
            if {k: F.norm(sgn * v) for k, v in plain.items()} != ref:
                rep.plain_sign_pattern = False
    return rep


# -- graded duals of maps (sign law) -----------------------------------------------

def graded_dual(matrix: Dict[Elem, Vector], degree: int, F) -> Dict[Elem, Vector]:
    """Graded dual f^# of a homogeneous map f given as {source basis: image}.

    f^#(φ) = (−1)^{deg f · deg φ} φ∘f; basis elements are (degree, …) tuples
    and the dual basis reuses them, so φ has the degree of its target label.
    """
    out: Dict[Elem, Vector] = {}
    for src, img in matrix.items():
        for tgt, c in img.items():
            sign = -1 if (degree * tgt[0]) % 2 else 1
            axpy(out.setdefault(tgt, {}), sign * c, {src: 1}, F)
    return {k: v for k, v in out.items() if v}


def compose(g: Dict[Elem, Vector], f: Dict[Elem, Vector], F) -> Dict[Elem, Vector]:
    out: Dict[Elem, Vector] = {}
    for src, img in f.items():
        acc: Vector = {}
        for mid, c in img.items():
            axpy(acc, c, g.get(mid, {}), F)
        if acc:
            out[src] = acc
    return out
