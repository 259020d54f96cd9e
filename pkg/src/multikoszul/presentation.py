"""Presentations A = T(V)/(R): parsing, the truncated ideal, the minimal
space of relations, normal words and structure constants."""
from __future__ import annotations

import re
import warnings
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import DEFAULT_PRIME, Echelon, Field, LinAlgError, QQ, Subspace, Vector, axpy, complement_in
from .tensoralg import (CapExceeded, GeneratorSet, GradedSubspace, InputError, Word, format_poly,
                        parse_poly, reverse)


class Presentation:
    def __init__(self, field: Field, gens: GeneratorSet, relations: Sequence[Vector], name: str = ""):
        self.field = field
        self.gens = gens
        self.name = name
        self.relations: List[Vector] = []
        for r in relations:
            self._validate(r)
            if r:
                self.relations.append(dict(r))

    def _validate(self, r: Vector):
        degs = {}
        for w in r:
            degs.setdefault(self.gens.degree(w), w)
        if len(degs) > 1:
            d0 = min(degs)
            odd = [degs[d] for d in sorted(degs) if d != d0][0]
            raise InputError(f"inhomogeneous relation {format_poly(self.gens, r, self.field)}: "
                             f"term {self.gens.format_word(odd)} has degree {self.gens.degree(odd)}, "
                             f"expected {d0}")
        if degs and min(degs) < 2:
            raise InputError(f"relation {format_poly(self.gens, r, self.field)} has degree {min(degs)} < 2")

    def relation_degrees(self) -> List[int]:
        return sorted({self.gens.degree(next(iter(r))) for r in self.relations})

    def degree1_generated(self) -> bool:
        return all(d == 1 for d in self.gens.degrees)

    def to_text(self) -> str:
        lines = [f"field {self.field.name}",
                 "gens " + ", ".join(f"{n}:{d}" for n, d in zip(self.gens.names, self.gens.degrees))]
        lines += [f"rel {format_poly(self.gens, r, self.field)}" for r in self.relations]
        return "\n".join(lines) + "\n"

    def echo(self) -> dict:
        return {"field": self.field.name,
                "gens": [[n, d] for n, d in zip(self.gens.names, self.gens.degrees)],
                "rels": [format_poly(self.gens, r, self.field) for r in self.relations]}

    def with_field(self, field: Field) -> "Presentation":
        rels = []
        for r in self.relations:
            rels.append({w: field(c) for w, c in r.items() if field(c)})
        return Presentation(field, self.gens, rels, self.name)


_STMT = re.compile(r"^(field|gens|rels|rel)\b\s*:?\s*(.*)$", re.S)


def parse_field(spec: str) -> Field:
    parts = spec.split()
    if parts == ["Q"]:
        return QQ
    if len(parts) == 2 and parts[0] == "F" and parts[1].isdigit():
        try:
            return Field(int(parts[1]))
        except LinAlgError as e:
            raise InputError(str(e))
    if parts == ["F"]:
        return Field(DEFAULT_PRIME)
    raise InputError(f"unknown field {spec!r} (use 'Q' or 'F <p>')")


def parse_presentation(text: str, name: str = "", field: Optional[Field] = None) -> Presentation:
    """Parse the line format (``field``/``gens``/``rel`` lines) or the inline
    form ``gens: x:1; rels: x^3``.  ``field`` overrides the file's field."""
    stmts = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        for part in line.split(";"):
            if part.strip():
                stmts.append(part.strip())
    file_field, gen_spec, rel_texts = None, None, []
    for s in stmts:
        m = _STMT.match(s)
        if not m:
            raise InputError(f"parse error: unrecognized statement {s!r}")
        key, body = m.group(1), m.group(2).strip()
        if key == "field":
            file_field = parse_field(body)
        elif key == "gens":
            if gen_spec is not None:
                raise InputError("parse error: more than one gens statement")
            gen_spec = body
        elif key == "rel":
            rel_texts.append(body)
        else:
            rel_texts.extend(t.strip() for t in body.split(",") if t.strip())
    if gen_spec is None:
        raise InputError("parse error: missing gens statement")
    names, degs = [], []
    for item in gen_spec.split(","):
        item = item.strip()
        if not item:
            continue
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\s*:\s*(-?\d+)", item)
        if not m:
            raise InputError(f"parse error: bad generator declaration {item!r} (expected name:degree)")
        names.append(m.group(1))
        degs.append(int(m.group(2)))
    gens = GeneratorSet(names, degs)
    F = field or file_field or QQ
    rels = []
    for t in rel_texts:
        try:
            rels.append(parse_poly(t, gens, F))
        except LinAlgError as e:
            raise InputError(str(e))
    return Presentation(F, gens, rels, name)


def load_presentation(path: str, field: Optional[Field] = None) -> Presentation:
    import os
    with open(path) as fh:
        text = fh.read()
    return parse_presentation(text, os.path.splitext(os.path.basename(path))[0], field)


# -- ideal and relations -----------------------------------------------------

class IdealData:
    """Per degree: I_n, the decomposable part M_n = (V·I + I·V)_n, and R_n."""

    def __init__(self, p: Presentation, D: int):
        g, F = p.gens, p.field
        self.D = D
        by_deg: Dict[int, List[Vector]] = {}
        for r in p.relations:
            by_deg.setdefault(g.degree(next(iter(r))), []).append(r)
        ideal, decomp, rel, dropped = {}, {}, {}, []
        for n in range(D + 1):
            e = Echelon(F)
            for gi, d in enumerate(g.degrees):
                if n - d < 2:
                    continue
                for row in ideal[n - d].basis:
                    e.add({(gi,) + w: c for w, c in row.items()})
                    e.add({w + (gi,): c for w, c in row.items()})
            m = e.subspace(g.count(n), g.space(n))
            for r in by_deg.get(n, []):
                if e.add(r) is not None:
                    dropped.append(r)
            i_n = e.subspace(g.count(n), g.space(n))
            ideal[n], decomp[n] = i_n, m
            rel[n] = complement_in(m, i_n)
        self.ideal = GradedSubspace(g, D, ideal, F, "I")
        self.decomposable = GradedSubspace(g, D, decomp, F, "M")
        self.relations = GradedSubspace(g, D, rel, F, "R")
        self.dropped = dropped


_ideal_cache: Dict[tuple, IdealData] = {}


def _ideal_data(p: Presentation, D: int) -> IdealData:
    key = (id(p), D)
    hit = _ideal_cache.get(key)
    if hit is None or hit[0] is not p:
        hit = (p, IdealData(p, D))
        _ideal_cache[key] = hit
    return hit[1]


def ideal_truncated(p: Presentation, D: int) -> GradedSubspace:
    return _ideal_data(p, D).ideal


def space_of_relations(p: Presentation, D: int, warn: bool = True) -> GradedSubspace:
    data = _ideal_data(p, D)
    if warn and data.dropped:
        names = "; ".join(format_poly(p.gens, r, p.field) for r in data.dropped)
        warnings.warn(f"redundant relations dropped: {names}", stacklevel=2)
    return data.relations


class TruncatedAlgebra:
    """A = T(V)/I up to Adams degree D, with normal words as basis.

    Normal words of degree n are the non-pivot words of I_n, i.e. the
    complement of I_n in T(V)_n selected by ``complement_in``.
    """

    def __init__(self, p: Presentation, D: int):
        self.presentation = p
        self.gens = p.gens
        self.F = p.field
        self.D = D
        data = _ideal_data(p, D)
        self.ideal = data.ideal
        self.relations = data.relations
        self.dropped = data.dropped
        self.normal: Dict[int, List[Word]] = {}
        self.index: Dict[int, Dict[Word, int]] = {}
        self._rows: Dict[int, Dict[Word, Vector]] = {}
        for n in range(D + 1):
            piv = dict(self.ideal[n].rows)
            self._rows[n] = piv
            nw = [w for w in self.gens.words(n) if w not in piv]
            self.normal[n] = nw
            self.index[n] = {w: i for i, w in enumerate(nw)}
        self._proj: Dict[Word, Vector] = {}
        self._mul: Dict[Tuple[Word, Word], Vector] = {}

    def dim(self, n: int) -> int:
        return len(self.normal[n]) if 0 <= n <= self.D else 0

    def hilbert_series(self) -> List[int]:
        return [self.dim(n) for n in range(self.D + 1)]

    def is_normal(self, w: Word) -> bool:
        n = self.gens.degree(w)
        return w in self.index[n]

    def project_word(self, w: Word) -> Vector:
        """π(w) as a combination of normal words (empty beyond D)."""
        hit = self._proj.get(w)
        if hit is not None:
            return hit
        n = self.gens.degree(w)
        if n > self.D:
            raise LinAlgError(f"projection requested in degree {n} beyond truncation {self.D}")
        row = self._rows[n].get(w)
        if row is None:
            out = {w: 1}
        else:
            out = {k: self.F.neg(c) for k, c in row.items() if k != w}
        self._proj[w] = out
        return out

    def project(self, v: Vector) -> Vector:
        out: Vector = {}
        for w, c in v.items():
            axpy(out, c, self.project_word(w), self.F)
        return out

    def mul_words(self, a: Word, b: Word) -> Vector:
        key = (a, b)
        hit = self._mul.get(key)
        if hit is None:
            hit = self.project_word(a + b)
            self._mul[key] = hit
        return hit

    def mul(self, x: Vector, y: Vector) -> Vector:
        out: Vector = {}
        F = self.F
        for a, c in x.items():
            for b, d in y.items():
                axpy(out, c * d, self.mul_words(a, b), F)
        return out

    def structure_constants(self, a: int, b: int) -> List[List[List]]:
        """table[i][j] = coordinates of normal_a[i]·normal_b[j] in A_{a+b}."""
        n = a + b
        out = []
        for u in self.normal[a]:
            row = []
            for v in self.normal[b]:
                prod = self.mul_words(u, v)
                row.append([prod.get(w, 0) for w in self.normal[n]])
            out.append(row)
        return out


def truncated_algebra(p: Presentation, D: int) -> TruncatedAlgebra:
    return TruncatedAlgebra(p, D)


def hilbert_series(a: TruncatedAlgebra) -> List[int]:
    return a.hilbert_series()


# -- combinators -------------------------------------------------------------

def free_product(p1: Presentation, p2: Presentation) -> Presentation:
    if p1.field != p2.field:
        raise InputError("free_product: field mismatch")
    names1 = list(p1.gens.names)
    taken = set(names1)
    names2 = []
    for nm in p2.gens.names:
        new, k = nm, 2
        while new in taken:
            new = f"{nm}_{k}"
            k += 1
        taken.add(new)
        names2.append(new)
    gens = GeneratorSet(names1 + names2, list(p1.gens.degrees) + list(p2.gens.degrees))
    shift = len(names1)
    rels = [dict(r) for r in p1.relations]
    rels += [{tuple(g + shift for g in w): c for w, c in r.items()} for r in p2.relations]
    name = f"{p1.name}*{p2.name}" if p1.name or p2.name else ""
    return Presentation(p1.field, gens, rels, name)


def opposite(p: Presentation) -> Presentation:
    return Presentation(p.field, p.gens, [reverse(r) for r in p.relations],
                        (p.name + "_op") if p.name else "")


def shift_words(v: Vector, shift: int) -> Vector:
    return {tuple(g + shift for g in w): c for w, c in v.items()}


def super_yang_mills(n: int, s: int, gamma: Sequence[Sequence[Sequence[int]]], field: Field = QQ) -> Presentation:
    """Super Yang-Mills presentation: x_1..x_n in degree 2, z_1..z_s in degree 3,

        r0_i = Σ_j [x_j,[x_j,x_i]] − ½ Σ_{a,b} Γ^i_{ab} [z_a, z_b]
        r1_a = Σ_{i,b} Γ^i_{ab} [x_i, z_b]

    with the graded commutator [u,v] = uv − (−1)^{|u||v|} vu.  ``gamma[i][a][b]``
    must be symmetric in a, b.
    """
    from fractions import Fraction
    names = [f"x{i + 1}" for i in range(n)] + [f"z{a + 1}" for a in range(s)]
    gens = GeneratorSet(names, [2] * n + [3] * s)
    F = field

    def bracket(u: Vector, v: Vector, du: int, dv: int) -> Vector:
        out: Vector = {}
        sign = -1 if (du * dv) % 2 == 0 else 1
        for a, c in u.items():
            for b, d in v.items():
                axpy(out, F(c * d), {a + b: 1}, F)
                axpy(out, F(sign * c * d), {b + a: 1}, F)
        return out

    x = [{(i,): 1} for i in range(n)]
    z = [{(n + a,): 1} for a in range(s)]
    rels = []
    for i in range(n):
        r: Vector = {}
        for j in range(n):
            axpy(r, 1, bracket(x[j], bracket(x[j], x[i], 2, 2), 2, 4), F)
        for a in range(s):
            for b in range(s):
                if gamma[i][a][b]:
                    axpy(r, F(Fraction(-gamma[i][a][b], 2)), bracket(z[a], z[b], 3, 3), F)
        rels.append(r)
    for a in range(s):
        r = {}
        for i in range(n):
            for b in range(s):
                if gamma[i][a][b]:
                    axpy(r, F(gamma[i][a][b]), bracket(x[i], z[b], 2, 3), F)
        rels.append(r)
    return Presentation(F, gens, [r for r in rels if r], f"sym_{n}_{s}")
