"""Words, graded pieces of the tensor algebra T(V) and subspaces of it.

A word is a tuple of generator indices.  Within one Adams degree, Python's
tuple order is exactly the deg-lex order induced by the declaration order of
the generators (no word of a given degree is a proper prefix of another), so
words are used directly as coordinate keys.
"""
from __future__ import annotations

import os
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .linalg import Echelon, Field, LinAlgError, QQ, Subspace, Vector, axpy, intersect, sum_spaces

Word = Tuple[int, ...]

DEFAULT_MAX_WORDS = 200_000


class CapExceeded(RuntimeError):
    """Raised when a degree has more words than the configured cap."""


class InputError(ValueError):
    """Malformed or invalid user input."""


def max_words() -> int:
    env = os.environ.get("MK_MAX_WORDS")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"MK_MAX_WORDS must be an integer, got {env!r}")
    return DEFAULT_MAX_WORDS


class GeneratorSet:
    def __init__(self, names: Sequence[str], degrees: Sequence[int]):
        names, degrees = tuple(names), tuple(int(d) for d in degrees)
        if len(names) != len(degrees):
            raise InputError("names and degrees differ in length")
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise InputError(f"duplicate generator name(s): {', '.join(dup)}")
        for n, d in zip(names, degrees):
            if d < 1:
                raise InputError(f"generator {n} has nonpositive degree {d}")
        self.names = names
        self.degrees = degrees
        self._words: Dict[int, List[Word]] = {0: [()]}
        self._count: Dict[int, int] = {0: 1}

    def __eq__(self, other):
        return isinstance(other, GeneratorSet) and (self.names, self.degrees) == (other.names, other.degrees)

    def __hash__(self):
        return hash((self.names, self.degrees))

    def __repr__(self):
        return "GeneratorSet(" + ", ".join(f"{n}:{d}" for n, d in zip(self.names, self.degrees)) + ")"

    def __len__(self):
        return len(self.names)

    @property
    def min_degree(self) -> int:
        return min(self.degrees) if self.degrees else 1

    def count(self, n: int) -> int:
        """Number of words of Adams degree n."""
        if n < 0:
            return 0
        if n not in self._count:
            self._count[n] = sum(self.count(n - d) for d in self.degrees)
        return self._count[n]

    def words(self, n: int) -> List[Word]:
        """All words of Adams degree n in deg-lex order."""
        if n < 0:
            return []
        if n in self._words:
            return self._words[n]
        cap = max_words()
        if self.count(n) > cap:
            raise CapExceeded(f"T(V) in degree {n} has {self.count(n)} words (cap {cap}, set MK_MAX_WORDS)")
        out = []
        for g, d in enumerate(self.degrees):
            out.extend((g,) + w for w in self.words(n - d))
        self._words[n] = out
        return out

    def words_of_length(self, n: int, length: int) -> List[Word]:
        return [w for w in self.words(n) if len(w) == length]

    def degree(self, w: Word) -> int:
        return sum(self.degrees[g] for g in w)

    def space(self, n: int):
        """Tag for the coordinate space T(V)_n."""
        return ("T", self.names, self.degrees, n)

    def format_word(self, w: Word) -> str:
        if not w:
            return "1"
        out, i = [], 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            name = self.names[w[i]]
            out.append(name if j - i == 1 else f"{name}^{j - i}")
            i = j
        return "*".join(out)


def words_of_degree(g: GeneratorSet, n: int) -> List[Word]:
    return list(g.words(n))


# -- tensor polynomials ----------------------------------------------------------

def reverse(poly: Vector) -> Vector:
    return {w[::-1]: c for w, c in poly.items()}


def concat(u: Vector, v: Vector, F: Field) -> Vector:
    out: Vector = {}
    p = F.p
    for a, x in u.items():
        for b, y in v.items():
            w = a + b
            t = out.get(w, 0) + x * y
            if p:
                t %= p
            if t:
                out[w] = t
            else:
                out.pop(w, None)
    return out


def poly_degree(g: GeneratorSet, poly: Vector) -> Optional[int]:
    degs = {g.degree(w) for w in poly}
    if len(degs) > 1:
        raise InputError("inhomogeneous tensor polynomial")
    return degs.pop() if degs else None


def format_poly(g: GeneratorSet, poly: Vector, F: Field = QQ) -> str:
    if not poly:
        return "0"
    parts = []
    for w in sorted(poly):
        c = poly[w]
        if F.p and c > F.p // 2:
            c = c - F.p
        neg = c < 0
        a = -c if neg else c
        body = g.format_word(w)
        if a == 1:
            term = body
        elif not w:
            term = str(a)
        else:
            term = f"{a}*{body}"
        parts.append(("- " if neg else "+ ") + term)
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(\^)|(\*)|([+-]))")


def parse_poly(text: str, g: GeneratorSet, F: Field = QQ) -> Vector:
    """Parse ``2*x*z - 3*z*x``, ``x^3`` etc. into a word -> scalar dict."""
    index = {n: i for i, n in enumerate(g.names)}
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"cannot parse {text!r} at position {pos}: {text[pos:pos + 10]!r}")
        pos = m.end()
        if m.group(1):
            toks.append(("num", m.group(1)))
        elif m.group(2):
            toks.append(("gen", m.group(2)))
        elif m.group(3):
            toks.append(("pow", None))
        elif m.group(4):
            toks.append(("mul", None))
        else:
            toks.append(("sign", m.group(5)))
    if not toks:
        raise InputError("empty polynomial")
    # split into signed terms
    terms: List[Tuple[int, list]] = []
    sign, cur = 1, []
    for kind, val in toks:
        if kind == "sign":
            if cur:
                terms.append((sign, cur))
                cur = []
                sign = 1
            sign = sign * (-1 if val == "-" else 1)
        else:
            cur.append((kind, val))
    if not cur:
        raise InputError(f"dangling sign in {text!r}")
    terms.append((sign, cur))
    out: Vector = {}
    for sign, factors in terms:
        coeff = Fraction(sign)
        word: List[int] = []
        i = 0
        expect_factor = True
        while i < len(factors):
            kind, val = factors[i]
            if kind == "mul":
                if expect_factor:
                    raise InputError(f"misplaced '*' in {text!r}")
                expect_factor = True
                i += 1
                continue
            if not expect_factor:
                raise InputError(f"missing '*' between factors in {text!r}")
            expect_factor = False
            if kind == "num":
                coeff *= Fraction(val)
                i += 1
            elif kind == "gen":
                if val not in index:
                    raise InputError(f"unknown generator {val!r} in {text!r}")
                reps = 1
                if i + 1 < len(factors) and factors[i + 1][0] == "pow":
                    if i + 2 >= len(factors) or factors[i + 2][0] != "num" or "/" in factors[i + 2][1]:
                        raise InputError(f"exponent must be a nonnegative integer in {text!r}")
                    reps = int(factors[i + 2][1])
                    i += 3
                else:
                    i += 1
                word.extend([index[val]] * reps)
            else:
                raise InputError(f"misplaced '^' in {text!r}")
        if expect_factor:
            raise InputError(f"dangling '*' in {text!r}")
        axpy(out, F(coeff), {tuple(word): 1}, F)
    return out


# -- graded subspaces --------------------------------------------------------

class GradedSubspace:
    """Per Adams degree n <= D, a canonical subspace of T(V)_n."""

    def __init__(self, gens: GeneratorSet, D: int, parts: Dict[int, Subspace], F: Field = QQ, name: str = ""):
        self.gens = gens
        self.D = D
        self.F = F
        self.name = name
        self.parts = {}
        for n in range(D + 1):
            s = parts.get(n)
            if s is None:
                s = Subspace.zero(gens.count(n), gens.space(n), F)
            self.parts[n] = s

    def __getitem__(self, n: int) -> Subspace:
        if n < 0:
            return Subspace.zero(0, self.gens.space(n), self.F)
        if n > self.D:
            raise LinAlgError(f"degree {n} is beyond the truncation {self.D} of {self.name or 'subspace'}")
        return self.parts[n]

    def __eq__(self, other):
        return (isinstance(other, GradedSubspace) and self.gens == other.gens
                and self.D == other.D and self.parts == other.parts)

    def __hash__(self):
        return hash((self.gens, self.D, tuple(self.parts[n] for n in range(self.D + 1))))

    def __repr__(self):
        return f"GradedSubspace({self.name or '?'}, dims={self.dims()})"

    def dims(self) -> List[int]:
        return [self.parts[n].dim for n in range(self.D + 1)]

    def support(self) -> List[int]:
        return [n for n in range(self.D + 1) if self.parts[n].dim]

    def min_degree(self) -> Optional[int]:
        s = self.support()
        return s[0] if s else None

    def is_zero(self) -> bool:
        return not self.support()

    def basis(self, n: int) -> List[Vector]:
        return self[n].basis

    def truncate(self, D: int) -> "GradedSubspace":
        return GradedSubspace(self.gens, min(D, self.D), self.parts, self.F, self.name)

    @classmethod
    def from_vectors(cls, gens: GeneratorSet, D: int, vectors: Iterable[Vector], F: Field = QQ, name: str = ""):
        by_deg: Dict[int, List[Vector]] = {}
        for v in vectors:
            if not v:
                continue
            d = poly_degree(gens, v)
            if d <= D:
                by_deg.setdefault(d, []).append(v)
        parts = {n: Subspace.span(vs, gens.count(n), gens.space(n), F) for n, vs in by_deg.items()}
        return cls(gens, D, parts, F, name)

    @classmethod
    def zero(cls, gens, D, F=QQ, name=""):
        return cls(gens, D, {}, F, name)

    @classmethod
    def unit(cls, gens, D, F=QQ):
        """T(V)_0 = span{1}, i.e. J_0."""
        return cls.from_vectors(gens, D, [{(): 1}], F, "k")

    @classmethod
    def generators(cls, gens, D, F=QQ):
        """V, spanned by the single-letter words."""
        return cls.from_vectors(gens, D, [{(g,): 1} for g in range(len(gens))], F, "V")

    @classmethod
    def length(cls, gens, m, D, F=QQ):
        """V^(m): span of all words of tensor length m."""
        parts = {}
        for n in range(D + 1):
            ws = [w for w in gens.words(n) if len(w) == m] if n >= m * gens.min_degree else []
            if ws:
                parts[n] = Subspace(tuple((w, {w: 1}) for w in ws), gens.count(n), gens.space(n), F)
        return cls(gens, D, parts, F, f"V^({m})")

    @classmethod
    def full(cls, gens, D, F=QQ, positive=False):
        parts = {}
        for n in range(1 if positive else 0, D + 1):
            parts[n] = Subspace(tuple((w, {w: 1}) for w in gens.words(n)), gens.count(n), gens.space(n), F)
        return cls(gens, D, parts, F, "T>0" if positive else "T")

    def reversed(self) -> "GradedSubspace":
        parts = {n: Subspace.span((reverse(v) for v in self.basis(n)), s.ambient_dim, s.space, self.F)
                 for n, s in self.parts.items()}
        return GradedSubspace(self.gens, self.D, parts, self.F, self.name)


def _check_pair(u: GradedSubspace, w: GradedSubspace):
    if u.gens != w.gens:
        raise LinAlgError("generator-set mismatch")
    if u.F != w.F:
        raise LinAlgError("field mismatch")


def graded_intersect(u: GradedSubspace, w: GradedSubspace) -> GradedSubspace:
    _check_pair(u, w)
    D = min(u.D, w.D)
    return GradedSubspace(u.gens, D, {n: intersect(u[n], w[n]) for n in range(D + 1)}, u.F)


def graded_sum(u: GradedSubspace, w: GradedSubspace) -> GradedSubspace:
    _check_pair(u, w)
    D = min(u.D, w.D)
    return GradedSubspace(u.gens, D, {n: sum_spaces(u[n], w[n]) for n in range(D + 1)}, u.F)


def product_vectors(factors: Sequence[GradedSubspace], n: int) -> List[Vector]:
    """All concatenations b1·…·bm of factor-basis elements of total degree n."""
    F = factors[0].F
    partial: List[Tuple[int, Vector]] = [(0, {(): 1})]
    for i, f in enumerate(factors):
        rest_min = sum((g.min_degree() or 0) for g in factors[i + 1:])
        supp = f.support()
        nxt = []
        for d, v in partial:
            for a in supp:
                if d + a + rest_min > n:
                    break
                if i == len(factors) - 1 and d + a != n:
                    continue
                for b in f.basis(a):
                    nxt.append((d + a, concat(v, b, F)))
        partial = nxt
        if not partial:
            return []
    return [v for d, v in partial if d == n]


def subspace_product(*factors: GradedSubspace) -> GradedSubspace:
    """Internal product U·W·… inside T(V), degreewise."""
    for f in factors[1:]:
        _check_pair(factors[0], f)
    if any(f.is_zero() for f in factors):
        return GradedSubspace.zero(factors[0].gens, min(f.D for f in factors), factors[0].F)
    D = min(f.D for f in factors)
    g = factors[0].gens
    parts = {}
    lo = sum(f.min_degree() for f in factors)
    for n in range(lo, D + 1):
        vs = product_vectors(factors, n)
        if vs:
            parts[n] = Subspace.span(vs, g.count(n), g.space(n), factors[0].F)
    return GradedSubspace(g, D, parts, factors[0].F)


def is_tif(u: GradedSubspace, side: str = "left", D: Optional[int] = None) -> bool:
    """U ∩ (U·T_{>0}) = 0 (left) or U ∩ (T_{>0}·U) = 0 (right), up to D."""
    D = u.D if D is None else min(D, u.D)
    u = u.truncate(D)
    tpos = GradedSubspace.full(u.gens, D, u.F, positive=True)
    prod = subspace_product(u, tpos) if side == "left" else subspace_product(tpos, u)
    return all(intersect(u[n], prod[n]).is_zero() for n in range(D + 1))


# -- factorization -----------------------------------------------------------

class Factorizer:
    """Solve ω = Σ coeff · b1·…·bm over bases of the given factors at degree n.

    Labels are tuples ((deg1, idx1), …, (degm, idxm)).  With t.i.f. leading
    factors the concatenations are independent and the expansion is unique;
    a dependency among them is reported as a faithfulness failure.
    """

    def __init__(self, factors: Sequence[GradedSubspace], n: int, strict: bool = True):
        self.factors = factors
        self.n = n
        F = factors[0].F
        self.F = F
        self.echelon = Echelon(F, track=True)
        self.dependent = False
        for label, vec in _labelled_products(factors, n):
            dep = self.echelon.add(vec, label)
            if dep is not None:
                self.dependent = True
                if strict:
                    raise LinAlgError("factorize: concatenated bases are dependent (faithfulness precondition violated)")

    def __call__(self, omega: Vector) -> Dict[tuple, object]:
        sol = self.echelon.solve(omega)
        if sol is None:
            raise LinAlgError("factorize: element is not in the product of the factors")
        return sol


def _labelled_products(factors, n):
    F = factors[0].F
    partial = [(0, (), {(): 1})]
    for i, f in enumerate(factors):
        rest_min = sum((g.min_degree() or 0) for g in factors[i + 1:])
        nxt = []
        for d, lab, v in partial:
            for a in f.support():
                if d + a + rest_min > n:
                    break
                if i == len(factors) - 1 and d + a != n:
                    continue
                for k, b in enumerate(f.basis(a)):
                    nxt.append((d + a, lab + ((a, k),), concat(v, b, F)))
        partial = nxt
    return [(lab, v) for d, lab, v in partial if d == n]


_factorizer_cache: Dict[tuple, Factorizer] = {}


def factorize(omega: Vector, factors: Sequence[GradedSubspace]) -> Dict[tuple, object]:
    """Unique coefficients of ω over concatenations of factor basis elements."""
    if not omega:
        return {}
    n = poly_degree(factors[0].gens, omega)
    key = (tuple(id(f) for f in factors), n)
    fz = _factorizer_cache.get(key)
    if fz is None:
        # the cached Factorizer keeps the factors alive, so their ids stay unique
        fz = Factorizer(list(factors), n)
        _factorizer_cache[key] = fz
    return fz(omega)


# -- sandwich intersections ---------------------------------------------------

def sandwich_chain(x: GradedSubspace, N: int) -> List[GradedSubspace]:
    """[Y_0, …, Y_N] with Y_k = ∩_{l=0}^{k} V^(l)·X·V^(k−l).

    Uses Y_k = (V·Y_{k−1}) ∩ (Y_{k−1}·V), valid because V is t.i.f.
    """
    V = GradedSubspace.generators(x.gens, x.D, x.F)
    out = [x]
    for _ in range(N):
        prev = out[-1]
        if prev.is_zero():
            out.append(prev)
            continue
        out.append(graded_intersect(subspace_product(V, prev), subspace_product(prev, V)))
    return out
