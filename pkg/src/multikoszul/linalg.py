"""Exact linear algebra over Q or a prime field.

Vectors are sparse dicts ``{key: scalar}`` with no zero entries.  Keys can be
any totally ordered hashable values (ints, or tuples such as words); the pivot
of a vector is its smallest key.  All echelon forms are fully reduced, which
makes the stored basis of a subspace canonical.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

Vector = Dict[Any, Any]

DEFAULT_PRIME = 32003


class LinAlgError(ValueError):
    pass


class Field:
    """Ground field: the rationals (``p == 0``) or F_p."""

    def __init__(self, p: int = 0):
        if p < 0 or p == 1:
            raise LinAlgError(f"invalid characteristic {p}")
        if p and any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise LinAlgError(f"{p} is not prime")
        self.p = p

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Field(Q)" if self.p == 0 else f"Field(F_{self.p})"

    @property
    def name(self) -> str:
        return "Q" if self.p == 0 else f"F {self.p}"

    def __call__(self, x) -> Any:
        """Coerce an int or Fraction into the field."""
        if self.p == 0:
            if isinstance(x, Fraction):
                return int(x) if x.denominator == 1 else x
            return int(x)
        if isinstance(x, Fraction):
            den = x.denominator % self.p
            if den == 0:
                raise LinAlgError(f"denominator of {x} vanishes mod {self.p}")
            return x.numerator * pow(den, self.p - 2, self.p) % self.p
        return int(x) % self.p

    def norm(self, x):
        if self.p:
            return x % self.p
        if type(x) is Fraction and x.denominator == 1:
            return x.numerator
        return x

    def inv(self, x):
        if self.p:
            return pow(x, self.p - 2, self.p)
        return Fraction(1) / x if type(x) is int else 1 / x

    def neg(self, x):
        return (-x) % self.p if self.p else -x

    def to_json(self, x):
        """Serializable form of a scalar: int, or "a/b" for a proper fraction."""
        if type(x) is Fraction:
            if x.denominator == 1:
                return x.numerator
            return f"{x.numerator}/{x.denominator}"
        return int(x)


QQ = Field(0)


# -- sparse vector helpers ---------------------------------------------------

def axpy(dst: Vector, c, src: Vector, F: Field) -> None:
    """dst += c * src, in place, dropping zeros."""
    if not c:
        return
    p = F.p
    for k, v in src.items():
        t = dst.get(k, 0) + c * v
        if p:
            t %= p
        if t:
            dst[k] = t
        else:
            dst.pop(k, None)


def scale(v: Vector, c, F: Field) -> Vector:
    if not c:
        return {}
    if F.p:
        return {k: x * c % F.p for k, x in v.items()}
    return {k: F.norm(x * c) for k, x in v.items()}


def combine(terms: Iterable[Tuple[Any, Vector]], F: Field) -> Vector:
    out: Vector = {}
    for c, v in terms:
        axpy(out, c, v, F)
    return out


def clean(v: Vector, F: Field) -> Vector:
    out = {}
    for k, x in v.items():
        x = F.norm(x % F.p) if F.p else F.norm(x)
        if x:
            out[k] = x
    return out


# -- incremental echelon form ------------------------------------------------

class Echelon:
    """Mutable fully reduced row echelon form built one vector at a time.

    With ``track=True`` every row also records which combination of the
    inserted vectors (by insertion label) produced it, which turns the
    builder into a linear solver and a kernel finder.
    """

    def __init__(self, F: Field, track: bool = False):
        self.F = F
        self.rows: Dict[Any, Vector] = {}
        self.combos: Dict[Any, Vector] = {}
        self.track = track
        # column -> pivots of rows having a nonzero entry in that column
        self._cols: Dict[Any, set] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, v: Vector, combo: Optional[Vector] = None) -> Vector:
        """Residual of v modulo the current rows (v is not modified)."""
        r = dict(v)
        rows = self.rows
        hits = [k for k in r if k in rows]
        for k in hits:
            c = r.get(k)
            if c:
                axpy(r, self.F.neg(c), rows[k], self.F)
                if combo is not None:
                    axpy(combo, self.F.neg(c), self.combos[k], self.F)
        return r

    def add(self, v: Vector, label: Hashable = None) -> Optional[Vector]:
        """Insert v.  Returns None if v was independent, otherwise the
        dependency (a combination of labels summing to zero) when tracking,
        or an empty dict when not tracking."""
        F = self.F
        combo = {label: 1} if self.track else None
        r = self.reduce(v, combo)
        if not r:
            return combo if self.track else {}
        piv = min(r)
        c = F.inv(r[piv])
        if c != 1:
            r = scale(r, c, F)
            if combo is not None:
                combo = scale(combo, c, F)
        # clear the new pivot column from existing rows
        for q in list(self._cols.get(piv, ())):
            row = self.rows[q]
            a = row.get(piv)
            if not a:
                continue
            old = set(row)
            axpy(row, F.neg(a), r, F)
            if combo is not None:
                axpy(self.combos[q], F.neg(a), combo, F)
            for k in old - set(row):
                self._cols[k].discard(q)
            for k in set(row) - old:
                self._cols.setdefault(k, set()).add(q)
        for k in r:
            if k != piv:
                self._cols.setdefault(k, set()).add(piv)
        self._cols.pop(piv, None)
        self.rows[piv] = r
        if combo is not None:
            self.combos[piv] = combo
        return None

    def solve(self, v: Vector) -> Optional[Vector]:
        """Combination of inserted labels equal to v, or None.  Needs track."""
        combo: Vector = {}
        r = dict(v)
        for k in [k for k in r if k in self.rows]:
            c = r.get(k)
            if c:
                axpy(r, self.F.neg(c), self.rows[k], self.F)
                axpy(combo, c, self.combos[k], self.F)
        if r:
            return None
        return combo

    def subspace(self, ambient_dim: Optional[int] = None, space: Hashable = None) -> "Subspace":
        piv = sorted(self.rows)
        return Subspace(tuple((p, dict(self.rows[p])) for p in piv), ambient_dim, space, self.F)


# -- subspaces ---------------------------------------------------------------

class Subspace:
    """Canonical RREF basis of a subspace of a coordinate space.

    ``space`` is an optional tag naming the ambient coordinate space; binary
    operations refuse mismatched tags or dimensions.
    """

    __slots__ = ("rows", "ambient_dim", "space", "F", "_hash", "_lookup")

    def __init__(self, rows, ambient_dim=None, space=None, F: Field = QQ):
        self.rows: Tuple[Tuple[Any, Vector], ...] = tuple(rows)
        self.ambient_dim = ambient_dim
        self.space = space
        self.F = F
        self._hash = None
        self._lookup = None

    @classmethod
    def span(cls, vectors: Iterable[Vector], ambient_dim=None, space=None, F: Field = QQ) -> "Subspace":
        e = Echelon(F)
        for v in vectors:
            if v:
                e.add(v)
        return e.subspace(ambient_dim, space)

    @classmethod
    def zero(cls, ambient_dim=None, space=None, F: Field = QQ) -> "Subspace":
        return cls((), ambient_dim, space, F)

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __len__(self):
        return len(self.rows)

    @property
    def pivots(self) -> List[Any]:
        return [p for p, _ in self.rows]

    @property
    def basis(self) -> List[Vector]:
        return [r for _, r in self.rows]

    def is_zero(self) -> bool:
        return not self.rows

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.space == other.space and self.ambient_dim == other.ambient_dim
                and self.rows == other.rows)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple((p, tuple(sorted(r.items()))) for p, r in self.rows))
        return self._hash

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"

    def echelon(self) -> Echelon:
        e = Echelon(self.F)
        for p, r in self.rows:
            e.rows[p] = dict(r)
            for k in r:
                if k != p:
                    e._cols.setdefault(k, set()).add(p)
        return e

    def reduce(self, v: Vector) -> Vector:
        r = dict(v)
        lookup = self._lookup
        if lookup is None:
            lookup = self._lookup = dict(self.rows)
        for k in [k for k in r if k in lookup]:
            c = r.get(k)
            if c:
                axpy(r, self.F.neg(c), lookup[k], self.F)
        return r

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def __contains__(self, v):
        return self.contains(v)

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(r) for r in other.basis)


def _check_compatible(u: Subspace, w: Subspace):
    if u.space != w.space or u.ambient_dim != w.ambient_dim:
        raise LinAlgError(f"ambient mismatch: {u.space!r}/{u.ambient_dim} vs {w.space!r}/{w.ambient_dim}")
    if u.F != w.F:
        raise LinAlgError("field mismatch")


def sum_spaces(u: Subspace, w: Subspace) -> Subspace:
    _check_compatible(u, w)
    if w.is_zero():
        return u
    if u.is_zero():
        return w
    e = u.echelon() if u.dim >= w.dim else w.echelon()
    other = w if u.dim >= w.dim else u
    for r in other.basis:
        e.add(r)
    return e.subspace(u.ambient_dim, u.space)


def kernel_combinations(vectors: Sequence[Vector], F: Field) -> List[Vector]:
    """Basis of {c : sum_j c_j vectors[j] = 0}, as dicts over indices j."""
    e = Echelon(F, track=True)
    out = []
    for j, v in enumerate(vectors):
        dep = e.add(v, j)
        if dep is not None:
            out.append(dep)
    return out


def intersect(u: Subspace, w: Subspace) -> Subspace:
    """u ∩ w: reduce the smaller basis modulo the larger, take the kernel."""
    _check_compatible(u, w)
    if u.is_zero() or w.is_zero():
        return Subspace.zero(u.ambient_dim, u.space, u.F)
    small, big = (u, w) if u.dim <= w.dim else (w, u)
    residues = [big.reduce(b) for b in small.basis]
    basis = small.basis
    vecs = []
    for c in kernel_combinations(residues, u.F):
        vecs.append(combine(((a, basis[j]) for j, a in c.items()), u.F))
    return Subspace.span(vecs, u.ambient_dim, u.space, u.F)


def intersect_all(spaces: Sequence[Subspace]) -> Subspace:
    spaces = sorted(spaces, key=lambda s: s.dim)
    cur = spaces[0]
    for s in spaces[1:]:
        if cur.is_zero():
            break
        cur = intersect(cur, s)
    return cur


def complement_in(w_sub: Subspace, w: Subspace) -> Subspace:
    """Rows of w's canonical basis whose pivots are not pivots of w_sub.

    This is the greedy completion of w_sub's basis in coordinate order; it is
    a complement because leading coordinates of the two families are disjoint.
    """
    _check_compatible(w_sub, w)
    if not w.contains_space(w_sub):
        raise LinAlgError("complement_in: first argument is not contained in the second")
    taken = set(w_sub.pivots)
    return Subspace(tuple((p, r) for p, r in w.rows if p not in taken), w.ambient_dim, w.space, w.F)


def coordinates(v: Vector, u: Subspace) -> Optional[List[Any]]:
    """Coefficients of v on u's canonical basis, or None if v is not in u."""
    coeffs = [v.get(p, 0) for p in u.pivots]
    if u.reduce(v):
        return None
    return coeffs


# -- dense front end ---------------------------------------------------------

def _dense_to_sparse(row, F):
    return {j: F(x) for j, x in enumerate(row) if F(x)}


def rref(m: Sequence[Sequence[Any]], F: Field = QQ) -> Tuple[List[List[Any]], List[int]]:
    """Canonical reduced row echelon form of a dense matrix (zero rows dropped)."""
    ncols = len(m[0]) if m else 0
    s = Subspace.span((_dense_to_sparse(r, F) for r in m), ncols, None, F)
    rows = [[r.get(j, 0) for j in range(ncols)] for r in s.basis]
    return rows, s.pivots


def rank(m: Sequence[Sequence[Any]], F: Field = QQ) -> int:
    return len(rref(m, F)[1])


def nullspace(m: Sequence[Sequence[Any]], F: Field = QQ) -> List[List[Any]]:
    """Basis (canonical RREF) of {x : m x = 0} for a dense matrix m."""
    ncols = len(m[0]) if m else 0
    cols = [{i: F(m[i][j]) for i in range(len(m)) if F(m[i][j])} for j in range(ncols)]
    ker = Subspace.span(kernel_combinations(cols, F), ncols, None, F)
    return [[r.get(j, 0) for j in range(ncols)] for r in ker.basis]


def dense_subspace(rows: Sequence[Sequence[Any]], F: Field = QQ, ncols: Optional[int] = None) -> Subspace:
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return Subspace.span((_dense_to_sparse(r, F) for r in rows), ncols, None, F)


def sparse_rank(vectors: Iterable[Vector], F: Field) -> int:
    e = Echelon(F)
    for v in vectors:
        if v:
            e.add(v)
    return len(e)
