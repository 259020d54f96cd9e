"""Multi-Koszul complexes, minimal resolutions, a bar-complex oracle and the
multi-Koszul decision procedure."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Dict, List, Optional, Tuple

from .jspaces import JFamily
from .linalg import (Echelon, LinAlgError, Subspace, Vector, axpy, complement_in, coordinates,
                     kernel_combinations)
from .presentation import Presentation, TruncatedAlgebra
from .tensoralg import CapExceeded, InputError

Table = Dict[int, Dict[int, int]]

ONE = ()


# -- the complexes -----------------------------------------------------------

def _slices(omega: Vector, left: int, right: int) -> Dict[tuple, Vector]:
    """Group the words of ω by (first `left` letters, last `right` letters)."""
    out: Dict[tuple, Vector] = {}
    for w, c in omega.items():
        if len(w) < left + right:
            raise LinAlgError("word too short for the requested split")
        u, t = w[:left], w[len(w) - right:]
        out.setdefault((u, t), {})[w[left:len(w) - right]] = c
    return out


class KoszulComplex:
    """Levels A⊗J_i⊗A (bimodule), A⊗J_i (left) or J_i⊗A (right), i ≤ H.

    ``images[i][(q, k)]`` is the image of the generator 1⊗e⊗1 where e is the
    k-th basis element of (J_i)_q.  Bimodule keys are (a, q, k, b) with a, b
    normal words; left keys drop b, right keys drop a.
    """

    def __init__(self, kind: str, A: TruncatedAlgebra, jf: JFamily, H: int, images: Dict[int, Dict[tuple, Vector]]):
        self.kind = kind
        self.A = A
        self.jf = jf
        self.H = H
        self.D = min(A.D, jf.D)
        self.images = images
        self._rank: Dict[Tuple[int, int], int] = {}

    # generator keys of level i at Adams degree q
    def generators(self, i: int) -> List[Tuple[int, int]]:
        J = self.jf[i]
        return [(q, k) for q in J.support() if q <= self.D for k in range(J[q].dim)]

    def level_basis(self, i: int, n: int) -> List[tuple]:
        A = self.A
        out = []
        for q, k in self.generators(i):
            if q > n:
                continue
            r = n - q
            if self.kind == "left":
                out += [(a, q, k) for a in A.normal[r]]
            elif self.kind == "right":
                out += [(q, k, b) for b in A.normal[r]]
            else:
                for s in range(r + 1):
                    out += [(a, q, k, b) for a in A.normal[s] for b in A.normal[r - s]]
        return out

    def level_dim(self, i: int, n: int) -> int:
        return len(self.level_basis(i, n))

    def apply(self, i: int, key: tuple) -> Vector:
        """δ_i of a basis element of level i (i ≥ 1); δ_0 is the augmentation
        (left/right) or multiplication (bimodule), landing in A."""
        A, F = self.A, self.A.F
        if self.kind == "left":
            a, q, k = key
            b = ONE
        elif self.kind == "right":
            q, k, b = key
            a = ONE
        else:
            a, q, k, b = key
        if i == 0:
            if self.kind == "bimodule":
                return dict(A.mul_words(a, b))
            return {ONE: 1} if (a == ONE and b == ONE) else {}
        img = self.images[i].get((q, k), {})
        out: Vector = {}
        for tkey, c in img.items():
            if self.kind == "left":
                a2, q2, k2 = tkey
                for a3, x in A.mul_words(a, a2).items():
                    axpy(out, c * x, {(a3, q2, k2): 1}, F)
            elif self.kind == "right":
                q2, k2, b2 = tkey
                for b3, y in A.mul_words(b2, b).items():
                    axpy(out, c * y, {(q2, k2, b3): 1}, F)
            else:
                a2, q2, k2, b2 = tkey
                left = A.mul_words(a, a2)
                right = A.mul_words(b2, b)
                for a3, x in left.items():
                    for b3, y in right.items():
                        axpy(out, c * x * y, {(a3, q2, k2, b3): 1}, F)
        return out

    def apply_vec(self, i: int, v: Vector) -> Vector:
        out: Vector = {}
        for key, c in v.items():
            axpy(out, c, self.apply(i, key), self.A.F)
        return out

    def matrix(self, i: int, n: int) -> List[Vector]:
        return [self.apply(i, key) for key in self.level_basis(i, n)]

    def rank(self, i: int, n: int) -> int:
        key = (i, n)
        if key not in self._rank:
            if i > self.H or i < 0:
                raise LinAlgError(f"differential {i} outside computed range")
            e = Echelon(self.A.F)
            for v in self.matrix(i, n):
                if v:
                    e.add(v)
            self._rank[key] = len(e)
        return self._rank[key]

    def kernel(self, i: int, n: int) -> List[Vector]:
        basis = self.level_basis(i, n)
        combos = kernel_combinations(self.matrix(i, n), self.A.F)
        return [{basis[j]: c for j, c in cmb.items()} for cmb in combos]


def _odd_image(A: TruncatedAlgebra, jf: JFamily, i: int, q: int, omega: Vector) -> Vector:
    """δ^b on J_i, i odd: ω = Σ v·c = Σ c'·v'  ↦  Σ π(v)|c|1 − Σ 1|c'|π(v')."""
    g, F = A.gens, A.F
    out: Vector = {}
    for sign, left in ((1, True), (-1, False)):
        groups = _slices(omega, 1, 0) if left else _slices(omega, 0, 1)
        for (u, t), mid in groups.items():
            letter = u if left else t
            d = q - g.degree(letter)
            coeffs = coordinates(mid, jf[i - 1][d])
            if coeffs is None:
                raise LinAlgError(f"odd differential: slice not in J_{i - 1} (degree {d})")
            pv = A.project_word(letter)
            for k, c in enumerate(coeffs):
                if not c:
                    continue
                for word, x in pv.items():
                    key = (word, d, k, ONE) if left else (ONE, d, k, word)
                    axpy(out, sign * c * x, {key: 1}, F)
    return out


def _even_image(A: TruncatedAlgebra, jf: JFamily, i: int, q: int, omega: Vector) -> Vector:
    """δ^b on J_i, i even, through the decomposition of J_i in ⊕_N ∩_l V^(l) J_{i−1} V^(N−l)."""
    g, F = A.gens, A.F
    dec = jf.decomposition((i - 1,), q, N_min=0)
    out: Vector = {}
    for N, comp in dec.decompose(omega).items():
        for l in range(N + 1):
            for (u, t), mid in _slices(comp, l, N - l).items():
                d = q - g.degree(u) - g.degree(t)
                coeffs = coordinates(mid, jf[i - 1][d])
                if coeffs is None:
                    raise LinAlgError(f"even differential: slice not in J_{i - 1} (degree {d})")
                pu, pt = A.project_word(u), A.project_word(t)
                for k, c in enumerate(coeffs):
                    if not c:
                        continue
                    for a, x in pu.items():
                        for b, y in pt.items():
                            axpy(out, c * x * y, {(a, d, k, b): 1}, F)
    return out


def build_bimodule_complex(A: TruncatedAlgebra, jf: JFamily, H: int) -> KoszulComplex:
    D = min(A.D, jf.D)
    images: Dict[int, Dict[tuple, Vector]] = {}
    for i in range(1, H + 1):
        lvl = {}
        J = jf[i]
        for q in J.support():
            if q > D:
                continue
            for k, omega in enumerate(J[q].basis):
                lvl[(q, k)] = (_odd_image if i % 2 else _even_image)(A, jf, i, q, omega)
        images[i] = lvl
    return KoszulComplex("bimodule", A, jf, H, images)


def left_right_complexes(bi: KoszulComplex) -> Tuple[KoszulComplex, KoszulComplex]:
    left, right = {}, {}
    for i, lvl in bi.images.items():
        left[i] = {g: {(a, q, k): c for (a, q, k, b), c in v.items() if b == ONE} for g, v in lvl.items()}
        right[i] = {g: {(q, k, b): c for (a, q, k, b), c in v.items() if a == ONE} for g, v in lvl.items()}
    return (KoszulComplex("left", bi.A, bi.jf, bi.H, left),
            KoszulComplex("right", bi.A, bi.jf, bi.H, right))


@dataclass
class ComplexReport:
    ok: bool
    failure: Optional[dict] = None
    minimal: bool = True
    minimal_failure: Optional[dict] = None


def verify_complex(c: KoszulComplex) -> ComplexReport:
    """δ_{i−1}∘δ_i = 0 on every generator (A-linearity does the rest), and
    minimality: no generator image has a term with all A-factors scalar."""
    rep = ComplexReport(ok=True)
    for i in range(1, c.H + 1):
        for (q, k), img in sorted(c.images[i].items()):
            if c.kind == "left":
                gen = (ONE, q, k)
            elif c.kind == "right":
                gen = (q, k, ONE)
            else:
                gen = (ONE, q, k, ONE)
            comp = c.apply_vec(i - 1, c.apply(i, gen))
            if comp and rep.ok:
                rep.ok = False
                rep.failure = {"i": i, "n": q, "generator": k}
            for key in img:
                scal = [x for x in key if isinstance(x, tuple)]
                if all(x == ONE for x in scal) and rep.minimal:
                    rep.minimal = False
                    rep.minimal_failure = {"i": i, "n": q, "generator": k}
    return rep


def homology_table(c: KoszulComplex, H: Optional[int] = None, D: Optional[int] = None,
                   augmented: bool = True) -> Table:
    """dim H_i at Adams degree n for i ≤ H−1 (rank δ_{i+1} needs level i+1).

    With ``augmented`` the target of δ_0 (k, or A for the bimodule complex)
    is part of the complex, so exactness means the whole table is zero.
    """
    H = c.H if H is None else min(H, c.H)
    D = c.D if D is None else min(D, c.D)
    out: Table = {}
    for i in range(0, H):
        row = {}
        for n in range(D + 1):
            dim = c.level_dim(i, n)
            r_in = c.rank(i, n) if (i > 0 or augmented) else 0
            row[n] = dim - r_in - c.rank(i + 1, n)
        out[i] = row
    return out


def is_exact(table: Table) -> bool:
    return all(v == 0 for row in table.values() for v in row.values())


# -- minimal resolution ------------------------------------------------------

class MinimalResolution:
    """Minimal free resolution P_i = A⊗W_i of k as a left A-module.

    ``gens[i]`` lists (degree, image in P_{i−1}) for a basis of W_i; keys of
    P_i are (normal word, generator index).
    """

    def __init__(self, A: TruncatedAlgebra, H: int, D: Optional[int] = None):
        self.A = A
        self.H = H
        self.D = A.D if D is None else min(D, A.D)
        self.gens: List[List[Tuple[int, Vector]]] = [[(0, {})]]
        self.kernels: Dict[Tuple[int, int], Subspace] = {}
        for i in range(H):
            self.gens.append(self._next(i))

    def basis(self, i: int, n: int) -> List[tuple]:
        out = []
        for g, (d, _) in enumerate(self.gens[i]):
            if d <= n:
                out += [(a, g) for a in self.A.normal[n - d]]
        return out

    def mul_left(self, word, v: Vector) -> Vector:
        out: Vector = {}
        for (b, h), c in v.items():
            for ab, x in self.A.mul_words(word, b).items():
                axpy(out, c * x, {(ab, h): 1}, self.A.F)
        return out

    def differential(self, i: int, key: tuple) -> Vector:
        a, g = key
        if i == 0:
            return {ONE: 1} if a == ONE else {}
        return self.mul_left(a, self.gens[i][g][1])

    def _next(self, i: int) -> List[Tuple[int, Vector]]:
        A, F = self.A, self.A.F
        new = []
        for n in range(self.D + 1):
            basis = self.basis(i, n)
            cols = [self.differential(i, key) for key in basis]
            ker_vecs = [{basis[j]: c for j, c in cmb.items()} for cmb in kernel_combinations(cols, F)]
            K = Subspace.span(ker_vecs, len(basis), ("P", i, n), F)
            self.kernels[(i, n)] = K
            M = []
            for gi, d in enumerate(A.gens.degrees):
                if n - d >= 0:
                    for v in self.kernels[(i, n - d)].basis:
                        M.append(self.mul_left((gi,), v))
            Msp = Subspace.span(M, len(basis), ("P", i, n), F)
            for row in complement_in(Msp, K).basis:
                new.append((n, row))
        return new

    def tor(self) -> Table:
        return {i: {n: sum(1 for d, _ in self.gens[i] if d == n) for n in range(self.D + 1)}
                for i in range(self.H + 1)}

    def is_minimal(self) -> bool:
        for i in range(1, self.H + 1):
            for d, img in self.gens[i]:
                if any(a == ONE for (a, g) in img):
                    return False
        return True


def minimal_resolution(A: TruncatedAlgebra, H: int, D: Optional[int] = None) -> Tuple[MinimalResolution, Table]:
    res = MinimalResolution(A, H, D)
    return res, res.tor()


# -- bar complex oracle --------------------------------------------------------

def _compositions(n: int, parts: int):
    if parts == 0:
        if n == 0:
            yield ()
        return
    for first in range(1, n - parts + 2):
        for rest in _compositions(n - first, parts - 1):
            yield (first,) + rest


def bar_tor_oracle(A: TruncatedAlgebra, H: int = 4, D: int = 8) -> Table:
    """Homology of the normalized bar complex (Ā^{⊗i})_n, i ≤ H, n ≤ D."""
    D = min(D, A.D)
    F = A.F

    def basis(i, n):
        if i == 0:
            return [()] if n == 0 else []
        out = []
        for comp in _compositions(n, i):
            out += list(iproduct(*[A.normal[c] for c in comp]))
        return out

    def diff(t):
        out: Vector = {}
        for j in range(len(t) - 1):
            sign = -1 if j % 2 == 0 else 1
            for w, c in A.mul_words(t[j], t[j + 1]).items():
                axpy(out, sign * c, {t[:j] + (w,) + t[j + 2:]: 1}, F)
        return out

    ranks: Dict[Tuple[int, int], int] = {}

    def rank(i, n):
        if i <= 1:
            return 0
        if (i, n) not in ranks:
            e = Echelon(F)
            for t in basis(i, n):
                v = diff(t)
                if v:
                    e.add(v)
            ranks[(i, n)] = len(e)
        return ranks[(i, n)]

    out: Table = {}
    for i in range(H + 1):
        out[i] = {n: len(basis(i, n)) - rank(i, n) - rank(i + 1, n) for n in range(D + 1)}
    return out


# -- decision -----------------------------------------------------------------

def poly_mul(a: List[int], b: List[int], D: int) -> List[int]:
    out = [0] * (D + 1)
    for i, x in enumerate(a[:D + 1]):
        if x:
            for j, y in enumerate(b[:D + 1 - i]):
                out[i + j] += x * y
    return out


def euler_check(A: TruncatedAlgebra, jf: JFamily) -> Tuple[bool, List[int]]:
    """Σ_i (−1)^i h_{J_i}(t)·h_A(t) mod t^{D+1}; should be 1."""
    D = min(A.D, jf.D)
    top = jf.until_zero()
    total = [0] * (D + 1)
    hA = A.hilbert_series()
    for i in range(top):
        hJ = jf[i].dims()[:D + 1]
        prod = poly_mul(hJ, hA, D)
        for n in range(D + 1):
            total[n] += (-1) ** i * prod[n]
    return total == [1] + [0] * D, total


@dataclass
class Verdict:
    status: str
    bounds: Tuple[int, int]
    witness: Optional[Tuple[int, int]] = None
    witness_dims: Optional[Tuple[int, int]] = None
    tor: Table = field(default_factory=dict)
    jdims: Table = field(default_factory=dict)
    euler_ok: Optional[bool] = None
    structural_zero: List[Tuple[int, int]] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)
    crosscheck: Dict[str, object] = field(default_factory=dict)
    message: str = ""

    @property
    def is_koszul(self) -> bool:
        return self.status == MK


MK = "multi-Koszul-up-to-bounds"
NOT_MK = "not-multi-Koszul"
CAP = "inconclusive-cap"


def structural_zeros(jf: JFamily, H: int) -> List[Tuple[int, int]]:
    """Cells (i, n) that vanish for degree reasons alone."""
    out = []
    dmin = jf.gens.min_degree
    for i in range(1, H + 1):
        prev = jf.min_degree(i - 1)
        lo = jf.D + 1 if prev is None else prev + dmin
        for n in range(min(lo, jf.D + 1)):
            out.append((i, n))
    return out


def table_to_tor_check(tor: Table, p: Presentation):
    counts: Dict[int, int] = {}
    for d in p.gens.degrees:
        counts[d] = counts.get(d, 0) + 1
    row = tor.get(1, {})
    for n, v in row.items():
        if v != counts.get(n, 0):
            raise InputError(f"redundant generators: Tor_1 has dimension {v} in degree {n} "
                             f"but {counts.get(n, 0)} generator(s) are declared there")


def decide_multikoszul(p: Presentation, H: int = 6, D: int = 12, debug: bool = False,
                       consezero: bool = True) -> Verdict:
    try:
        return _decide(p, H, D, debug, consezero)
    except CapExceeded as e:
        return Verdict(CAP, (H, D), message=str(e))


def _decide(p, H, D, debug, consezero) -> Verdict:
    A = TruncatedAlgebra(p, D)
    jf = JFamily(p, D, debug=debug).upto(H)
    res, tor = minimal_resolution(A, H, D)
    table_to_tor_check(tor, p)
    jd = jf.dims(H)
    v = Verdict(MK, (H, D), tor=tor, jdims=jd)
    for i in range(H + 1):
        for n in range(D + 1):
            if jd[i][n] != tor[i][n]:
                v.status = NOT_MK
                v.witness = (i, n)
                v.witness_dims = (jd[i][n], tor[i][n])
                break
        if v.witness:
            break
    v.structural_zero = structural_zeros(jf, H)
    if v.status == MK:
        v.euler_ok, _ = euler_check(A, jf)
    else:
        v.notes.append("formal tables, no theorem applies")
    if debug:
        bi = build_bimodule_complex(A, jf, H)
        left, right = left_right_complexes(bi)
        v.crosscheck["left_exact"] = is_exact(homology_table(left))
        v.crosscheck["right_exact"] = is_exact(homology_table(right))
        v.crosscheck["recursion_variants_agree"] = not jf.mismatch_debug
    if consezero and v.status == MK:
        top = jf.until_zero()  # J_top = 0 through D
        N = top - 1
        # J_{N+1} could only start at mindeg(J_N) + dmin; above D its vanishing says nothing
        room = jf.min_degree(N) is not None and jf.min_degree(N) + jf.gens.min_degree <= D
        if 1 <= N <= H and room:
            bi = build_bimodule_complex(A, jf, N)
            left, _ = left_right_complexes(bi)
            if all(left.rank(N, n) == left.level_dim(N, n) for n in range(D + 1)):
                v.notes.append(f"delta_{N} injective and J_{N + 1} = 0 verified up to degree {D} "
                               f"(conditional certificate: injectivity beyond {D} is not checked)")
    return v
