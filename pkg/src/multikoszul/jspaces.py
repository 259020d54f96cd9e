"""The J_i spaces, their special-degree decompositions and the ι maps."""
from __future__ import annotations

from itertools import product as iproduct
from typing import Dict, List, Optional, Sequence, Tuple

from .linalg import Echelon, LinAlgError, Subspace, Vector, coordinates, intersect, intersect_all, sum_spaces
from .presentation import Presentation, space_of_relations
from .tensoralg import (Factorizer, GradedSubspace, InputError, graded_intersect, product_vectors,
                        sandwich_chain, subspace_product)


def weak_compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative ints summing to `total`, lex order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in weak_compositions(total - first, parts - 1):
            yield (first,) + rest


def n_s(s: int, i: int) -> int:
    """Adams degree carrying J_i for a single relation degree s (one generator degree 1)."""
    j, r = divmod(i, 2)
    return s * j + r


class JFamily:
    """J_0, J_1, … as graded subspaces of T(V) up to Adams degree D.

    Levels are computed lazily; ``upto(H)`` forces J_0..J_H.  Once some J_i
    vanishes through D every higher J vanishes too, and those levels are
    recorded as forced zeros.
    """

    def __init__(self, p: Presentation, D: int, debug: bool = False):
        self.p = p
        self.gens = p.gens
        self.F = p.field
        self.D = D
        self.debug = debug
        self.R = space_of_relations(p, D, warn=False)
        self.V = GradedSubspace.generators(self.gens, D, self.F)
        self.J: List[GradedSubspace] = [GradedSubspace.unit(self.gens, D, self.F), self.V, self.R]
        self.forced_zero: Dict[int, bool] = {0: False, 1: False, 2: False}
        self._chains: Dict[int, List[GradedSubspace]] = {}
        self._rpow: Dict[int, GradedSubspace] = {1: self.R}
        self._lengths: Dict[int, GradedSubspace] = {}
        self._prod: Dict[tuple, Subspace] = {}
        self._summand: Dict[tuple, Subspace] = {}
        self._decomp: Dict[tuple, "SpecialDecomposition"] = {}
        self._fact: Dict[tuple, Factorizer] = {}
        self.mismatch_debug: List[Tuple[int, int]] = []

    # -- basic access --------------------------------------------------------
    def __getitem__(self, i: int) -> GradedSubspace:
        if i < 0:
            return GradedSubspace.zero(self.gens, self.D, self.F)
        self.upto(i)
        return self.J[i]

    def upto(self, H: int) -> "JFamily":
        while len(self.J) <= H:
            i = len(self.J)
            prev = self.J[i - 1]
            if prev.is_zero():
                self.J.append(GradedSubspace.zero(self.gens, self.D, self.F, f"J{i}"))
                self.forced_zero[i] = True
                continue
            if i % 2:
                J = self._odd(i)
            else:
                J = self._even(i)
            J.name = f"J{i}"
            self.J.append(J)
            self.forced_zero[i] = False
        return self

    def dims(self, H: int) -> Dict[int, Dict[int, int]]:
        self.upto(H)
        return {i: {n: self.J[i][n].dim for n in range(self.D + 1)} for i in range(H + 1)}

    def basis(self, i: int, n: int) -> List[Vector]:
        if n < 0 or n > self.D:
            return []
        return self[i][n].basis

    def min_degree(self, i: int) -> Optional[int]:
        return self[i].min_degree()

    def until_zero(self) -> int:
        """Smallest i with J_i = 0 through D (exists since min degrees grow)."""
        i = 0
        while not self[i].is_zero():
            i += 1
        return i

    # -- helpers ---------------------------------------------------------------
    def length_space(self, m: int) -> GradedSubspace:
        if m not in self._lengths:
            self._lengths[m] = GradedSubspace.length(self.gens, m, self.D, self.F)
        return self._lengths[m]

    def chain(self, i: int, N: int) -> GradedSubspace:
        """∩_{l=0}^{N} V^(l)·J_i·V^(N−l)."""
        ch = self._chains.get(i)
        if ch is None:
            ch = self._chains[i] = [self[i]]
        while len(ch) <= N:
            ext = sandwich_chain(ch[-1], 1)
            ch.append(ext[1])
        return ch[N]

    def rpower(self, j: int) -> GradedSubspace:
        if j not in self._rpow:
            self._rpow[j] = subspace_product(self.rpower(j - 1), self.R)
        return self._rpow[j]

    def _space(self, n):
        return self.gens.count(n), self.gens.space(n)

    @staticmethod
    def canonical_spec(items) -> tuple:
        """Merge a list of ('V', m)/('J', i) items: drop V^0 and J_0, fuse V's."""
        out = []
        for kind, val in items:
            if (kind == "V" and val == 0) or (kind == "J" and val == 0):
                continue
            if kind == "V" and out and out[-1][0] == "V":
                out[-1] = ("V", out[-1][1] + val)
            else:
                out.append((kind, val))
        return tuple(out)

    def product_at(self, spec: tuple, n: int) -> Subspace:
        """Span of the internal product described by a canonical spec, degree n."""
        key = (spec, n)
        hit = self._prod.get(key)
        if hit is not None:
            return hit
        amb, tag = self._space(n)
        if not spec:
            s = Subspace.span([{(): 1}] if n == 0 else [], amb, tag, self.F)
        else:
            factors = [self.length_space(v) if k == "V" else self[v] for k, v in spec]
            if any(f.is_zero() for f in factors):
                s = Subspace.zero(amb, tag, self.F)
            else:
                s = Subspace.span(product_vectors(factors, n), amb, tag, self.F)
        self._prod[key] = s
        return s

    def summand(self, indices: Tuple[int, ...], N: int, n: int) -> Subspace:
        """∩ over weak compositions m̄ of N into len+1 parts of
        V^(m1)·J_{i1}·V^(m2)·…·J_{ik}·V^(m_{k+1}) at degree n."""
        key = (indices, N, n)
        hit = self._summand.get(key)
        if hit is not None:
            return hit
        amb, tag = self._space(n)
        live = [i for i in indices if i != 0]
        if n > self.D or n < 0:
            raise LinAlgError(f"degree {n} beyond truncation {self.D}")
        if any(self[i].is_zero() for i in live):
            s = Subspace.zero(amb, tag, self.F)
        elif not live:
            s = self.length_space(N)[n]
        elif len(live) == 1:
            s = self.chain(live[0], N)[n]
        else:
            specs = []
            seen = set()
            for m in weak_compositions(N, len(indices) + 1):
                items = []
                for l, i in enumerate(indices):
                    items += [("V", m[l]), ("J", i)]
                items.append(("V", m[-1]))
                spec = self.canonical_spec(items)
                if spec not in seen:
                    seen.add(spec)
                    specs.append(spec)
            s = None
            for spec in specs:
                piece = self.product_at(spec, n)
                s = piece if s is None else intersect(s, piece)
                if s.is_zero():
                    break
        self._summand[key] = s
        return s

    def max_special(self, indices, n) -> int:
        base = sum(self.min_degree(i) or 0 for i in indices if i)
        return max(-1, (n - base) // self.gens.min_degree)

    # -- recursion -----------------------------------------------------------
    def _odd(self, i: int) -> GradedSubspace:
        prev = self[i - 1]
        return graded_intersect(subspace_product(self.V, prev), subspace_product(prev, self.V))

    def _even(self, i: int) -> GradedSubspace:
        half = i // 2 - 1  # J_{2(half+1)}, built from J_0..J_{2 half}
        Rp = self.rpower(half + 1)
        lo = (self.min_degree(i - 1) or 0) + self.gens.min_degree
        parts = {}
        nbars = list(weak_compositions(half, half))
        for n in range(lo, self.D + 1):
            cand = Rp[n]
            if cand.is_zero():
                continue
            total = self._even_total(half, nbars, n, 2)
            parts[n] = intersect(total, cand)
            if self.debug:
                alt = intersect(self._even_total(half, nbars, n, 1), cand)
                if alt != parts[n]:
                    self.mismatch_debug.append((i, n))
        return GradedSubspace(self.gens, self.D, parts, self.F)

    def _even_total(self, half, nbars, n, N0) -> Subspace:
        amb, tag = self._space(n)
        total = Subspace.zero(amb, tag, self.F)
        top = self.max_special([2 * half], n)
        for N in range(N0, top + 1):
            cur = None
            for nb in sorted(nbars, key=lambda t: -max(t)):
                idx = tuple(2 * x for x in nb)
                piece = self.summand(idx, N, n)
                cur = piece if cur is None else intersect(cur, piece)
                if cur.is_zero():
                    break
            if cur is not None and not cur.is_zero():
                total = sum_spaces(total, cur)
        return total

    # -- decompositions and ι maps -------------------------------------------
    def decomposition(self, indices: Tuple[int, ...], n: int, N_min: int = 0) -> "SpecialDecomposition":
        key = (indices, n, N_min)
        hit = self._decomp.get(key)
        if hit is None:
            hit = self._decomp[key] = SpecialDecomposition(self, indices, n, N_min)
        return hit

    def factorizer(self, factors: Tuple[int, ...], n: int, leading_t: bool = False) -> Factorizer:
        key = (factors, n, leading_t)
        hit = self._fact.get(key)
        if hit is None:
            fs = [self[i] for i in factors]
            if leading_t:
                fs = [GradedSubspace.full(self.gens, self.D, self.F)] + fs
            hit = self._fact[key] = Factorizer(fs, n)
        return hit

    def iota2(self, i: int, i2: int, n: int) -> Dict[int, Vector]:
        """ι_{i,i'} on J_{i+i'} at degree n: basis index -> {((a,ka),(b,kb)): c}."""
        src = self.basis(i + i2, n)
        out: Dict[int, Vector] = {}
        if not src:
            return out
        both_odd = i % 2 == 1 and i2 % 2 == 1
        fz = self.factorizer((i, i2), n, leading_t=both_odd)
        for k, w in enumerate(src):
            sol = fz(w)
            if both_odd:
                sol = {lab[1:]: c for lab, c in sol.items() if lab[0][0] == 0}
            out[k] = {lab: c for lab, c in sol.items() if c}
        return out

    def iota_multi(self, tup: Tuple[int, ...], n: int) -> Dict[int, Vector]:
        """ι_{i1,…,ik} (all odd, k ≥ 3) on J_{Σi+2−k} at degree n."""
        k = len(tup)
        if k < 3 or any(t % 2 == 0 or t < 1 for t in tup):
            raise ValueError("iota_multi needs at least three odd indices")
        src_i = sum(tup) + 2 - k
        src = self.basis(src_i, n)
        out: Dict[int, Vector] = {}
        if not src:
            return out
        halves = tuple(t - 1 for t in tup)  # J_{2 j'} indices
        dec = self.decomposition(halves, n, N_min=2)
        if k not in dec.summands or dec.summands[k].is_zero():
            return {idx: {} for idx in range(len(src))}
        fz = self.factorizer(tuple(tup), n)
        for idx, w in enumerate(src):
            comp = dec.decompose(w).get(k, {})
            out[idx] = {lab: c for lab, c in fz(comp).items() if c} if comp else {}
        return out


class SpecialDecomposition:
    """Summands S_N (N ≥ N_min) at one Adams degree with a component solver."""

    def __init__(self, jf: JFamily, indices: Tuple[int, ...], n: int, N_min: int = 0):
        self.indices = indices
        self.n = n
        self.summands: Dict[int, Subspace] = {}
        self.echelon = Echelon(jf.F, track=True)
        top = jf.max_special(indices, n)
        for N in range(N_min, top + 1):
            s = jf.summand(indices, N, n)
            if s.is_zero():
                continue
            self.summands[N] = s
            for k, b in enumerate(s.basis):
                if self.echelon.add(b, (N, k)) is not None:
                    raise LinAlgError(f"special summands for {indices} are not independent in degree {n}")
        self._F = jf.F

    def decompose(self, omega: Vector) -> Dict[int, Vector]:
        if not omega:
            return {}
        sol = self.echelon.solve(omega)
        if sol is None:
            raise LinAlgError(f"element is not in the special decomposition of {self.indices} (degree {self.n})")
        out: Dict[int, Vector] = {}
        from .linalg import axpy
        for (N, k), c in sol.items():
            axpy(out.setdefault(N, {}), c, self.summands[N].basis[k], self._F)
        return {N: v for N, v in out.items() if v}


def compute_J(p: Presentation, H: int, D: int, debug: bool = False) -> JFamily:
    return JFamily(p, D, debug).upto(H)


def special_summands(jf: JFamily, indices: Sequence[int], n: int, N_min: int = 0) -> SpecialDecomposition:
    return jf.decomposition(tuple(indices), n, N_min)


def compute_Jtilde(p: Presentation, H: int, D: int) -> List[GradedSubspace]:
    """J̃_i = ⊕_s ∩_l V^(l)·R_s·V^(n_s(i)−s−l) for degree-1 generated algebras."""
    if not p.degree1_generated():
        raise InputError("J-tilde spaces need all generators in degree 1")
    g, F = p.gens, p.field
    R = space_of_relations(p, D, warn=False)
    out = [GradedSubspace.unit(g, D, F), GradedSubspace.generators(g, D, F)]
    chains = {}
    for s in R.support():
        Rs = GradedSubspace(g, D, {s: R[s]}, F)
        chains[s] = [Rs]
    for i in range(2, H + 1):
        parts = {}
        for s, ch in chains.items():
            deg = n_s(s, i)
            if deg > D:
                continue
            N = deg - s
            while len(ch) <= N:
                ch.append(sandwich_chain(ch[-1], 1)[1])
            piece = ch[N][deg]
            parts[deg] = piece if deg not in parts else sum_spaces(parts[deg], piece)
        out.append(GradedSubspace(g, D, parts, F, f"Jt{i}"))
    return out
