"""Brute-force oracle for "pU": the p-fold sum Sigma_p f rewritten in s_i, s'_i.

Sigma_p f = sum_j f(q_j, q'_j) lives in F_p[q_1..q_p, q'_1..q'_p]. We find G
with G(s_1..s_p, s'_1..s'_p) = Sigma_p f, where s_i is the i-th elementary
symmetric polynomial in the q_j and s'_i is delta(s_i) mod p, then set
s_1..s_{p-1} = s'_1..s'_{p-1} = 0, s_p = q, s'_p = q'.

Everything is graded by weight (q_j: 1, q'_j: p, s_i: i, s'_i: p i), so the
linear system splits by weight. Internally the generators
    t_i = s'_i - E_i(s),   E_i = q'-free part of delta(S_i) mod p,
are used; t_i = sum_j q'_j S_{i-1}(q_k^p : k != j) is linear in q', so the
system splits further by q'-degree. Symmetric polynomials are stored by
their coefficients on sorted pair-exponent vectors (one per orbit).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Dict, List, Optional, Tuple

import numpy as np

from .deltaseries import DeltaSeries1
from .qseries import LaurentSeries

Pair = Tuple[int, int]
Orbit = Tuple[Pair, ...]
SMono = Tuple[Tuple[int, ...], Tuple[int, ...]]   # (alpha_1..alpha_p, beta_1..beta_p)


class NotPermutationSymmetric(ValueError):
    pass


class InjectivityFailure(RuntimeError):
    """The expansion map was found non-injective on some block (a bug)."""


# linear algebra mod p


class FpSolver:
    """Left inverse data for a full-column-rank matrix over F_p."""

    def __init__(self, A: np.ndarray, p: int):
        self.p = p
        self.A = A % p
        nrows, ncols = self.A.shape
        self.ncols = ncols
        if ncols == 0:
            self.rows = np.zeros(0, dtype=np.int64)
            self.inv = np.zeros((0, 0), dtype=np.int64)
            return
        if nrows < ncols:
            raise InjectivityFailure("more unknowns than equations")
        M = self.A.copy()
        order = np.arange(nrows)
        for c in range(ncols):
            nz = np.nonzero(M[c:, c])[0]
            if len(nz) == 0:
                raise InjectivityFailure(f"rank deficient at column {c}")
            i = c + int(nz[0])
            if i != c:
                M[[c, i]] = M[[i, c]]
                order[[c, i]] = order[[i, c]]
            piv_inv = pow(int(M[c, c]), -1, p)
            M[c, c:] = M[c, c:] * piv_inv % p
            below = M[c + 1:, c]
            idx = np.nonzero(below)[0]
            if len(idx):
                rows = c + 1 + idx
                M[rows, c:] = (M[rows, c:] - np.outer(M[rows, c], M[c, c:])) % p
        self.rows = order[:ncols].copy()
        self.inv = _inverse_mod(self.A[self.rows], p)

    def solve(self, b: np.ndarray) -> Tuple[np.ndarray, bool]:
        """(x, exact) with A x = b when exact; x = 0 for an empty system."""
        p = self.p
        b = b % p
        if self.ncols == 0:
            return np.zeros(0, dtype=np.int64), not b.any()
        x = self.inv @ b[self.rows] % p
        exact = not ((self.A @ x - b) % p).any()
        return x, exact


def _inverse_mod(B: np.ndarray, p: int) -> np.ndarray:
    n = B.shape[0]
    M = np.concatenate([B % p, np.eye(n, dtype=np.int64)], axis=1)
    for c in range(n):
        nz = np.nonzero(M[c:, c])[0]
        if len(nz) == 0:
            raise InjectivityFailure("pivot block is singular")
        i = c + int(nz[0])
        if i != c:
            M[[c, i]] = M[[i, c]]
        M[c] = M[c] * pow(int(M[c, c]), -1, p) % p
        col = M[:, c].copy()
        col[c] = 0
        idx = np.nonzero(col)[0]
        if len(idx):
            M[idx] = (M[idx] - np.outer(col[idx], M[c])) % p
    return M[:, n:].copy()


# orbits and monomials


def canon(v) -> Orbit:
    return tuple(sorted(v, reverse=True))


def enum_orbits(p: int, w: int, b: int) -> List[Orbit]:
    """Sorted p-tuples of pairs (a_j, b_j) with sum a + p sum b = w, sum b = b."""
    d = w - p * b
    if d < 0 or b < 0:
        return []
    out: List[Orbit] = []

    def rec(k: int, rq: int, rb: int, mx: Pair, acc: list):
        if k == 0:
            if rq == 0 and rb == 0:
                out.append(tuple(acc))
            return
        for a in range(min(rq, mx[0]), -1, -1):
            if rq - a > (k - 1) * a:
                break
            top = rb if a < mx[0] else min(rb, mx[1])
            for bb in range(top, -1, -1):
                if a == 0 and rb - bb > (k - 1) * bb:
                    break
                acc.append((a, bb))
                rec(k - 1, rq - a, rb - bb, (a, bb), acc)
                acc.pop()

    rec(p, d, b, (d, b), [])
    return out


def _partitions_bounded(n: int, maxpart: int, k: int):
    """Count vectors alpha_1..alpha_k with sum i alpha_i = n, parts <= maxpart."""
    if n == 0:
        yield (0,) * k
        return
    if maxpart == 0:
        return
    for c in range(n // maxpart, -1, -1):
        for rest in _partitions_bounded(n - c * maxpart, maxpart - 1, k):
            r = list(rest)
            r[maxpart - 1] = c
            yield tuple(r)


def enum_smonos(p: int, w: int, b: int) -> List[SMono]:
    """s/t monomials of weight w and t-degree b."""
    out = []
    betas = []

    def recb(i: int, rb: int, wt: int, acc: list):
        if i > p:
            if rb == 0:
                betas.append((tuple(acc), wt))
            return
        for c in range(rb, -1, -1):
            if wt + p * i * c > w:
                continue
            acc.append(c)
            recb(i + 1, rb - c, wt + p * i * c, acc)
            acc.pop()

    recb(1, b, 0, [])
    for beta, wt in betas:
        for alpha in _partitions_bounded(w - wt, p, p):
            out.append((alpha, beta))
    return out


def _gen_terms(p: int, kind: str, i: int) -> List[Tuple[Pair, ...]]:
    terms = []
    if kind == "s":
        for J in combinations(range(p), i):
            terms.append(tuple((1 if k in J else 0, 0) for k in range(p)))
    else:
        for j in range(p):
            others = [k for k in range(p) if k != j]
            for K in combinations(others, i - 1):
                terms.append(tuple((p if k in K else 0, 1 if k == j else 0)
                                   for k in range(p)))
    return terms


def _gen_weight(p: int, kind: str, i: int) -> Tuple[int, int]:
    return (i, 0) if kind == "s" else (p * i, 1)


@dataclass
class Block:
    w: int
    b: int
    rows: List[Orbit]
    row_index: Dict[Orbit, int]
    cols: List[SMono]
    matrix: Optional[np.ndarray] = None
    solver: Optional[FpSolver] = None


class OracleSystem:
    """Per-prime cache of expansion blocks and their factorizations."""

    def __init__(self, p: int):
        self.p = p
        self.blocks: Dict[Tuple[int, int], Block] = {}
        self.colvec: Dict[SMono, np.ndarray] = {}
        self.ops: Dict[Tuple[int, int, str, int], Tuple[np.ndarray, np.ndarray]] = {}
        self._terms: Dict[Tuple[str, int], list] = {}
        self._e_point: Dict[int, int] = {}
        self._e_poly: Dict[int, Dict[SMono, int]] = {}

    # structure

    def block(self, w: int, b: int, factor: bool = True) -> Block:
        key = (w, b)
        blk = self.blocks.get(key)
        if blk is None:
            rows = enum_orbits(self.p, w, b)
            blk = Block(w, b, rows, {r: i for i, r in enumerate(rows)},
                        enum_smonos(self.p, w, b))
            self.blocks[key] = blk
        if factor and blk.solver is None:
            self._assemble(blk)
        return blk

    def terms(self, kind: str, i: int):
        key = (kind, i)
        if key not in self._terms:
            self._terms[key] = _gen_terms(self.p, kind, i)
        return self._terms[key]

    def mult_op(self, w: int, b: int, kind: str, i: int):
        """Index arrays of multiplication by a generator into block (w, b)."""
        key = (w, b, kind, i)
        op = self.ops.get(key)
        if op is not None:
            return op
        gw, gb = _gen_weight(self.p, kind, i)
        tgt = self.block(w, b, factor=False)
        src = self.block(w - gw, b - gb, factor=False)
        sidx = src.row_index
        ri, ci = [], []
        terms = self.terms(kind, i)
        supp = [[k for k in range(self.p) if T[k] != (0, 0)] for T in terms]
        for r, E in enumerate(tgt.rows):
            for T, S in zip(terms, supp):
                ok = True
                for k in S:
                    if E[k][0] < T[k][0] or E[k][1] < T[k][1]:
                        ok = False
                        break
                if not ok:
                    continue
                diff = list(E)
                for k in S:
                    diff[k] = (E[k][0] - T[k][0], E[k][1] - T[k][1])
                ri.append(r)
                ci.append(sidx[canon(diff)])
        op = (np.array(ri, dtype=np.int64), np.array(ci, dtype=np.int64))
        self.ops[key] = op
        return op

    def apply_op(self, w: int, b: int, kind: str, i: int, vec: np.ndarray,
                 modulus: int) -> np.ndarray:
        ri, ci = self.mult_op(w, b, kind, i)
        out = np.zeros(len(self.block(w, b, factor=False).rows), dtype=np.int64)
        if len(ri):
            np.add.at(out, ri, vec[ci])
        return out % modulus

    def column(self, mono: SMono) -> np.ndarray:
        v = self.colvec.get(mono)
        if v is not None:
            return v
        p = self.p
        alpha, beta = mono
        w = sum((i + 1) * a for i, a in enumerate(alpha)) + p * sum((i + 1) * c for i, c in enumerate(beta))
        b = sum(beta)
        if w == 0:
            v = np.ones(1, dtype=np.int64)
        else:
            if b:
                i = max(k for k in range(p) if beta[k])
                kind = "t"
                nb = list(beta)
                nb[i] -= 1
                parent = (alpha, tuple(nb))
            else:
                i = max(k for k in range(p) if alpha[k])
                kind = "s"
                na = list(alpha)
                na[i] -= 1
                parent = (tuple(na), beta)
            v = self.apply_op(w, b, kind, i + 1, self.column(parent), p)
        self.colvec[mono] = v
        return v

    def _assemble(self, blk: Block):
        nrows = len(blk.rows)
        if blk.cols:
            A = np.stack([self.column(c) for c in blk.cols], axis=1)
        else:
            A = np.zeros((nrows, 0), dtype=np.int64)
        blk.matrix = A
        blk.solver = FpSolver(A, self.p)

    # the q'-free parts E_i of delta(S_i)

    def e_orbit_vector(self, i: int) -> np.ndarray:
        """Orbit coefficients of (S_i(q^p) - S_i(q)^p)/p mod p."""
        p = self.p
        p2 = p * p
        vec = self.column(((0,) * p, (0,) * p)) % p2
        for k in range(1, p + 1):
            vec = self.apply_op(i * k, 0, "s", i, vec, p2)
        blk = self.block(p * i, 0, factor=False)
        frob = np.zeros(len(blk.rows), dtype=np.int64)
        target = canon([(p, 0)] * i + [(0, 0)] * (p - i))
        frob[blk.row_index[target]] = 1
        diff = (frob - vec) % p2
        if (diff % p).any():
            raise ArithmeticError("S_i(q^p) - S_i(q)^p not divisible by p")
        return (diff // p) % p

    def e_poly(self, i: int) -> Dict[SMono, int]:
        """E_i written in s_1..s_p."""
        if i not in self._e_poly:
            blk = self.block(self.p * i, 0)
            x, exact = blk.solver.solve(self.e_orbit_vector(i))
            if not exact:
                raise ArithmeticError(f"E_{i} is not a polynomial in the s_j")
            self._e_poly[i] = {c: int(v) for c, v in zip(blk.cols, x) if v}
        return self._e_poly[i]

    def e_point(self, i: int) -> int:
        """E_i at s_1 = .. = s_{p-1} = 0, s_p = 1: the coefficient of s_p^i."""
        if i not in self._e_point:
            mono = (tuple([0] * (self.p - 1) + [i]), (0,) * self.p)
            self._e_point[i] = self.e_poly(i).get(mono, 0)
        return self._e_point[i]


_SYSTEMS: Dict[int, OracleSystem] = {}


def oracle_system(p: int) -> OracleSystem:
    if p not in _SYSTEMS:
        _SYSTEMS[p] = OracleSystem(p)
    return _SYSTEMS[p]


# the public operations


@dataclass
class MultiPoly:
    """A polynomial in (q_1, q'_1, ..., q_p, q'_p) truncated at weight W.

    Terms map a tuple of p exponent pairs (a_j, b_j) to a residue mod p.
    Coefficients of weight w are known for w <= W.
    """

    p: int
    W: int
    terms: Dict[Tuple[Pair, ...], int] = field(default_factory=dict)

    def weight(self, e) -> int:
        return sum(a + self.p * b for a, b in e)

    def orbit_coeffs(self) -> Dict[Orbit, int]:
        """Coefficients per orbit, after checking permutation symmetry."""
        groups: Dict[Orbit, Dict] = {}
        for e, c in self.terms.items():
            c %= self.p
            if c == 0:
                continue
            groups.setdefault(canon(e), {})[e] = c
        out = {}
        for o, members in groups.items():
            vals = set(members.values())
            if len(members) != _orbit_size(o) or len(vals) != 1:
                raise NotPermutationSymmetric(f"terms of orbit {o} are not symmetric")
            out[o] = vals.pop()
        return out


def _orbit_size(o: Orbit) -> int:
    from math import factorial
    n = factorial(len(o))
    counts: Dict[Pair, int] = {}
    for x in o:
        counts[x] = counts.get(x, 0) + 1
    for c in counts.values():
        n //= factorial(c)
    return n


def known_weight(f: DeltaSeries1, W: int) -> int:
    """Largest weight w <= W at which every needed coefficient of f is known."""
    p = f.p
    wk = W
    for m, s in f.comps.items():
        if p * m <= W:
            wk = min(wk, s.prec - 1)
    return wk


def sigma_p_expand(f: DeltaSeries1, W: int) -> MultiPoly:
    """sum_j f(q_j, q'_j) up to weight min(W, known weight of f)."""
    p = f.p
    if W < p:
        raise ValueError("weight cap must be >= p")
    if not f.is_holomorphic():
        raise ValueError("oracle handles holomorphic series only")
    wk = known_weight(f, W)
    terms: Dict[Tuple[Pair, ...], int] = {}
    for m, s in f.comps.items():
        for e, c in s.items():
            a = e - p * m
            if e > wk:
                continue
            if a == 0 and m == 0:
                continue          # p copies of a constant vanish mod p
            for j in range(p):
                key = tuple((a, m) if k == j else (0, 0) for k in range(p))
                terms[key] = (terms.get(key, 0) + c) % p
    return MultiPoly(p, wk, {k: v for k, v in terms.items() if v})


@dataclass
class SymSolveResult:
    G: Dict[SMono, int]
    residual: bool
    safe_degree: int
    G_t: Dict[SMono, int] = field(default_factory=dict)
    failed_weights: List[Tuple[int, int]] = field(default_factory=list)


def _solve_pieces(P: MultiPoly) -> SymSolveResult:
    p = P.p
    sysm = oracle_system(p)
    coeffs = P.orbit_coeffs()
    pieces: Dict[Tuple[int, int], Dict[Orbit, int]] = {}
    for o, c in coeffs.items():
        w = sum(a + p * b for a, b in o)
        b = sum(x[1] for x in o)
        pieces.setdefault((w, b), {})[o] = c
    G_t: Dict[SMono, int] = {}
    failed = []
    for (w, b), piece in sorted(pieces.items()):
        blk = sysm.block(w, b)
        rhs = np.zeros(len(blk.rows), dtype=np.int64)
        for o, c in piece.items():
            rhs[blk.row_index[o]] = c
        x, exact = blk.solver.solve(rhs)
        if not exact:
            failed.append((w, b))
            continue
        for c, v in zip(blk.cols, x):
            if v:
                G_t[c] = int(v)
    return SymSolveResult({}, bool(failed), P.W, G_t, failed)


def _poly_mul(a: Dict[SMono, int], b: Dict[SMono, int], p: int) -> Dict[SMono, int]:
    out: Dict[SMono, int] = {}
    for (a1, b1), c1 in a.items():
        for (a2, b2), c2 in b.items():
            k = (tuple(x + y for x, y in zip(a1, a2)), tuple(x + y for x, y in zip(b1, b2)))
            out[k] = (out.get(k, 0) + c1 * c2) % p
    return {k: v for k, v in out.items() if v}


def t_to_sprime(G_t: Dict[SMono, int], p: int) -> Dict[SMono, int]:
    """Rewrite G(s, t) as G(s, s') via t_i = s'_i - E_i(s)."""
    sysm = oracle_system(p)
    zero = (0,) * p
    one = {(zero, zero): 1}
    cache: Dict[Tuple[int, int], Dict[SMono, int]] = {}

    def t_power(i: int, k: int) -> Dict[SMono, int]:
        if k == 0:
            return one
        if (i, k) not in cache:
            unit = [0] * p
            unit[i - 1] = 1
            t = {(zero, tuple(unit)): 1}
            for mono, c in sysm.e_poly(i).items():
                t[mono] = (t.get(mono, 0) - c) % p
            cache[(i, k)] = _poly_mul(t_power(i, k - 1), t, p)
        return cache[(i, k)]

    out: Dict[SMono, int] = {}
    for (alpha, beta), c in G_t.items():
        acc = {(alpha, zero): c}
        for i, k in enumerate(beta, start=1):
            if k:
                acc = _poly_mul(acc, t_power(i, k), p)
        for m, v in acc.items():
            out[m] = (out.get(m, 0) + v) % p
    return {k: v for k, v in out.items() if v}


def symmetric_solve(P: MultiPoly, want_G: bool = True) -> SymSolveResult:
    """Find G in s_i, s'_i with G(s, delta s) = P mod p, weight by weight.

    residual=True means some weight piece has no solution, i.e. P is not the
    p-fold sum of a Taylor symmetric series.
    """
    res = _solve_pieces(P)
    if want_G and not res.residual:
        res.G = t_to_sprime(res.G_t, P.p)
    return res


def pu_oracle(f: DeltaSeries1, W: int) -> DeltaSeries1:
    """"pU" f from the definition, valid for exponents up to known_weight/p."""
    p = f.p
    P = sigma_p_expand(f, W)
    res = symmetric_solve(P, want_G=False)
    if res.residual:
        from .symmetry import NotSymmetric
        raise NotSymmetric(f"no symmetric representative at weights {res.failed_weights}")
    sysm = oracle_system(p)
    e = {i: sysm.e_point(i) for i in range(1, p + 1) if p * i <= max(P.W, 0)}
    if p in e and e[p]:
        raise ArithmeticError("E_p should vanish at the specialization point")
    # G(s, t) at s = (0..0, q), t_i = -e_i q^i (i < p), t_p = q' - e_p q^p
    acc: Dict[Tuple[int, int], int] = {}
    for (alpha, beta), c in res.G_t.items():
        if any(alpha[:-1]):
            continue
        if any(beta[i - 1] for i in range(1, p) if e.get(i, 0) == 0):
            continue
        qdeg = alpha[-1]
        coef = c
        for i in range(1, p):
            k = beta[i - 1]
            if k:
                coef = coef * pow(-e[i], k, p) % p
                qdeg += i * k
        if coef == 0:
            continue
        bp = beta[p - 1]
        ep = e.get(p, 0)
        for r in range(bp + 1):
            # (q' - ep q^p)^bp
            t = coef * comb(bp, r) * pow(-ep, bp - r, p) % p
            if t:
                key = (qdeg + p * (bp - r), r)
                acc[key] = (acc.get(key, 0) + t) % p
    prec = P.W // p + 1
    comps: Dict[int, Dict[int, int]] = {m: {} for m in list(f.comps) + list(range(P.W // (p * p) + 1))}
    for (a, r), c in acc.items():
        if c:
            comps.setdefault(r, {})
            comps[r][a + p * r] = (comps[r].get(a + p * r, 0) + c) % p
    out = {m: LaurentSeries(p, d, prec) for m, d in comps.items()}
    cap = max([f.mprime_max] + list(out))
    return DeltaSeries1(p, out, cap)


# a direct expansion of delta(S_i) mod p, kept independent of the orbit machinery


def delta_elementary_full(p: int, i: int) -> Dict[Tuple[Pair, ...], int]:
    """(S_i(q^p + p q') - S_i(q)^p)/p mod p as a full polynomial (small p, i)."""
    p2 = p * p

    def mul(a, b):
        out = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                k = tuple((x[0] + y[0], x[1] + y[1]) for x, y in zip(e1, e2))
                out[k] = (out.get(k, 0) + c1 * c2) % p2
        return {k: v for k, v in out.items() if v}

    zero = tuple((0, 0) for _ in range(p))
    S = {}
    Sphi = {}
    for J in combinations(range(p), i):
        S[tuple((1 if k in J else 0, 0) for k in range(p))] = 1
        prod = {zero: 1}
        for k in J:
            lin = {tuple((p, 0) if t == k else (0, 0) for t in range(p)): 1,
                   tuple((0, 1) if t == k else (0, 0) for t in range(p)): p}
            prod = mul(prod, lin)
        for kk, v in prod.items():
            Sphi[kk] = (Sphi.get(kk, 0) + v) % p2
    Sp = {zero: 1}
    for _ in range(p):
        Sp = mul(Sp, S)
    out = {}
    for k in set(Sphi) | set(Sp):
        d = (Sphi.get(k, 0) - Sp.get(k, 0)) % p2
        if d % p:
            raise ArithmeticError("delta(S_i) is not integral")
        if d:
            out[k] = (d // p) % p
    return {k: v for k, v in out.items() if v}
