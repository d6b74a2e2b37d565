"""Characteristic-zero lift f^#2 as an order-2 series over capped p-adics.

    f^#2 = (1/p) sum_{n >= 1} (a_n / n) (p^kappa phi^2(q)^n - a_p phi(q)^n + p q^n)

with phi(q) = q^p + p q' and phi^2(q) = (q^p + p q')^p + p (q'^p + p q'').
Monomials q^m q'^m1 q''^m2 are kept for m < prec, m1 <= dprime_cap,
m2 <= ddoubleprime_cap. Weights q: 1, q': p, q'': p^2 make phi^j(q)
homogeneous of weight p^j, which bounds the n that reach a kept monomial.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .deltaseries import DeltaSeries1
from .fieldcore import PadicNum, PrecisionError, check_prime
from .qseries import CoeffProvider, LaurentSeries

Mono = Tuple[int, int, int]
IntPoly = Dict[Mono, int]


class IntegralityViolation(ArithmeticError):
    pass


class NonvanishingQdoubleprime(ArithmeticError):
    pass


@dataclass
class Caps:
    prec: int
    dprime_cap: int
    ddoubleprime_cap: int

    def keep(self, m: Mono) -> bool:
        return m[0] < self.prec and m[1] <= self.dprime_cap and m[2] <= self.ddoubleprime_cap


def _mul(a: IntPoly, b: IntPoly, caps: Caps) -> IntPoly:
    out: IntPoly = {}
    for (x0, x1, x2), c1 in a.items():
        for (y0, y1, y2), c2 in b.items():
            k = (x0 + y0, x1 + y1, x2 + y2)
            if caps.keep(k):
                out[k] = out.get(k, 0) + c1 * c2
    return {k: v for k, v in out.items() if v}


def _pow(a: IntPoly, n: int, caps: Caps) -> IntPoly:
    out: IntPoly = {(0, 0, 0): 1}
    base = a
    while n:
        if n & 1:
            out = _mul(out, base, caps)
        n >>= 1
        if n:
            base = _mul(base, base, caps)
    return out


def phi_powers(p: int, caps: Caps) -> Tuple[IntPoly, IntPoly]:
    """phi(q) and phi^2(q) as exact integer polynomials (truncated by caps)."""
    big = Caps(10 ** 9, 10 ** 9, 10 ** 9)
    phi_q = {(p, 0, 0): 1, (0, 1, 0): p}
    inner = _pow(phi_q, p, big)
    phi2 = dict(inner)
    phi2[(0, p, 0)] = phi2.get((0, p, 0), 0) + p
    phi2[(0, 0, 1)] = phi2.get((0, 0, 1), 0) + p * p
    return ({k: v for k, v in phi_q.items() if caps.keep(k)},
            {k: v for k, v in phi2.items() if caps.keep(k)})


@dataclass
class KnacondReport:
    i_max: int
    n_max: int
    failures: List[str] = field(default_factory=list)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {"i_max": self.i_max, "n_max": self.n_max, "checked": self.checked,
                "pass": self.passed, "failures": self.failures[:20]}


def knacond_check(a: CoeffProvider, p: int, kappa: int, i_max: int,
                  n_max: int) -> KnacondReport:
    """a_{p^i n} = a_{p^i} a_n for (n, p) = 1, and
    a_{p^(i-1)} a_p = a_{p^i} + p^(kappa+1) a_{p^(i-2)} for i >= 2."""
    need = p ** i_max * n_max
    if a.n_max < need:
        raise IndexError(f"provider covers a_1..a_{a.n_max}, need a_{need}")
    rep = KnacondReport(i_max, n_max)
    for i in range(0, i_max + 1):
        for n in range(1, n_max + 1):
            if n % p == 0:
                continue
            rep.checked += 1
            if a(p ** i * n) != a(p ** i) * a(n):
                rep.failures.append(f"a_(p^{i}*{n}) != a_(p^{i}) a_{n}")
    for i in range(2, i_max + 1):
        rep.checked += 1
        lhs = a(p ** (i - 1)) * a(p)
        rhs = a(p ** i) + p ** (kappa + 1) * a(p ** (i - 2))
        if lhs != rhs:
            rep.failures.append(f"second identity fails at i={i}")
    return rep


@dataclass
class PadicDeltaSeries2:
    p: int
    M: int
    caps: Caps
    terms: Dict[Mono, PadicNum] = field(default_factory=dict)
    min_valuation_seen: Optional[int] = None

    def nonintegral(self) -> List[Mono]:
        out = []
        for m, c in sorted(self.terms.items()):
            v = c.min_valuation()
            if v is not None and v < 0:
                out.append(m)
        return out

    def to_json(self) -> dict:
        rows = []
        for (m, m1, m2), c in sorted(self.terms.items()):
            if c.is_zero:
                continue
            rows.append({"m": m, "m1": m1, "m2": m2, "val": c.valuation, "unit": c.unit})
        return {"p": self.p, "M": self.M, "prec": self.caps.prec,
                "dprime_cap": self.caps.dprime_cap,
                "ddoubleprime_cap": self.caps.ddoubleprime_cap, "terms": rows}

    @classmethod
    def from_json(cls, d: dict) -> "PadicDeltaSeries2":
        p, M = int(d["p"]), int(d["M"])
        caps = Caps(int(d["prec"]), int(d["dprime_cap"]), int(d["ddoubleprime_cap"]))
        terms = {}
        for r in d["terms"]:
            terms[(r["m"], r["m1"], r["m2"])] = PadicNum(p, r["val"], r["unit"], M, M)
        return cls(p, M, caps, terms)


def _n_bound(p: int, caps: Caps) -> int:
    top = caps.prec - 1
    return max(top,
               top // p + caps.dprime_cap,
               (top + p * caps.dprime_cap + p * p * caps.ddoubleprime_cap) // (p * p))


def sharp2_lift(a: CoeffProvider, p: int, kappa: int, prec: int, M: int = 12,
                dprime_cap: Optional[int] = None, ddoubleprime_cap: int = 2,
                maxdenom: int = 4, check_integrality: bool = True) -> PadicDeltaSeries2:
    check_prime(p)
    caps = Caps(prec, 2 * p if dprime_cap is None else dprime_cap, ddoubleprime_cap)
    phi_q, phi2_q = phi_powers(p, caps)
    ap = a(p)
    nmax = _n_bound(p, caps)
    acc: Dict[Mono, PadicNum] = {}
    minval = None

    def add(mono: Mono, integer: int, n: int):
        nonlocal minval
        if integer == 0:
            return
        t = PadicNum.from_int(integer * a(n), p, M, maxdenom)
        t = t / PadicNum.from_int(n, p, M, maxdenom)
        t = t / PadicNum.from_int(p, p, M, maxdenom)
        v = t.min_valuation()
        if v is not None:
            minval = v if minval is None else min(minval, v)
        acc[mono] = acc[mono] + t if mono in acc else t

    pk = p ** kappa
    phi_pow: IntPoly = {(0, 0, 0): 1}
    phi2_pow: IntPoly = {(0, 0, 0): 1}
    for n in range(1, nmax + 1):
        phi_pow = _mul(phi_pow, phi_q, caps)
        phi2_pow = _mul(phi2_pow, phi2_q, caps)
        if a(n) == 0:
            continue
        for mono, c in phi2_pow.items():
            add(mono, pk * c, n)
        for mono, c in phi_pow.items():
            add(mono, -ap * c, n)
        if n < prec:
            add((n, 0, 0), p, n)
    out = PadicDeltaSeries2(p, M, caps, acc, minval)
    if check_integrality:
        bad = out.nonintegral()
        if bad:
            raise IntegralityViolation(f"non-integral coefficient at q^m q'^m1 q''^m2 = {bad[0]}")
    return out


def reduce_mod_p(F: PadicDeltaSeries2) -> DeltaSeries1:
    """Reduce mod p and rewrite in the X = q'/q^p basis.

    Every q'' monomial must vanish and q' exponents must lie in {0, 1, p}.
    """
    p = F.p
    comps: Dict[int, Dict[int, int]] = {}
    for (m, m1, m2), c in sorted(F.terms.items()):
        try:
            r = c.residue().value
        except PrecisionError as exc:
            raise IntegralityViolation(f"coefficient at {(m, m1, m2)}: {exc}") from exc
        if not r:
            continue
        if m2:
            raise NonvanishingQdoubleprime(f"q'' monomial {(m, m1, m2)} survives mod p")
        if m1 not in (0, 1, p):
            raise NonvanishingQdoubleprime(f"q'^{m1} monomial {(m, m1)} survives mod p")
        comps.setdefault(m1, {})[m + p * m1] = r
    keys = set(comps) | {m1 for m1 in (0, 1, p) if m1 <= F.caps.dprime_cap}
    out = {m1: LaurentSeries(p, comps.get(m1, {}), F.caps.prec + p * m1)
           for m1 in keys}
    return DeltaSeries1(p, out, max(2 * p, F.caps.dprime_cap))


def provider_from_recursion(p: int, kappa: int, a_p: int, base: Dict[int, int],
                            n_max: int) -> CoeffProvider:
    """Coefficients satisfying the lift conditions, built from a_p and a_n, (n,p)=1.

    a_{p^i} follows a_{p^i} = a_{p^(i-1)} a_p - p^(kappa+1) a_{p^(i-2)} and
    a_{p^i n} = a_{p^i} a_n. `base` gives a_n for n prime to p, n <= n_max.
    """
    pp = {0: 1, 1: a_p}

    def apow(i: int) -> int:
        if i not in pp:
            pp[i] = apow(i - 1) * a_p - p ** (kappa + 1) * apow(i - 2)
        return pp[i]

    def a(n: int) -> int:
        i = 0
        while n % p == 0:
            n //= p
            i += 1
        return apow(i) * base[n]

    return CoeffProvider(n_max, a, "recursion")
