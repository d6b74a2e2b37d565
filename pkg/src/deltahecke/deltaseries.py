"""Order-1 (and order-2) delta-series mod p in the X = q'/q^p basis.

A DeltaSeries1 holds components f_m (LaurentSeries) for f = sum_m f_m X^m.
The plain monomial basis q^j (q')^m is only used for conversion and for the
direct coefficient formula of the Hecke action.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, factorial
from typing import Dict, List, Optional, Tuple

from .fieldcore import FpElem, delta_rational, vp
from .qseries import (LaurentSeries, divisors, hecke_classical, hecke_prec, u_classical,
                      v_classical, _ceil_div)


class CapExceeded(ValueError):
    """A component index went past the series' mprime_max."""


class DeltaSeries1:
    __slots__ = ("p", "comps", "mprime_max")

    def __init__(self, p: int, components: Optional[Dict[int, LaurentSeries]] = None,
                 mprime_max: Optional[int] = None):
        self.p = p
        self.mprime_max = 2 * p if mprime_max is None else mprime_max
        comps = {}
        for m, s in (components or {}).items():
            if m < 0:
                raise ValueError("negative power of q'/q^p")
            if m > self.mprime_max:
                raise CapExceeded(f"component m'={m} exceeds mprime_max={self.mprime_max}")
            if s.p != p:
                raise ValueError("component over a different prime")
            comps[int(m)] = s
        self.comps = comps

    @classmethod
    def order0(cls, g: LaurentSeries, mprime_max: Optional[int] = None) -> "DeltaSeries1":
        return cls(g.p, {0: g}, mprime_max)

    def component(self, m: int) -> Optional[LaurentSeries]:
        return self.comps.get(m)

    def keys(self) -> List[int]:
        return sorted(self.comps)

    def items(self):
        return sorted(self.comps.items())

    def nonzero_keys(self) -> List[int]:
        return [m for m, s in self.items() if not s.is_zero()]

    def canonical(self) -> "DeltaSeries1":
        return DeltaSeries1(self.p, {m: s.canonical() for m, s in self.comps.items()
                                     if not s.is_zero()}, self.mprime_max)

    def _cap(self, other: "DeltaSeries1") -> int:
        return max(self.mprime_max, other.mprime_max)

    def __add__(self, other: "DeltaSeries1") -> "DeltaSeries1":
        if other.p != self.p:
            raise ValueError("mixing different primes")
        c = dict(self.comps)
        for m, s in other.comps.items():
            c[m] = c[m] + s if m in c else s
        return DeltaSeries1(self.p, c, self._cap(other))

    def __neg__(self) -> "DeltaSeries1":
        return DeltaSeries1(self.p, {m: -s for m, s in self.comps.items()}, self.mprime_max)

    def __sub__(self, other: "DeltaSeries1") -> "DeltaSeries1":
        return self + (-other)

    def scale(self, c: int) -> "DeltaSeries1":
        return DeltaSeries1(self.p, {m: s.scale(c) for m, s in self.comps.items()},
                            self.mprime_max)

    def __mul__(self, other):
        if isinstance(other, (int, FpElem)):
            return self.scale(int(other))
        cap = self._cap(other)
        c: Dict[int, LaurentSeries] = {}
        for a, fa in self.comps.items():
            for b, gb in other.comps.items():
                t = fa * gb
                c[a + b] = c[a + b] + t if a + b in c else t
        return DeltaSeries1(self.p, c, cap)

    __rmul__ = __mul__

    def agrees(self, other: "DeltaSeries1") -> bool:
        if other.p != self.p:
            return False
        for m in set(self.comps) | set(other.comps):
            a, b = self.comps.get(m), other.comps.get(m)
            if a is not None and b is not None:
                if not a.agrees(b):
                    return False
            elif not (a if a is not None else b).is_zero():
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, DeltaSeries1):
            return NotImplemented
        return self.agrees(other)

    __hash__ = None

    def min_prec(self) -> Optional[int]:
        return min((s.prec for s in self.comps.values()), default=None)

    def is_holomorphic(self) -> bool:
        return all(s.valuation() >= self.p * m for m, s in self.comps.items())

    def __repr__(self):
        parts = [f"({s!r})*X^{m}" for m, s in self.items()]
        return " + ".join(parts) or "0"

    def to_json(self) -> dict:
        c = self.canonical()
        return {"p": self.p,
                "components": {str(m): s.to_json() for m, s in c.items()}}

    @classmethod
    def from_json(cls, d: dict, mprime_max: Optional[int] = None) -> "DeltaSeries1":
        comps = {int(k): LaurentSeries.from_json(v) for k, v in d["components"].items()}
        p = int(d["p"])
        if mprime_max is None and comps:
            mprime_max = max(2 * p, max(comps))
        return cls(p, comps, mprime_max)


# basis conversion


@dataclass
class MonomialSeries1:
    """sum_{j, m} a_{j,m} q^j (q')^m, stored as m -> series in j."""

    p: int
    comps: Dict[int, LaurentSeries] = field(default_factory=dict)

    def agrees(self, other: "MonomialSeries1") -> bool:
        return to_x_basis(self).agrees(to_x_basis(other))


def to_monomial(f: DeltaSeries1) -> MonomialSeries1:
    p = f.p
    return MonomialSeries1(p, {m: s.shift(-p * m) for m, s in f.comps.items()})


def to_x_basis(g: MonomialSeries1, mprime_max: Optional[int] = None) -> DeltaSeries1:
    p = g.p
    if mprime_max is None:
        mprime_max = max([2 * p] + list(g.comps))
    return DeltaSeries1(p, {m: s.shift(p * m) for m, s in g.comps.items()}, mprime_max)


def basis_convert(f, direction: str):
    if direction == "to_monomial":
        return to_monomial(f)
    if direction == "from_monomial":
        return to_x_basis(f)
    raise ValueError(f"unknown direction {direction!r}")


# Hecke action away from p


def _check_n(n: int, p: int):
    if n < 1 or n % p == 0:
        raise ValueError(f"Hecke index n={n} must be positive and prime to p={p}")


def hecke_delta(f: DeltaSeries1, n: int, kappa: int, N: int) -> DeltaSeries1:
    """Componentwise n^(-m) T_{kappa+2m}(n) on f_m."""
    p = f.p
    _check_n(n, p)
    out = {}
    for m, s in f.comps.items():
        out[m] = hecke_classical(s, n, kappa + 2 * m, N).scale(pow(n, -m, p))
    return DeltaSeries1(p, out, f.mprime_max)


def hecke_delta_monomial(g: MonomialSeries1, n: int, kappa: int, N: int) -> MonomialSeries1:
    """Direct coefficient formula in the monomial basis.

    The output coefficient of q^(m - m' p) (q')^m' is
    sum_{A | (n, m)} n^(-m') eps(A) A^(kappa + 2m' - 1) a_{mn/A^2 - m'p, m'}.
    """
    p = g.p
    _check_n(n, p)
    ninv = pow(n, -1, p)
    out = {}
    for mp, s in g.comps.items():
        shift = mp * p
        prec_in = s.prec + shift            # in terms of m = j + m' p
        prec_m = hecke_prec(prec_in, n)
        low_in = s.low + shift
        m_lo = low_in * n if low_in < 0 else _ceil_div(low_in, n)
        scale = pow(ninv, mp, p)
        c = {}
        for m in range(min(m_lo, prec_m), prec_m):
            tot = 0
            for A in divisors(n):
                if (m % A) or gcd(A, N) != 1:
                    continue
                j_in = m * n // (A * A) - shift
                tot += pow(A, kappa + 2 * mp - 1, p) * s.coeff(j_in) if j_in >= s.low else 0
            if tot % p:
                c[m - shift] = tot * scale
        out[mp] = LaurentSeries(p, c, prec_m - shift, min(m_lo, prec_m) - shift)
    return MonomialSeries1(p, out)


# Frobenii, V, theta_1


def f_rel(f: DeltaSeries1) -> DeltaSeries1:
    """Relative Frobenius: q -> q^p, q' -> q'^p, so X^m -> X^(pm)."""
    p = f.p
    return DeltaSeries1(p, {p * m: v_classical(s) for m, s in f.comps.items()},
                        p * f.mprime_max)


def f_k(f: DeltaSeries1) -> DeltaSeries1:
    """Frobenius on coefficients; trivial on F_p."""
    return DeltaSeries1(f.p, dict(f.comps), f.mprime_max)


def frobenii(f: DeltaSeries1, which: str) -> DeltaSeries1:
    if which == "F_k":
        return f_k(f)
    if which == "F_rel":
        return f_rel(f)
    if which == "F":
        return f_k(f_rel(f))
    raise ValueError(f"unknown Frobenius {which!r}")


def v_delta(f: DeltaSeries1) -> DeltaSeries1:
    """V on delta-series: V(f_0) and every q' term is killed."""
    f0 = f.component(0)
    if f0 is None:
        return DeltaSeries1(f.p, {}, f.mprime_max)
    return DeltaSeries1(f.p, {0: v_classical(f0)}, f.mprime_max)


def theta1(f: DeltaSeries1) -> DeltaSeries1:
    """sum m f_m X^(m-1): theta_1 acts as d/dX since theta_1(q') = q^p mod p."""
    out = {}
    for m, s in f.comps.items():
        if m >= 1:
            out[m - 1] = s.scale(m)
    return DeltaSeries1(f.p, out, f.mprime_max)


def is_primitive(f: DeltaSeries1) -> bool:
    f0 = f.component(0)
    return f0 is None or u_classical(f0).is_zero()


@dataclass
class EchelonResult:
    accepted: bool
    phi0: Optional[LaurentSeries]
    family: Dict[int, LaurentSeries]
    offending: Optional[int] = None
    reason: str = ""


def echelon_shape_check(f: DeltaSeries1) -> EchelonResult:
    """Test the echelon shape of a holomorphic Hecke-stable candidate.

    For m >= 1 with v = v_p(m), f_m must be V^(v+1)(phi_m) and phi_m must
    start at exponent >= m / p^v.
    """
    p = f.p
    if not f.is_holomorphic():
        raise ValueError("series is not holomorphic at infinity")
    phi0 = f.component(0)
    fam = {}
    for m, s in f.items():
        if m == 0 or s.is_zero():
            continue
        v = vp(m, p)
        step = p ** (v + 1)
        bad = [e for e, _ in s.items() if e % step]
        if bad:
            return EchelonResult(False, phi0, fam, m,
                                 f"exponent {bad[0]} not divisible by {step}")
        phi = s
        for _ in range(v + 1):
            phi = u_classical(phi)
        if phi.valuation() * p ** v < m:
            return EchelonResult(False, phi0, fam, m,
                                 f"phi_{m} starts below q^{m // p ** v}")
        fam[m] = phi
    return EchelonResult(True, phi0, fam)


# order 2


class DeltaSeries2:
    """sum f_{m1,m2}(q) (q'/q^p)^m1 (q''/q^(p^2))^m2 mod p."""

    __slots__ = ("p", "comps")

    def __init__(self, p: int, components: Optional[Dict[Tuple[int, int], LaurentSeries]] = None):
        self.p = p
        self.comps = {(int(a), int(b)): s for (a, b), s in (components or {}).items()}

    @classmethod
    def from_order1(cls, f: DeltaSeries1) -> "DeltaSeries2":
        return cls(f.p, {(m, 0): s for m, s in f.comps.items()})

    def order1_part(self) -> DeltaSeries1:
        c = {a: s for (a, b), s in self.comps.items() if b == 0}
        cap = max([2 * self.p] + list(c))
        return DeltaSeries1(self.p, c, cap)

    def agrees(self, other: "DeltaSeries2") -> bool:
        for k in set(self.comps) | set(other.comps):
            a, b = self.comps.get(k), other.comps.get(k)
            if a is not None and b is not None:
                if not a.agrees(b):
                    return False
            elif not (a if a is not None else b).is_zero():
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, DeltaSeries2):
            return NotImplemented
        return self.p == other.p and self.agrees(other)

    __hash__ = None

    def to_json(self) -> dict:
        return {"p": self.p,
                "components": {f"{a},{b}": s.to_json()
                               for (a, b), s in sorted(self.comps.items())
                               if not s.is_zero()}}

    @classmethod
    def from_json(cls, d: dict) -> "DeltaSeries2":
        comps = {}
        for k, v in d["components"].items():
            a, b = k.split(",")
            comps[(int(a), int(b))] = LaurentSeries.from_json(v)
        return cls(int(d["p"]), comps)


def _multinomial(a: int, b: int, c: int) -> int:
    return factorial(a + b + c) // (factorial(a) * factorial(b) * factorial(c))


def bracket_coeffs(A: int, D: int, p: int) -> Tuple[int, int]:
    """Coefficients of X1^p and X1^(2p) in the order-2 bracket for A/D."""
    r = A * pow(D, -1, p) % p
    c1 = delta_rational(A, D, p).value * pow(r, -1, p) % p
    c2 = (r - 1) * pow(2, -1, p) % p
    return c1, c2


def hecke_delta_order2(f: DeltaSeries2, n: int, kappa: int, N: int) -> DeltaSeries2:
    """T_kappa(n) mod p on order-2 series.

    A term b q^e X1^m1 X2^m2 maps, for each A D = n with gcd(A, N) = 1 and
    D | e, to A^(kappa-1) (A/D)^(m1+m2) b q^(Ae/D) X1^m1 beta^m2 with
    beta = X2 + (delta(A/D)/(A/D)) X1^p + (1/2)(A/D - 1) X1^(2p).
    """
    p = f.p
    _check_n(n, p)
    pairs = []
    for A in divisors(n):
        if gcd(A, N) != 1:
            continue
        D = n // A
        r = A * pow(D, -1, p) % p
        c1, c2 = bracket_coeffs(A, D, p)
        pairs.append((A, D, r, c1, c2, pow(A, kappa - 1, p)))
    acc: Dict[Tuple[int, int], Dict[int, int]] = {}
    precs: Dict[Tuple[int, int], int] = {}
    lows: Dict[Tuple[int, int], int] = {}
    for (m1, m2), s in f.comps.items():
        prec_out = hecke_prec(s.prec, n)
        low_out = s.low * n if s.low < 0 else _ceil_div(s.low, n)
        expansion = []
        for a in range(m2 + 1):
            for b in range(m2 - a + 1):
                c = m2 - a - b
                expansion.append(((m1 + p * b + 2 * p * c, a), _multinomial(a, b, c), b, c))
        for key, _, _, _ in expansion:
            precs[key] = min(precs.get(key, prec_out), prec_out)
            lows[key] = min(lows.get(key, low_out), low_out)
            acc.setdefault(key, {})
        for e, be in s.items():
            for A, D, r, c1, c2, w in pairs:
                if e % D:
                    continue
                mo = A * e // D
                if mo >= prec_out:
                    continue
                base = w * pow(r, m1 + m2, p) * be % p
                for key, mult, b, c in expansion:
                    t = base * mult * pow(c1, b, p) * pow(c2, c, p) % p
                    if t:
                        d = acc[key]
                        d[mo] = d.get(mo, 0) + t
    out = {}
    for key, d in acc.items():
        pr = precs[key]
        out[key] = LaurentSeries(p, {e: v for e, v in d.items() if e < pr}, pr,
                                 min(lows[key], pr))
    return DeltaSeries2(p, out)
