"""Delta-p-symmetric series: structure detection and the closed-form "pU", "pT(p)".

A recognized series has the shape
    f = phi_0 + sum_s V^(s+1)(phi_{p^s}) X^(p^s),     X = q'/q^p,
and the operator is
    "pU" f = -sum_s V^s(phi_{p^s}^(-1)) + sum_s V^(s+1)(U phi_{p^s}) X^(p^s).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from .deltaseries import DeltaSeries1, v_delta
from .qseries import LaurentSeries, theta_inv_part, u_classical, v_classical


class NotSymmetric(ValueError):
    """The series is not in the recognized delta-p-symmetric form."""


def p_power_exponent(m: int, p: int) -> Optional[int]:
    """s with m = p^s, or None."""
    if m < 1:
        return None
    s = 0
    while m % p == 0:
        m //= p
        s += 1
    return s if m == 1 else None


@dataclass
class SymmetricProfile:
    p: int
    phi0: Optional[LaurentSeries]
    phis: Dict[int, LaurentSeries] = field(default_factory=dict)   # s -> phi_{p^s}
    taylor: bool = False
    mprime_max: Optional[int] = None

    def to_series(self) -> DeltaSeries1:
        p = self.p
        comps = {}
        if self.phi0 is not None:
            comps[0] = self.phi0
        for s, phi in self.phis.items():
            comps[p ** s] = v_classical(phi, s + 1)
        cap = self.mprime_max
        if cap is None:
            cap = max([2 * p] + list(comps))
        return DeltaSeries1(p, comps, cap)


def structure_decompose(f: DeltaSeries1) -> Optional[SymmetricProfile]:
    """Profile of f if it has the recognized shape, else None."""
    p = f.p
    phis = {}
    for m, comp in f.items():
        if m == 0:
            continue
        if comp.is_zero():
            continue
        s = p_power_exponent(m, p)
        if s is None:
            return None
        step = p ** (s + 1)
        if any(e % step for e, _ in comp.items()):
            return None
        phi = comp
        for _ in range(s + 1):
            phi = u_classical(phi)
        phis[s] = phi
    phi0 = f.component(0)
    taylor = ((phi0 is None or phi0.valuation() >= 0)
              and all(phi.valuation() >= 1 for phi in phis.values()))
    return SymmetricProfile(p, phi0, phis, taylor, f.mprime_max)


def _profile_or_raise(f: DeltaSeries1) -> SymmetricProfile:
    prof = structure_decompose(f)
    if prof is None:
        raise NotSymmetric("series is not in the recognized symmetric form")
    return prof


def pu(f: DeltaSeries1) -> DeltaSeries1:
    p = f.p
    prof = _profile_or_raise(f)
    out: Dict[int, LaurentSeries] = {}
    zero_part = None
    for s, phi in sorted(prof.phis.items()):
        t = v_classical(theta_inv_part(phi), s) if s else theta_inv_part(phi)
        zero_part = -t if zero_part is None else zero_part - t
        out[p ** s] = v_classical(u_classical(phi), s + 1)
    if zero_part is None:
        f0 = f.component(0)
        # pU vanishes on order-0 series; keep the order-0 precision
        zero_part = LaurentSeries.zero(p, f0.prec) if f0 is not None else None
    if zero_part is not None:
        out[0] = zero_part
    return DeltaSeries1(p, out, f.mprime_max)


def pu_monomial(n: int, s: int, p: int, prec: Optional[int] = None) -> DeltaSeries1:
    """pU of q^(n p^(s+1)) (q')^(p^s), i.e. of q^((n+1)p^(s+1)) X^(p^s).

    Returns q^((n+1)p^s) X^(p^s) if p | n+1, else -q^((n+1)p^s)/(n+1).
    """
    e = (n + 1) * p ** s
    if prec is None:
        prec = e + 1
    if (n + 1) % p == 0:
        comps = {p ** s: LaurentSeries(p, {e: 1}, prec)}
    else:
        comps = {0: LaurentSeries(p, {e: -pow(n + 1, -1, p)}, prec)}
    return DeltaSeries1(p, comps, max(2 * p, p ** s))


def pu_input_monomial(n: int, s: int, p: int, prec: Optional[int] = None) -> DeltaSeries1:
    """The series q^(n p^(s+1)) (q')^(p^s) in the X basis."""
    e = (n + 1) * p ** (s + 1)
    if prec is None:
        prec = e + 1
    return DeltaSeries1(p, {p ** s: LaurentSeries(p, {e: 1}, prec)}, max(2 * p, p ** s))


def ptp(f: DeltaSeries1, kappa: int) -> DeltaSeries1:
    """"pT_kappa(p)" = "pU" + [kappa = 0] V."""
    if kappa < 0:
        raise ValueError("kappa must be >= 0")
    out = pu(f)
    if kappa == 0:
        out = out + v_delta(f)
    return out


@dataclass
class EigenConditionReport:
    cond1: Dict[int, bool]
    cond2: bool
    direct: bool

    @property
    def conditions(self) -> bool:
        return all(self.cond1.values()) and self.cond2

    @property
    def consistent(self) -> bool:
        return self.conditions == self.direct

    def to_json(self) -> dict:
        return {"cond1": {str(s): ok for s, ok in sorted(self.cond1.items())},
                "cond2": self.cond2, "direct": self.direct,
                "consistent": self.consistent}


def eigen_conditions_voce2(f: DeltaSeries1, kappa: int, lambda_p: int) -> EigenConditionReport:
    """The two component conditions for "pT(p)" f = lambda_p f, and the direct test."""
    prof = _profile_or_raise(f)
    cond1 = {s: u_classical(phi).agrees(phi.scale(lambda_p))
             for s, phi in prof.phis.items()}
    phi0 = prof.phi0
    lhs = None
    if kappa == 0 and phi0 is not None:
        lhs = v_classical(phi0)
    for s, phi in sorted(prof.phis.items()):
        t = v_classical(theta_inv_part(phi), s)
        lhs = -t if lhs is None else lhs - t
    if phi0 is None:
        rhs = None
    else:
        rhs = phi0.scale(lambda_p)
    if lhs is None and rhs is None:
        cond2 = True
    elif lhs is None:
        cond2 = rhs.is_zero()
    elif rhs is None:
        cond2 = lhs.is_zero()
    else:
        cond2 = lhs.agrees(rhs)
    direct = ptp(f, kappa).agrees(f.scale(lambda_p))
    return EigenConditionReport(cond1, cond2, direct)
