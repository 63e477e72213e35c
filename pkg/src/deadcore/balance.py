"""Exponent balancing for the radial power-law ansatz h(s) = tau * s^p.

Substituting h = tau*s^p into the radial equation

    (h')^(2-beta) h'' = c*H(h, h') + lambda * w(s) * h^gamma

turns each right-hand term into a single power of s.  Matching the
left-hand side against one term at a time yields a 2x2 system per term
(one equation for the exponent of s, one for the constant):

    exponents:  (p-2) + (p-1)(2-beta) = <term exponent>
    constants:  tau^(3-beta) p^(3-beta) (p-1) = <term constant>

This module solves those systems in closed form, selects the profile with
the smaller exponent (that term is balanced exactly; the other must be of
lower order as s -> 0+), and computes the dead-core thickness T from the
boundary condition h(T) = d.  For the Lane-Emden-Matukuma weight the
thickness solves an implicit equation because the worst-case constant
weight (1 + T^2)^(-alpha) itself depends on T.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import DegenerateBalance, InvalidInput, NoDeadCore, SignError, TieUnresolved
from .model import HamiltonianKind, ModelSpec, NonlinearityKind

__all__ = [
    "BalanceSource",
    "DominantTerm",
    "BalancePair",
    "BarrierProfile",
    "absorption_exponents",
    "gradient_exponents",
    "select_pair",
    "select_profile",
    "thickness",
    "lem_worstcase_spec",
    "profile_to_json",
    "profile_from_json",
]

_THICKNESS_TOL = 1e-12


class BalanceSource(enum.Enum):
    ABSORPTION = "absorption"
    GRADIENT = "gradient"


class DominantTerm(enum.Enum):
    """Which right-hand term the selected profile balances exactly."""

    ABSORPTION = "absorption"
    GRADIENT = "gradient"
    EXACT_BALANCE = "exact_balance"


@dataclass(frozen=True)
class BalancePair:
    """Exponent/scale pair solving one single-term balance system."""

    p: float
    tau: float
    source: BalanceSource

    def __post_init__(self):
        if not self.p > 1.0:
            raise DegenerateBalance(f"balanced exponent must exceed 1, got p = {self.p}")
        if not self.tau > 0.0:
            raise DegenerateBalance(f"balanced scale must be positive, got tau = {self.tau}")


@dataclass(frozen=True)
class BarrierProfile:
    """Selected profile h(s) = chi*tau*s^p with thickness T and plateau rho.

    ``chi`` is 1 except for an absorption-dominant Lane-Emden-Matukuma
    profile, where it carries the worst-case weight factor
    (1 + T^2)^(-alpha/(3-beta-gamma)).
    """

    p: float
    tau: float
    T: float
    rho: float
    R: float
    chi: float
    dominant: DominantTerm

    @property
    def scale(self) -> float:
        """Overall coefficient of s^p (chi * tau)."""
        return self.chi * self.tau


def absorption_exponents(spec: ModelSpec) -> BalancePair:
    """Balance the degenerate second-order side against the absorption term.

    Hardy-Henon:  p = (4-beta+alpha)/(3-beta-gamma) and

        tau = [lambda (3-beta-gamma)^(4-beta)
               / ((4-beta+alpha)^(3-beta) (1+alpha+gamma))]^(1/(3-beta-gamma)).

    Lane-Emden-Matukuma uses the alpha-free analogue (the weight is handled
    separately through the worst-case factor chi), i.e. the same formulas
    with alpha = 0 and root index 3-beta-gamma.
    """
    beta, gamma, lam = spec.beta, spec.gamma, spec.lam
    idx = 3.0 - beta - gamma
    if idx <= 0.0:
        raise DegenerateBalance(f"root index 3 - beta - gamma = {idx} is not positive")
    if spec.nonlinearity is NonlinearityKind.HARDY_HENON:
        alpha = spec.alpha
    elif spec.nonlinearity is NonlinearityKind.LANE_EMDEN_MATUKUMA:
        alpha = 0.0
    else:
        raise InvalidInput("no absorption balance for the exponential nonlinearity")
    if 1.0 + alpha + gamma <= 0.0:
        raise DegenerateBalance(f"1 + alpha + gamma = {1.0 + alpha + gamma} is not positive")
    top = 4.0 - beta + alpha
    if top <= 0.0:
        raise DegenerateBalance(f"4 - beta + alpha = {top} is not positive")
    p = top / idx
    tau = (lam * idx ** (4.0 - beta) / (top ** (3.0 - beta) * (1.0 + alpha + gamma))) ** (1.0 / idx)
    return BalancePair(p=p, tau=tau, source=BalanceSource.ABSORPTION)


def gradient_exponents(spec: ModelSpec) -> BalancePair:
    """Balance the degenerate second-order side against the gradient term.

    Gradient power |h'|^m:

        p = (4-m-beta)/(3-m-beta),
        tau = [c (3-m-beta)^(4-m-beta) / (4-m-beta)^(3-m-beta)]^(1/(3-m-beta)).

    Mixed forms (+/-) h^q |h'|^m with effective coefficient c' = |c|:

        p = (4-m-beta)/(3-m-beta-q),
        tau = [c' (3-m-beta-q)^(4-m-beta)
               / ((4-m-beta)^(3-beta-m) (1+q))]^(1/(3-m-beta-q)),

    which is the exact solution of the constant-matching equation
    tau^(3-beta) p^(3-beta) (p-1) = c' tau^(q+m) p^m.
    """
    kind = spec.hamiltonian
    if kind is HamiltonianKind.NONE:
        raise InvalidInput("no gradient balance without a Hamiltonian term")
    beta, m, q = spec.beta, spec.m, spec.q
    top = 4.0 - m - beta
    if kind is HamiltonianKind.GRADIENT_POWER:
        if spec.c <= 0.0:
            raise SignError(f"gradient-power form needs c > 0, got c = {spec.c}")
        idx = 3.0 - m - beta
        if idx <= 0.0:
            raise DegenerateBalance(f"root index 3 - m - beta = {idx} is not positive")
        p = top / idx
        tau = (spec.c * idx**top / top**idx) ** (1.0 / idx)
        return BalancePair(p=p, tau=tau, source=BalanceSource.GRADIENT)

    c_eff = -spec.c if kind is HamiltonianKind.NEGATIVE_MIXED else spec.c
    if c_eff <= 0.0:
        raise SignError(
            f"{kind.value} form needs {'c < 0' if kind is HamiltonianKind.NEGATIVE_MIXED else 'c > 0'},"
            f" got c = {spec.c}"
        )
    idx = 3.0 - m - beta - q
    if idx <= 0.0:
        raise DegenerateBalance(f"root index 3 - m - beta - q = {idx} is not positive")
    p = top / idx
    tau = (c_eff * idx**top / (top ** (3.0 - beta - m) * (1.0 + q))) ** (1.0 / idx)
    return BalancePair(p=p, tau=tau, source=BalanceSource.GRADIENT)


def select_pair(spec: ModelSpec) -> tuple[BalancePair, DominantTerm]:
    """Pick the profile with the smaller exponent among the two balances.

    Without a Hamiltonian the absorption pair stands alone and the profile
    solves the single-term equation exactly.  A tie p1 = p2 is refused: no
    single power law balances both terms at once.
    """
    absorption = absorption_exponents(spec)
    if spec.hamiltonian is HamiltonianKind.NONE:
        return absorption, DominantTerm.EXACT_BALANCE
    gradient = gradient_exponents(spec)
    p1, p2 = gradient.p, absorption.p
    if abs(p1 - p2) <= 1e-12 * max(1.0, abs(p1), abs(p2)):
        raise TieUnresolved(f"gradient and absorption exponents coincide: p = {p1}")
    if p1 < p2:
        return gradient, DominantTerm.GRADIENT
    return absorption, DominantTerm.ABSORPTION


def _solve_lem_thickness(tau: float, p: float, weight_exp: float, d: float) -> float:
    """Root of tau * (1 + T^2)^(-weight_exp) * T^p = d by bracketed bisection.

    The left side is strictly increasing when p > 2*weight_exp, so a unique
    root exists and is bracketed by expanding upward from the weight-free
    thickness (d/tau)^(1/p).
    """
    if p <= 2.0 * weight_exp:
        raise DegenerateBalance(
            f"thickness equation unbounded: p = {p} <= 2*alpha/(3-beta-gamma) = {2.0 * weight_exp}"
        )

    def shortfall(T: float) -> float:
        return tau * (1.0 + T * T) ** (-weight_exp) * T**p - d

    lo = hi = (d / tau) ** (1.0 / p)
    for _ in range(200):
        if shortfall(hi) > 0.0:
            break
        lo = hi
        hi *= 2.0
    else:  # pragma: no cover - excluded by the p > 2*weight_exp guard
        raise DegenerateBalance("failed to bracket the thickness equation")
    while hi - lo > _THICKNESS_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if shortfall(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _thickness_and_chi(spec: ModelSpec, pair: BalancePair, dominant: DominantTerm) -> tuple[float, float]:
    if (
        spec.nonlinearity is NonlinearityKind.LANE_EMDEN_MATUKUMA
        and dominant is not DominantTerm.GRADIENT
        and spec.alpha != 0.0
    ):
        weight_exp = spec.alpha / (3.0 - spec.beta - spec.gamma)
        T = _solve_lem_thickness(pair.tau, pair.p, weight_exp, spec.d)
        return T, (1.0 + T * T) ** (-weight_exp)
    return (spec.d / pair.tau) ** (1.0 / pair.p), 1.0


def thickness(spec: ModelSpec) -> float:
    """Dead-core thickness T solving h(T) = d for the selected profile."""
    pair, dominant = select_pair(spec)
    return _thickness_and_chi(spec, pair, dominant)[0]


def select_profile(spec: ModelSpec, R: float) -> BarrierProfile:
    """Full barrier profile on a ball of radius R with boundary datum spec.d.

    The thickness is T = (d/tau)^(1/p) except for an absorption-dominant
    Lane-Emden-Matukuma profile, where T solves the implicit equation
    chi(T)*tau*T^p = d with chi(T) = (1+T^2)^(-alpha/(3-beta-gamma)).
    Requires the dead-core compatibility R > T.
    """
    if not R > 0.0:
        raise InvalidInput(f"R must be positive, got {R}")
    pair, dominant = select_pair(spec)
    T, chi = _thickness_and_chi(spec, pair, dominant)
    if R <= T:
        raise NoDeadCore(f"compatibility R > T fails: R = {R}, T = {T}")
    return BarrierProfile(p=pair.p, tau=pair.tau, T=T, rho=R - T, R=R, chi=chi, dominant=dominant)


def lem_worstcase_spec(spec: ModelSpec, T: float) -> ModelSpec:
    """Constant-weight companion of a Lane-Emden-Matukuma spec.

    Freezes the weight at its infimum over (0, T], i.e. replaces
    lambda*(1+s^2)^(-alpha) by the constant lambda*(1+T^2)^(-alpha), and
    rewrites the result as a weight-free Hardy-Henon spec (alpha = 0).
    """
    if spec.nonlinearity is not NonlinearityKind.LANE_EMDEN_MATUKUMA:
        raise InvalidInput("worst-case reduction only applies to the Lane-Emden-Matukuma form")
    lam_eff = spec.lam * (1.0 + T * T) ** (-spec.alpha)
    return spec.with_(nonlinearity=NonlinearityKind.HARDY_HENON, alpha=0.0, lam=lam_eff)


def profile_to_json(profile: BarrierProfile) -> dict:
    return {
        "p": profile.p,
        "tau": profile.tau,
        "T": profile.T,
        "rho": profile.rho,
        "R": profile.R,
        "chi": profile.chi,
        "dominant": profile.dominant.value,
    }


def profile_from_json(doc: dict) -> BarrierProfile:
    return BarrierProfile(
        p=float(doc["p"]),
        tau=float(doc["tau"]),
        T=float(doc["T"]),
        rho=float(doc["rho"]),
        R=float(doc["R"]),
        chi=float(doc["chi"]),
        dominant=DominantTerm(doc["dominant"]),
    )
