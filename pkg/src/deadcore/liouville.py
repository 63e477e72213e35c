"""Growth thresholds, trichotomy classification and the counterexamples.

For the power-type absorptions every nonnegative entire solution whose
growth ratio stays strictly below the threshold constant must vanish
identically; the explicit radial power law theta*|x|^p shows the constant
is sharp.  The exponential absorption has no such threshold: constancy
follows from the oscillation criterion osc(B_R)/R -> 0 instead, and an
explicit bounded supersolution shows the solution class cannot be relaxed.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .balance import absorption_exponents, select_pair, select_profile
from .errors import InsufficientData, InvalidInput, UnsupportedForThreshold
from .model import HamiltonianKind, ModelSpec, NonlinearityKind
from .radial import shoot_bvp

__all__ = [
    "Classification",
    "GrowthThreshold",
    "LiouvilleVerdict",
    "PlateauRow",
    "threshold",
    "growth_ratio",
    "classify",
    "witness_supremum",
    "deadcore_consistency",
    "osc_criterion",
    "exp_counterexample_residuals",
    "exp_counterexample_residual",
    "thread_cap",
]


def thread_cap() -> int:
    """Worker cap for ladder evaluation, from DEADCORE_THREADS (default 1)."""
    raw = os.environ.get("DEADCORE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


class Classification(enum.Enum):
    SUBCRITICAL = "subcritical"
    AT_THRESHOLD = "at_threshold"
    ABOVE_THRESHOLD = "above_threshold"


@dataclass(frozen=True)
class GrowthThreshold:
    """Sharp growth bound: ratios below theta force the trivial solution.

    ``weight_exponent`` is alpha/(3-beta-gamma) for the Lane-Emden-Matukuma
    composite denominator |x|^p (1+|x|^2)^(-weight_exponent), None for the
    plain power denominator.
    """

    exponent: float
    theta: float
    weight_exponent: float | None = None

    def denominator(self, R: float) -> float:
        value = R**self.exponent
        if self.weight_exponent is not None:
            value *= (1.0 + R * R) ** (-self.weight_exponent)
        return value


@dataclass(frozen=True)
class LiouvilleVerdict:
    threshold: float
    growth_exponent: float
    weight_exponent: float | None
    measured_ratio: float
    classification: Classification

    @property
    def implication(self) -> str:
        if self.classification is Classification.SUBCRITICAL:
            return (
                "Liouville applies: a genuine solution with this growth estimate "
                "must vanish identically"
            )
        if self.classification is Classification.AT_THRESHOLD:
            return "at the sharp constant: the Liouville alternative is inconclusive"
        return "above the threshold: no conclusion (the bound is sharp)"


def threshold(spec: ModelSpec) -> GrowthThreshold:
    """Growth exponent and sharp constant for the spec's absorption.

    Hardy-Henon without a Hamiltonian pairs the exponent
    (4-beta+alpha)/(3-beta-gamma) with the absorption constant; with a
    Hamiltonian the profile selector picks (p, tau); the
    Lane-Emden-Matukuma form additionally divides by the weight factor
    (1+|x|^2)^(alpha/(3-beta-gamma)).
    """
    if spec.nonlinearity is NonlinearityKind.EXPONENTIAL:
        raise UnsupportedForThreshold(
            "no growth threshold for the exponential absorption; use osc_criterion"
        )
    if spec.nonlinearity is NonlinearityKind.HARDY_HENON and spec.hamiltonian is HamiltonianKind.NONE:
        pair = absorption_exponents(spec)
        return GrowthThreshold(exponent=pair.p, theta=pair.tau)
    pair, _ = select_pair(spec)
    weight_exp = None
    if spec.nonlinearity is NonlinearityKind.LANE_EMDEN_MATUKUMA:
        weight_exp = spec.alpha / (3.0 - spec.beta - spec.gamma)
    return GrowthThreshold(exponent=pair.p, theta=pair.tau, weight_exponent=weight_exp)


def growth_ratio(samples, exponent: float, lem_alpha_factor: float | None = None) -> float:
    """Estimate limsup u/denominator from ladder samples (R_k, sup_k).

    Finite data cannot certify a limsup; this returns the max of
    sup_k / denominator(R_k) over the tail half of the ladder as a
    consistent estimate.
    """
    pairs = [(float(r), float(s)) for r, s in samples]
    if len(pairs) < 3:
        raise InsufficientData(f"need at least 3 ladder samples, got {len(pairs)}")
    radii = [r for r, _ in pairs]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise InvalidInput("ladder radii must be strictly increasing")
    if any(s < 0.0 for _, s in pairs):
        raise InvalidInput("suprema must be nonnegative")
    thr = GrowthThreshold(exponent=exponent, theta=1.0, weight_exponent=lem_alpha_factor)
    tail = pairs[len(pairs) // 2 :]
    return max(s / thr.denominator(r) for r, s in tail)


def classify(spec: ModelSpec, samples, tol: float = 1e-6) -> LiouvilleVerdict:
    """Trichotomy of a candidate against the sharp constant.

    Subcritical below theta*(1-tol), AtThreshold within tol*theta,
    AboveThreshold beyond.  The subcritical verdict reports (not enforces)
    that a genuine solution must be trivial.
    """
    thr = threshold(spec)
    ratio = growth_ratio(samples, thr.exponent, thr.weight_exponent)
    if ratio < thr.theta * (1.0 - tol):
        cls = Classification.SUBCRITICAL
    elif abs(ratio - thr.theta) <= tol * thr.theta:
        cls = Classification.AT_THRESHOLD
    else:
        cls = Classification.ABOVE_THRESHOLD
    return LiouvilleVerdict(
        threshold=thr.theta,
        growth_exponent=thr.exponent,
        weight_exponent=thr.weight_exponent,
        measured_ratio=ratio,
        classification=cls,
    )


def witness_supremum(thr: GrowthThreshold, R: float, scale: float = 1.0) -> float:
    """sup over B_R of the scaled sharpness witness scale*theta*denominator."""
    return scale * thr.theta * thr.denominator(R)


@dataclass(frozen=True)
class PlateauRow:
    R: float
    datum: float
    T_predicted: float
    T_found: float
    predicted_fraction: float
    measured_fraction: float


def deadcore_consistency(
    spec: ModelSpec, R_ladder, phi: float = 0.5, steps: int = 512
) -> list[PlateauRow]:
    """Plateau fraction along a radius ladder under subcritical data.

    With boundary datum d(R) = phi*theta*R^p (phi < 1; for the composite
    Lane-Emden-Matukuma denominator the weight factor joins the datum) the
    barrier predicts a plateau of radius R*(1 - phi^(1/p)): the plateau
    fraction is constant in R, which is what drives the solution to 0 as R
    grows.  Each row reports the predicted and shot-for thickness.  Ladder
    entries are independent; DEADCORE_THREADS caps the worker pool.
    """
    if not 0.0 < phi < 1.0:
        raise InvalidInput(f"phi must lie in (0, 1), got {phi}")
    thr = threshold(spec)

    def one(R: float) -> PlateauRow:
        datum = phi * thr.theta * thr.denominator(R)
        spec_R = spec.with_(d=datum)
        profile = select_profile(spec_R, R)
        T_found, _ = shoot_bvp(spec_R, datum, (0.5 * profile.T, 1.05 * profile.T), steps=steps)
        return PlateauRow(
            R=R,
            datum=datum,
            T_predicted=profile.T,
            T_found=T_found,
            predicted_fraction=1.0 - profile.T / R,
            measured_fraction=1.0 - T_found / R,
        )

    radii = [float(r) for r in R_ladder]
    cap = thread_cap()
    if cap > 1:
        with ThreadPoolExecutor(max_workers=cap) as pool:
            return list(pool.map(one, radii))
    return [one(r) for r in radii]


def osc_criterion(samples, tol: float = 0.5) -> tuple[tuple[float, ...], bool]:
    """Oscillation ratios (sup - inf)/R and the constancy flag.

    The flag is True when the tail half of the ladder is non-increasing and
    the last ratio falls below ``tol``, i.e. the data are consistent with
    osc(B_R)/R -> 0, which forces entire solutions to be constant.
    """
    rows = [(float(r), float(s), float(i)) for r, s, i in samples]
    if len(rows) < 3:
        raise InsufficientData(f"need at least 3 ladder samples, got {len(rows)}")
    radii = [r for r, _, _ in rows]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise InvalidInput("ladder radii must be strictly increasing")
    if any(s < i for _, s, i in rows):
        raise InvalidInput("each supremum must dominate its infimum")
    ratios = tuple((s - i) / r for r, s, i in rows)
    tail = ratios[len(ratios) // 2 :]
    slack = 1e-12 * max(1.0, max(ratios))
    decreasing = all(b <= a + slack for a, b in zip(tail, tail[1:]))
    flag = decreasing and ratios[-1] < tol
    return ratios, flag


def _validate_counterexample(beta: float, m: float, alpha: float, lam: float, gamma: float):
    if not 0.0 <= beta < 2.0:
        raise InvalidInput(f"need 0 <= beta < 2, got beta = {beta}")
    if not 0.0 < m <= 2.0 - beta:
        raise InvalidInput(f"need 0 < m <= 2 - beta, got m = {m}")
    if not -1.0 < alpha <= 0.0:
        raise InvalidInput(f"need -1 < alpha <= 0, got alpha = {alpha}")
    if lam < 0.0 or gamma < 0.0:
        raise InvalidInput(f"need lambda, gamma >= 0, got {lam}, {gamma}")


def exp_counterexample_residuals(
    beta: float, m: float, alpha: float, lam: float, gamma: float, radii
) -> np.ndarray:
    """Signed residuals of the bounded supersolution u = 1 - exp(-r^2).

    Evaluates, with the coefficient a = 2^(3-beta-m-alpha),

        D_inf^beta u - a (r+1)^alpha |grad u|^m - lambda |u|^gamma e^u

    from the closed forms D_inf^beta u = 2^(3-beta) r^(2-beta)
    e^((beta-3) r^2) (1 - 2 r^2) and |grad u| = 2 r e^(-r^2).  The residual
    is <= 0 at every radius: u is a nonconstant bounded supersolution with
    osc(B_R)/R -> 0, so the constancy conclusion cannot extend to
    supersolutions.
    """
    _validate_counterexample(beta, m, alpha, lam, gamma)
    r = np.asarray(radii, dtype=float)
    if np.any(r < 0.0):
        raise InvalidInput("radii must be nonnegative")
    a = 2.0 ** (3.0 - beta - m - alpha)
    lap = 2.0 ** (3.0 - beta) * r ** (2.0 - beta) * np.exp((beta - 3.0) * r * r) * (1.0 - 2.0 * r * r)
    grad_term = a * (r + 1.0) ** alpha * (2.0 * r * np.exp(-r * r)) ** m
    u = 1.0 - np.exp(-r * r)
    upow = np.ones_like(u) if gamma == 0.0 else np.abs(u) ** gamma
    absorb = lam * upow * np.exp(u)
    return lap - grad_term - absorb


def exp_counterexample_residual(
    beta: float, m: float, alpha: float, lam: float, gamma: float, radii
) -> float:
    """Max signed residual over the radius grid (supersolution iff <= 0)."""
    return float(np.max(exp_counterexample_residuals(beta, m, alpha, lam, gamma, radii)))


def verdict_to_json(verdict: LiouvilleVerdict) -> dict:
    return {
        "threshold": verdict.threshold,
        "growth_exponent": verdict.growth_exponent,
        "weight_exponent": verdict.weight_exponent,
        "measured_ratio": verdict.measured_ratio,
        "classification": verdict.classification.value,
        "implication": verdict.implication,
    }
