"""Radial dead-core barriers and their pointwise verification.

A barrier is the radial function

    u(x) = chi*tau * [ |x - x0| - rho ]_+^p,

zero on the closed ball of radius rho around x0 (the plateau), climbing to
the datum d at |x - x0| = R = rho + T.  Off the plateau edge the barrier is
classical, so it can be checked sample-by-sample against the radial
equation: the balanced term must be matched to rounding, the other term
must be of lower order as s -> 0+.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .balance import BarrierProfile, DominantTerm, lem_worstcase_spec
from .errors import InvalidInput, SingularPoint
from .model import ModelSpec, NonlinearityKind, eval_hamiltonian, eval_nonlinearity

__all__ = [
    "RadialBarrier",
    "ResidualSample",
    "BoundaryDrift",
    "eval_profile",
    "eval_barrier",
    "ode_residual",
    "supersolution_check",
    "plateau_test",
    "boundary_barrier_chi",
    "verify_boundary_barrier",
    "write_residual_csv",
]


@dataclass(frozen=True)
class RadialBarrier:
    """A barrier profile centered at ``center`` in R^n."""

    profile: BarrierProfile
    center: np.ndarray
    dimension: int = 0

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        object.__setattr__(self, "center", center)
        dim = self.dimension or center.size
        if dim < 1 or dim != center.size:
            raise InvalidInput(f"dimension {dim} does not match center of size {center.size}")
        object.__setattr__(self, "dimension", dim)


def eval_profile(barrier: RadialBarrier, s):
    """Radial profile h(s) = chi*tau*s^p, extended by 0 for s <= 0."""
    prof = barrier.profile
    s_arr = np.asarray(s, dtype=float)
    out = prof.scale * np.maximum(s_arr, 0.0) ** prof.p
    return float(out) if np.isscalar(s) or s_arr.ndim == 0 else out


def eval_barrier(barrier: RadialBarrier, x):
    """Evaluate the barrier at point(s) x of shape (..., n).

    Exactly 0 on the plateau |x - x0| <= rho and equal to the datum at
    |x - x0| = R; the same formula extends monotonically beyond R.
    """
    x_arr = np.asarray(x, dtype=float)
    if x_arr.shape[-1] != barrier.dimension:
        raise InvalidInput(f"point of dimension {x_arr.shape[-1]}, barrier in R^{barrier.dimension}")
    radius = np.linalg.norm(x_arr - barrier.center, axis=-1)
    out = eval_profile(barrier, radius - barrier.profile.rho)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ResidualSample:
    """One pointwise check of the radial equation at s > 0."""

    s: float
    lhs: float
    balanced_rhs: float
    other_rhs: float
    residual: float

    @property
    def ratio_other_over_lhs(self) -> float:
        return self.other_rhs / self.lhs if self.lhs != 0.0 else math.inf


def _profile_derivatives(prof: BarrierProfile, s: float) -> tuple[float, float, float]:
    scale = prof.scale
    h = scale * s**prof.p
    hp = scale * prof.p * s ** (prof.p - 1.0)
    hpp = scale * prof.p * (prof.p - 1.0) * s ** (prof.p - 2.0)
    return h, hp, hpp


def _balanced_absorption_spec(spec: ModelSpec, prof: BarrierProfile) -> ModelSpec:
    """The absorption term the profile balances exactly.

    For the Lane-Emden-Matukuma weight that is the worst-case constant
    weight (1 + T^2)^(-alpha); the true weight enters only the
    supersolution margin.
    """
    if spec.nonlinearity is NonlinearityKind.LANE_EMDEN_MATUKUMA:
        return lem_worstcase_spec(spec, prof.T)
    return spec


def ode_residual(spec: ModelSpec, barrier: RadialBarrier, s_samples) -> list[ResidualSample]:
    """Check (h')^(2-beta) h'' against the balanced term at each s > 0.

    ``balanced_rhs`` is the term matched by the profile's ``dominant``
    record and must agree with the left side to rounding; ``other_rhs`` is
    the remaining term, which is of lower order near the plateau edge when
    the selection was valid.
    """
    prof = barrier.profile
    records = []
    for s in np.atleast_1d(np.asarray(s_samples, dtype=float)):
        s = float(s)
        if s == 0.0:
            raise SingularPoint("the radial equation is classical only for s > 0")
        if s < 0.0:
            raise InvalidInput(f"s must be positive, got {s}")
        h, hp, hpp = _profile_derivatives(prof, s)
        lhs = hp ** (2.0 - spec.beta) * hpp
        if prof.dominant is DominantTerm.GRADIENT:
            balanced = eval_hamiltonian(spec, h, hp)
            other = eval_nonlinearity(spec, s, h)
        else:
            balanced = eval_nonlinearity(_balanced_absorption_spec(spec, prof), s, h)
            other = eval_hamiltonian(spec, h, hp)
        records.append(
            ResidualSample(s=s, lhs=lhs, balanced_rhs=balanced, other_rhs=other, residual=lhs - balanced)
        )
    return records


def supersolution_check(
    spec: ModelSpec, barrier: RadialBarrier, s_max: float, samples: int
) -> tuple[bool, float]:
    """Is the barrier a supersolution of the full equation on (0, s_max]?

    Samples the margin c*H + lambda*f - (h')^(2-beta)h'' (true weight, both
    terms) and returns (all margins >= 0 up to rounding, worst margin).
    """
    prof = barrier.profile
    if samples < 2:
        raise InvalidInput("need at least 2 samples")
    if s_max > prof.T * (1.0 + 1e-12):
        raise InvalidInput(f"s_max = {s_max} exceeds the thickness T = {prof.T}")
    worst = math.inf
    lhs_scale = 0.0
    for i in range(1, samples + 1):
        s = s_max * i / samples
        h, hp, hpp = _profile_derivatives(prof, s)
        lhs = hp ** (2.0 - spec.beta) * hpp
        rhs = eval_hamiltonian(spec, h, hp) + eval_nonlinearity(spec, s, h)
        worst = min(worst, rhs - lhs)
        lhs_scale = max(lhs_scale, abs(lhs))
    ok = worst >= -1e-10 * max(1.0, lhs_scale)
    return ok, worst


def plateau_test(samples, profile: BarrierProfile) -> list[bool]:
    """Plateau criterion: sup over B_Rk of a candidate below chi*tau*Rk^p.

    samples is a list of (R_k, N_k) with N_k the measured supremum; any
    True entry certifies the center as a plateau point of the candidate.
    """
    out = []
    for radius, sup_val in samples:
        if radius <= 0.0:
            raise InvalidInput(f"sample radius must be positive, got {radius}")
        if sup_val < 0.0:
            raise InvalidInput(f"supremum must be nonnegative, got {sup_val}")
        out.append(bool(sup_val < profile.scale * radius**profile.p))
    return out


@dataclass(frozen=True)
class BoundaryDrift:
    """chi(x) = |x|^a - r1^a and its drift under the three Hamiltonians."""

    a: float
    chi: float
    leading: float
    gradient_power: float
    negative_mixed: float
    positive_mixed: float


def boundary_barrier_chi(
    m: float, q: float, r1: float, x, beta: float = 0.0, c: float = 1.0
) -> BoundaryDrift:
    """Boundary barrier chi(x) = |x|^a - r1^a with a = m/(2(m+q)).

    The exponent is the midpoint of the admissible interval (0, m/(m+q)).
    Returns chi and the three drift expressions

        a^(3-beta) |x|^((3-beta)a-4+beta) (a-1)  -/+  c * chi^q * (a^m |x|^((a-1)m)),

    which are negative near the sphere |x| = r1 in each form's own sign
    regime (the gradient-power expression has no chi^q factor).
    """
    if r1 <= 0.0:
        raise InvalidInput(f"r1 must be positive, got {r1}")
    if m <= 0.0 or q < 0.0:
        raise InvalidInput(f"need m > 0 and q >= 0, got m = {m}, q = {q}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    r = float(np.linalg.norm(x_arr)) if x_arr.size > 1 else float(abs(x_arr[0]))
    if r < r1:
        raise InvalidInput(f"|x| = {r} is inside the sphere of radius r1 = {r1}")
    a = m / (2.0 * (m + q))
    chi = r**a - r1**a
    leading = a ** (3.0 - beta) * r ** ((3.0 - beta) * a - 4.0 + beta) * (a - 1.0)
    grad_factor = a**m * r ** ((a - 1.0) * m)
    mixed_factor = chi**q * grad_factor
    return BoundaryDrift(
        a=a,
        chi=chi,
        leading=leading,
        gradient_power=leading - c * grad_factor,
        negative_mixed=leading + c * mixed_factor,
        positive_mixed=leading - c * mixed_factor,
    )


def verify_boundary_barrier(
    m: float,
    q: float,
    r1: float,
    beta: float = 0.0,
    c: float = 1.0,
    psi: float | None = None,
    samples: int = 33,
    max_halvings: int = 10,
) -> tuple[bool, float]:
    """Find a shell [r1, r1 + psi] on which all three drifts are <= 0.

    Starts from psi = 0.1*r1 and halves the width until the sign condition
    holds at every sample point or the halving budget is exhausted; returns
    (condition holds, final width).  The mixed expressions carry the chi^q
    factor, which vanishes on the sphere itself, so a thin enough shell
    exists whenever q > 0.
    """
    width = 0.1 * r1 if psi is None else psi
    for _ in range(max_halvings + 1):
        ok = True
        for i in range(samples):
            r = r1 + width * i / (samples - 1)
            drift = boundary_barrier_chi(m, q, r1, (r,), beta=beta, c=c)
            if drift.gradient_power > 0.0 or drift.negative_mixed > 0.0 or drift.positive_mixed > 0.0:
                ok = False
                break
        if ok:
            return True, width
        width *= 0.5
    return False, width


def write_residual_csv(records: list[ResidualSample], path) -> None:
    """Residual table with columns s, lhs, balanced_rhs, other_rhs, residual, ratio."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "lhs", "balanced_rhs", "other_rhs", "residual", "ratio_other_over_lhs"])
        for rec in records:
            writer.writerow(
                [
                    f"{rec.s:.12g}",
                    f"{rec.lhs:.12g}",
                    f"{rec.balanced_rhs:.12g}",
                    f"{rec.other_rhs:.12g}",
                    f"{rec.residual:.12g}",
                    f"{rec.ratio_other_over_lhs:.12g}",
                ]
            )
