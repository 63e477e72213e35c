"""Parameter space for the model equation

    D_inf^beta u = c*H(u, grad u) + lambda * f(|x|, u),

where ``D_inf^beta`` is the beta-normalized infinity Laplacian
(|grad u|^(-beta) <D^2 u grad u, grad u>, beta in [0, 2]), H is one of the
three Hamiltonian forms

    |p|^m,   -u^q |p|^m,   u^q |p|^m,

and f is one of the three absorption forms

    |x|^alpha (u+)^gamma,   (1 + |x|^2)^(-alpha) u^gamma,   |u|^gamma e^u.

The sign of c is tied to the Hamiltonian variant so that c*H >= 0 on
nonnegative functions, and the structural admissibility constraints keep
all exponent balances solvable.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, replace

from .errors import DomainError, InvalidInput, SingularPoint

__all__ = [
    "HamiltonianKind",
    "NonlinearityKind",
    "ModelSpec",
    "ValidationReport",
    "validate_admissible",
    "eval_hamiltonian",
    "eval_nonlinearity",
    "spec_to_json",
    "spec_from_json",
]


class HamiltonianKind(enum.Enum):
    """First-order term variants; values double as wire-format names."""

    NONE = "none"
    GRADIENT_POWER = "gradient_power"
    NEGATIVE_MIXED = "negative_mixed"
    POSITIVE_MIXED = "positive_mixed"


class NonlinearityKind(enum.Enum):
    """Zeroth-order absorption variants; values double as wire-format names."""

    HARDY_HENON = "hardy_henon"
    LANE_EMDEN_MATUKUMA = "lane_emden_matukuma"
    EXPONENTIAL = "exponential"


_NUMERIC_FIELDS = ("beta", "m", "q", "gamma", "alpha", "lam", "c", "d")


@dataclass(frozen=True)
class ModelSpec:
    """Full parameter tuple of the model equation.

    ``lam`` is the absorption strength (Thiele modulus); it serializes under
    the JSON key ``"lambda"``.  A mixed Hamiltonian with q = 0 is the plain
    gradient power, so it is normalized to ``GRADIENT_POWER`` at construction
    (flipping the sign of c for the negative-mixed form, whose c < 0).
    """

    beta: float = 0.0
    m: float = 1.0
    q: float = 0.0
    gamma: float = 0.0
    alpha: float = 0.0
    lam: float = 1.0
    c: float = 1.0
    d: float = 1.0
    hamiltonian: HamiltonianKind = HamiltonianKind.NONE
    nonlinearity: NonlinearityKind = NonlinearityKind.HARDY_HENON

    def __post_init__(self):
        for name in _NUMERIC_FIELDS:
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise InvalidInput(f"{name} must be a finite number, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not isinstance(self.hamiltonian, HamiltonianKind):
            object.__setattr__(self, "hamiltonian", HamiltonianKind(self.hamiltonian))
        if not isinstance(self.nonlinearity, NonlinearityKind):
            object.__setattr__(self, "nonlinearity", NonlinearityKind(self.nonlinearity))
        if self.q == 0.0 and self.hamiltonian is HamiltonianKind.NEGATIVE_MIXED:
            object.__setattr__(self, "hamiltonian", HamiltonianKind.GRADIENT_POWER)
            object.__setattr__(self, "c", -self.c)
        elif self.q == 0.0 and self.hamiltonian is HamiltonianKind.POSITIVE_MIXED:
            object.__setattr__(self, "hamiltonian", HamiltonianKind.GRADIENT_POWER)

    def with_(self, **changes) -> "ModelSpec":
        return replace(self, **changes)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of the structural admissibility check."""

    violations: tuple[str, ...]

    @property
    def admissible(self) -> bool:
        return not self.violations


def validate_admissible(spec: ModelSpec) -> ValidationReport:
    """Check every structural inequality of the model against ``spec``.

    Returns a report listing each violated constraint together with the
    offending values; the spec is admissible iff the list is empty.  Pure
    and idempotent.
    """
    v: list[str] = []
    beta, m, q, gamma, alpha = spec.beta, spec.m, spec.q, spec.gamma, spec.alpha

    if not 0.0 <= beta <= 2.0:
        v.append(f"0 <= beta <= 2 fails: beta = {beta}")
    if spec.lam <= 0.0:
        v.append(f"lambda > 0 fails: lambda = {spec.lam}")
    if spec.d <= 0.0:
        v.append(f"d > 0 fails: d = {spec.d}")
    if gamma < 0.0:
        v.append(f"gamma >= 0 fails: gamma = {gamma}")
    if q < 0.0:
        v.append(f"q >= 0 fails: q = {q}")

    has_gradient = spec.hamiltonian is not HamiltonianKind.NONE
    if has_gradient:
        if spec.hamiltonian is HamiltonianKind.NEGATIVE_MIXED:
            if spec.c >= 0.0:
                v.append(f"c < 0 required for the negative mixed form: c = {spec.c}")
        elif spec.c <= 0.0:
            v.append(f"c > 0 required for {spec.hamiltonian.value}: c = {spec.c}")

    kind = spec.nonlinearity
    if kind is NonlinearityKind.EXPONENTIAL:
        if spec.hamiltonian is not HamiltonianKind.GRADIENT_POWER:
            v.append(
                "exponential absorption requires the gradient-power Hamiltonian: "
                f"hamiltonian = {spec.hamiltonian.value}"
            )
        if not 0.0 < m <= 2.0 - beta:
            v.append(f"0 < m <= 2 - beta fails: m = {m}, 2 - beta = {2.0 - beta}")
        if not -1.0 < alpha <= 0.0:
            v.append(f"-1 < alpha <= 0 fails: alpha = {alpha}")
        return ValidationReport(tuple(v))

    # power-type absorptions (Hardy-Henon and Lane-Emden-Matukuma)
    if has_gradient:
        if not 0.0 < m < 3.0 - beta:
            v.append(f"0 < m < 3 - beta fails: m = {m}, 3 - beta = {3.0 - beta}")
        if not m + q + beta < 3.0:
            v.append(f"m + q + beta < 3 fails: {m + q + beta} >= 3")
    if not gamma < 3.0 - beta:
        v.append(f"gamma < 3 - beta fails: gamma = {gamma}, 3 - beta = {3.0 - beta}")

    if kind is NonlinearityKind.HARDY_HENON:
        if not alpha > -1.0 - gamma:
            v.append(f"alpha > -1 - gamma fails: alpha = {alpha}, -1 - gamma = {-1.0 - gamma}")
    else:  # Lane-Emden-Matukuma
        m_eff = m if has_gradient else 0.0
        bound = (4.0 - beta - m_eff) * (3.0 - beta - gamma) / (2.0 * (3.0 - beta - m_eff))
        if not 0.0 <= alpha < bound:
            v.append(
                "0 <= alpha < (4-beta-m)(3-beta-gamma)/(2(3-beta-m)) fails: "
                f"alpha = {alpha}, bound = {bound}"
            )
    return ValidationReport(tuple(v))


def _power(base: float, expo: float) -> float:
    """base**expo guarding against complex results from negative bases."""
    if base < 0.0 and expo != math.floor(expo):
        raise DomainError(f"negative base {base} under non-integer power {expo}")
    return base**expo


def eval_hamiltonian(spec: ModelSpec, u_val: float, grad_norm: float) -> float:
    """Evaluate c*H(u, grad u) for the spec's variant.

    Under the sign conventions (c < 0 exactly for the negative mixed form)
    the returned value is >= 0 whenever u_val >= 0 and grad_norm >= 0.
    """
    if grad_norm < 0.0:
        raise InvalidInput(f"grad_norm must be >= 0, got {grad_norm}")
    kind = spec.hamiltonian
    if kind is HamiltonianKind.NONE:
        return 0.0
    gterm = grad_norm**spec.m
    if kind is HamiltonianKind.GRADIENT_POWER:
        return spec.c * gterm
    upow = _power(u_val, spec.q)
    if kind is HamiltonianKind.NEGATIVE_MIXED:
        return -spec.c * upow * gterm
    return spec.c * upow * gterm


def eval_nonlinearity(spec: ModelSpec, radius_shift: float, u_val: float) -> float:
    """Evaluate lambda * f(radius_shift, u_val) for the spec's variant.

    ``radius_shift`` is the (already positive-part) radial argument; callers
    sitting on a shifted annulus pass (|x - x0| - rho)+ themselves.  For the
    Hardy-Henon form the positive part (u+)^gamma is defined as 0 whenever
    u <= 0, *including* gamma = 0, so that a plateau (u = 0) has zero
    right-hand side.
    """
    s = radius_shift
    if s < 0.0:
        raise InvalidInput(f"radius_shift must be >= 0, got {s}")
    kind = spec.nonlinearity
    if kind is NonlinearityKind.HARDY_HENON:
        if s == 0.0 and spec.alpha < 0.0:
            raise SingularPoint("Hardy-Henon weight |x|^alpha is singular at 0 for alpha < 0")
        pos = 0.0 if u_val <= 0.0 else u_val**spec.gamma
        return spec.lam * s**spec.alpha * pos
    if kind is NonlinearityKind.LANE_EMDEN_MATUKUMA:
        weight = (1.0 + s * s) ** (-spec.alpha)
        upow = 1.0 if spec.gamma == 0.0 else _power(u_val, spec.gamma)
        return spec.lam * weight * upow
    # exponential: |u|^gamma e^u with the 0^0 = 1 convention
    upow = 1.0 if spec.gamma == 0.0 else abs(u_val) ** spec.gamma
    return spec.lam * upow * math.exp(u_val)


def spec_to_json(spec: ModelSpec) -> dict:
    """Flat key-value document for a ModelSpec (``lam`` -> ``"lambda"``)."""
    return {
        "beta": spec.beta,
        "m": spec.m,
        "q": spec.q,
        "gamma": spec.gamma,
        "alpha": spec.alpha,
        "lambda": spec.lam,
        "c": spec.c,
        "d": spec.d,
        "hamiltonian": spec.hamiltonian.value,
        "nonlinearity": spec.nonlinearity.value,
    }


def spec_from_json(doc: dict) -> ModelSpec:
    """Inverse of :func:`spec_to_json`; unknown keys are rejected."""
    known = {"beta", "m", "q", "gamma", "alpha", "lambda", "c", "d", "hamiltonian", "nonlinearity"}
    extra = set(doc) - known
    if extra:
        raise InvalidInput(f"unknown spec keys: {sorted(extra)}")
    kwargs = {k: doc[k] for k in ("beta", "m", "q", "gamma", "alpha", "c", "d") if k in doc}
    if "lambda" in doc:
        kwargs["lam"] = doc["lambda"]
    if "hamiltonian" in doc:
        kwargs["hamiltonian"] = HamiltonianKind(doc["hamiltonian"])
    if "nonlinearity" in doc:
        kwargs["nonlinearity"] = NonlinearityKind(doc["nonlinearity"])
    return ModelSpec(**kwargs)


def load_spec(path) -> ModelSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return spec_from_json(json.load(fh))
