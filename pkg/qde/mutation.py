"""
Differential mutation operators acting on single quaternions.

Every operator turns donor quaternions drawn from the population into one
mutant quaternion. Euclidean operators (ESD, EGSD) add a scaled difference,
polar operators (PM1, PM3, PM13) rotate a donor with a rotor derived from two
donors, and RQ rotates a donor at random.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .config import (
    DEFAULT_EGSD_RANGE,
    DEFAULT_ESD_ALPHA,
    DEFAULT_POLAR_ALPHA,
    DEFAULT_POLAR_BETA,
    STRATEGIES,
)
from .errors import UnknownStrategy
from .quaternion import (
    Quaternion,
    conjugate_by,
    random_quaternion_uniform,
    random_unit_quaternion,
    rotation_between,
    sandwich,
)


class Strategy(str, Enum):
    ESD = 'ESD'
    EGSD = 'EGSD'
    PM1 = 'PM1'
    PM3 = 'PM3'
    PM13 = 'PM13'
    RQ = 'RQ'

    def __str__(self):
        return self.value


def parse_strategy(value) -> Strategy:
    """
    Maps a tag such as 'PM3' to its Strategy.

    Raises:
        UnknownStrategy: If the tag is not one of STRATEGIES
    """
    if isinstance(value, Strategy):
        return value
    try:
        return Strategy(str(value).strip())
    except ValueError:
        raise UnknownStrategy(str(value), STRATEGIES) from None


@dataclass(frozen=True)
class MutationSpec:
    """Strategy tag with its scale factors and the EGSD component range."""

    strategy: Strategy
    alpha: float = DEFAULT_ESD_ALPHA
    beta: float = DEFAULT_POLAR_BETA
    egsd_component_range: Tuple[float, float] = DEFAULT_EGSD_RANGE

    def __post_init__(self):
        object.__setattr__(self, 'strategy', parse_strategy(self.strategy))
        if not math.isfinite(self.alpha) or self.alpha <= 0:
            raise ValueError(f"alpha must be finite and > 0, got {self.alpha}")
        if not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta}")
        lo, hi = self.egsd_component_range
        if not lo < hi:
            raise ValueError(f"egsd_component_range must satisfy lo < hi, got {self.egsd_component_range}")

    @classmethod
    def default(cls, strategy) -> 'MutationSpec':
        """Engine defaults: alpha 0.5 for ESD, alpha 1 and beta 0.5 for polar rotors."""
        strategy = parse_strategy(strategy)
        if strategy in (Strategy.PM1, Strategy.PM3, Strategy.PM13):
            return cls(strategy, alpha=DEFAULT_POLAR_ALPHA, beta=DEFAULT_POLAR_BETA)
        return cls(strategy)

    def to_dict(self) -> Dict[str, object]:
        return {
            'strategy': self.strategy.value,
            'alpha': self.alpha,
            'beta': self.beta,
            'egsd_component_range': list(self.egsd_component_range),
        }


def mutate_esd(q1: Quaternion, q2: Quaternion, q3: Quaternion, alpha: float) -> Quaternion:
    """Euclidean sum of differences: q3 + alpha * (q2 - q1)."""
    return q3 + (q2 - q1).scale(alpha)


def mutate_egsd(q1: Quaternion, q2: Quaternion, q3: Quaternion, qr: Quaternion) -> Quaternion:
    """
    Generalized sum of differences: q3 + qr * (q2 - q1) with the Hamilton
    product. Reduces to ESD when qr is real.
    """
    return q3 + qr * (q2 - q1)


def polar_rotor(q1: Quaternion, q2: Quaternion, alpha: float, beta: float) -> Quaternion:
    """
    Rotor alpha * (cos(beta*theta) + sin(beta*theta) * n) built from the
    rotation between the imaginary parts of q1 and q2.

    Degenerate geometry (parallel or zero imaginary parts) yields (alpha, 0, 0, 0).
    """
    rotation = rotation_between(q1, q2)
    if rotation.degenerate:
        return Quaternion(alpha, 0.0, 0.0, 0.0)
    half = beta * rotation.angle
    s = alpha * math.sin(half)
    return Quaternion(
        alpha * math.cos(half),
        s * rotation.axis[0],
        s * rotation.axis[1],
        s * rotation.axis[2],
    )


def mutate_pm1(q1: Quaternion, q2: Quaternion, alpha: float, beta: float) -> Quaternion:
    """Exploitation: qr * q1 * conj(qr). The rotor is not renormalized."""
    return conjugate_by(polar_rotor(q1, q2, alpha, beta), q1)


def mutate_pm3(q1: Quaternion, q2: Quaternion, q3: Quaternion, alpha: float, beta: float) -> Quaternion:
    """Exploration: qr * q3 * conj(qr)."""
    return conjugate_by(polar_rotor(q1, q2, alpha, beta), q3)


def mutate_pm13(q1: Quaternion, q2: Quaternion, q3: Quaternion, alpha: float, beta: float) -> Quaternion:
    """q3 + qr * q1 * conj(qr)."""
    return q3 + mutate_pm1(q1, q2, alpha, beta)


def mutate_rq(q1: Quaternion, rng: np.random.Generator) -> Quaternion:
    """Random rotation of q1 by a unit rotor; keeps norm and real part of q1."""
    return sandwich(random_unit_quaternion(rng), q1)


def _apply_esd(spec, q1, q2, q3, rng):
    return mutate_esd(q1, q2, q3, spec.alpha)


def _apply_egsd(spec, q1, q2, q3, rng):
    lo, hi = spec.egsd_component_range
    return mutate_egsd(q1, q2, q3, random_quaternion_uniform(rng, lo, hi))


def _apply_pm1(spec, q1, q2, q3, rng):
    return mutate_pm1(q1, q2, spec.alpha, spec.beta)


def _apply_pm3(spec, q1, q2, q3, rng):
    return mutate_pm3(q1, q2, q3, spec.alpha, spec.beta)


def _apply_pm13(spec, q1, q2, q3, rng):
    return mutate_pm13(q1, q2, q3, spec.alpha, spec.beta)


def _apply_rq(spec, q1, q2, q3, rng):
    return mutate_rq(q1, rng)


_OPERATORS: Dict[Strategy, Callable] = {
    Strategy.ESD: _apply_esd,
    Strategy.EGSD: _apply_egsd,
    Strategy.PM1: _apply_pm1,
    Strategy.PM3: _apply_pm3,
    Strategy.PM13: _apply_pm13,
    Strategy.RQ: _apply_rq,
}


def apply_mutation(
    spec: MutationSpec,
    q1: Quaternion,
    q2: Quaternion,
    q3: Quaternion,
    rng: Optional[np.random.Generator] = None
) -> Quaternion:
    """
    Applies the strategy of spec to the donors (q1, q2, q3).

    PM1 ignores q3 and RQ ignores q2 and q3. EGSD and RQ draw from rng.
    """
    return _OPERATORS[spec.strategy](spec, q1, q2, q3, rng)
