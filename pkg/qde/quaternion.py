"""
Quaternion algebra: Hamilton product, conjugation, norm, polar form,
versor rotation and the random quaternion generators used by the search.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

import numpy as np

from .config import EPS_Q, FALLBACK_AXIS, UNIT_TOLERANCE
from .errors import InvalidRange, NearZeroQuaternion, NonFiniteQuaternion

Axis = Tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class Quaternion:
    """
    Element w + x*i + y*j + z*k of the quaternion algebra.

    Coefficients are always finite. Equality is componentwise within EPS_Q;
    use as_tuple() for exact comparison.
    """

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ('w', 'x', 'y', 'z'):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise NonFiniteQuaternion(f"Quaternion coefficient {name} is not finite: {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> 'Quaternion':
        if len(values) != 4:
            raise ValueError(f"Quaternion needs 4 coefficients, got {len(values)}")
        return cls(values[0], values[1], values[2], values[3])

    @classmethod
    def pure(cls, vector: Sequence[float]) -> 'Quaternion':
        """Quaternion with zero real part and the given imaginary part."""
        return cls(0.0, vector[0], vector[1], vector[2])

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.w, self.x, self.y, self.z)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    @property
    def imag(self) -> Axis:
        return (self.x, self.y, self.z)

    def scale(self, factor: float) -> 'Quaternion':
        return Quaternion(self.w * factor, self.x * factor, self.y * factor, self.z * factor)

    def isclose(self, other: 'Quaternion', tol: float = EPS_Q) -> bool:
        return all(abs(a - b) <= tol for a, b in zip(self.as_tuple(), other.as_tuple()))

    def __eq__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return self.isclose(other)

    def __add__(self, other: 'Quaternion') -> 'Quaternion':
        return Quaternion(self.w + other.w, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: 'Quaternion') -> 'Quaternion':
        return Quaternion(self.w - other.w, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> 'Quaternion':
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other: 'Quaternion') -> 'Quaternion':
        return hamilton_product(self, other)

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"


IDENTITY = Quaternion(1.0, 0.0, 0.0, 0.0)
ZERO = Quaternion(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class PolarDecomposition:
    """Polar form magnitude * (cos(angle) + sin(angle) * axis)."""

    magnitude: float
    angle: float
    axis: Axis

    def __post_init__(self):
        if self.magnitude < 0:
            raise ValueError(f"Magnitude must be non-negative, got {self.magnitude}")
        axis_norm = math.sqrt(sum(c * c for c in self.axis))
        if abs(axis_norm - 1.0) > UNIT_TOLERANCE:
            raise ValueError(f"Axis must be a unit vector, got norm {axis_norm}")


class Rotation(NamedTuple):
    """Rotation taking the imaginary direction of one quaternion to another's."""

    angle: float
    axis: Axis
    degenerate: bool


def hamilton_product(p: Quaternion, q: Quaternion) -> Quaternion:
    """
    Multiplies two quaternions with the Hamilton rules
    (i^2 = j^2 = k^2 = ijk = -1). Not commutative.
    """
    return Quaternion(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )


def conjugate(q: Quaternion) -> Quaternion:
    return Quaternion(q.w, -q.x, -q.y, -q.z)


def norm(q: Quaternion) -> float:
    return math.sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z)


def _vector_norm(v: Sequence[float]) -> float:
    return math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])


def normalize(q: Quaternion) -> Quaternion:
    """
    Scales a quaternion to unit norm.

    Raises:
        NearZeroQuaternion: If norm(q) <= EPS_Q
    """
    magnitude = norm(q)
    if magnitude <= EPS_Q:
        raise NearZeroQuaternion(f"Cannot normalize quaternion with norm {magnitude}")
    return q.scale(1.0 / magnitude)


def to_polar(q: Quaternion) -> PolarDecomposition:
    """
    Decomposes q into magnitude, angle in [0, pi] and unit axis.

    The angle comes from atan2(|imag|, w). When the imaginary part has norm
    <= EPS_Q the axis is FALLBACK_AXIS.

    Raises:
        NearZeroQuaternion: If norm(q) <= EPS_Q
    """
    magnitude = norm(q)
    if magnitude <= EPS_Q:
        raise NearZeroQuaternion(f"Polar form undefined for quaternion with norm {magnitude}")

    imag_norm = _vector_norm(q.imag)
    angle = math.atan2(imag_norm, q.w)
    if imag_norm <= EPS_Q:
        axis = FALLBACK_AXIS
    else:
        axis = (q.x / imag_norm, q.y / imag_norm, q.z / imag_norm)
    return PolarDecomposition(magnitude, angle, axis)


def from_polar(polar: PolarDecomposition) -> Quaternion:
    s = polar.magnitude * math.sin(polar.angle)
    return Quaternion(
        polar.magnitude * math.cos(polar.angle),
        s * polar.axis[0],
        s * polar.axis[1],
        s * polar.axis[2],
    )


def conjugate_by(rotor: Quaternion, q: Quaternion) -> Quaternion:
    """rotor * q * conjugate(rotor) without any check on the rotor norm."""
    return hamilton_product(hamilton_product(rotor, q), conjugate(rotor))


def sandwich(rotor: Quaternion, q: Quaternion) -> Quaternion:
    """
    Rotates q with a unit rotor: rotor * q * conjugate(rotor).

    Preserves norm(q) and the real part of q. The caller normalizes the rotor.
    """
    assert abs(norm(rotor) - 1.0) <= UNIT_TOLERANCE, "sandwich expects a unit rotor"
    return conjugate_by(rotor, q)


def rotation_between(q1: Quaternion, q2: Quaternion) -> Rotation:
    """
    Angle and axis relating the imaginary parts of q1 and q2.

    The dot product c is taken between the normalized imaginary parts and
    clamped to [-1, 1]; angle = 2 * arccos(sqrt((1 + c) / 2)) and the axis is
    the normalized cross product. Zero imaginary parts or a zero cross
    product give degenerate=True with FALLBACK_AXIS.
    """
    n1 = _vector_norm(q1.imag)
    n2 = _vector_norm(q2.imag)
    if n1 <= EPS_Q or n2 <= EPS_Q:
        return Rotation(0.0, FALLBACK_AXIS, True)

    u = (q1.x / n1, q1.y / n1, q1.z / n1)
    v = (q2.x / n2, q2.y / n2, q2.z / n2)
    c = u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
    c = min(1.0, max(-1.0, c))
    angle = 2.0 * math.acos(math.sqrt((1.0 + c) / 2.0))

    cross = (
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    )
    cross_norm = _vector_norm(cross)
    if cross_norm <= EPS_Q:
        return Rotation(angle, FALLBACK_AXIS, True)
    axis = (cross[0] / cross_norm, cross[1] / cross_norm, cross[2] / cross_norm)
    return Rotation(angle, axis, False)


def rotation_matrix(rotor: Quaternion) -> np.ndarray:
    """3x3 matrix of the rotation v -> rotor * v * conjugate(rotor) for a unit rotor."""
    w, x, y, z = rotor.as_tuple()
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


def random_unit_quaternion(rng: np.random.Generator) -> Quaternion:
    """
    Unit quaternion uniform on the 3-sphere (normalized standard normals).
    """
    while True:
        draw = rng.standard_normal(4)
        magnitude = float(np.linalg.norm(draw))
        if magnitude > EPS_Q:
            return Quaternion.from_array(draw / magnitude)


def random_unit_vector3(rng: np.random.Generator) -> Axis:
    """Direction uniform on the 2-sphere."""
    while True:
        draw = rng.standard_normal(3)
        magnitude = float(np.linalg.norm(draw))
        if magnitude > EPS_Q:
            return tuple(float(c) for c in draw / magnitude)


def random_quaternion_uniform(rng: np.random.Generator, lo: float, hi: float) -> Quaternion:
    """
    Quaternion with i.i.d. components uniform on [lo, hi).

    Raises:
        InvalidRange: If lo >= hi
    """
    if not lo < hi:
        raise InvalidRange(f"Lower bound {lo} must be below upper bound {hi}")
    return Quaternion.from_array(rng.uniform(lo, hi, 4))
