"""
The 24 noiseless black-box benchmark functions, grouped the standard way.

Instances are built from a seed: a shifted optimum, two orthogonal
matrices and whatever per-function parameters the definition needs. Every
function returns the regret f(x) - f_opt, so the optimum evaluates to 0.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from .config import (
    DEFAULT_BOUNDS,
    GROUPS,
    KATSUURA_DIGITS,
    NUM_FUNCTIONS,
    WEIERSTRASS_KMAX,
    XOPT_RANGE,
    Bounds,
)
from .engine import block_count
from .errors import DimensionMismatch, UnknownFunction

logger = logging.getLogger(__name__)

SCHWEFEL_OPTIMUM = 4.2096874633
SCHWEFEL_CONSTANT = 4.189828872724339
LUNACEK_MU0 = 2.5


class FunctionInfo(NamedTuple):
    id: int
    name: str
    group: str


@dataclass(frozen=True, eq=False)
class BenchmarkInstance:
    """
    One seeded instance of a benchmark function.

    rotation and rotation2 are the two orthogonal matrices of the definition
    (identity when built with rotate=False); params holds extra arrays such as
    Gallagher peak locations or the sign pattern of Schwefel and Lunacek.
    """

    function_id: int
    name: str
    group: str
    dimension: int
    seed: int
    x_opt: np.ndarray
    rotation: np.ndarray
    rotation2: np.ndarray
    f_opt: float = 0.0
    domain: Bounds = DEFAULT_BOUNDS
    params: Dict[str, np.ndarray] = field(default_factory=dict)

    def __call__(self, x: Sequence[float]) -> float:
        return evaluate(self, x)


# Transformations shared by several definitions

def t_osz(x: np.ndarray) -> np.ndarray:
    """Oscillating transformation; maps 0 to 0 and keeps the sign."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    magnitude = np.abs(x)
    x_hat = np.log(magnitude, out=np.zeros_like(x), where=magnitude > 0)
    c1 = np.where(x > 0, 10.0, 5.5)
    c2 = np.where(x > 0, 7.9, 3.1)
    return np.sign(x) * np.exp(x_hat + 0.049 * (np.sin(c1 * x_hat) + np.sin(c2 * x_hat)))


def t_asy(x: np.ndarray, beta: float) -> np.ndarray:
    """Asymmetric transformation of the positive coordinates."""
    x = np.asarray(x, dtype=float)
    dim = len(x)
    exponent = 1.0 + beta * np.arange(dim) / (dim - 1) * np.sqrt(np.maximum(x, 0.0))
    positive = np.power(np.maximum(x, 0.0), exponent)
    return np.where(x > 0, positive, x)


def conditioning(alpha: float, dim: int) -> np.ndarray:
    """Diagonal of the conditioning matrix with entries alpha^(i/(2(D-1)))."""
    return alpha ** (0.5 * np.arange(dim) / (dim - 1))


def f_pen(x: np.ndarray) -> float:
    """Quadratic penalty for coordinates outside [-5, 5]."""
    return float(np.sum(np.maximum(0.0, np.abs(x) - 5.0) ** 2))


def random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Orthogonal matrix from the QR decomposition of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def _weights(base: float, dim: int) -> np.ndarray:
    return base ** (np.arange(dim) / (dim - 1))


def _rastrigin(z: np.ndarray) -> float:
    return float(10.0 * (len(z) - np.sum(np.cos(2.0 * np.pi * z))) + np.sum(z * z))


def _rosenbrock(z: np.ndarray) -> float:
    return float(np.sum(100.0 * (z[:-1] ** 2 - z[1:]) ** 2 + (z[:-1] - 1.0) ** 2))


def _rosenbrock_scale(dim: int) -> float:
    return max(1.0, math.sqrt(dim) / 8.0)


# Group 1: separable

def _sphere(inst, x):
    z = x - inst.x_opt
    return float(np.sum(z * z))


def _ellipsoidal(inst, x):
    z = t_osz(x - inst.x_opt)
    return float(np.sum(_weights(1e6, inst.dimension) * z * z))


def _rastrigin_separable(inst, x):
    z = conditioning(10.0, inst.dimension) * t_asy(t_osz(x - inst.x_opt), 0.2)
    return _rastrigin(z)


def _bueche_rastrigin(inst, x):
    z = t_osz(x - inst.x_opt)
    s = conditioning(10.0, inst.dimension)
    boosted = np.zeros(inst.dimension, dtype=bool)
    boosted[0::2] = True
    s = np.where(boosted & (z > 0), 10.0 * s, s)
    return _rastrigin(s * z) + 100.0 * f_pen(x)


def _linear_slope(inst, x):
    s = np.sign(inst.x_opt) * _weights(10.0, inst.dimension)
    z = np.where(x * inst.x_opt < 25.0, x, inst.x_opt)
    return float(np.sum(5.0 * np.abs(s) - s * z))


# Group 2: low or moderate conditioning

def _attractive_sector(inst, x):
    z = inst.rotation2 @ (conditioning(10.0, inst.dimension) * (inst.rotation @ (x - inst.x_opt)))
    s = np.where(z * inst.x_opt > 0, 100.0, 1.0)
    return float(t_osz(np.sum((s * z) ** 2))[0] ** 0.9)


def _step_ellipsoidal(inst, x):
    z_hat = conditioning(10.0, inst.dimension) * (inst.rotation @ (x - inst.x_opt))
    z_tilde = np.where(
        np.abs(z_hat) > 0.5,
        np.floor(0.5 + z_hat),
        np.floor(0.5 + 10.0 * z_hat) / 10.0,
    )
    z = inst.rotation2 @ z_tilde
    core = max(abs(z_hat[0]) / 1e4, float(np.sum(_weights(100.0, inst.dimension) * z * z)))
    return 0.1 * core + f_pen(x)


def _rosenbrock_original(inst, x):
    z = _rosenbrock_scale(inst.dimension) * (x - inst.x_opt) + 1.0
    return _rosenbrock(z)


def _rosenbrock_rotated(inst, x):
    z = _rosenbrock_scale(inst.dimension) * (inst.rotation @ (x - inst.x_opt)) + 1.0
    return _rosenbrock(z)


# Group 3: high conditioning, unimodal

def _ellipsoidal_rotated(inst, x):
    z = t_osz(inst.rotation @ (x - inst.x_opt))
    return float(np.sum(_weights(1e6, inst.dimension) * z * z))


def _discus(inst, x):
    z = t_osz(inst.rotation @ (x - inst.x_opt))
    return float(1e6 * z[0] ** 2 + np.sum(z[1:] ** 2))


def _bent_cigar(inst, x):
    z = inst.rotation @ t_asy(inst.rotation @ (x - inst.x_opt), 0.5)
    return float(z[0] ** 2 + 1e6 * np.sum(z[1:] ** 2))


def _sharp_ridge(inst, x):
    z = inst.rotation2 @ (conditioning(10.0, inst.dimension) * (inst.rotation @ (x - inst.x_opt)))
    return float(z[0] ** 2 + 100.0 * np.sqrt(np.sum(z[1:] ** 2)))


def _different_powers(inst, x):
    z = inst.rotation @ (x - inst.x_opt)
    exponents = 2.0 + 4.0 * np.arange(inst.dimension) / (inst.dimension - 1)
    return float(np.sqrt(np.sum(np.abs(z) ** exponents)))


# Group 4: multimodal, adequate global structure

def _rastrigin_rotated(inst, x):
    inner = t_asy(t_osz(inst.rotation @ (x - inst.x_opt)), 0.2)
    z = inst.rotation @ (conditioning(10.0, inst.dimension) * (inst.rotation2 @ inner))
    return _rastrigin(z)


def _weierstrass(inst, x):
    inner = t_osz(inst.rotation @ (x - inst.x_opt))
    z = inst.rotation @ (conditioning(0.01, inst.dimension) * (inst.rotation2 @ inner))
    k = np.arange(WEIERSTRASS_KMAX + 1)
    a, b = 0.5 ** k, 3.0 ** k
    f0 = float(np.sum(a * np.cos(2.0 * np.pi * b * 0.5)))
    total = float(np.sum(np.cos(2.0 * np.pi * np.outer(z + 0.5, b)) @ a))
    return 10.0 * (total / inst.dimension - f0) ** 3 + 10.0 / inst.dimension * f_pen(x)


def _schaffers(condition):
    def schaffers(inst, x):
        inner = t_asy(inst.rotation @ (x - inst.x_opt), 0.5)
        z = conditioning(condition, inst.dimension) * (inst.rotation2 @ inner)
        s = np.sqrt(z[:-1] ** 2 + z[1:] ** 2)
        root = np.sqrt(s)
        core = float(np.mean(root + root * np.sin(50.0 * s ** 0.2) ** 2))
        return core ** 2 + 10.0 * f_pen(x)
    return schaffers


def _griewank_rosenbrock(inst, x):
    z = _rosenbrock_scale(inst.dimension) * (inst.rotation @ (x - inst.x_opt)) + 1.0
    s = 100.0 * (z[:-1] ** 2 - z[1:]) ** 2 + (z[:-1] - 1.0) ** 2
    return float(10.0 / (inst.dimension - 1) * np.sum(s / 4000.0 - np.cos(s)) + 10.0)


# Group 5: multimodal, weak global structure

def _schwefel(inst, x):
    signs = inst.params['signs']
    target = 2.0 * np.abs(inst.x_opt)
    x_hat = 2.0 * signs * x
    z_hat = x_hat.copy()
    z_hat[1:] += 0.25 * (x_hat[:-1] - target[:-1])
    z = 100.0 * (conditioning(10.0, inst.dimension) * (z_hat - target) + target)
    core = -np.sum(z * np.sin(np.sqrt(np.abs(z)))) / (100.0 * inst.dimension)
    return float(core + SCHWEFEL_CONSTANT + 100.0 * f_pen(z / 100.0))


def _gallagher(inst, x):
    diff = (x - inst.params['peaks']) @ inst.rotation.T
    exponent = -0.5 / inst.dimension * np.sum(inst.params['scales'] * diff * diff, axis=1)
    best = float(np.max(inst.params['heights'] * np.exp(exponent)))
    return float(t_osz(10.0 - best)[0] ** 2) + f_pen(x)


def _katsuura(inst, x):
    dim = inst.dimension
    z = inst.rotation2 @ (conditioning(100.0, dim) * (inst.rotation @ (x - inst.x_opt)))
    powers = 2.0 ** np.arange(1, KATSUURA_DIGITS + 1)
    scaled = np.outer(z, powers)
    digits = np.sum(np.abs(scaled - np.round(scaled)) / powers, axis=1)
    product = np.prod((1.0 + np.arange(1, dim + 1) * digits) ** (10.0 / dim ** 1.2))
    return float(10.0 / dim ** 2 * product - 10.0 / dim ** 2) + f_pen(x)


def _lunacek(inst, x):
    dim = inst.dimension
    s = 1.0 - 1.0 / (2.0 * math.sqrt(dim + 20.0) - 8.2)
    mu1 = -math.sqrt((LUNACEK_MU0 ** 2 - 1.0) / s)
    x_hat = 2.0 * inst.params['signs'] * x
    z = inst.rotation2 @ (conditioning(100.0, dim) * (inst.rotation @ (x_hat - LUNACEK_MU0)))
    funnels = min(
        float(np.sum((x_hat - LUNACEK_MU0) ** 2)),
        dim + s * float(np.sum((x_hat - mu1) ** 2)),
    )
    return funnels + 10.0 * (dim - float(np.sum(np.cos(2.0 * np.pi * z)))) + 1e4 * f_pen(x)


# Per-function instance parameters

def _signs(x_opt: np.ndarray) -> np.ndarray:
    return np.where(x_opt < 0, -1.0, 1.0)


def _prepare_bueche(x_opt, rng, zero_shift, dim):
    x_opt = x_opt.copy()
    x_opt[0::2] = np.abs(x_opt[0::2])
    return x_opt, {}


def _prepare_slope(x_opt, rng, zero_shift, dim):
    return 5.0 * _signs(x_opt), {}


def _prepare_rosenbrock(x_opt, rng, zero_shift, dim):
    return 0.75 * x_opt, {}


def _prepare_schwefel(x_opt, rng, zero_shift, dim):
    signs = _signs(x_opt)
    return 0.5 * SCHWEFEL_OPTIMUM * signs, {'signs': signs}


def _prepare_lunacek(x_opt, rng, zero_shift, dim):
    signs = _signs(x_opt)
    return 0.5 * LUNACEK_MU0 * signs, {'signs': signs}


def _gallagher_builder(n_peaks: int, top_condition: float, shrink: float):
    def prepare(x_opt, rng, zero_shift, dim):
        conditions = rng.permutation(1000.0 ** np.linspace(0.0, 1.0, n_peaks - 1))
        conditions = np.insert(conditions, 0, top_condition)
        scales = np.vstack([
            rng.permutation(c ** np.linspace(-0.5, 0.5, dim)) for c in conditions
        ])
        peaks = shrink * rng.uniform(-5.0, 5.0, (n_peaks, dim))
        peaks[0] = 0.0 if zero_shift else 0.8 * peaks[0]
        heights = np.insert(np.linspace(1.1, 9.1, n_peaks - 1), 0, 10.0)
        return None, {'peaks': peaks, 'scales': scales, 'heights': heights}
    return prepare


class _Entry(NamedTuple):
    name: str
    group: str
    kernel: Callable[[BenchmarkInstance, np.ndarray], float]
    prepare: Optional[Callable] = None
    # whether zero_shift moves the optimum to the origin
    shiftable: bool = True


_REGISTRY: Dict[int, _Entry] = {
    1: _Entry('Sphere', 'Separable', _sphere),
    2: _Entry('Ellipsoidal', 'Separable', _ellipsoidal),
    3: _Entry('Rastrigin', 'Separable', _rastrigin_separable),
    4: _Entry('Büche-Rastrigin', 'Separable', _bueche_rastrigin, _prepare_bueche),
    5: _Entry('Linear Slope', 'Separable', _linear_slope, _prepare_slope, False),
    6: _Entry('Attractive Sector', 'ULow', _attractive_sector),
    7: _Entry('Step Ellipsoidal', 'ULow', _step_ellipsoidal),
    8: _Entry('Rosenbrock', 'ULow', _rosenbrock_original, _prepare_rosenbrock),
    9: _Entry('Rotated Rosenbrock', 'ULow', _rosenbrock_rotated, _prepare_rosenbrock),
    10: _Entry('Rotated Ellipsoidal', 'UHigh', _ellipsoidal_rotated),
    11: _Entry('Discus', 'UHigh', _discus),
    12: _Entry('Bent Cigar', 'UHigh', _bent_cigar),
    13: _Entry('Sharp Ridge', 'UHigh', _sharp_ridge),
    14: _Entry('Different Powers', 'UHigh', _different_powers),
    15: _Entry('Rastrigin (non-separable)', 'MAdequate', _rastrigin_rotated),
    16: _Entry('Weierstrass', 'MAdequate', _weierstrass),
    17: _Entry('Schaffers F7', 'MAdequate', _schaffers(10.0)),
    18: _Entry('Schaffers F7 ill-conditioned', 'MAdequate', _schaffers(1000.0)),
    19: _Entry('Composite Griewank-Rosenbrock', 'MAdequate', _griewank_rosenbrock),
    20: _Entry('Schwefel', 'MWeak', _schwefel, _prepare_schwefel, False),
    21: _Entry('Gallagher 101 Peaks', 'MWeak', _gallagher, _gallagher_builder(101, math.sqrt(1000.0), 1.0)),
    22: _Entry('Gallagher 21 Peaks', 'MWeak', _gallagher, _gallagher_builder(21, 1000.0, 0.98)),
    23: _Entry('Katsuura', 'MWeak', _katsuura),
    24: _Entry('Lunacek bi-Rastrigin', 'MWeak', _lunacek, _prepare_lunacek, False),
}

# Functions whose optimum lies on the domain boundary
BOUNDARY_OPTIMUM = frozenset({5})


def _entry(function_id: int) -> _Entry:
    if function_id not in _REGISTRY:
        raise UnknownFunction(f"Function id must be in 1..{NUM_FUNCTIONS}, got {function_id}")
    return _REGISTRY[function_id]


def make_instance(
    function_id: int,
    dimension: int,
    seed: int,
    zero_shift: bool = False,
    rotate: bool = True
) -> BenchmarkInstance:
    """
    Builds a deterministic instance of a benchmark function.

    Args:
        function_id: Registry id in 1..24
        dimension: 3 or a multiple of 4
        seed: Seed of the instance stream (optimum, rotations, peaks)
        zero_shift: Put the optimum of generically shifted functions at the origin
        rotate: Draw random rotations; False uses identity matrices

    Raises:
        UnknownFunction: If function_id is outside 1..24
        UnsupportedDimension: If dimension is neither 3 nor a multiple of 4
    """
    entry = _entry(function_id)
    block_count(dimension)

    rng = np.random.default_rng(seed)
    x_opt = rng.uniform(*XOPT_RANGE, dimension)
    rotation = random_rotation(rng, dimension)
    rotation2 = random_rotation(rng, dimension)
    if not rotate:
        rotation = np.eye(dimension)
        rotation2 = np.eye(dimension)
    if zero_shift and entry.shiftable:
        x_opt = np.zeros(dimension)

    params = {}
    if entry.prepare is not None:
        prepared, params = entry.prepare(x_opt, rng, zero_shift and entry.shiftable, dimension)
        if prepared is not None:
            x_opt = prepared
    if 'peaks' in params:
        x_opt = params['peaks'][0].copy()

    return BenchmarkInstance(
        function_id=function_id,
        name=entry.name,
        group=entry.group,
        dimension=dimension,
        seed=seed,
        x_opt=x_opt,
        rotation=rotation,
        rotation2=rotation2,
        params=params,
    )


def evaluate(instance: BenchmarkInstance, x: Sequence[float]) -> float:
    """
    Regret of x on the instance.

    Raises:
        DimensionMismatch: If x does not have instance.dimension coordinates
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (instance.dimension,):
        raise DimensionMismatch(f"Expected a point of dimension {instance.dimension}, got shape {x.shape}")
    return _REGISTRY[instance.function_id].kernel(instance, x) - instance.f_opt


def list_functions(group: Optional[str] = None) -> List[FunctionInfo]:
    """
    Registry entries in id order, optionally restricted to one group.

    Raises:
        ValueError: If group is not one of GROUPS
    """
    if group is not None and group not in GROUPS:
        raise ValueError(f"Group must be one of {GROUPS}, got {group!r}")
    return [
        FunctionInfo(fid, entry.name, entry.group)
        for fid, entry in sorted(_REGISTRY.items())
        if group is None or entry.group == group
    ]


def function_info(function_id: int) -> FunctionInfo:
    entry = _entry(function_id)
    return FunctionInfo(function_id, entry.name, entry.group)


def registry_index(function_ids: Sequence[int], dimension: int, seed: int) -> List[Dict[str, object]]:
    """Machine-readable index of the functions used by an experiment."""
    return [
        {'id': info.id, 'name': info.name, 'group': info.group, 'dimension': dimension, 'seed': seed}
        for info in (function_info(fid) for fid in function_ids)
    ]
