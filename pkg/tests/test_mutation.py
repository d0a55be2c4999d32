"""Tests for the quaternion mutation operators."""

import math

import numpy as np
import pytest

from qde import (
    MutationSpec,
    Quaternion,
    Strategy,
    UnknownStrategy,
    apply_mutation,
    mutate_egsd,
    mutate_esd,
    mutate_pm1,
    mutate_pm13,
    mutate_pm3,
    mutate_rq,
    norm,
    parse_strategy,
)
from qde.mutation import polar_rotor

ZERO = Quaternion(0, 0, 0, 0)


def _donors(seed):
    rng = np.random.default_rng(seed)
    return [Quaternion.from_array(rng.uniform(-3, 3, 4)) for _ in range(3)]


def test_esd():
    """Test the Euclidean sum of differences."""
    q1, q2, q3 = Quaternion(0, 1, 0, 0), Quaternion(0, 2, 0, 0), Quaternion(1, 0, 0, 0)
    assert mutate_esd(q1, q2, q3, 0.5) == Quaternion(1, 0.5, 0, 0)
    assert mutate_esd(q1, q1, q3, 0.7) == q3
    assert mutate_esd(q1, q2, q3, 0.0) == q3


def test_egsd_reduces_to_esd():
    """Test that a real random quaternion makes EGSD identical to ESD."""
    for seed in range(20):
        q1, q2, q3 = _donors(seed)
        alpha = 0.1 + 0.05 * seed
        egsd = mutate_egsd(q1, q2, q3, Quaternion(alpha, 0, 0, 0))
        assert egsd.isclose(mutate_esd(q1, q2, q3, alpha), 1e-15)


def test_egsd_uses_hamilton_product():
    """Test that EGSD multiplies the difference with the Hamilton product."""
    q1 = ZERO
    q2 = Quaternion(0, 0, 1, 0)
    assert mutate_egsd(q1, q2, ZERO, Quaternion(0, 1, 0, 0)) == Quaternion(0, 0, 0, 1)
    assert mutate_egsd(q2, q2, Quaternion(1, 2, 3, 4), Quaternion(0, 1, 0, 0)) == Quaternion(1, 2, 3, 4)


def test_polar_rotor():
    """Test the scaled rotor in regular and degenerate geometry."""
    q1, q2 = Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0)
    assert polar_rotor(q1, q2, 2.0, 0.0) == Quaternion(2, 0, 0, 0)
    assert polar_rotor(q1, q2, 1.0, 1.0).isclose(Quaternion(0, 0, 0, 1), 1e-12)
    half = math.sqrt(2) / 2
    assert polar_rotor(q1, q2, 1.0, 0.5).isclose(Quaternion(half, 0, 0, half), 1e-12)
    assert polar_rotor(q1, q1, 0.3, 0.5) == Quaternion(0.3, 0, 0, 0)


def test_polar_identity_cases():
    """Test that alpha=1 with beta=0 or parallel donors leaves the rotated donor unchanged."""
    q1, q2, q3 = _donors(1)
    assert mutate_pm1(q1, q2, 1.0, 0.0) == q1
    assert mutate_pm3(q1, q2, q3, 1.0, 0.0) == q3
    assert mutate_pm1(q1, q1, 1.0, 0.5) == q1
    assert mutate_pm3(q1, q1, q3, 1.0, 0.5) == q3
    assert mutate_pm13(q1, q2, q3, 1.0, 0.0).isclose(q3 + q1, 1e-12)


def test_polar_norms():
    """Test that polar mutants scale the norm by alpha squared."""
    for seed in range(20):
        q1, q2, q3 = _donors(seed)
        for alpha in (0.5, 1.0, 1.7):
            assert math.isclose(norm(mutate_pm1(q1, q2, alpha, 0.5)), alpha ** 2 * norm(q1), rel_tol=1e-10)
            assert math.isclose(norm(mutate_pm3(q1, q2, q3, alpha, 0.5)), alpha ** 2 * norm(q3), rel_tol=1e-10)


def test_pm13_is_q3_plus_pm1():
    """Test the additive relation between PM13 and PM1, and PM1 == PM3 when q1 == q3."""
    for seed in range(10):
        q1, q2, q3 = _donors(seed)
        assert (mutate_pm13(q1, q2, q3, 0.8, 0.5) - q3).isclose(mutate_pm1(q1, q2, 0.8, 0.5), 1e-12)
        assert mutate_pm13(q1, q2, ZERO, 0.8, 0.5) == mutate_pm1(q1, q2, 0.8, 0.5)
        assert mutate_pm1(q1, q2, 0.8, 0.5).as_tuple() == mutate_pm3(q1, q2, q1, 0.8, 0.5).as_tuple()


def test_rq():
    """Test that a random rotation keeps norm and real part and replays with the seed."""
    q1, _, _ = _donors(2)
    rng = np.random.default_rng(0)
    for _ in range(100):
        mutant = mutate_rq(q1, rng)
        assert math.isclose(norm(mutant), norm(q1), rel_tol=1e-10)
        assert math.isclose(mutant.w, q1.w, abs_tol=1e-10)

    real = Quaternion(2.5, 0, 0, 0)
    assert mutate_rq(real, rng) == real

    a = mutate_rq(q1, np.random.default_rng(99))
    b = mutate_rq(q1, np.random.default_rng(99))
    assert a.as_tuple() == b.as_tuple()


def test_all_strategies_total_on_zero_donors():
    """Test that every strategy returns a finite quaternion for all-zero donors."""
    rng = np.random.default_rng(0)
    for strategy in Strategy:
        mutant = apply_mutation(MutationSpec.default(strategy), ZERO, ZERO, ZERO, rng)
        assert all(math.isfinite(c) for c in mutant.as_tuple())


def test_apply_mutation_dispatch():
    """Test that apply_mutation matches the direct operators."""
    q1, q2, q3 = _donors(4)
    spec = MutationSpec(Strategy.PM13, alpha=0.9, beta=0.3)
    assert apply_mutation(spec, q1, q2, q3).as_tuple() == mutate_pm13(q1, q2, q3, 0.9, 0.3).as_tuple()

    spec = MutationSpec('ESD', alpha=0.4)
    assert apply_mutation(spec, q1, q2, q3) == mutate_esd(q1, q2, q3, 0.4)

    spec = MutationSpec.default('EGSD')
    a = apply_mutation(spec, q1, q2, q3, np.random.default_rng(5))
    b = apply_mutation(spec, q1, q2, q3, np.random.default_rng(5))
    assert a.as_tuple() == b.as_tuple()


def test_mutation_spec():
    """Test strategy parsing, defaults and validation."""
    assert parse_strategy('PM3') is Strategy.PM3
    assert MutationSpec.default('PM1').alpha == 1.0
    assert MutationSpec.default('PM1').beta == 0.5
    assert MutationSpec.default('ESD').alpha == 0.5
    assert MutationSpec('RQ').to_dict()['strategy'] == 'RQ'

    with pytest.raises(UnknownStrategy) as excinfo:
        parse_strategy('PM2')
    assert 'PM2' in str(excinfo.value)
    assert 'PM13' in str(excinfo.value)

    with pytest.raises(ValueError):
        MutationSpec(Strategy.ESD, alpha=0.0)
    with pytest.raises(ValueError):
        MutationSpec(Strategy.EGSD, egsd_component_range=(1.0, 0.0))
