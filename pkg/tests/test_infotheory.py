# to run: python -m pytest -s tests/test_infotheory.py

import math
import numpy as np
import pytest

from macauthpy.errors import (
    DimensionMismatchError,
    EmptySequenceError,
    InvalidDistributionError,
    SymbolOutOfRangeError,
)
from macauthpy.infotheory import (
    channel_capacity,
    conditional_entropy,
    conditional_mutual_information,
    conditional_typicality_gap,
    empirical_type,
    entropy,
    is_cond_typical,
    is_typical,
    joint_entropy,
    mutual_information,
    nearest_type,
)
from macauthpy.models.prob_models import (
    Distribution,
    JointDistribution,
    StochasticKernel,
    TypicalityParams,
    default_delta,
)


def random_joint(rng: np.random.Generator, dims) -> JointDistribution:
    mass = rng.dirichlet(np.ones(int(np.prod(dims)))).reshape(dims)
    return JointDistribution(mass / mass.sum())


def test_entropy_values() -> None:
    assert entropy(Distribution.uniform(2)) == pytest.approx(1.0, abs=1e-12)
    assert entropy(Distribution([1.0, 0.0])) == 0.0
    assert entropy(Distribution([0.9, 0.1])) == pytest.approx(0.46900, abs=1e-4)
    for k in range(2, 17):
        assert abs(entropy(Distribution.uniform(k)) - math.log2(k)) <= 1e-12


def test_distribution_validation() -> None:
    with pytest.raises(InvalidDistributionError):
        Distribution([0.6, 0.6])
    with pytest.raises(InvalidDistributionError):
        Distribution([1.1, -0.1])
    with pytest.raises(InvalidDistributionError):
        StochasticKernel([[0.5, 0.4], [0.0, 1.0]])
    assert Distribution.normalized([2.0, 2.0]).mass.tolist() == [0.5, 0.5]


def test_mutual_information_values() -> None:
    product = JointDistribution.product(Distribution.uniform(2), Distribution.uniform(2))
    assert mutual_information(product) == pytest.approx(0.0, abs=1e-12)

    correlated = JointDistribution([[0.5, 0.0], [0.0, 0.5]])
    assert mutual_information(correlated) == pytest.approx(1.0, abs=1e-12)

    bsc = StochasticKernel.binary_symmetric(0.1).joint_with(Distribution.uniform(2))
    assert mutual_information(bsc) == pytest.approx(0.53100, abs=1e-4)

    with pytest.raises(DimensionMismatchError):
        mutual_information(JointDistribution(np.full((2, 2, 2), 0.125)))


def test_mutual_information_properties() -> None:
    rng = np.random.default_rng(1)
    for _ in range(1000):
        joint = random_joint(rng, (3, 4))
        assert mutual_information(joint) >= 0.0

    # deterministic coupling: I(X;Y) = H(X)
    px = Distribution([0.2, 0.3, 0.5])
    deterministic = StochasticKernel([[0, 1, 0], [1, 0, 0], [0, 0, 1]]).joint_with(px)
    assert mutual_information(deterministic) == pytest.approx(entropy(px), abs=1e-12)


def test_conditional_mutual_information() -> None:
    rng = np.random.default_rng(2)

    # A constant
    constant = np.zeros((2, 3, 2))
    constant[0] = rng.dirichlet(np.ones(6)).reshape(3, 2)
    assert conditional_mutual_information(JointDistribution(constant)) == pytest.approx(0.0, abs=1e-12)

    # P(C) P(A|C) P(B|C)
    pc = rng.dirichlet(np.ones(3))
    pa_c = rng.dirichlet(np.ones(2), size=3)
    pb_c = rng.dirichlet(np.ones(4), size=3)
    mass = np.einsum("c,ca,cb->abc", pc, pa_c, pb_c)
    assert conditional_mutual_information(JointDistribution(mass)) <= 1e-10

    # C independent uniform: I(A;B|C) = I(A;B)
    ab = random_joint(rng, (3, 3))
    mass = np.multiply.outer(ab.mass, np.full(2, 0.5))
    assert conditional_mutual_information(JointDistribution(mass)) == pytest.approx(
        mutual_information(ab), abs=1e-10
    )


def test_chain_rule() -> None:
    rng = np.random.default_rng(3)
    for _ in range(200):
        joint = random_joint(rng, (2, 3, 4))
        # I(A;B,C) = I(A;C) + I(A;B|C)
        lhs = mutual_information(joint.merge_axes([1, 2]))
        rhs = mutual_information(joint.marginal([0, 2])) + conditional_mutual_information(joint)
        assert abs(lhs - rhs) <= 1e-10


def test_conditional_entropy() -> None:
    joint = JointDistribution([[0.25, 0.25], [0.5, 0.0]])
    # H(Y|X) = 0.5 * H(1/2) + 0.5 * 0
    assert conditional_entropy(joint, [0]) == pytest.approx(0.5, abs=1e-12)
    assert conditional_entropy(joint, []) == pytest.approx(joint_entropy(joint))
    assert joint_entropy(joint) == pytest.approx(1.5, abs=1e-12)


def test_marginal_keeps_axis_order() -> None:
    joint = JointDistribution(np.arange(24, dtype=float).reshape(2, 3, 4) / 276.0)
    swapped = joint.marginal([2, 0])
    assert swapped.dims == (4, 2)
    assert np.allclose(swapped.mass, joint.mass.sum(axis=1).T)


def test_empirical_type() -> None:
    single = empirical_type([0, 1, 0, 1], 2)
    assert single.counts.tolist() == [2, 2]
    assert single.n == 4

    joint = empirical_type(([0, 0, 1], [1, 1, 0]), (2, 2))
    assert joint.counts.tolist() == [[0, 2], [1, 0]]

    with pytest.raises(EmptySequenceError):
        empirical_type([], 2)
    with pytest.raises(SymbolOutOfRangeError):
        empirical_type([0, 2], 2)
    with pytest.raises(DimensionMismatchError):
        empirical_type(([0, 1], [0]), (2, 2))


def test_type_reconstruction_round_trip() -> None:
    rng = np.random.default_rng(4)
    seq = rng.integers(0, 5, size=300)
    t = empirical_type(seq, 5)
    assert np.array_equal(empirical_type(t.reconstruct(), 5).counts, t.counts)

    pair = (rng.integers(0, 3, size=50), rng.integers(0, 2, size=50))
    jt = empirical_type(pair, (3, 2))
    rebuilt = jt.reconstruct()
    assert np.array_equal(empirical_type((rebuilt[0], rebuilt[1]), (3, 2)).counts, jt.counts)


def test_nearest_type() -> None:
    t = nearest_type(Distribution([0.5, 0.3, 0.2]), 7)
    assert t.n == 7
    assert int(t.counts.sum()) == 7
    assert np.abs(t.frequencies - np.array([0.5, 0.3, 0.2])).max() <= 1.0 / 7


def test_is_typical() -> None:
    p = Distribution.uniform(2)
    assert is_typical([0, 1] * 50, p, TypicalityParams(n=100, delta=0.1))
    assert not is_typical([0] * 100, p, TypicalityParams(n=100, delta=0.1))
    # L1 distance exactly delta
    assert is_typical([0, 0, 0, 1], p, TypicalityParams(n=4, delta=0.5))
    with pytest.raises(DimensionMismatchError):
        is_typical([0, 1], p, TypicalityParams(n=4, delta=0.5))


def test_typicality_is_monotone_in_delta() -> None:
    rng = np.random.default_rng(5)
    p = Distribution([0.6, 0.4])
    kernel = StochasticKernel.binary_symmetric(0.2)
    for _ in range(100):
        u = rng.choice(2, size=60, p=p.mass)
        y = np.where(rng.random(60) < 0.2, 1 - u, u)
        for delta in (0.05, 0.1, 0.2):
            tight, loose = TypicalityParams(60, delta), TypicalityParams(60, delta * 1.5)
            if is_typical(u, p, tight):
                assert is_typical(u, p, loose)
            if is_cond_typical(y, u, kernel, tight):
                assert is_cond_typical(y, u, kernel, loose)


def test_is_cond_typical() -> None:
    tp = TypicalityParams(n=100, delta=0.1)
    u = np.array([0, 1] * 50)
    assert is_cond_typical(u, u, StochasticKernel.identity(2), tp)

    point = StochasticKernel([[1.0, 0.0]])
    zeros = np.zeros(100, dtype=int)
    assert is_cond_typical(zeros, zeros, point, tp)
    y = zeros.copy()
    y[:5] = 1  # gap 2 * 5 / 100 = delta
    assert is_cond_typical(y, zeros, point, tp)
    y[:10] = 1
    assert not is_cond_typical(y, zeros, point, tp)
    assert conditional_typicality_gap(y, zeros, point) == pytest.approx(0.2)


def test_cond_typicality_monte_carlo() -> None:
    rng = np.random.default_rng(6)
    n = 1000
    tp = TypicalityParams.default(n)
    kernel = StochasticKernel.binary_symmetric(0.1)
    u = np.array([0, 1] * (n // 2))
    passes = 0
    for _ in range(300):
        flips = rng.random(n) < 0.1
        passes += is_cond_typical(np.where(flips, 1 - u, u), u, kernel, tp)
    assert passes / 300 >= 0.99


def test_default_delta() -> None:
    assert default_delta(1000) == pytest.approx(0.1)
    assert TypicalityParams.for_block_length(64).delta == pytest.approx(0.25)
    assert TypicalityParams.for_block_length(64, 0.3).delta == 0.3
    with pytest.raises(ValueError):
        TypicalityParams(n=0, delta=0.1)


def test_channel_capacity() -> None:
    capacity, best_input = channel_capacity(StochasticKernel.binary_symmetric(0.1))
    assert capacity == pytest.approx(0.531004, abs=1e-6)
    assert np.allclose(best_input.mass, [0.5, 0.5], atol=1e-6)

    # Z-channel optimum puts more mass on the clean input
    capacity, best_input = channel_capacity(StochasticKernel([[1.0, 0.0], [0.5, 0.5]]))
    assert capacity == pytest.approx(math.log2(1.25), abs=1e-6)
    assert best_input[0] > 0.5
