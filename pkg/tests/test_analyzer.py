# to run: python -m pytest -s tests/test_analyzer.py

import itertools
import typing
import math
import numpy as np
import pytest

from macauthpy.MacAnalyzer import MacAnalyzer, project_to_simplex
from macauthpy.channel import (
    attacked_channel,
    clean_channel,
    coupling_from_joint,
    effective_channel,
    encoder_output_law,
)
from macauthpy.errors import InvalidAttackError
from macauthpy.infotheory import entropy
from macauthpy.models import CouplingMode
from macauthpy.models.analysis_models import FeasibilityReport, RateSearchConfig
from macauthpy.models.channel_models import EncoderSpec, MacChannel
from macauthpy.models.prob_models import Distribution, StochasticKernel
from macauthpy.worked_example import (
    aux_encoder,
    aux_rate_closed_form,
    no_aux_encoder,
    example_channel,
)


def random_channel(rng: np.random.Generator, x_size=2, v_size=3, y_size=3) -> MacChannel:
    return MacChannel(law=rng.dirichlet(np.ones(y_size), size=(x_size, v_size)))


def random_encoder(rng: np.random.Generator, u_size=2, x_size=2) -> EncoderSpec:
    return EncoderSpec(
        pu=Distribution(rng.dirichlet(np.ones(u_size))),
        px_given_u=StochasticKernel(rng.dirichlet(np.ones(x_size), size=u_size)),
    )


def input_blind_channel(x_size=2, v_size=3) -> MacChannel:
    """Y = V: Alice has no influence on the output."""
    law = np.repeat(np.eye(v_size)[None, :, :], x_size, axis=0)
    return MacChannel(law=law)


def eve_blind_channel(x_size=2, v_size=3) -> MacChannel:
    """Y = X whatever Eve sends."""
    law = np.repeat(np.eye(x_size)[:, None, :], v_size, axis=1)
    return MacChannel(law=law)


def simplex_grid(size: int, step: float) -> np.ndarray:
    ticks = int(round(1.0 / step))
    points = [
        c for c in itertools.product(range(ticks + 1), repeat=size - 1) if sum(c) <= ticks
    ]
    return np.array([list(c) + [ticks - sum(c)] for c in points], dtype=float) / ticks


GRID_STEP = 0.02
ORACLE_BAND = 0.05


def random_instance(rng: np.random.Generator) -> typing.Tuple[MacChannel, EncoderSpec]:
    u_size, x_size, v_size, y_size = (int(size) for size in rng.integers(2, 4, size=4))
    return random_channel(rng, x_size, v_size, y_size), random_encoder(rng, u_size, x_size)


def general_grid_residual(ch: MacChannel, enc: EncoderSpec, step: float) -> float:
    """Grid minimum of the general-mode residual. Each P(u,v|u') is a grid point on the
    simplex of |Y| of the (u, v) pairs, which reaches every feasible point to within a
    grid cell."""
    pu = enc.pu.mass
    columns = encoder_output_law(ch, enc).reshape(-1, ch.y_size)
    reference = effective_channel(ch, enc).matrix
    support = min(ch.y_size, columns.shape[0])
    weights = simplex_grid(support, step)
    outputs = np.concatenate(
        [
            weights @ columns[list(pairs)]
            for pairs in itertools.combinations(range(columns.shape[0]), support)
        ]
    )
    return sum(
        pu[u_prime] * float(np.abs(outputs - reference[u_prime]).sum(axis=1).min())
        for u_prime in range(enc.u_size)
    )


def product_grid_residual(ch: MacChannel, enc: EncoderSpec, step: float) -> float:
    """Grid minimum of the product-coupling residual over kernels P(v|u',u)."""
    pu = enc.pu.mass
    w = encoder_output_law(ch, enc)
    reference = effective_channel(ch, enc).matrix
    grid = simplex_grid(ch.v_size, step)
    outputs = np.zeros((1, ch.y_size))
    for u in range(enc.u_size):
        part = pu[u] * (grid @ w[u])
        outputs = (outputs[:, None, :] + part[None, :, :]).reshape(-1, ch.y_size)
    return sum(
        pu[u_prime] * float(np.abs(outputs - reference[u_prime]).sum(axis=1).min())
        for u_prime in range(enc.u_size)
    )


def feasible_vertices(columns: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Vertices of {q in the simplex : q @ columns = target}, from basic solutions."""
    k = columns.shape[0]
    a_eq = np.vstack([columns.T, np.ones(k)])
    b_eq = np.append(target, 1.0)
    vertices: typing.List[np.ndarray] = []
    for size in range(1, a_eq.shape[0] + 1):
        for support in itertools.combinations(range(k), size):
            sub = a_eq[:, list(support)]
            if np.linalg.matrix_rank(sub) < size:
                continue
            coef = np.linalg.lstsq(sub, b_eq, rcond=None)[0]
            if np.abs(sub @ coef - b_eq).max() > 1e-9 or coef.min() < -1e-12:
                continue
            q = np.zeros(k)
            q[list(support)] = np.clip(coef, 0.0, None)
            q /= q.sum()
            if not any(np.abs(q - other).max() <= 1e-9 for other in vertices):
                vertices.append(q)
    return np.array(vertices)


def confusion_grid_minimum(ch: MacChannel, enc: EncoderSpec, step: float) -> float:
    """min I(U';U,V) over general-mode couplings whose rows P(u,v|u') are grid points
    (barycentric spacing `step`) of each row's feasible polytope."""
    pu = enc.pu.mass
    columns = encoder_output_law(ch, enc).reshape(-1, ch.y_size)
    reference = effective_channel(ch, enc).matrix
    rows = []
    for u_prime in range(enc.u_size):
        vertices = feasible_vertices(columns, reference[u_prime])
        rows.append(simplex_grid(len(vertices), step) @ vertices)

    index = np.array(list(itertools.product(*[range(len(points)) for points in rows])))
    q = np.stack([rows[u][index[:, u]] for u in range(enc.u_size)], axis=1)
    mixture = (pu[None, :, None] * q).sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(q > 0, q * np.log2(q / mixture), 0.0)
    return float((pu[None, :, None] * terms).sum(axis=(1, 2)).min())

def test_rate() -> None:
    analyzer = MacAnalyzer(example_channel())
    for p in (0.05, 0.1, 0.2):
        assert analyzer.rate(aux_encoder(p)) == pytest.approx(aux_rate_closed_form(p), abs=1e-9)
    assert analyzer.rate(aux_encoder(0.1)) == pytest.approx(0.319923, abs=1e-6)
    assert analyzer.rate(no_aux_encoder()) == pytest.approx(0.531004, abs=1e-6)


def test_silent_replay_always_general_feasible() -> None:
    rng = np.random.default_rng(20)
    for _ in range(20):
        ch = random_channel(rng)
        report = MacAnalyzer(ch).simulatability_lp(random_encoder(rng), CouplingMode.GENERAL)
        assert report.feasible
        assert report.residual <= 1e-7


def test_no_aux_encoder_is_simulatable() -> None:
    ch = example_channel()
    analyzer = MacAnalyzer(ch)
    for px in ((0.5, 0.5), (0.3, 0.7)):
        enc = no_aux_encoder(px)
        for mode in CouplingMode:
            report = analyzer.simulatability_lp(enc, mode)
            assert report.feasible
            assert report.mode == mode.value

        witness = analyzer.simulatability_lp(enc, CouplingMode.PRODUCT_COUPLING).witness_array()
        assert witness.shape == (2, 2, 3)
        assert witness.sum() == pytest.approx(1.0)
        assert np.allclose(witness.sum(axis=2), np.outer(enc.pu.mass, enc.pu.mass), atol=1e-9)
        attacked = attacked_channel(ch, enc, coupling_from_joint(ch, witness)).matrix
        assert np.abs(attacked - clean_channel(ch).matrix).max() <= 1e-7


def test_aux_encoder_is_admissible() -> None:
    analyzer = MacAnalyzer(example_channel())
    for p in (0.1, 0.4):
        enc = aux_encoder(p)
        report = analyzer.simulatability_lp(enc, CouplingMode.PRODUCT_COUPLING)
        assert not report.feasible
        assert report.witness is None
        assert report.residual >= 0.005
        assert analyzer.max_active_mass(enc) <= 1e-6
    # against the deterministic scheme Eve may transmit on every symbol
    assert analyzer.max_active_mass(no_aux_encoder()) == pytest.approx(1.0, abs=1e-9)


def test_feasibility_verdicts_match_grid_search() -> None:
    rng = np.random.default_rng(21)
    cases = [(example_channel(), no_aux_encoder()), (example_channel(), aux_encoder(0.2))]
    cases += [random_instance(rng) for _ in range(50)]
    product_checked = 0
    for ch, enc in cases:
        analyzer = MacAnalyzer(ch)
        general = analyzer.simulatability_lp(enc, CouplingMode.GENERAL)
        grid_min = general_grid_residual(ch, enc, GRID_STEP)
        assert general.residual <= grid_min + 1e-9
        assert general.feasible
        assert grid_min <= ORACLE_BAND

        # the product grid has |grid|^|U| points; 3 x 3 instances are out of reach
        if enc.u_size * ch.v_size > 6:
            continue
        product_checked += 1
        product = analyzer.simulatability_lp(enc, CouplingMode.PRODUCT_COUPLING)
        grid_min = product_grid_residual(ch, enc, GRID_STEP)
        assert product.residual <= grid_min + 1e-9
        if product.feasible:
            assert grid_min <= ORACLE_BAND
        if grid_min > ORACLE_BAND:
            assert not product.feasible
        if product.residual > ORACLE_BAND:
            assert grid_min > ORACLE_BAND
    assert product_checked >= 25


def test_min_confusion_matches_grid_search() -> None:
    rng = np.random.default_rng(23)
    for _ in range(50):
        # |U| = |V| = 2 and |Y| = 3 make each row's feasible set a segment
        ch = random_channel(rng, int(rng.integers(2, 4)), 2, 3)
        enc = random_encoder(rng, 2, ch.x_size)
        value = MacAnalyzer(ch).min_confusion_information(enc)
        grid_min = confusion_grid_minimum(ch, enc, GRID_STEP)
        assert value <= grid_min + 1e-3
        assert grid_min - value <= ORACLE_BAND

    # only silent replay is feasible: both sides equal H(U)
    grid_min = confusion_grid_minimum(example_channel(), aux_encoder(0.1), GRID_STEP)
    assert grid_min == pytest.approx(1.0, abs=1e-9)


def test_min_confusion_information() -> None:
    analyzer = MacAnalyzer(example_channel())
    single = EncoderSpec(pu=Distribution([1.0]), px_given_u=StochasticKernel([[0.5, 0.5]]))
    result = analyzer.min_confusion_coupling(single)
    assert result.value == 0.0
    assert result.coupling.shape == (1, 1, 3)

    # only silent replay matches the clean channel: I(U';U,V) = H(U)
    assert analyzer.min_confusion_information(aux_encoder(0.1)) == pytest.approx(1.0, abs=1e-3)
    # every feasible coupling determines U' from (U, V)
    assert analyzer.min_confusion_information(no_aux_encoder()) == pytest.approx(1.0, abs=1e-3)

    blind = MacAnalyzer(input_blind_channel())
    assert blind.min_confusion_information(aux_encoder(0.1)) == pytest.approx(0.0, abs=1e-3)


def test_min_confusion_bounds() -> None:
    rng = np.random.default_rng(22)
    for _ in range(3):
        enc = random_encoder(rng)
        result = MacAnalyzer(random_channel(rng)).min_confusion_coupling(enc)
        assert -1e-9 <= result.value <= entropy(enc.pu) + 1e-9
        assert result.coupling.sum() == pytest.approx(1.0, abs=1e-6)
        assert np.allclose(result.coupling.sum(axis=(1, 2)), enc.pu.mass, atol=1e-6)


def test_membership_check() -> None:
    analyzer = MacAnalyzer(example_channel())
    verdict = analyzer.membership_check(aux_encoder(0.1), rate=0.3)
    assert verdict.in_u_plus
    assert verdict.decision_mode == CouplingMode.PRODUCT_COUPLING.value
    assert verdict.min_confusion_info == math.inf
    assert verdict.safe_at_rate

    verdict = analyzer.membership_check(no_aux_encoder(), rate=0.5)
    assert not verdict.in_u_plus
    assert verdict.decision_residual <= 1e-7
    assert verdict.min_confusion_info == pytest.approx(1.0, abs=1e-3)
    assert verdict.safe_at_rate
    assert not analyzer.membership_check(no_aux_encoder(), rate=1.5).safe_at_rate

    with pytest.raises(ValueError):
        analyzer.membership_check(aux_encoder(0.1), rate=-0.1)


def test_synthesize_flip_attack() -> None:
    analyzer = MacAnalyzer(example_channel())
    enc = no_aux_encoder()
    report = analyzer.simulatability_lp(enc, CouplingMode.PRODUCT_COUPLING)
    kernel = analyzer.synthesize_attack(enc, report)
    assert kernel.source_mode == CouplingMode.PRODUCT_COUPLING.value

    # [x_hat][x][v]: silence when x == x_hat, else the symbol that flips x into x_hat
    expected = np.zeros((2, 2, 3))
    expected[0, 0, 0] = expected[1, 1, 0] = 1.0
    expected[0, 1, 2] = 1.0
    expected[1, 0, 1] = 1.0
    assert np.abs(kernel.input_array() - expected).max() <= 1e-6
    # U = X here
    assert np.allclose(kernel.codeword_array(), kernel.input_array())
    assert len(kernel.to_csv_rows()) == 8


def test_synthesize_from_silent_replay() -> None:
    analyzer = MacAnalyzer(example_channel())
    enc = aux_encoder(0.1)
    report = analyzer.simulatability_lp(enc, CouplingMode.GENERAL)
    assert report.feasible
    kernel = analyzer.synthesize_attack(enc, report)
    assert np.allclose(kernel.codeword_array()[:, :, 0], 1.0, atol=1e-6)
    assert np.allclose(kernel.input_array()[:, :, 0], 1.0, atol=1e-6)

    silent = np.zeros((2, 2, 3))
    silent[0, 0, 0] = silent[1, 1, 0] = 0.5
    manual = FeasibilityReport(
        feasible=True, residual=0.0, witness=silent.tolist(), mode=CouplingMode.GENERAL
    )
    assert np.array_equal(analyzer.synthesize_attack(enc, manual).codeword_array()[:, :, 0], np.ones((2, 2)))


def test_synthesize_rejects_infeasible_report() -> None:
    analyzer = MacAnalyzer(example_channel())
    enc = aux_encoder(0.1)
    report = analyzer.simulatability_lp(enc, CouplingMode.PRODUCT_COUPLING)
    with pytest.raises(InvalidAttackError):
        analyzer.synthesize_attack(enc, report)

    wrong_shape = FeasibilityReport(
        feasible=True, residual=0.0, witness=np.full((1, 1, 3), 1 / 3).tolist(), mode=CouplingMode.GENERAL
    )
    with pytest.raises(InvalidAttackError):
        analyzer.synthesize_attack(enc, wrong_shape)


def test_project_to_simplex() -> None:
    assert np.allclose(project_to_simplex(np.array([0.5, 0.5])), [0.5, 0.5])
    assert np.allclose(project_to_simplex(np.array([1.25, 0.0])), [1.0, 0.0])
    assert np.allclose(project_to_simplex(np.array([0.75, 0.5])), [0.625, 0.375])
    projected = project_to_simplex(np.array([-0.2, 0.4, 0.9]))
    assert projected.min() >= 0.0
    assert projected.sum() == pytest.approx(1.0)


def test_rate_bound_single_symbol() -> None:
    result = MacAnalyzer(example_channel()).optimize_rate_bound(1, RateSearchConfig(restarts=2))
    assert result.best_rate == 0.0
    assert result.best_encoder is None
    assert len(result.search_trace) == 2
    assert not any(rec.in_u_plus for rec in result.search_trace)
    with pytest.raises(ValueError):
        MacAnalyzer(example_channel()).optimize_rate_bound(0)


def test_rate_bound_example_channel() -> None:
    analyzer = MacAnalyzer(example_channel())
    search = RateSearchConfig(restarts=4, seed=0)
    result = analyzer.optimize_rate_bound(2, search)
    assert result.clean_capacity == pytest.approx(0.531004, abs=1e-6)
    assert 0.30 <= result.best_rate <= result.clean_capacity + 1e-9
    assert result.best_rate == pytest.approx(
        analyzer.rate(result.best_encoder.to_encoder()), abs=1e-12
    )
    assert result.verdicts.in_u_plus
    assert len(result.search_trace) == 8
    assert len(result.to_dataframe()) == 8


def test_rate_bound_is_reproducible() -> None:
    analyzer = MacAnalyzer(example_channel())
    search = RateSearchConfig(restarts=2, seed=3)
    first = analyzer.optimize_rate_bound(2, search)
    second = analyzer.optimize_rate_bound(2, search)
    assert first.to_json() == second.to_json()


def test_rate_bound_when_eve_is_powerless() -> None:
    result = MacAnalyzer(eve_blind_channel()).optimize_rate_bound(2, RateSearchConfig(restarts=3))
    assert result.clean_capacity == pytest.approx(1.0, abs=1e-6)
    assert result.best_rate >= 0.99
