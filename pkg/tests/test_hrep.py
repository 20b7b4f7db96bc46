import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from common.exceptions import DegenerateSpectrum, DimensionError, InvalidHRep, RankDeficient, SamplingFailed
from hrep import (
    R0_CONDITIONING_FLOOR,
    HRep,
    assemble_mixer,
    assemble_toeplitz,
    canonicalize_hrep,
    canonicalizing_rotation,
    hrep_distance,
    r0_conditioning,
    sample,
    to_factor,
    toeplitz_from_blocks,
    validate,
)
from numeric import in_canonical_set, nullspace, rank

GRID = [(d, N, P) for d in (1, 2, 3) for P in (1, 2, 3) for N in range(d, 7)]


def test_e1_is_valid(e1_hrep):
    report = validate(e1_hrep)
    assert report.passed
    assert report.constraint_residual == 0.0
    assert report.rank_r0 == 1


def test_toeplitz_block_layout():
    W = [np.array([[float(k)]]) for k in (1, 2, 3, 4)]
    T = toeplitz_from_blocks(W, d=1, P=2)
    np.testing.assert_array_equal(T, [[3.0, 2.0, 1.0], [4.0, 3.0, 2.0]])


def test_mixer_layout():
    h = sample(2, 3, 2, seed=1)
    M = assemble_mixer(h)
    d = h.d
    np.testing.assert_array_equal(np.diag(M), np.ones(3 * d))
    np.testing.assert_array_equal(M[2 * d:, :d], 1j * h.w(2))
    np.testing.assert_array_equal(M[:d, d:], 0.0)


def test_to_factor_rejects_broken_constraint(e1_hrep):
    broken = e1_hrep.with_blocks(e1_hrep.W, (e1_hrep.R[0], 2.0 * e1_hrep.R[1]), canonical=True)
    assert not validate(broken).constraint_ok
    with pytest.raises(InvalidHRep):
        to_factor(broken)


def test_to_factor_rejects_asymmetric_w():
    h = HRep(2, 2, 1, W=(np.array([[0.0, 1.0], [0.0, 0.0]]), np.zeros((2, 2))),
             R=(np.eye(2), np.zeros((2, 2))))
    assert not validate(h).symmetry_ok
    with pytest.raises(InvalidHRep):
        to_factor(h)


def test_hrep_shape_validation():
    with pytest.raises(DimensionError):
        HRep(1, 2, 1, W=(np.eye(1),), R=(np.ones((1, 2)), np.ones((1, 2))))
    with pytest.raises(DimensionError):
        HRep(1, 2, 1, W=(np.eye(1), np.eye(1)), R=(np.ones((1, 3)), np.ones((1, 2))))
    with pytest.raises(DimensionError):
        HRep(0, 2, 1, W=(), R=())


def test_sample_is_deterministic():
    a = sample(2, 4, 2, seed=11)
    b = sample(2, 4, 2, seed=11)
    for x, y in zip(a.W + a.R, b.W + b.R):
        np.testing.assert_array_equal(x, y)
    assert a.seed == 11


def test_sample_rejects_bad_sizes():
    with pytest.raises(DimensionError):
        sample(3, 2, 1, seed=0)
    with pytest.raises(DimensionError):
        sample(1, 2, 0, seed=0)
    with pytest.raises(DimensionError):
        sample(1, 2, 1, seed=0, scale=-1.0)


def test_sample_gives_up_after_retries(tolerances):
    impossible = tolerances.model_copy(update={"eps_cons": 1e-300})
    with pytest.raises(SamplingFailed):
        sample(2, 3, 2, seed=0, tolerances=impossible, max_retries=2)


def test_r0_conditioning():
    R = (np.diag([1.0, 1e-3]), np.zeros((2, 2)))
    assert r0_conditioning(R) == pytest.approx(1e-3 * np.sqrt(2.0) / np.sqrt(1.0 + 1e-6))
    assert r0_conditioning((np.zeros((1, 2)), np.zeros((1, 2)))) == 0.0


@pytest.mark.parametrize("d, N, P, seed", [(1, 3, 3, 329), (3, 4, 2, 38)])
def test_sample_respects_conditioning_floor(d, N, P, seed):
    assert r0_conditioning(sample(d, N, P, seed=seed).R) >= R0_CONDITIONING_FLOOR


def test_sample_rejects_ill_conditioned_draws():
    # sigma_min(R_0) <= ||R_0|| / sqrt(d) keeps the ratio below sqrt(P + 1)
    with pytest.raises(SamplingFailed):
        sample(2, 3, 1, seed=0, max_retries=3, min_conditioning=10.0)


def test_zero_scale_gives_real_factor():
    h = sample(2, 3, 2, seed=5, scale=0.0)
    assert h.w_norm() == 0.0
    assert to_factor(h).is_real_valued()


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000), index=st.integers(0, len(GRID) - 1))
def test_sampled_gramians_are_real(seed, index):
    d, N, P = GRID[index]
    h = sample(d, N, P, seed=seed)
    assert validate(h).passed
    G = to_factor(h).gram()
    assert G.relative_imag() <= 1e-9


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 100_000), index=st.integers(0, len(GRID) - 1))
def test_constraint_matrix_nullity_at_least_d(seed, index):
    d, N, P = GRID[index]
    T = assemble_toeplitz(sample(d, N, P, seed=seed))
    assert T.shape == (P * d, (P + 1) * d)
    assert T.shape[1] - rank(T) >= d


def test_canonicalize_hrep_keeps_gramian():
    h = sample(3, 5, 2, seed=8)
    c = canonicalize_hrep(h)
    assert c.canonical and validate(c).passed
    assert in_canonical_set(c.R[0])
    norms = np.linalg.norm(c.R[0], axis=1)
    assert np.all(np.diff(norms) < 0)
    for B1, B2 in zip(to_factor(h).gram().coeffs, to_factor(c).gram().coeffs):
        np.testing.assert_allclose(B1, B2, atol=1e-10 * (1 + np.abs(B1).max()))
    assert hrep_distance(canonicalize_hrep(c), c) < 1e-12


def test_canonicalizing_rotation_errors():
    with pytest.raises(DegenerateSpectrum):
        canonicalizing_rotation(np.eye(2))
    with pytest.raises(RankDeficient):
        canonicalizing_rotation(np.array([[1.0, 0.0], [2.0, 0.0]]))


def test_hrep_distance_requires_same_sizes(e1_hrep):
    with pytest.raises(DimensionError):
        hrep_distance(e1_hrep, sample(1, 3, 1, seed=0))
    assert hrep_distance(e1_hrep, e1_hrep) == 0.0


@pytest.mark.parametrize("d, P", [(1, 1), (2, 2), (3, 3)])
def test_zero_lower_blocks_leave_no_full_rank_lead(d, P):
    # with W_1..W_P = 0 the first block row reads W_{P+1} R_0 = 0
    rng = np.random.default_rng(d + P)
    upper = [0.5 * (M + M.T) for M in rng.standard_normal((P, d, d))]
    W = [np.zeros((d, d))] * P + upper
    basis = nullspace(toeplitz_from_blocks(W, d, P))
    assert basis.shape[1] >= d
    assert np.linalg.norm(basis[:d]) <= 1e-10
