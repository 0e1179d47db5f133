import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moead_amr import problems
from moead_amr.core import Bounds, ContractError, nondominated_filter
from moead_amr.metrics import igd
from moead_amr.problems import (
    REGISTRY,
    UnsupportedProblemError,
    eval_F1,
    eval_F2,
    eval_HC,
    eval_RI,
    evaluate,
    get_problem,
    reference_front,
    sample_reference_front,
    thin_front,
)


def x_of(name, **set_):
    p = get_problem(name)
    x = p.bounds.lower.copy()
    for k, v in set_.items():
        x[int(k[1:]) - 1] = v
    return x


def ri_oracle(x):
    """Term-by-term re-transcription of the rocket-injector polynomials."""
    x1, x2, x3, x4 = x
    f1 = (0.692 + 0.477 * x1 - 0.687 * x2 - 0.08 * x3 - 0.065 * x4 - 0.167 * x1**2 - 0.0129 * x1 * x2
          + 0.0796 * x2**2 - 0.0634 * x1 * x3 - 0.0257 * x2 * x3 + 0.0877 * x3**2 - 0.0521 * x1 * x4
          + 0.00156 * x2 * x4 + 0.00198 * x3 * x4 + 0.0184 * x4**2)
    f2 = (0.153 - 0.322 * x1 + 0.396 * x2 + 0.424 * x3 + 0.0226 * x4 + 0.175 * x1**2 + 0.0185 * x1 * x2
          - 0.0701 * x2**2 - 0.251 * x1 * x3 + 0.179 * x2 * x3 + 0.015 * x3**2 + 0.0134 * x1 * x4
          + 0.0296 * x2 * x4 + 0.0752 * x3 * x4 + 0.0192 * x4**2)
    f3 = (0.37 - 0.205 * x1 + 0.0307 * x2 + 0.108 * x3 + 1.019 * x4 - 0.135 * x1**2 + 0.0141 * x1 * x2
          + 0.0998 * x2**2 + 0.208 * x1 * x3 - 0.0301 * x2 * x3 - 0.226 * x3**2 + 0.353 * x1 * x4
          - 0.0497 * x3 * x4 - 0.423 * x4**2 + 0.202 * x1**2 * x2 - 0.281 * x1**2 * x3
          - 0.342 * x1 * x2**2 - 0.245 * x2**2 * x3 + 0.281 * x2 * x3**2 - 0.184 * x1 * x4**2
          - 0.281 * x1 * x2 * x3)
    return np.array([f1, f2, f3])


class TestEvaluators:
    def test_zdt1_points(self):
        assert evaluate(get_problem("zdt1"), np.zeros(30)).tolist() == [0.0, 1.0]
        assert evaluate(get_problem("zdt1"), x_of("zdt1", x1=1.0)).tolist() == [1.0, 0.0]

    def test_dtlz2_corner(self):
        x = np.full(12, 0.5)
        x[:2] = 0.0
        assert np.allclose(evaluate(get_problem("dtlz2"), x), [1, 0, 0], atol=1e-15)

    def test_dtlz1_shrunk_domain(self):
        p = get_problem("dtlz1")
        assert p.bounds.lower[0] == 0.0001 and p.bounds.upper[0] == 0.9999
        with pytest.raises(ContractError):
            evaluate(p, np.zeros(7))

    def test_f1_points(self):
        assert eval_F1(np.zeros(30)).tolist() == [0.5, 0.0]
        f = eval_F1(np.r_[-1.0, np.zeros(29)])
        assert f[0] == pytest.approx(1 - 1 / (1 + math.exp(10))) and f[1] == -1.0
        assert f[0] == pytest.approx(0.9999546, abs=1e-7)
        assert eval_F1(np.r_[0.0, np.ones(29)])[0] == pytest.approx(5.0)

    def test_f2_points(self):
        x = np.full(12, 0.5)
        x[:2] = 0.0
        assert np.allclose(eval_F2(x), [0, 1, 1], atol=1e-15)
        x[1] = 1.0
        f = eval_F2(x)
        assert f[2] == pytest.approx(0, abs=1e-15) and f[0] == pytest.approx(1.0)

    def test_f2_grows_with_g(self):
        x = np.full(12, 0.5)
        x[:2] = 0.3
        base = eval_F2(x)
        x[5] = 0.9
        assert (eval_F2(x) > base).all()

    def test_hc_points(self):
        f = eval_HC([0.5, 0.5])
        assert f[0] == 60.5
        assert f[1] == pytest.approx(24.7142857 + 7 + 3.2819048 + 9.2857143, abs=1e-6)
        assert abs(f[1] - 44.2819) <= 1e-3
        f = eval_HC([4.0, 50.0])
        assert f[0] == 6004.0 and f[1] == 0.0

    def test_ri_points(self):
        assert eval_RI(np.zeros(4)).tolist() == [0.692, 0.153, 0.37]
        assert eval_RI([1.0, 0, 0, 0])[0] == pytest.approx(1.002, abs=1e-12)

    def test_ri_matches_independent_transcription(self):
        X = np.random.default_rng(8).random((100, 4))
        for x in X:
            assert np.allclose(eval_RI(x), ri_oracle(x), rtol=0, atol=1e-13)

    def test_wrong_shape(self):
        with pytest.raises(ContractError):
            evaluate(get_problem("zdt1"), np.zeros(29))

    @pytest.mark.parametrize("name", sorted(REGISTRY))
    def test_scalar_kernel_matches_vectorized_transcription(self, name):
        p = get_problem(name)
        rng = np.random.default_rng(len(name))
        X = p.bounds.lower + (p.bounds.upper - p.bounds.lower) * rng.random((100, p.n))
        batch = p.batch_evaluator(X)
        scalar = np.array([p.evaluator(x) for x in X])
        assert batch.shape == (100, p.m)
        assert np.allclose(scalar, batch, rtol=1e-12, atol=1e-12)
        # pure and deterministic
        assert np.array_equal(scalar, np.array([p.evaluator(x) for x in X]))

    @settings(max_examples=50)
    @given(st.lists(st.floats(0, 1), min_size=12, max_size=12))
    def test_f2_nonnegative(self, x):
        assert (eval_F2(np.array(x)) >= 0).all()

    @settings(max_examples=50)
    @given(st.floats(0.5, 4), st.floats(0.5, 50))
    def test_hc_violation_nonnegative(self, a, b):
        assert eval_HC([a, b])[1] >= 0


class TestRegistry:
    def test_names(self):
        for name in ("zdt1", "zdt3", "mzdt1", "glt1", "glt3", "sch1", "dtlz1", "dtlz2", "dtlz5", "dtlz7",
                     "idtlz1", "idtlz2", "vnt2", "f1", "f2", "hc", "ri"):
            assert get_problem(name.upper()).name == name

    def test_unknown(self):
        with pytest.raises(UnsupportedProblemError):
            get_problem("zdt9")

    def test_no_sampler(self):
        p = problems.ProblemDef("toy", 2, 1, Bounds.uniform(1, 0, 1), lambda x: np.r_[x, 1 - x])
        with pytest.raises(UnsupportedProblemError):
            sample_reference_front(p, 10)

    def test_front_sizes(self):
        assert get_problem("zdt1").default_front_size == 1000
        assert get_problem("dtlz2").default_front_size == 5000


class TestFronts:
    def test_zdt1_three_points(self):
        assert sample_reference_front("zdt1", 3).tolist() == [[0, 1], [0.25, 0.5], [1, 0]]

    def test_dtlz_identities(self):
        F = sample_reference_front("dtlz2", 500)
        assert np.allclose(np.linalg.norm(F, axis=1), 1, rtol=0, atol=1e-9)
        F = sample_reference_front("dtlz1", 500)
        assert np.allclose(F.sum(axis=1), 0.5, rtol=0, atol=1e-9)
        F = sample_reference_front("dtlz5", 200)
        assert np.allclose(np.linalg.norm(F, axis=1), 1, rtol=0, atol=1e-9)
        # at g = 0 the second angle is pi/4, so the front is the curve f1 = f2
        assert np.allclose(F[:, 0], F[:, 1], rtol=0, atol=1e-9)

    @pytest.mark.parametrize("name", sorted(set(REGISTRY) - {"ri", "hc"}))
    def test_sampler_output_is_nondominated(self, name):
        F = sample_reference_front(name, 300)
        assert len(F) == 300
        assert len(nondominated_filter(F)) == len(F)

    def test_hc_front_stable_within_grid_resolution(self):
        p = get_problem("hc")
        coarse = problems._brute_front(p.batch_evaluator, p.bounds, grid=1000)(1000)
        fine = sample_reference_front(p, 1000)
        assert len(nondominated_filter(fine)) == len(fine)
        span = fine.max(axis=0) - fine.min(axis=0)
        assert igd(coarse / span, fine / span) < 5e-3

    def test_ri_brute_force_front(self):
        p = get_problem("ri")
        F = problems._brute_front(p.batch_evaluator, p.bounds, samples=200_000)(500)
        assert len(F) == 500 and len(nondominated_filter(F)) == 500

    def test_thin_front_keeps_extremes_and_count(self):
        s = np.linspace(0, 1, 10_001)
        P = np.column_stack([s, 1 - s])
        T = thin_front(P, 11)
        assert len(T) == 11 and [0, 1] in T.tolist() and [1, 0] in T.tolist()
        assert thin_front(P[:5], 11).shape == (5, 2)

    def test_cache_round_trip(self, tmp_path):
        a = reference_front("sch1", 50, cache_dir=tmp_path)
        path = tmp_path / "sch1_50.csv"
        assert path.read_text().splitlines()[0] == "f1,f2"
        b = reference_front("sch1", 50, cache_dir=tmp_path)
        assert np.array_equal(a, b)

    def test_cache_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MOEAD_AMR_CACHE", str(tmp_path))
        reference_front("zdt1", 7)
        assert (tmp_path / "zdt1_7.csv").exists()
