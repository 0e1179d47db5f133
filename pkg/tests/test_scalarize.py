import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from moead_amr.core import IdealNadir, ParameterError
from moead_amr.scalarize import (
    PSParams,
    ScalarizerSpec,
    classic_scalarize,
    degenerate_axes,
    nbi_tch_params,
    nbi_tch_reference,
    nbi_tch_scalarize,
    normalize,
    ps_scalarize,
    ps_scalarize_normalized,
    qi_variant_scalarize,
    special_case_params,
)

finite = st.floats(-1e3, 1e3)
positive = st.floats(1e-3, 1e3)


def zn(z_star, z_nad=None):
    z_star = np.asarray(z_star, dtype=float)
    return IdealNadir(z_star, z_star + 1.0 if z_nad is None else np.asarray(z_nad, dtype=float))


class TestPS:
    def test_examples(self):
        assert ps_scalarize([0.3, 0.7], PSParams(np.zeros(2), np.ones(2))) == 0.7
        a = np.array([0.4, -1.2, 3.0])
        assert ps_scalarize(a, PSParams(a, np.array([1.0, 2.0, 3.0]))) == 0.0
        v = ps_scalarize([0.2, 0.4], PSParams(np.zeros(2), np.array([2.0, 2.0])))
        tch = classic_scalarize([0.2, 0.4], ScalarizerSpec("TCH", w=np.array([0.5, 0.5])), zn([0, 0]))
        assert v == pytest.approx(0.2) and tch == pytest.approx(0.2)

    @pytest.mark.parametrize("r", [(1.0, 0.0), (1.0, -1.0)])
    def test_nonpositive_direction_rejected(self, r):
        with pytest.raises(ParameterError):
            PSParams(np.zeros(2), np.array(r))

    def test_normalized_examples(self):
        ps = PSParams(np.zeros(2), np.ones(2))
        assert ps_scalarize_normalized([2, 2], ps, zn([0, 0], [2, 2])) == 1.0
        ps = PSParams(np.array([0.3, -0.1]), np.array([0.5, 2.0]))
        assert ps_scalarize_normalized([1, 5], ps, zn([1, 5], [3, 9])) == max(-0.3 / 0.5, 0.1 / 2.0)
        ps = PSParams(np.array([0.5, -0.5]), np.ones(2))
        assert ps_scalarize_normalized([1, 3], ps, zn([0, 2], [2, 4])) == 1.0

    def test_degenerate_axis_is_clamped_and_flagged(self):
        z = zn([0.0, 1.0], [1.0, 1.0])
        assert degenerate_axes(z).tolist() == [False, True]
        v = ps_scalarize_normalized([0.5, 1.0 + 1e-13], PSParams(np.zeros(2), np.ones(2)), z)
        assert math.isfinite(v) and v == pytest.approx(0.5)

    @given(arrays(float, 3, elements=finite), arrays(float, 3, elements=st.floats(0, 10)),
           arrays(float, 3, elements=finite), arrays(float, 3, elements=positive))
    def test_weak_monotonicity(self, f, bump, a, r):
        ps = PSParams(a, r)
        assert ps_scalarize(f, ps) <= ps_scalarize(f + bump, ps)

    @given(arrays(float, 3, elements=finite), arrays(float, 3, elements=finite),
           arrays(float, 3, elements=st.floats(0.1, 10)), st.floats(-100, 100))
    def test_translation_along_direction(self, f, a, r, t):
        ps = PSParams(a, r)
        assert ps_scalarize(f + t * r, ps) == pytest.approx(ps_scalarize(f, ps) + t, abs=1e-9)

    @given(arrays(float, 2, elements=finite), arrays(float, 2, elements=finite),
           arrays(float, 2, elements=st.floats(0.01, 100)), arrays(float, 2, elements=finite),
           arrays(float, 2, elements=positive))
    def test_normalized_is_ps_of_normalized_vector(self, f, zs, span, a, r):
        z = IdealNadir(zs, zs + span)
        ps = PSParams(a, r)
        assert ps_scalarize_normalized(f, ps, z) == ps_scalarize(normalize(f, z), ps)


class TestClassic:
    def test_table_examples(self):
        z0 = zn([0, 0])
        w = np.array([0.5, 0.5])
        assert classic_scalarize([2, 4], ScalarizerSpec("WS", w=w)) == 3.0
        assert classic_scalarize([0.2, 0.4], ScalarizerSpec("TCH", w=w), z0) == pytest.approx(0.2)
        pbi = classic_scalarize([1, 1], ScalarizerSpec("PBI", w=np.array([1.0, 1e-300]), theta=5), z0)
        assert pbi == pytest.approx(6.0)

    def test_hand_evaluated_rows(self):
        w = np.array([0.25, 0.75])
        z = zn([1.0, 0.0], [3.0, 2.0])
        f = np.array([2.0, 1.0])
        d = f - z.z_star
        assert classic_scalarize(f, ScalarizerSpec("mTCH", w=w), z) == max(d / w)
        assert classic_scalarize(f, ScalarizerSpec("aTCH", w=w, rho=0.1), z) == pytest.approx(
            max(w * d) + 0.1 * sum(d))
        assert classic_scalarize(f, ScalarizerSpec("rTCH", w=w), z) == -min(w * (z.z_nad - f))
        assert classic_scalarize(f, ScalarizerSpec("Lp", w=w, p=2), z) == pytest.approx(
            math.hypot(*(d / w)))
        assert classic_scalarize(f, ScalarizerSpec("MSF", w=w, beta=1.0), z) == pytest.approx(
            max(d / w) ** 2 / min(d / w))
        lam = w / np.linalg.norm(w, 3)
        assert classic_scalarize(f, ScalarizerSpec("pTCH", w=w, p=3), z) == pytest.approx(max(d / lam))

    def test_lp_limits(self):
        w = np.array([0.3, 0.7])
        z = zn([0.0, 0.0])
        f = np.array([0.6, 0.2])
        assert classic_scalarize(f, ScalarizerSpec("Lp", w=w, p=math.inf), z) == max(f / w)
        assert classic_scalarize(f, ScalarizerSpec("Lp", w=w, p=1), z) == pytest.approx(sum(f / w))

    def test_msf_touching_ideal_is_infinite(self):
        v = classic_scalarize([0.0, 1.0], ScalarizerSpec("MSF", w=np.array([0.5, 0.5]), beta=1), zn([0, 0]))
        assert v == math.inf
        v = classic_scalarize([0.0, 1.0], ScalarizerSpec("MSF", w=np.array([0.5, 0.5]), beta=0), zn([0, 0]))
        assert v == 2.0

    def test_invalid_parameters(self):
        with pytest.raises(ParameterError):
            ScalarizerSpec("XYZ")
        with pytest.raises(ParameterError):
            ScalarizerSpec("PBI", theta=0)
        with pytest.raises(ParameterError):
            ScalarizerSpec("Lp", p=0.5)
        with pytest.raises(ParameterError):
            classic_scalarize([1, 1], ScalarizerSpec("TCH", w=np.array([1.0, 0.0])), zn([0, 0]))


class TestSpecialCases:
    def test_table_rows(self):
        p = special_case_params("TCH", [0.25, 0.75], [1, 2])
        assert p.a.tolist() == [1, 2] and np.allclose(p.r, [4, 4 / 3], rtol=0, atol=1e-15)
        p = special_case_params("mTCH", [0.5, 0.5], [0, 0])
        assert p.a.tolist() == [0, 0] and p.r.tolist() == [0.5, 0.5]
        p = special_case_params("QiVariant", [0.5, 0.5], [0, 0])
        assert p.r.tolist() == [2.0, 2.0]

    def test_errors(self):
        with pytest.raises(ParameterError):
            special_case_params("TCH", [0.0, 1.0], [0, 0])
        with pytest.raises(ParameterError):
            special_case_params("PBI", [0.5, 0.5], [0, 0])

    @pytest.mark.parametrize("m", [2, 3])
    @pytest.mark.parametrize("kind", ["TCH", "mTCH", "pTCH", "QiVariant"])
    def test_equivalence_1000_samples(self, kind, m):
        rng = np.random.default_rng(100 + m)
        for _ in range(1000):
            w = rng.dirichlet(np.ones(m)) + 1e-3
            w /= w.sum()
            z_star = rng.uniform(-2, 2, m)
            f = z_star + rng.uniform(-1, 3, m)
            ps = special_case_params(kind, w, z_star)
            if kind == "QiVariant":
                ref = qi_variant_scalarize(f, w, z_star)
            else:
                ref = classic_scalarize(f, ScalarizerSpec(kind, w=w), IdealNadir(z_star, z_star + 1))
            assert abs(ps_scalarize(f, ps) - ref) <= 1e-10

    def test_nbi_tch_equivalence(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            F1 = np.array([0.0, 1.0]) + rng.uniform(-0.2, 0.2, 2)
            F2 = np.array([1.0, 0.0]) + rng.uniform(-0.2, 0.2, 2)
            N = int(rng.integers(2, 200))
            i = int(rng.integers(1, N + 1))
            b, gamma = nbi_tch_reference(i, N, F1, F2)
            f = rng.uniform(-1, 2, 2)
            assert abs(ps_scalarize(f, nbi_tch_params(b, gamma)) - nbi_tch_scalarize(f, b, gamma)) <= 1e-10
