import json
import math

import numpy as np
import pytest

from mode_quest import (Algorithm, GeometricPrior, Instance, ObservationState, RunConfig,
                        make_instance, prior_pmf)


class TestInstance:
    def test_basic_properties(self):
        inst = make_instance([20, 12, 8, 5, 5], "I1")
        assert inst.K == 5
        assert inst.N == 50
        assert inst.mode == 0
        np.testing.assert_allclose(inst.p, [0.4, 0.24, 0.16, 0.1, 0.1])
        assert inst.top_two() == (20, 12)

    def test_mode_can_sit_anywhere(self):
        assert make_instance([3, 9, 4]).mode == 1

    def test_rejects_tied_maximum(self):
        with pytest.raises(ValueError, match="tied"):
            make_instance([5, 5, 1])

    @pytest.mark.parametrize("sizes", [[4], [3, 0, 2], [2, -1]])
    def test_rejects_bad_sizes(self, sizes):
        with pytest.raises(ValueError):
            Instance(tuple(sizes))

    def test_scaled(self):
        inst = make_instance([20, 18, 6, 3, 3], "I3").scaled(5)
        assert inst.sizes == (100, 90, 30, 15, 15)
        assert inst.N == 5 * 50

    def test_json_round_trip(self):
        inst = make_instance([7, 3, 2], "small")
        back = Instance.from_json(inst.to_json())
        assert back == inst
        assert json.loads(inst.to_json())["sizes"] == [7, 3, 2]


class TestPrior:
    def test_support_starts_at_zero(self):
        pr = GeometricPrior(0.1)
        assert math.isclose(prior_pmf(pr, 0), 0.1)
        assert math.isclose(prior_pmf(pr, 3), 0.1 * 0.9**3)

    def test_pmf_sums_to_one(self):
        pr = GeometricPrior(0.3)
        assert math.isclose(pr.pmf(np.arange(400)).sum(), 1.0, rel_tol=1e-12)

    def test_rejects_bad_parameters(self):
        for q in (0.0, 1.0, -0.2, 1.5):
            with pytest.raises(ValueError):
                GeometricPrior(q)
        with pytest.raises(ValueError):
            prior_pmf(GeometricPrior(0.5), -1)


class TestRunConfig:
    def test_defaults_and_label(self):
        c = RunConfig()
        assert c.delta == 0.1 and c.max_epochs == 10_000_000
        assert c.label == "NiMe"
        ib = RunConfig(0.1, Algorithm.IB_CME_1V1, 3, GeometricPrior(0.9))
        assert ib.label == "IbCme1v1(alpha=3,q=0.9)"

    @pytest.mark.parametrize("kw", [dict(delta=0.0), dict(delta=1.0), dict(alpha=0),
                                    dict(max_epochs=0)])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            RunConfig(**kw)

    def test_dict_round_trip(self):
        c = RunConfig(0.05, "IbCme", 2, GeometricPrior(0.2), seed=7, max_epochs=99)
        assert RunConfig.from_dict(c.to_dict()) == c

    def test_from_dict_defaults_yield_to_explicit_keys(self):
        c = RunConfig.from_dict({"algorithm": "NiMe1v1", "delta": 0.2}, delta=0.5, seed=3)
        assert c.delta == 0.2 and c.seed == 3

    def test_identity_flag(self):
        assert Algorithm.IB_CME.identity_based
        assert not Algorithm.NI_ME_1V1.identity_based


class TestObservationState:
    def test_record(self):
        st = ObservationState(3)
        for c, f in [(0, True), (0, False), (2, True)]:
            st.record(c, f)
        assert st.t == 3
        assert list(st.counts) == [2, 0, 1]
        assert list(st.distinct) == [1, 0, 1]
        assert st.observed == 2
        np.testing.assert_allclose(st.p_hat, [2 / 3, 0, 1 / 3])

    def test_constructors(self):
        st = ObservationState.from_counts([4, 1], [2, 1])
        assert st.t == 5 and st.observed == 2
        st2 = ObservationState.from_distinct([3, 0, 1], 9)
        assert st2.t == 9 and st2.observed == 2

    def test_copy_is_independent(self):
        st = ObservationState.from_counts([1, 2])
        cp = st.copy()
        cp.record(0)
        assert st.t == 3 and cp.t == 4
