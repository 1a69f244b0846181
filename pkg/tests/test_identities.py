"""Randomized identity suite: reproducibility, vector generator, report shape."""

import numpy as np
import pytest

from compact_clt.identities import ENTRY_BOUND, IDENTITY_NAMES, random_vector, run_identity_suite


class TestRandomVector:
    def test_bounds_and_sum(self):
        rng = np.random.default_rng(0)
        vs = [random_vector(rng, 5) for _ in range(500)]
        assert all(sum(v) == 0 and max(map(abs, v)) <= ENTRY_BOUND for v in vs)
        degenerate = sum(0 in v for v in vs)
        assert 60 < degenerate < 250

    def test_free_vectors(self):
        rng = np.random.default_rng(1)
        assert any(sum(random_vector(rng, 3, zero_sum=False)) != 0 for _ in range(20))


class TestSuite:
    def test_everything_but_the_literal_pair_check_passes(self):
        rep = run_identity_suite(max_ell=6, trials=30, seed=3)
        failed = {r.name for r in rep.results if not r.passed}
        assert failed == {"g_pair_equals_abs_k1"}
        assert {r.name for r in rep.results} == set(IDENTITY_NAMES)
        g_vanish = sorted(r.ell for r in rep.results if r.name == "g_vanishes")
        assert g_vanish == [3, 4, 5, 6]
        assert sorted(r.ell for r in rep.results if r.name == "rs_identity") == list(range(2, 8))

    def test_reproducible(self):
        a = run_identity_suite(max_ell=4, trials=15, seed=9).to_json()
        assert a == run_identity_suite(max_ell=4, trials=15, seed=9).to_json()

    def test_subset(self):
        rep = run_identity_suite(max_ell=3, trials=5, names=("g_vanishes",))
        assert rep.passed and [r.name for r in rep.results] == ["g_vanishes"]

    def test_validation(self):
        with pytest.raises(ValueError):
            run_identity_suite(max_ell=7)
        with pytest.raises(ValueError):
            run_identity_suite(trials=0)
        with pytest.raises(ValueError):
            run_identity_suite(names=("nope",))
