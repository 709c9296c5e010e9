from dataclasses import replace

import numpy as np
import pytest

from savwave.experiments import (
    ERROR_KEYS,
    EnergyIncrease,
    ErrorRow,
    StudyConfig,
    compute_errors,
    energy_study,
    example1_case,
    fill_rates,
    observed_rate,
    spatial_study,
    temporal_study,
)
from savwave.model import example_problem
from savwave.spectral import make_grid
from savwave.stepper import SavState, start


def state(p, u, v, R, t=1.0):
    return SavState(n=1, u=u, v=v, R=R, t=t)


class TestObservedRate:
    @pytest.mark.parametrize("a,b,rate", [(4.0, 1.0, 2.0), (1.0, 1.0, 0.0), (1e-3, 2.5e-4, 2.0), (1.0, 2.0, -1.0)])
    def test_values(self, a, b, rate):
        assert observed_rate(a, b) == pytest.approx(rate, abs=1e-15)

    def test_published_error_pairs(self):
        # recomputed from the published error values, not the printed rate column
        assert observed_rate(5.4953e-05, 1.3671e-05) == pytest.approx(2.0071, abs=1e-4)
        assert observed_rate(1.3671e-05, 3.4055e-06) == pytest.approx(2.0052, abs=1e-4)

    @pytest.mark.parametrize("a,b", [(0.0, 1.0), (1.0, 0.0), (-1.0, 1.0)])
    def test_rejects_nonpositive(self, a, b):
        with pytest.raises(ValueError):
            observed_rate(a, b)

    def test_fill_rates(self):
        rows = [ErrorRow(0.1, *([4.0] * 6)), ErrorRow(0.05, *([1.0] * 6)), ErrorRow(0.025, *([0.0] * 6))]
        fill_rates(rows)
        assert all(v is None for v in rows[0].rates.values())
        assert rows[1].rates["e_u_inf"] == 2.0
        assert rows[2].rates["e_r"] is None
        assert set(rows[1].rates) == set(ERROR_KEYS)


class TestComputeErrors:
    def test_identical_states(self):
        p = example_problem("example1", 8)
        s = start(p)
        row = compute_errors(s, s, p)
        assert all(getattr(row, k) == 0 for k in ERROR_KEYS)

    def test_constant_offset(self):
        p = example_problem("example1", 8)
        z = np.zeros(p.grid.shape)
        row = compute_errors(state(p, z + 0.5, z, 2.0), state(p, z, z - 0.25, 1.5), p)
        assert row.e_u_inf == 0.5 and row.e_v_inf == 0.25 and row.e_r == 0.5
        assert row.e_u_seminorm == pytest.approx(0.0, abs=1e-14)
        assert row.e_u_l2 == pytest.approx(0.5 * 32, rel=1e-14)
        assert row.e_v_l2 == pytest.approx(0.25 * 32, rel=1e-14)

    def test_symmetric(self):
        p = example_problem("example1", 8)
        rng = np.random.default_rng(1)
        a = state(p, *rng.normal(size=(2, 8, 8)), 1.0)
        b = state(p, *rng.normal(size=(2, 8, 8)), 3.0)
        r1, r2 = compute_errors(a, b, p), compute_errors(b, a, p)
        for k in ERROR_KEYS:
            assert getattr(r1, k) == pytest.approx(getattr(r2, k), rel=1e-14)

    def test_time_mismatch(self):
        p = example_problem("example1", 8)
        z = np.zeros(p.grid.shape)
        with pytest.raises(ValueError, match="time mismatch"):
            compute_errors(state(p, z, z, 1.0, t=1.0), state(p, z, z, 1.0, t=0.9), p)

    def test_finer_reference_restricted(self):
        p = example_problem("example1", 8)
        fine = make_grid(32, p.grid.bounds)
        xc, _ = p.grid.mesh()
        xf, _ = fine.mesh()
        coarse_u = np.sin(np.pi * xc / 16)
        ref_u = np.sin(np.pi * xf / 16) + 1e-3 * np.cos(9 * np.pi * xf / 16)
        z8, z32 = np.zeros((8, 8)), np.zeros((32, 32))
        row = compute_errors(state(p, coarse_u, z8, 1.0), state(p, ref_u, z32, 1.0), p)
        assert row.e_u_inf < 1e-14  # the unresolved mode is truncated away


class TestTemporalStudy:
    def test_second_order(self):
        p = example1_case(16, 1.2, 2)
        rows = temporal_study(StudyConfig(problem=p, k_ref=400, tau_list=[1 / 10, 1 / 20, 1 / 40]))
        assert [r.param for r in rows] == [1 / 10, 1 / 20, 1 / 40]
        for row in rows[1:]:
            for key in ("e_u_inf", "e_v_inf", "e_r"):
                assert 1.7 <= row.rates[key] <= 2.3

    def test_self_reference_is_zero(self):
        p = example1_case(8, 1.5, 1)
        rows = temporal_study(StudyConfig(problem=p, k_ref=20, tau_list=[1 / 20]))
        assert rows[0].e_u_inf == 0 and rows[0].e_r == 0

    def test_reference_must_be_finest(self):
        p = example1_case(8, 1.5, 1)
        with pytest.raises(ValueError, match="reference"):
            temporal_study(StudyConfig(problem=p, k_ref=10, tau_list=[1 / 20]))

    def test_case_validation(self):
        with pytest.raises(ValueError):
            example1_case(8, 1.2, 3)


class TestSpatialStudy:
    def test_band_limited_data_hits_the_floor(self):
        # a tiny single-mode field keeps the nonlinearity far below resolution error
        p = example1_case(4, 1.2, 1)

        def initial(q):
            x, _ = q.grid.mesh()
            return 1e-3 * np.cos(2 * np.pi * (x - q.grid.xmin) / q.grid.lx), np.zeros(q.grid.shape)

        rows = spatial_study(StudyConfig(problem=p, n_ref=32, k_ref=20, n_list=[4, 8, 16], initial=initial))
        assert [int(r.param) for r in rows] == [4, 8, 16]
        for row in rows[1:]:
            assert row.e_u_seminorm < 1e-12 and row.e_u_l2 < 1e-12

    def test_reference_must_be_finest(self):
        with pytest.raises(ValueError, match="reference"):
            spatial_study(StudyConfig(problem=example1_case(8, 1.2, 1), n_ref=16, n_list=[32]))

    def test_spectral_decay(self):
        p = example1_case(4, 1.2, 1)
        rows = spatial_study(StudyConfig(problem=p, n_ref=32, k_ref=100, n_list=[4, 8, 16]))
        errs = [r.e_u_seminorm for r in rows]
        assert errs[0] > errs[1] > errs[2]
        assert rows[2].rates["e_u_seminorm"] > 5


class TestEnergyStudy:
    def test_ledgers_per_pair(self):
        p = example_problem("example1", 16)
        out = energy_study(p, "example1", 20, [(0, 0), (1, 0), (0, 1)])
        assert set(out) == {(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)}
        H = {k: np.array([r.H for r in v]) for k, v in out.items()}
        assert np.max(np.abs(H[(0.0, 0.0)] - H[(0.0, 0.0)][0])) < 1e-11 * H[(0.0, 0.0)][0]
        assert H[(1.0, 0.0)][-1] < H[(0.0, 0.0)][-1]
        assert H[(0.0, 1.0)][-1] < H[(0.0, 0.0)][-1]

    def test_energy_increase_is_an_error(self, monkeypatch):
        import savwave.experiments as ex

        real_run = ex.run

        def rigged(q, which, steps, verify):
            final, ledger = real_run(q, which, steps=steps, verify=verify)
            ledger[-1] = replace(ledger[-1], H=ledger[0].H * 1.01)
            return final, ledger

        monkeypatch.setattr(ex, "run", rigged)
        with pytest.raises(EnergyIncrease):
            energy_study(example_problem("example1", 8), "example1", 5, [(1.0, 0.0)])
