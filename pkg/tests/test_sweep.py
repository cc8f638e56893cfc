import math

import pytest

from janussim.harness.sweep import (
    SWEEP_CSV_HEADER,
    inflections_csv_lines,
    log_frequency_grid,
    sweep_threshold,
    table_csv_lines,
)
from janussim.physics.electrokinetics import (
    closed_form_inflections,
    threshold_voltage_normalized,
)


@pytest.fixture(scope="module")
def reference_tables():
    freqs = log_frequency_grid(1e2, 1e8, 240)
    return sweep_threshold(
        freqs,
        k_s_list_s=[10e-9, 50e-9, 100e-9],
        k_e_list_s_m=[4e-4, 19e-4],
    )


class TestSweep:
    def test_six_combinations(self, reference_tables):
        assert len(reference_tables) == 6
        labels = {t.label for t in reference_tables}
        assert len(labels) == 6

    def test_each_curve_has_plateau_and_two_rises(self, reference_tables):
        for t in reference_tables:
            values = [row[4] for row in t.rows if not math.isnan(row[4])]
            assert len(values) > 200
            plateau = min(values)
            assert values[0] > 3.0 * plateau  # low-frequency screening rise
            assert values[-1] > 2.0 * plateau  # high-frequency rise toward 4
            assert values[-1] == pytest.approx(4.0, rel=0.15)

    def test_single_row_matches_direct_evaluation(self, reference_tables):
        t = reference_tables[2]  # k_e=4 uS/cm, k_s=100 nS
        f, orc, omw, oh, v = t.rows[100]
        assert v == pytest.approx(threshold_voltage_normalized(f, t.params), rel=1e-12)
        o = t.params.dimensionless(f)
        assert (orc, omw, oh) == pytest.approx((o.omega_rc, o.omega_mw, o.omega_h))

    def test_k_s_ordering_in_transition_band(self, reference_tables):
        by_ks = {t.k_s_s: t for t in reference_tables if t.k_e_s_m == 4e-4}
        t100 = by_ks[100e-9]
        scale = t100.params.debye_length**2 / t100.params.diffusion_coeff
        for i, row in enumerate(t100.rows):
            omega_mw = row[2]
            if not (10.0 <= omega_mw <= 500.0):
                continue
            v10 = by_ks[10e-9].rows[i][4]
            v50 = by_ks[50e-9].rows[i][4]
            v100 = row[4]
            assert v10 > v50 > v100

    def test_inflections_detected_where_regimes_separate(self, reference_tables):
        detected = 0
        for t in reference_tables:
            if t.params.k_tilde < 2.0:
                # too close to the dielectric pole: the RC feature is not a
                # property of the full model there
                assert t.inflections is None
                continue
            detected += 1
            root_mw, root_rc = closed_form_inflections(t.params.k_tilde)
            assert t.inflections.omega_mw == pytest.approx(root_mw, rel=0.02)
            assert t.inflections.omega_rc == pytest.approx(root_rc, rel=0.02)
        assert detected == 5

    def test_csv_header_exact(self, reference_tables):
        lines = table_csv_lines(reference_tables[0], metadata=False)
        assert lines[0] == "frequency_hz,omega_rc,omega_mw,omega_h,v_norm"
        assert lines[0] == SWEEP_CSV_HEADER
        assert len(lines) == 1 + len(reference_tables[0].rows)

    def test_flagged_rows_kept_as_nan(self):
        tables = sweep_threshold(
            [1.0, 1e6], k_s_list_s=[0.05e-9], k_e_list_s_m=[4e-4]
        )
        t = tables[0]
        assert t.params.k_tilde < 1.0
        assert t.flagged_rows >= 1
        assert math.isnan(t.rows[0][4])
        assert len(t.rows) == 2  # flagged, not dropped
        assert t.inflections is None

    def test_inflections_csv(self, reference_tables):
        lines = inflections_csv_lines(reference_tables)
        assert lines[0] == "k_e_s_m,k_s_s,kind,omega,frequency_hz"
        assert len(lines) == 1 + 2 * 5  # the near-pole combination has none

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            log_frequency_grid(1e6, 1e2, 10)
        with pytest.raises(ValueError):
            sweep_threshold([], [1e-9], [4e-4])
