import math

import pytest

from diffest.scenario import (
    AMU,
    HBAR,
    TABLE1_LAMBDA_SQL,
    TABLE1_TAU,
    YEAR,
    lambda_sql,
    repetitions_from_duration,
    scenario_derive,
)


def test_constants():
    # CODATA 2018 and 2022 differ in the amu at the 1e-9 level
    assert HBAR == pytest.approx(1.054571817e-34, rel=1e-9, abs=0)
    assert AMU == pytest.approx(1.66053906660e-27, rel=1e-8, abs=0)


def test_lambda_sql_maqro_mass():
    m = 1e8 * AMU
    expected = m * 1e10 / (4 * HBAR)
    assert lambda_sql(m, 1e5) == pytest.approx(expected, rel=1e-12, abs=0)
    assert lambda_sql(m, 1e5) == pytest.approx(3.9365e24, rel=1e-4, abs=0)


def test_scenario_derived_fields():
    sc = scenario_derive(1e8 * AMU, 1e5, 100.0, lambda_=1e18)
    assert sc.tau == pytest.approx(1e7, rel=1e-12, abs=0)
    assert sc.lambda_tilde == pytest.approx(1e18 / sc.lambda_sql, rel=1e-12, abs=0)
    assert scenario_derive(1e8 * AMU, 1e5, 100.0).lambda_tilde == 0.0


def test_table_literal_flag_overrides():
    sc = scenario_derive(1e8 * AMU, 1e5, 100.0, lambda_=1.6e20, table1_literal=True)
    assert (sc.tau, sc.lambda_sql) == (TABLE1_TAU, TABLE1_LAMBDA_SQL)
    assert sc.lambda_tilde == pytest.approx(1e-6)


@pytest.mark.parametrize(
    "kw",
    [dict(mass=0.0), dict(omega=-1.0), dict(time=0.0), dict(lambda_=-1.0), dict(repetitions=0), dict(mass=math.nan)],
)
def test_scenario_rejects_bad_input(kw):
    base = dict(mass=1e-18, omega=1e5, time=100.0)
    base.update(kw)
    with pytest.raises(ValueError):
        scenario_derive(**base)


def test_repetitions_from_three_years():
    nu = repetitions_from_duration(3 * YEAR, 100.0)
    assert nu == 946728
    assert repetitions_from_duration(3 * YEAR, 100.0, duty_cycle=0.5) == nu // 2
    with pytest.raises(ValueError):
        repetitions_from_duration(3 * YEAR, 100.0, duty_cycle=0.0)
