import csv
import json
import math

import numpy as np
import pytest

from diffest import cli
from diffest.config import GridSpec, RunConfig, apply_overrides, format_quantity, parse_quantity, parse_scheme
from diffest.errors import ConfigError
from diffest.fisher import MOMENTUM, Homodyne
from diffest.scenario import AMU, YEAR

MAQRO = {"lambda": "1e18 m^-2s^-1", "repetitions": 1000000, "table1_literal": True}


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_config(tmp_path, d, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(d))
    return str(p)


def read_csv(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    rows = list(csv.reader(body))
    return rows[0], rows[1:]


@pytest.mark.parametrize(
    "text, dim, value",
    [
        ("1e8 amu", "mass", 1e8 * AMU),
        ("2 g", "mass", 2e-3),
        ("1e5 rad/s", "angular_frequency", 1e5),
        ("1 Hz", "angular_frequency", 2 * math.pi),
        ("3 yr", "time", 3 * YEAR),
        ("250 ms", "time", 0.25),
        ("100 nm", "length", 1e-7),
        ("1e20 m^-2s^-1", "diffusion", 1e20),
        ("10 dB", "squeezing", 10.0),
        ("90 deg", "angle", math.pi / 2),
    ],
)
def test_parse_quantity(text, dim, value):
    assert parse_quantity(text, dim) == pytest.approx(value, rel=1e-12, abs=0)


@pytest.mark.parametrize("text, dim", [("3", "mass"), ("1 kg", "time"), ("abc kg", "mass"), ("1 furlong", "length")])
def test_parse_quantity_rejects(text, dim):
    with pytest.raises(ConfigError):
        parse_quantity(text, dim)


def test_format_round_trip():
    for v in (1e-18, 0.1 + 0.2, 6.02214076e23):
        assert parse_quantity(format_quantity(v, "mass"), "mass") == v


def test_parse_scheme():
    assert parse_scheme("momentum") == MOMENTUM
    assert parse_scheme("homodyne:0.5 rad") == Homodyne(0.5)
    with pytest.raises(ConfigError):
        parse_scheme("photon-counting")


def test_grid_validation():
    with pytest.raises(ConfigError):
        GridSpec("lambda", 1.0, 2.0, 1)
    with pytest.raises(ConfigError):
        GridSpec("lambda", 0.0, 2.0, 5)
    with pytest.raises(ConfigError):
        GridSpec("omega", 1.0, 2.0, 5)
    assert GridSpec("tau", 1.0, 100.0, 3).values() == pytest.approx([1.0, 10.0, 100.0])


def test_config_round_trip():
    d = dict(MAQRO, squeezing="10 dB", sweep={"variable": "lambda", "start": "1e10 m^-2s^-1", "stop": "1e20 m^-2s^-1", "points": 5})
    cfg = RunConfig.from_dict(d)
    assert RunConfig.from_dict(json.loads(cfg.to_json())) == cfg


def test_config_rejects_bad_input():
    for d in ({"mass": 3}, {"bogus": 1}, {"repetitions": 10, "duration": "3 yr"}, {"schemes": "momentum"}, {"seed": -1}, {"thermal_variance": 0.5}):
        with pytest.raises(ConfigError):
            RunConfig.from_dict(d)


def test_repetitions_from_duration():
    assert RunConfig.from_dict({"duration": "3 yr"}).nu == 946728


def test_overrides():
    d = apply_overrides({"squeezing": "0 dB"}, ["squeezing=10 dB", "repetitions=5", 'schemes=["momentum"]'])
    assert d == {"squeezing": "10 dB", "repetitions": 5, "schemes": ["momentum"]}
    with pytest.raises(ConfigError):
        apply_overrides({}, ["novalue"])


def test_bound_maqro_ordering(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "bound", "-c", write_config(tmp_path, MAQRO), "--json")
    assert code == 0
    schemes = json.loads(out)["report"]["schemes"]
    std = {k: v["std_single_shot"] for k, v in schemes.items()}
    assert std["qcrb"] <= std["optimal-homodyne"] * (1 + 1e-9)
    assert std["optimal-homodyne"] <= min(std["position"], std["momentum"])


def test_bound_text_output(capsys):
    code, out, _ = run_cli(capsys, "bound", "-s", "lambda=1e18 m^-2s^-1", "--table1-literal")
    assert code == 0
    assert "SLD required squeezing" in out and "qcrb" in out


def test_exit_code_degenerate(capsys):
    code, _, err = run_cli(capsys, "bound", "-s", "thermal_variance=1")
    assert code == 3
    assert "T = 1" in err and "lambda = 0" in err


@pytest.mark.parametrize(
    "argv",
    [
        ("bound", "-s", "mass=3"),
        ("bound", "-c", "/nonexistent.json"),
        ("sweep",),
        ("montecarlo", "-s", "lambda=1e18 m^-2s^-1", "-s", 'schemes=["momentum"]'),
        ("montecarlo", "--seed", "1", "-s", "lambda=1e18 m^-2s^-1", "-s", 'schemes=["qcrb"]'),
        ("bound", "--threads", "0"),
    ],
)
def test_exit_code_config_error(capsys, argv):
    code, _, err = run_cli(capsys, *argv)
    assert code == 2
    assert "config error" in err


def test_threads_environment(monkeypatch, capsys):
    monkeypatch.setenv(cli.THREADS_ENV, "zero")
    code, _, _ = run_cli(capsys, "sweep", "-s", 'sweep={"variable": "tau", "start": 1, "stop": 10, "points": 2}')
    assert code == 2


def sweep_config(tmp_path, **extra):
    d = dict(
        MAQRO,
        schemes=["qcrb", "optimal-homodyne", "momentum", "position"],
        sweep={"variable": "lambda", "start": "1e10 m^-2s^-1", "stop": "1e20 m^-2s^-1", "points": 21},
    )
    d.update(extra)
    return write_config(tmp_path, d, name=f"sweep{len(extra)}.json")


def test_sweep_is_deterministic_across_threads(capsys, tmp_path):
    cfg = sweep_config(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli.main(["sweep", "-c", cfg, "-o", str(a), "--threads", "1"]) == 0
    assert cli.main(["sweep", "-c", cfg, "-o", str(b), "--threads", "4"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_header_round_trip_and_no_nan(capsys, tmp_path):
    cfg = sweep_config(tmp_path, squeezing="10 dB")
    code, out, _ = run_cli(capsys, "sweep", "-c", cfg)
    assert code == 0
    assert out.startswith("# diffest ")
    assert cli.read_header_config(out) == RunConfig.from_dict(json.load(open(cfg)))
    columns, rows = read_csv(out)
    assert len(rows) == 21
    for row in rows:
        for cell in row:
            assert cell.lower() not in ("nan", "inf", "-inf")


def test_sweep_monotone_and_ordered(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "sweep", "-c", sweep_config(tmp_path))
    columns, rows = read_csv(out)
    col = {name: columns.index(f"std_{name}") for name in ("qcrb", "optimal-homodyne", "momentum", "position")}
    std = {name: np.array([float(r[i]) for r in rows]) for name, i in col.items()}
    for name in ("optimal-homodyne", "momentum", "position"):
        assert np.all(np.diff(std[name]) >= 0)
    assert np.all(std["qcrb"] <= std["optimal-homodyne"] * (1 + 1e-9))
    assert np.all(std["optimal-homodyne"] <= std["momentum"] * (1 + 1e-9))
    assert np.all(std["momentum"] <= std["position"])


def test_sweep_marks_degenerate_cells(capsys):
    sweep = '{"variable": "lambda", "start": "0 m^-2s^-1", "stop": "1e18 m^-2s^-1", "points": 2, "spacing": "linear"}'
    code, out, _ = run_cli(capsys, "sweep", "-s", "thermal_variance=1", "-s", f"sweep={sweep}", "-s", 'schemes=["qcrb", "momentum"]')
    assert code == 0
    _, rows = read_csv(out)
    assert rows[0][4:7] == ["degenerate"] * 3
    assert float(rows[1][4]) > 0
    # the momentum bound stays finite at the same point
    assert rows[0][7] != "degenerate"


def test_one_point_sweep_equals_bound(capsys):
    base = ["-s", "lambda=1e18 m^-2s^-1", "-s", "repetitions=1000", "--table1-literal"]
    _, out, _ = run_cli(capsys, "bound", "--json", *base)
    report = json.loads(out)["report"]
    sweep = '{"variable": "lambda", "start": "1e18 m^-2s^-1", "stop": "1e18 m^-2s^-1", "points": 2}'
    _, out, _ = run_cli(capsys, "sweep", *base, "-s", f"sweep={sweep}")
    columns, rows = read_csv(out)
    for name, row in report["schemes"].items():
        assert float(rows[0][columns.index(f"std_{name}")]) == pytest.approx(row["std_repeated"], rel=1e-12, abs=0)


def test_sweep_in_r(capsys):
    sweep = '{"variable": "r", "start": 0, "stop": 1.15, "points": 3, "spacing": "linear"}'
    code, out, _ = run_cli(capsys, "sweep", "-s", "lambda=1e18 m^-2s^-1", "-s", 'schemes=["momentum"]', "-s", f"sweep={sweep}")
    assert code == 0
    columns, rows = read_csv(out)
    std = [float(r[columns.index("std_momentum")]) for r in rows]
    assert std == sorted(std, reverse=True)


def test_ten_db_momentum_gain(capsys):
    # deep in the thermal regime the variance falls by e^{-4r} = 1/100 at 10 dB
    args = ["-s", "lambda=1e10 m^-2s^-1", "-s", 'schemes=["momentum"]', "--table1-literal"]
    _, a, _ = run_cli(capsys, "bound", "--json", *args)
    _, b, _ = run_cli(capsys, "bound", "--json", *args, "-s", "squeezing=10 dB")
    va = json.loads(a)["report"]["schemes"]["momentum"]["variance_single_shot"]
    vb = json.loads(b)["report"]["schemes"]["momentum"]["variance_single_shot"]
    assert va / vb == pytest.approx(100.0, rel=1e-3, abs=0)


def csl_args(db):
    return [
        "csl",
        "-s", "mass=5.5e9 amu",
        "-s", "sphere_radius=100 nm",
        "-s", "duration=3 yr",
        "-s", f"squeezing={db} dB",
        "-s", 'schemes=["position", "momentum"]',
    ]


def csl_curves(capsys, db):
    code, out, _ = run_cli(capsys, *csl_args(db))
    assert code == 0
    columns, rows = read_csv(out)
    return {c: np.array([float(r[i]) for r in rows]) for i, c in enumerate(columns)}


def test_csl_momentum_third_of_position(capsys):
    c = csl_curves(capsys, 0)
    assert len(c["r_c"]) == 51
    np.testing.assert_allclose(c["lambda_min_position"] / c["lambda_min_momentum"], 3.0, rtol=1e-4)


def test_csl_more_squeezing_lower_curve(capsys):
    ten, twenty = csl_curves(capsys, 10), csl_curves(capsys, 20)
    assert np.all(twenty["lambda_min_momentum"] < ten["lambda_min_momentum"])


def test_csl_grw_point_above_20db_curve(capsys):
    c = csl_curves(capsys, 20)
    at = np.interp(np.log(1e-7), np.log(c["r_c"]), np.log(c["lambda_min_momentum"]))
    assert 1e-16 > math.exp(at)


def test_csl_overlay_passthrough(capsys, tmp_path):
    p = tmp_path / "lab.txt"
    p.write_text("# r_c lambda\n1e-8 1e-6\n1e-6 1e-10\n")
    code, out, _ = run_cli(capsys, *csl_args(0), "-s", f'overlays=["{p}"]')
    assert code == 0
    columns, rows = read_csv(out)
    i = columns.index("overlay_lab")
    cells = [r[i] for r in rows]
    assert cells[0] == "na"
    r_c = [float(r[0]) for r in rows]
    inside = [float(v) for v, rc in zip(cells, r_c) if 1e-8 <= rc <= 1e-6]
    assert inside[0] == pytest.approx(1e-6, rel=1e-9, abs=0) and inside[-1] == pytest.approx(1e-10, rel=1e-9, abs=0)


def test_montecarlo_command(capsys, tmp_path):
    out = tmp_path / "mc.csv"
    argv = [
        "montecarlo", "--seed", "5", "-o", str(out),
        "-s", "time=1 s", "-s", "omega=1e4 rad/s",
        "-s", 'schemes=["momentum"]', "-s", "repetitions=2000", "-s", "replicates=50",
        "-s", "lambda=1e12 m^-2s^-1",
    ]
    assert cli.main(argv) == 0
    text = out.read_text()
    assert cli.read_header_config(text).seed == 5
    columns, rows = read_csv(text)
    assert "saturation_ratio" in columns and float(rows[0][columns.index("saturation_ratio")]) > 0
    again = tmp_path / "mc2.csv"
    assert cli.main(argv[:4] + [str(again)] + argv[5:] + ["--threads", "3"]) == 0
    assert again.read_bytes() == out.read_bytes()
