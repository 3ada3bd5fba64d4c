import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lrthermal import harness
from lrthermal.errors import CapacityError, ValidationError
from lrthermal.harness import ExperimentConfig, ExperimentRow


def small_config(**kw):
    base = dict(kind="mutual-info", alphas=(0.6, 1.5), sizes=(8, 12), samples=4, seed=5)
    base.update(kw)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------- config

def test_config_text_round_trip():
    cfg = small_config(amplitude=(0.25, 1.0), beta=1.0 / 3.0, out="x.csv")
    again = ExperimentConfig.from_text(cfg.to_text())
    assert again == cfg
    assert again.to_text() == cfg.to_text()


def test_config_parsing_comments_and_overrides():
    text = "# sweep\nkind = negativity\nalphas = 0.6, 1.5  # two exponents\nsizes=8,10\n\nseed = 3\n"
    cfg = ExperimentConfig.from_text(text, samples=7, seed=None)
    assert cfg.kind == "negativity"
    assert cfg.alphas == (0.6, 1.5) and cfg.sizes == (8, 10)
    assert cfg.samples == 7 and cfg.seed == 3
    assert cfg.experiment == "negativity"


@pytest.mark.parametrize("text", ["kind = clustering\nbogus = 1\n", "kind clustering\n",
                                  "kind = clustering\nsamples = many\n"])
def test_config_parse_errors(text):
    with pytest.raises(ValidationError):
        ExperimentConfig.from_text(text)


@pytest.mark.parametrize("bad", [
    dict(kind="phase-diagram"), dict(alphas=()), dict(alphas=(-1.0,)), dict(sizes=(1,)),
    dict(sizes=(9,)), dict(dimension=3), dict(beta=0.0), dict(beta=math.inf),
    dict(samples=0), dict(samples=2.5), dict(seed=-1), dict(amplitude=(1.0, 0.0)),
    dict(metric="chebyshev"), dict(u_variant="main"), dict(workers=0), dict(scale=1.5),
    dict(model="ising"), dict(model="heisenberg", dimension=2),
])
def test_config_validation(bad):
    with pytest.raises(ValidationError):
        small_config(**bad)


def test_tfd_forces_heisenberg_and_clustering_allows_odd_sizes():
    assert ExperimentConfig(kind="tfd", sizes=(6,)).model == "heisenberg"
    assert ExperimentConfig(kind="clustering", sizes=(33,)).sizes == (33,)


# ---------------------------------------------------------------- presets

def test_fig2a_scaled_preset():
    cfg = harness.resolve_preset("fig2a", 0.25)
    assert cfg.kind == "clustering" and cfg.dimension == 1
    assert cfg.sizes == (250,) and cfg.samples == 250
    assert cfg.beta == 2.0 and cfg.amplitude == (0.0, 1.0)
    origin, disp = harness._clustering_geometry(cfg.lattice(250))
    assert origin == 62
    assert disp[0] == (1,) and disp[-1][0] <= 250 - origin - 1


def test_presets_pin_reference_parameters():
    full = {name: harness.resolve_preset(name) for name in harness.PRESETS}
    assert full["fig2a"].sizes == (1000,) and full["fig2b"].sizes == (40,)
    assert full["fig2b"].dimension == 2
    assert full["fig2c"].sizes[-1] == 1000 and full["fig2d"].sizes[-1] == 40
    assert full["figS5"].samples == 2000 and full["figS5"].model == "heisenberg"
    for name, cfg in full.items():
        assert cfg.beta == 2.0 and cfg.amplitude == (0.0, 1.0)
        assert cfg.experiment == name
        if name != "figS5":
            assert cfg.samples == 1000


def test_scaled_presets_keep_even_sizes_and_heisenberg_sizes():
    cfg = harness.resolve_preset("fig2c", 0.01)
    assert all(s % 2 == 0 for s in cfg.sizes)
    s5 = harness.resolve_preset("figS5", 0.1)
    assert s5.sizes == (4, 6, 8, 10) and s5.samples == 200
    with pytest.raises(ValidationError):
        harness.resolve_preset("fig9")
    with pytest.raises(ValidationError):
        harness.resolve_preset("fig2a", 0.0)


# ---------------------------------------------------------------- capacity

@pytest.mark.parametrize("cfg", [
    dict(kind="mutual-info", model="heisenberg", sizes=(14,)),
    dict(kind="tfd", sizes=(12,)),
    dict(kind="oracle-check", sizes=(8,)),
    dict(kind="negativity", dimension=2, sizes=(100,)),
])
def test_capacity_errors_before_work(cfg):
    with pytest.raises(CapacityError, match="GiB|entries"):
        harness.run_experiment(ExperimentConfig(**cfg))


# ---------------------------------------------------------------- runs

def test_determinism_digest_and_serial_parallel_equivalence():
    cfg = small_config()
    serial = harness.run_experiment(cfg)
    again = harness.run_experiment(cfg)
    assert harness.determinism_digest(serial.rows) == harness.determinism_digest(again.rows)
    parallel = harness.run_experiment(small_config(workers=2))
    assert len(parallel.rows) == len(serial.rows)
    for a, b in zip(serial.rows, parallel.rows):
        assert (a.alpha, a.N, a.observable, a.x) == (b.alpha, b.N, b.observable, b.x)
        assert abs(a.mean - b.mean) <= 1e-15 and abs(a.stderr - b.stderr) <= 1e-15


def test_adding_samples_keeps_earlier_samples():
    few = harness.run_experiment(small_config(samples=1, alphas=(1.0,), sizes=(8,)))
    more = harness.run_experiment(small_config(samples=3, alphas=(1.0,), sizes=(8,)))
    first = harness._run_sample((small_config(samples=3, alphas=(1.0,), sizes=(8,)), 1.0, 8, 0))
    assert few.rows[0].mean == first[0][0][2]
    assert more.rows[0].mean != few.rows[0].mean


def test_rows_sorted_and_stderr_definition():
    res = harness.run_experiment(small_config(kind="negativity", samples=5))
    keys = [r.sort_key() for r in res.rows]
    assert keys == sorted(keys)
    cfg = res.config
    vals = [harness._run_sample((cfg, 0.6, 8, k))[0][0][2] for k in range(5)]
    row = next(r for r in res.rows if r.alpha == 0.6 and r.N == 8)
    assert row.observable == "ssr_negativity" and row.samples == 5
    assert row.mean == pytest.approx(np.mean(vals), rel=1e-15)
    assert row.stderr == pytest.approx(np.std(vals, ddof=1) / math.sqrt(5), rel=1e-12)


def test_clustering_rows():
    res = harness.run_experiment(ExperimentConfig(kind="clustering", alphas=(1.0,),
                                                  sizes=(40,), samples=2))
    scaled = [r for r in res.rows if r.observable == "scaled_corr"]
    raw = {r.x: r.mean for r in res.rows if r.observable == "abs_corr"}
    assert [r.x for r in scaled] == list(range(1, 25))
    for r in scaled:
        assert r.mean >= 0 and np.isfinite(r.mean)
    assert len(raw) == len(scaled)


def test_two_dimensional_rows_include_per_side_values():
    res = harness.run_experiment(small_config(dimension=2, sizes=(4,), alphas=(2.0,), samples=2))
    by_name = {r.observable: r.mean for r in res.rows}
    assert by_name["mutual_information_per_side"] == pytest.approx(
        by_name["mutual_information"] / 4, rel=1e-15)


def test_oracle_check_driver():
    res = harness.run_experiment(ExperimentConfig(kind="oracle-check", sizes=(4,),
                                                  alphas=(0.8,), samples=3))
    assert res.summary["max_delta_mi"] <= 1e-8
    assert res.summary["max_delta_ssr"] <= 1e-6
    assert {r.observable for r in res.rows} == {"delta_mi", "delta_ssr"}


def test_tfd_and_bounds_kinds():
    tfd = harness.run_experiment(ExperimentConfig(kind="tfd", sizes=(6,), alphas=(1.0,),
                                                  samples=3))
    assert tfd.summary["min_tfd_slack"] >= -1e-10
    res = harness.run_experiment(ExperimentConfig(kind="bounds", sizes=(6,), alphas=(2.0,),
                                                  samples=2))
    rows = {r.observable: r for r in res.rows}
    assert rows["wolf_rhs_exact"].mean <= rows["wolf_rhs_triangle"].mean
    assert rows["beta_c_lambert"].mean >= rows["beta_c_simple"].mean
    assert rows["product_lemma_ratio"].mean < 1
    assert rows["u"].samples == 1 and rows["u"].stderr == 0.0


# ---------------------------------------------------------------- CSV

def test_empty_rows_give_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    harness.emit_csv([], path)
    assert path.read_bytes() == (harness.CSV_HEADER + "\n").encode()
    assert harness.read_csv(path) == []


finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite, finite, finite, st.floats(0, 1e6), st.integers(2, 10 ** 6))
def test_row_round_trips_bit_exactly(tmp_path_factory, alpha, x, mean, seconds, n):
    row = ExperimentRow("fig2c", alpha, n, 3, "mutual_information", x, mean, 0.1 + 0.2, seconds)
    path = tmp_path_factory.mktemp("csv") / "one.csv"
    harness.emit_csv([row], path)
    (back,) = harness.read_csv(path)
    assert back == row
    assert b"\r" not in path.read_bytes()


def test_read_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ValidationError):
        harness.read_csv(path)


def test_write_outputs_echoes_config(tmp_path):
    cfg = small_config(samples=2, sizes=(8,), alphas=(1.5,))
    res = harness.run_experiment(cfg)
    path = tmp_path / "run.csv"
    harness.write_outputs(res, path)
    assert ExperimentConfig.from_text((tmp_path / "run.csv.config").read_text()) == cfg
    assert harness.read_csv(path) == res.rows


def test_scaled_mutual_information_series(tmp_path):
    cfg = harness.resolve_preset("fig2c", 0.05, samples=2, alphas="0.5,2.0")
    assert cfg.sizes == (6, 10, 20, 30, 40, 50)
    res = harness.run_experiment(cfg)
    for alpha in (0.5, 2.0):
        series = [(r.x, r.mean) for r in res.rows
                  if r.alpha == alpha and r.observable == "mutual_information"]
        assert [x for x, _ in series] == [float(s) for s in cfg.sizes]
        assert all(m > 0 for _, m in series)
