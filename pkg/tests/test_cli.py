import json
import shutil

import numpy as np
import pytest

from distdyn import cli, io, pipeline
from distdyn.config import load_config
from distdyn.errors import ConfigError, DegenerateSample, InvalidYear
from distdyn.panel import transition_pairs

YEARS = list(range(1995, 2015))
PERIODS = ("1995-2014", "1995-2005", "2005-2014")
MODES = ("none", "gdp", "population")


@pytest.fixture
def fx(fixture_dir, tmp_path):
    """Fresh copy of the session fixture so runs never share an output tree."""
    d = tmp_path / "fx"
    shutil.copytree(fixture_dir, d)
    return d


def run(fx, *args):
    return cli.main([*args, "--config", str(fx / "config.ini")])


def read_csv(path):
    return np.genfromtxt(path, delimiter=",", names=True)


def constant_panel(tmp_path, n_years=20, regions=True, n_ent=6):
    rows = [(f"e{i}", 2000 + t, "intensity", 2.5) for i in range(n_ent) for t in range(n_years)]
    io.write_csv(tmp_path / "panel.csv", ["entity", "year", "variable", "value"], rows)
    cfg = "[data]\npanel = panel.csv\n"
    if regions:
        io.write_csv(tmp_path / "regions.csv", ["entity", "region"],
                     [(f"e{i}", ("east", "central", "west")[i % 3]) for i in range(n_ent)])
        cfg += "regions = regions.csv\n"
    (tmp_path / "c.ini").write_text(cfg + "[output]\ndir = out\n")
    return tmp_path / "c.ini"


def test_dispersion_constant_panel(tmp_path):
    cfg = constant_panel(tmp_path)
    assert cli.main(["dispersion", "--config", str(cfg)]) == 0
    d = read_csv(tmp_path / "out" / "dispersion.csv")
    assert d.dtype.names == ("year", "cv", "west_east", "central_east")
    assert len(d) == 20
    assert np.all(d["cv"] == 0) and np.all(d["west_east"] == 1) and np.all(d["central_east"] == 1)


def test_dispersion_without_regions_fails_fast(tmp_path, monkeypatch):
    cfg = load_config(constant_panel(tmp_path, regions=False))
    called = []
    monkeypatch.setattr(pipeline, "load_panel", lambda c: called.append(c))
    with pytest.raises(ConfigError, match="regions"):
        pipeline.run_dispersion(cfg)
    assert not called
    assert cli.main(["dispersion", "--config", str(tmp_path / "c.ini")]) == cli.EXIT_ERROR


def test_dispersion_fixture(fx):
    assert run(fx, "dispersion") == 0
    d = read_csv(fx / "out" / "dispersion.csv")
    assert d["year"].tolist() == YEARS
    assert np.all(d["cv"] > 0)


def test_snapshot_nine_files_share_grids(fx):
    assert run(fx, "snapshot") == 0
    out = fx / "out"
    for year in (1995, 2005, 2014):
        cols = [read_csv(out / f"density_{year}_{m}.csv")["x"] for m in MODES]
        assert all(np.array_equal(cols[0], c) for c in cols[1:])
    assert len(list(out.glob("density_*.csv"))) == 9
    groups = json.loads((out / "overlays.json").read_text())["groups"]
    assert groups[0]["styles"] == ["solid", "dash", "dot"]


def test_snapshot_x_columns_byte_identical(fx):
    run(fx, "snapshot")
    texts = [(fx / "out" / f"density_2005_{m}.csv").read_text().splitlines()[1:] for m in MODES]
    xs = [[line.split(",")[0] for line in t] for t in texts]
    assert xs[0] == xs[1] == xs[2]


def test_snapshot_year_outside_panel(fx):
    cfg = load_config(fx / "config.ini")
    with pytest.raises(InvalidYear):
        pipeline.run_snapshot_densities(cfg, [1990])
    assert run(fx, "snapshot", "--years", "2030") == cli.EXIT_ERROR


def test_snapshot_single_entity(tmp_path):
    cfg = load_config(constant_panel(tmp_path, regions=False, n_ent=1))
    with pytest.raises(DegenerateSample):
        pipeline.run_snapshot_densities(cfg)


def test_dynamics_file_set(fx):
    assert run(fx, "dynamics") == 0
    out = fx / "out"
    for kind in ("kernel", "ntp", "ergodic"):
        names = {p.stem for p in out.glob(f"{kind}_*.csv")}
        assert names == {f"{kind}_{p}_{m}" for p in PERIODS for m in MODES}
    for side in out.glob("ergodic_*.json"):
        meta = json.loads(side.read_text())
        assert meta["converged"] is True and meta["residual"] <= 1e-10
    groups = json.loads((out / "overlays.json").read_text())["groups"]
    assert {g["plot"] for g in groups} == {f"{k}_{p}" for k in ("ergodic", "ntp") for p in PERIODS}


def test_dynamics_window_uses_ten_base_years(fx):
    cfg = load_config(fx / "config.ini")
    panel = pipeline.load_panel(cfg)
    series = pipeline._rcei(cfg, panel)["none"]
    pairs = transition_pairs(series, 1, (1995, 2005))
    assert len(pairs.x) == 10 * len(panel.entities)


def test_manifest_lists_outputs_with_hashes(fx):
    run(fx, "dynamics")
    out = fx / "out"
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "dynamics" and manifest["converged"] is True
    assert manifest["config"]["grid_size"] == 64
    files = {o["file"] for o in manifest["outputs"]}
    assert "overlays.json" in files and len(files) == 9 * 4 + 1
    for o in manifest["outputs"]:
        assert pipeline._sha256(out / o["file"]) == o["sha256"]


def test_flag_overrides_config(fx, tmp_path):
    assert run(fx, "snapshot", "--grid-size", "80", "--weight", "none",
               "--out", str(tmp_path / "o")) == 0
    files = sorted(p.name for p in (tmp_path / "o").glob("density_*.csv"))
    assert files == [f"density_{y}_none.csv" for y in (1995, 2005, 2014)]
    assert len(read_csv(tmp_path / "o" / files[0])) == 80


def test_not_converged_exit_code(fx):
    text = (fx / "config.ini").read_text().replace("max_iter = 100000", "max_iter = 1")
    (fx / "config.ini").write_text(text)
    assert run(fx, "dynamics") == cli.EXIT_NOT_CONVERGED
    meta = json.loads((fx / "out" / "ergodic_1995-2014_none.json").read_text())
    assert meta["converged"] is False
    assert json.loads((fx / "out" / "manifest.json").read_text())["converged"] is False


def test_space_without_adjacency(fx):
    text = (fx / "config.ini").read_text().replace("adjacency = adjacency.csv\n", "")
    (fx / "config.ini").write_text(text)
    assert run(fx, "conditional", "space") == cli.EXIT_ERROR
    with pytest.raises(ConfigError, match="adjacency"):
        pipeline.run_conditional(load_config(fx / "config.ini"), "space")


def test_three_conditioners(fx):
    assert run(fx, "conditional", "space", "income", "capital") == 0
    out = fx / "out"
    for c in pipeline.CONDITIONERS:
        assert (out / f"joint_{c}.csv").exists()
        assert (out / f"conditioned_{c}.csv").exists()
        for kind in ("kernel", "ntp", "ergodic"):
            assert len(list(out.glob(f"{kind}_*_{c}.csv"))) == 9
    groups = json.loads((out / "overlays.json").read_text())["groups"]
    pair = next(g for g in groups if g["plot"] == "ergodic_1995-2014_none_income")
    assert pair["files"] == ["ergodic_1995-2014_none_income.csv", "ergodic_1995-2014_none.csv"]
    assert pair["styles"] == ["solid", "dash"]


def test_space_conditioned_export_marks_isolated_entity(fx):
    run(fx, "conditional", "space")
    lines = (fx / "out" / "conditioned_space.csv").read_text().splitlines()
    assert lines[0] == "entity,year,value,excluded_reason"
    iso = [line for line in lines if line.startswith("p29,")]
    assert len(iso) == 20 and all(line.endswith(",no neighbors") for line in iso)


def test_emissions_output(fx):
    assert run(fx, "emissions") == 0
    lines = (fx / "out" / "emissions.csv").read_text().splitlines()
    assert lines[0] == "entity,year,variable,value"
    assert len(lines) == 1 + 30 * 20 * 3


def test_svg_flag(fx):
    assert run(fx, "dispersion", "--svg") == 0
    assert (fx / "out" / "dispersion.svg").read_text().startswith("<svg")
