import numpy as np
import pytest

import dynvlasov as dv
from dynvlasov.io import (ConfigError, apply_overrides, parse_config,
                          read_timeseries, serialize_config)

from test_solver import small_cfg

CONFIG_TEXT = """
[run]
case = I
L = 1.0
T = 0.5
N = 8
dx = 0.03125
dv = 0.03125
U0 = 3.0
epsilon0 = 1e-09
integrator = ssm
K = 1
seed = 7

[field]
kind = cosine
amplitude = 1.0

[sigma]
kind = sine
amplitude = 0.5

[initial]
kind = landau
alpha = 0.05
"""


class TestConfig:
    def test_parse_minimal(self):
        cfg = parse_config(CONFIG_TEXT)
        assert cfg == small_cfg()

    def test_round_trip(self, tmp_path):
        cfg = small_cfg(snapshot_times=(0.0, 0.25), samples=3,
                        reconstruction="spline", seed=11)
        path = tmp_path / "run.cfg"
        dv.save_config(cfg, path)
        assert dv.load_config(path) == cfg

    def test_round_trip_case_two(self, tmp_path):
        cfg = small_cfg(case="II", field=None,
                        sigma=dv.SigmaSpec(kinds=("constant", "sine"),
                                           amplitudes=(1.0, 0.25)), K=2)
        path = tmp_path / "run.cfg"
        dv.save_config(cfg, path)
        assert dv.load_config(path) == cfg

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown keys.*run.*frobnicate"):
            parse_config(CONFIG_TEXT.replace("seed = 7",
                                             "seed = 7\nfrobnicate = 1"))

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown config sections"):
            parse_config(CONFIG_TEXT + "\n[turbo]\nboost = 11\n")

    def test_missing_keys_listed_exhaustively(self):
        text = CONFIG_TEXT.replace("T = 0.5\n", "").replace(
            "epsilon0 = 1e-09\n", "")
        with pytest.raises(ConfigError) as err:
            parse_config(text)
        assert "run.t" in str(err.value)
        assert "run.epsilon0" in str(err.value)

    def test_missing_section_lists_every_key(self):
        text = CONFIG_TEXT.replace("[initial]\nkind = landau\nalpha = 0.05", "")
        with pytest.raises(ConfigError, match="initial.kind, initial.alpha"):
            parse_config(text)

    def test_case_two_forbids_field_section(self):
        with pytest.raises(ConfigError, match="field"):
            parse_config(CONFIG_TEXT.replace("case = I", "case = II"))

    def test_bad_integrator_named(self):
        with pytest.raises(ConfigError, match="rk4"):
            parse_config(CONFIG_TEXT.replace("integrator = ssm",
                                             "integrator = rk4"))

    def test_bad_number_reported(self):
        with pytest.raises(ConfigError, match="not a number"):
            parse_config(CONFIG_TEXT.replace("T = 0.5", "T = half"))

    def test_custom_initial_not_serializable(self):
        cfg = small_cfg(initial=dv.InitialSpec(kind="custom",
                                               func=lambda x, v: x * v))
        with pytest.raises(ConfigError, match="custom"):
            serialize_config(cfg)

    def test_overrides(self):
        text = apply_overrides(CONFIG_TEXT, ["seed=42", "field.amplitude=2.5",
                                             "integrator=sem"])
        cfg = parse_config(text)
        assert cfg.seed == 42
        assert cfg.field.amplitude == 2.5
        assert cfg.integrator is dv.IntegratorKind.SEM

    def test_bad_override_rejected(self):
        with pytest.raises(ConfigError, match="key=value"):
            apply_overrides(CONFIG_TEXT, ["seed"])

    def test_hash_is_stable_and_sensitive(self):
        cfg = small_cfg()
        assert dv.config_hash(cfg) == dv.config_hash(small_cfg())
        assert dv.config_hash(cfg) != dv.config_hash(small_cfg(seed=8))


class TestTimeseries:
    def test_write_and_read(self, tmp_path):
        cfg = small_cfg(field=dv.FieldSpec(kind="constant", amplitude=1.0),
                        sigma=dv.SigmaSpec(kinds=("constant",),
                                           amplitudes=(1.0,)))
        res = dv.run(cfg, dv.sample_path(1, cfg.N, cfg.tau, cfg.seed))
        path = tmp_path / "ts.csv"
        dv.write_timeseries(res, path)
        meta, data, columns = read_timeseries(path)
        assert columns == list(dv.io.TIMESERIES_COLUMNS)
        assert data.shape == (cfg.N + 1, len(columns))
        assert meta["cfg"] == dv.config_hash(cfg)
        assert meta["seed"] == str(cfg.seed)
        # reference metadata: constant E and sigma admit momentum + kinetic
        assert set(meta["reference"]) == {"momentum", "kinetic"}
        # full-precision round trip of a diagnostic column
        l2 = [r.l2 for r in res.records]
        assert np.array_equal(data[:, columns.index("l2")], l2)

    def test_potential_nan_for_potential_free_field(self, tmp_path):
        cfg = small_cfg()  # cosine field: no potential diagnostic
        res = dv.run(cfg, dv.sample_path(1, cfg.N, cfg.tau, cfg.seed))
        path = tmp_path / "ts.csv"
        dv.write_timeseries(res, path)
        _, data, columns = read_timeseries(path)
        assert np.isnan(data[:, columns.index("potential")]).all()
        assert np.isnan(data[:, columns.index("total")]).all()


class TestSnapshots:
    def test_round_trip_full_precision(self, tmp_path):
        grid = dv.make_grid(1.0, 0.25, 0.125, 1.0)
        vals = np.random.default_rng(0).standard_normal((grid.nx, grid.nv))
        f = dv.DensityField(grid, vals)
        path = tmp_path / "snap.txt"
        dv.write_snapshot(f, 0.75, path)
        g, t = dv.read_snapshot(path)
        assert t == 0.75
        assert np.array_equal(g.values, vals)
        assert g.grid == f.grid

    def test_header_format(self, tmp_path):
        grid = dv.make_grid(2.0, 0.5, 0.25, 0.5)
        f = dv.DensityField(grid, np.zeros((grid.nx, grid.nv)))
        path = tmp_path / "snap.txt"
        dv.write_snapshot(f, 1.5, path)
        header = path.read_text().splitlines()[0]
        assert header.startswith("# vlasov-snapshot v1 L=2 dx=0.5 dv=0.25")
        body = path.read_text().splitlines()[1:]
        assert len(body) == grid.nx * grid.nv
        assert body[0].split()[:2] == ["0", "-2"]

    def test_malformed_header_rejected_with_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("# not a snapshot\n0 0 1.0\n")
        with pytest.raises(ConfigError, match="line 1"):
            dv.read_snapshot(path)

    def test_truncated_body_rejected(self, tmp_path):
        grid = dv.make_grid(1.0, 0.5, 0.5, 0.5)
        f = dv.DensityField(grid, np.ones((grid.nx, grid.nv)))
        path = tmp_path / "snap.txt"
        dv.write_snapshot(f, 0.0, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(ConfigError, match="node lines"):
            dv.read_snapshot(path)

    def test_bad_node_line_number_reported(self, tmp_path):
        grid = dv.make_grid(1.0, 0.5, 0.5, 0.5)
        f = dv.DensityField(grid, np.ones((grid.nx, grid.nv)))
        path = tmp_path / "snap.txt"
        dv.write_snapshot(f, 0.0, path)
        lines = path.read_text().splitlines()
        lines[3] = "0 zero 1.0"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ConfigError, match="line 4"):
            dv.read_snapshot(path)
