import json

import numpy as np
import pytest

from cstarreg import gallery, serialize
from cstarreg.cli import main, worker_threads
from cstarreg.errors import InputParse
from cstarreg.gridalg import GridElement, interval_domain
from cstarreg.opcore import op_norm

from conftest import random_complex, random_projection


class TestSerialize:
    def test_matrix_round_trip_is_exact(self, rng):
        a = random_complex(rng, 4, 3)
        d = serialize.matrix_to_dict(a)
        back = serialize.matrix_from_dict(json.loads(json.dumps(d)))
        assert np.array_equal(back, a)

    def test_grid_element_round_trip(self):
        ge = gallery.gallery("rankdrop", 32)
        d = serialize.grid_element_to_dict(ge)
        back = serialize.grid_element_from_dict(json.loads(json.dumps(d)))
        assert back.domain == ge.domain
        assert np.array_equal(back.values, ge.values)

    def test_bad_matrix_shape(self):
        with pytest.raises(InputParse):
            serialize.matrix_from_dict({"rows": 2, "cols": 2,
                                        "re": [[1.0]], "im": [[0.0]]})

    def test_missing_keys(self):
        with pytest.raises(InputParse):
            serialize.matrix_from_dict({"rows": 1})

    def test_csv_lines(self):
        rows = [{"delta": 0.5, "cond2": True, "cond3": True,
                 "cond4": False, "residual": 1e-9}]
        lines = serialize.sweep_csv_lines(rows)
        assert lines[0] == "delta,cond2,cond3,cond4,residual"
        assert lines[1] == "0.5,1,1,0,1e-09"


class TestGalleryConstruction:
    def test_osc_modulus_is_exact(self):
        ge = gallery.gallery("osc", 128)
        t = np.linspace(0.0, 1.0, 128)
        assert np.max(np.abs(np.abs(ge.values[:, 0, 0]) - t)) <= 1e-15

    def test_disk_z_values(self):
        ge = gallery.gallery("disk-z", 32)
        radii, angles = ge.domain.coordinates()
        z00 = radii[0] * np.exp(1j * angles[0])
        assert ge.values[0, 0, 0] == pytest.approx(z00)

    def test_unknown_name_raises(self):
        from cstarreg.errors import UnknownGalleryName
        with pytest.raises(UnknownGalleryName):
            gallery.gallery("nope", 64)


def _write_matrix(path, a):
    serialize.dump_json(serialize.matrix_to_dict(a), path)


class TestCliCommands:
    def test_mp_on_projection(self, tmp_path, capsys, rng):
        p = random_projection(rng, 4, 2)
        f = tmp_path / "p.json"
        _write_matrix(f, p)
        assert main(["mp", "--input", str(f)]) == 0
        out = json.loads(capsys.readouterr().out)
        mp = serialize.matrix_from_dict(out["mp_inverse"])
        assert out["penrose_ok"] is True
        assert op_norm(mp - p) <= 1e-10

    def test_polar_reconstruction(self, tmp_path, capsys, rng):
        a = random_complex(rng, 3)
        f = tmp_path / "a.json"
        _write_matrix(f, a)
        assert main(["polar", "--input", str(f)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["reconstruction_residual"] <= 1e-10 * (1 + op_norm(a))

    def test_cutdown_requires_delta(self, tmp_path, capsys, rng):
        f = tmp_path / "a.json"
        _write_matrix(f, random_complex(rng, 3))
        assert main(["cutdown", "--input", str(f)]) == 1

    def test_cutdown_contraction(self, tmp_path, capsys, rng):
        f = tmp_path / "a.json"
        _write_matrix(f, random_complex(rng, 3))
        assert main(["cutdown", "--input", str(f), "--delta", "0.3"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["contraction"] <= 0.3 + 1e-9

    def test_dist_disk_z(self, capsys):
        assert main(["dist", "--input", "disk-z", "--gridN", "64",
                     "--tol", "0.02"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert 0.9 <= out["cond1"]["lower"] <= out["cond1"]["upper"] <= 1.1

    def test_lemma3_reproducible(self, tmp_path):
        f1, f2 = tmp_path / "r1.json", tmp_path / "r2.json"
        args = ["lemma3", "--seed", "7", "--n", "6", "--delta", "0.5"]
        assert main(args + ["--out", str(f1)]) == 0
        assert main(args + ["--out", str(f2)]) == 0
        assert f1.read_bytes() == f2.read_bytes()
        rep = json.loads(f1.read_text())
        assert rep["max_residual"] <= 1e-7

    def test_lemma3_seed_changes_output(self, tmp_path):
        f1, f2 = tmp_path / "s1.json", tmp_path / "s2.json"
        assert main(["lemma3", "--seed", "1", "--out", str(f1)]) == 0
        assert main(["lemma3", "--seed", "2", "--out", str(f2)]) == 0
        assert f1.read_bytes() != f2.read_bytes()

    def test_theorem_consistent_exits_zero(self, capsys):
        assert main(["theorem", "--input", "linear", "--gridN", "64",
                     "--deltas", "0.2,0.5", "--tol", "0.05"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["verdict"] == "consistent"
        assert len(out["sweep"]) == 2

    def test_theorem_csv_format(self, capsys):
        assert main(["theorem", "--input", "linear", "--gridN", "64",
                     "--deltas", "0.2,0.5", "--tol", "0.05",
                     "--format", "csv"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "delta,cond2,cond3,cond4,residual"
        assert len(lines) == 3

    def test_unknown_gallery_exits_one(self, capsys):
        assert main(["dist", "--input", "not-a-thing"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_bad_input_file_exits_one(self, tmp_path, capsys):
        f = tmp_path / "garbage.json"
        f.write_text("{not json")
        assert main(["mp", "--input", str(f)]) == 1

    def test_bad_grid_n(self, capsys):
        assert main(["dist", "--input", "osc", "--gridN", "4"]) == 1

    def test_gallery_alias_flag(self, capsys):
        assert main(["dist", "--gallery", "linear", "--gridN", "64",
                     "--tol", "0.05"]) == 0

    def test_grid_input_from_file(self, tmp_path, capsys):
        ge = GridElement(domain=interval_domain(32),
                         values=np.full((32, 1, 1), 0.7 + 0j))
        f = tmp_path / "ge.json"
        serialize.dump_json(serialize.grid_element_to_dict(ge), f)
        assert main(["dist", "--input", str(f), "--tol", "0.05"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["cond1"]["lower"] == 0.0

    def test_worker_threads_env(self, monkeypatch):
        monkeypatch.setenv("CSTARREG_THREADS", "4")
        assert worker_threads() == 4
        monkeypatch.setenv("CSTARREG_THREADS", "bogus")
        assert worker_threads() == 1
