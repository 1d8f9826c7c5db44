"""
Tests for the command-line entry point: argument parsing, config files,
JSON summaries and error reporting.
"""

import json
import os
import sys

import pytest

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..', 'src'))

from persian_carpet.cli import FIGURES, build_parser, main, reproduce_config, to_jsonable
from persian_carpet.config import JobConfig
from persian_carpet.errors import ConfigError
from persian_carpet.numerics import INFINITY, SpherePoint


def _run(capsys, argv):
    rc = main(argv)
    out = capsys.readouterr().out
    return rc, json.loads(out)


class TestJsonable:

    def test_values(self):
        assert to_jsonable(1 + 2j) == [1.0, 2.0]
        assert to_jsonable(INFINITY) == "inf"
        assert to_jsonable(SpherePoint(0.5 + 0j)) == [0.5, 0.0]
        assert to_jsonable({1: (0.25j,)}) == {"1": [[0.0, 0.25]]}


class TestParser:

    def test_help_exits_cleanly(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--help"])
        assert exc.value.code == 0
        assert "persian-carpet" in capsys.readouterr().out

    def test_group_requires_action(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["tree"])
        assert exc.value.code == 2

    def test_flags_follow_param_names(self):
        args = build_parser().parse_args(["render", "dynamical", "--trap-radius", "1e-4", "--image", "x.ppm"])
        assert args.command == "render dynamical"
        assert args.param_trap_radius == "1e-4"
        assert args.output_image == "x.ppm"


class TestCommands:
    """One JSON object per command."""

    def test_tree_check(self, capsys):
        rc, out = _run(capsys, ["tree", "check", "--kind", "HP", "--weights", "1,2,2,1"])
        assert rc == 0
        assert out["command"] == "tree check"
        assert out["leading_eigenvalue"] == pytest.approx(0.918, abs=1e-3)
        assert out["unobstructed"]
        assert out["h1"] is True
        assert out["dhat"] == 2
        assert out["map_degree"] == 3

    def test_tree_check_inline_tree(self, capsys):
        tree = '{"edges": 2, "images": [[0, 1], [0, 1]], "weights": [2, 3]}'
        rc, out = _run(capsys, ["tree", "check", "--tree", tree])
        assert rc == 0
        assert out["kind"] is None
        assert out["edges"] == 2
        assert out["leading_eigenvalue"] == pytest.approx(5 / 6, abs=1e-9)
        assert out["unobstructed"]
        assert "closed_form_eigenvalue" not in out

    def test_tree_check_tree_file(self, capsys, tmp_path):
        path = tmp_path / "loop.json"
        path.write_text(json.dumps({"images": [[0]], "weights": [1]}))
        rc, out = _run(capsys, ["tree", "check", "--tree", str(path)])
        assert rc == 0
        assert out["leading_eigenvalue"] == pytest.approx(1.0, abs=1e-9)
        assert not out["unobstructed"]

    def test_tree_check_tree_with_kind(self, capsys):
        tree = '{"images": [[1], [2], [0, 3], [0, 1]], "weights": [1, 2, 2, 1], "kind": "HP"}'
        rc, out = _run(capsys, ["tree", "check", "--tree", tree])
        assert rc == 0
        assert out["kind"] == "HP"
        assert out["dhat"] == 2
        assert out["leading_eigenvalue"] == pytest.approx(0.918, abs=1e-3)

    def test_tree_check_hq_closed_form(self, capsys):
        rc, out = _run(capsys, ["tree", "check", "--kind", "HQ", "--weights", "2,3"])
        assert rc == 0
        assert out["closed_form_eigenvalue"] == pytest.approx(1 / 2 + 1 / 3)
        assert out["leading_eigenvalue"] == pytest.approx(out["closed_form_eigenvalue"], abs=1e-9)

    def test_family_derive(self, capsys):
        rc, out = _run(capsys, ["family", "derive", "--lambda", "1e-3"])
        assert rc == 0
        assert out["verified"]
        for key in ("a1", "b1_prime"):
            derived, closed = complex(*out[key]), complex(*out[key + "_closed_form"])
            assert abs(derived - closed) <= 1e-9 * abs(closed)
        assert out["lambda"] == [1e-3, 0.0]

    def test_family_pcf_from_config(self, capsys, tmp_path):
        path = JobConfig("family pcf", {"period": 3}, seed=9).dump(tmp_path / "pcf.json")
        rc, out = _run(capsys, ["family", "pcf", "--config", str(path)])
        assert rc == 0
        assert out["period"] == 3
        assert out["seed"] == 9
        assert out["exact_period_roots"] == out["expected_count"] == 3
        assert out["c"] == pytest.approx([-0.12256, 0.74486], abs=1e-4)

    def test_flag_overrides_config(self, capsys, tmp_path):
        path = JobConfig("family pcf", {"period": 3}).dump(tmp_path / "pcf.json")
        rc, out = _run(capsys, ["family", "pcf", "--config", str(path), "--period", "2", "--seed", "4"])
        assert rc == 0
        assert out["period"] == 2
        assert out["seed"] == 4
        assert out["c"] == pytest.approx([-1.0, 0.0], abs=1e-9)

    def test_symbolic_quotient(self, capsys):
        rc, out = _run(capsys, ["symbolic", "quotient", "--s", "3.012", "--sp", "3.120"])
        assert rc == 0
        assert out["equivalent"] is True
        assert out["witness"] == 1
        assert out["in_s_alpha"] == [False, False]

    def test_symbolic_words(self, capsys):
        rc, out = _run(capsys, ["symbolic", "words", "--depth", "3", "--list", "true"])
        assert rc == 0
        assert out["depth"] == 3
        assert out["count"] == out["matrix_count"] == 8
        assert len(out["words"]) == 8

    def test_hurwitz_exception(self, capsys):
        rc, out = _run(capsys, ["hurwitz", "check", "--degree", "4", "--rows", "2,2;2,2;3,1"])
        assert rc == 0
        assert out["realizable"] is False
        assert out["witness"] is None

    def test_moduli_solve(self, capsys):
        rc, out = _run(capsys, ["moduli", "solve", "--weights", "1,2,2,1"])
        assert rc == 0
        assert out["valid"]
        assert out["levels"]["ordered"]

    def test_family_orbit_csv(self, capsys, tmp_path):
        csv = tmp_path / "orbit.csv"
        rc, out = _run(capsys, ["family", "orbit", "--lambda", "1e-3", "--steps", "5", "--csv", str(csv)])
        assert rc == 0
        assert len(out["points"]) == 6
        assert csv.exists()


class TestRenderCommands:

    def test_render_dynamical_writes_image_and_sidecar(self, capsys, tmp_path):
        image = tmp_path / "f0.ppm"
        rc, out = _run(capsys, ["render", "dynamical", "--lambda", "0", "--px", "16",
                                "--workers", "1", "--image", str(image)])
        assert rc == 0
        assert image.exists()
        assert image.read_bytes().startswith(b"P6\n16 16\n255\n")
        sidecar = json.loads((tmp_path / "f0.json").read_text())
        assert sidecar["command"] == "render dynamical"
        assert sidecar["undecided_components"] == out["undecided_components"]
        assert sum(out["counts"].values()) == 256

    def test_reproduce_small(self, capsys, tmp_path):
        image = tmp_path / "fig2b.ppm"
        rc, out = _run(capsys, ["reproduce", "fig2b", "--px", "8", "--workers", "1", "--image", str(image)])
        assert rc == 0
        assert out["figure"] == "fig2b"
        assert image.exists()

    def test_reproduce_config(self):
        job = reproduce_config("fig2a", px=32)
        assert job.command == "render dynamical"
        assert job.get("lambda") == 1e-3 + 0j
        assert job.get("px") == 32
        assert job.outputs["image"] == "fig2a.ppm"
        assert set(FIGURES) == {"fig2a", "fig2b", "fig8a"}

    def test_unknown_figure(self):
        with pytest.raises(ConfigError):
            reproduce_config("fig9")


class TestErrors:
    """Failures exit 2 with a JSON error object."""

    def test_wrong_weight_count(self, capsys):
        rc, out = _run(capsys, ["tree", "check", "--kind", "HP", "--weights", "1,2,2"])
        assert rc == 2
        assert out["error"] == "ValueError"

    def test_obstructed_weights(self, capsys):
        rc, out = _run(capsys, ["moduli", "solve", "--weights", "1,1,1,2"])
        assert rc == 2
        assert out["error"] == "DomainError"

    def test_unparseable_flag(self, capsys):
        rc, out = _run(capsys, ["tree", "check", "--weights", "1,x"])
        assert rc == 2
        assert out["error"] == "ConfigError"

    def test_config_for_other_command(self, capsys, tmp_path):
        path = JobConfig("family pcf", {"period": 3}).dump(tmp_path / "pcf.json")
        rc, out = _run(capsys, ["tree", "check", "--config", str(path)])
        assert rc == 2
        assert out["error"] == "ConfigError"

    def test_missing_config_file(self, capsys, tmp_path):
        rc, out = _run(capsys, ["tree", "check", "--config", str(tmp_path / "absent.json")])
        assert rc == 2
        assert out["error"] in ("ConfigError", "FileNotFoundError")

    def test_tree_and_weights_conflict(self, capsys):
        rc, out = _run(capsys, ["tree", "check", "--tree", '{"images": [[0]], "weights": [2]}',
                                "--weights", "2"])
        assert rc == 2
        assert out["error"] == "ConfigError"

    def test_old_word_length_flag_rejected(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["symbolic", "words", "--length", "3"])
        assert exc.value.code == 2
