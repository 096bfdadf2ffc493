import json

import numpy as np
import pytest

from panolayout import formats
from panolayout.cli import main
from panolayout.layout import composite, object_opacity_field

from conftest import make_random_layout


@pytest.fixture
def layout_file(rng, tmp_path):
    layout = make_random_layout(rng, n=1, d_f=2)
    path = tmp_path / "layout.json"
    formats.save_layout(layout, path)
    return path, layout


def run(*argv):
    return main([str(a) for a in argv])


class TestRender:
    def test_single_object_closed_form(self, layout_file, tmp_path):
        path, layout = layout_file
        out = tmp_path / "map.plt"
        assert run("render", "--layout", path, "--out", out) == 0
        grid = formats.load_plt1(out)
        o = object_opacity_field(layout, 1)
        expected = o[:, :, None] * layout.objects[0].features
        np.testing.assert_allclose(grid, expected, atol=1e-6)

    def test_weight_png_sidecar(self, layout_file, tmp_path):
        path, _ = layout_file
        out = tmp_path / "map.plt"
        png = tmp_path / "w.png"
        assert run("render", "--layout", path, "--out", out, "--weights", png) == 0
        assert png.exists()

    def test_distance_and_opacity_modes(self, layout_file, tmp_path):
        path, layout = layout_file
        for mode in ("distance:1", "opacity:1", "weight"):
            out = tmp_path / f"{mode.replace(':', '_')}.plt"
            assert run("render", "--layout", path, "--out", out, "--mode", mode) == 0
            assert formats.load_plt1(out).shape == (8, 16, 1)

    def test_unknown_mode(self, layout_file, tmp_path):
        path, _ = layout_file
        assert run("render", "--layout", path, "--out", tmp_path / "x.plt",
                   "--mode", "volume") == 1

    def test_missing_file(self, tmp_path):
        assert run("render", "--layout", tmp_path / "nope.json",
                   "--out", tmp_path / "x.plt") == 1

    def test_byte_identical_across_runs(self, layout_file, tmp_path):
        path, _ = layout_file
        a, b = tmp_path / "a.plt", tmp_path / "b.plt"
        run("render", "--layout", path, "--out", a)
        run("render", "--layout", path, "--out", b)
        assert a.read_bytes() == b.read_bytes()


class TestManipulate:
    def test_rotate_by_pi_preserves_render(self, layout_file, tmp_path):
        path, layout = layout_file
        out_layout = tmp_path / "rot.json"
        assert run("manipulate", "--layout", path, "--op",
                   "rotate:1:3.14159265358979", "--out", out_layout) == 0
        rendered = composite(formats.load_layout(out_layout)).values
        np.testing.assert_allclose(rendered, composite(layout).values, atol=1e-6)

    def test_remove_op(self, layout_file, tmp_path):
        path, _ = layout_file
        out = tmp_path / "rm.json"
        assert run("manipulate", "--layout", path, "--op", "remove:1", "--out", out) == 0
        assert formats.load_layout(out).objects[0].size == -10.0

    def test_bad_op_string(self, layout_file, tmp_path):
        path, _ = layout_file
        assert run("manipulate", "--layout", path, "--op", "remove:one",
                   "--out", tmp_path / "x.json") == 1
        assert run("manipulate", "--layout", path, "--op", "warp:1",
                   "--out", tmp_path / "x.json") == 1


class TestGradcheck:
    def test_small_run_passes_and_reports(self, tmp_path):
        report_path = tmp_path / "report.json"
        assert run("gradcheck", "--samples", 200, "--seed", 7,
                   "--report", report_path) == 0
        report = json.loads(report_path.read_text())
        assert report["passed"] is True
        assert report["pass_fraction"] >= 0.99

    def test_deterministic_report(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run("gradcheck", "--samples", 150, "--seed", 3, "--report", a)
        run("gradcheck", "--samples", 150, "--seed", 3, "--report", b)
        assert a.read_bytes() == b.read_bytes()


class TestAugmentProject:
    def test_augment_writes_triplet(self, rng, tmp_path):
        layout = make_random_layout(rng, n=2, d_f=3, width=32, height=16)
        lpath = tmp_path / "layout.json"
        formats.save_layout(layout, lpath)
        ipath = tmp_path / "img.png"
        formats.save_png(rng.random((16, 32, 3)), ipath)
        prefix = tmp_path / "aug"
        assert run("augment", "--image", ipath, "--layout", lpath,
                   "--seed", 5, "--out-prefix", prefix) == 0
        record = json.loads((tmp_path / "aug.record.json").read_text())
        assert set(record) == {"t", "flip", "seed"}
        assert record["seed"] == 5
        out_layout = formats.load_layout(tmp_path / "aug.layout.json")
        assert out_layout.n == 2

    def test_augment_deterministic(self, rng, tmp_path):
        layout = make_random_layout(rng, n=1, d_f=2, width=32, height=16)
        lpath = tmp_path / "layout.json"
        formats.save_layout(layout, lpath)
        ipath = tmp_path / "img.png"
        formats.save_png(rng.random((16, 32, 3)), ipath)
        run("augment", "--image", ipath, "--layout", lpath, "--seed", 9,
            "--out-prefix", tmp_path / "a")
        run("augment", "--image", ipath, "--layout", lpath, "--seed", 9,
            "--out-prefix", tmp_path / "b")
        assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()
        assert (tmp_path / "a.layout.json").read_bytes() == \
            (tmp_path / "b.layout.json").read_bytes()

    def test_project(self, rng, tmp_path):
        ipath = tmp_path / "img.png"
        formats.save_png(rng.random((16, 32, 3)), ipath)
        out = tmp_path / "persp.png"
        assert run("project", "--image", ipath, "--yaw", 1.0, "--pitch", 0.1,
                   "--roll", 0.0, "--fov", 1.2, "--out-w", 20, "--out-h", 15,
                   "--out", out) == 0
        img = formats.load_png(out, require_2to1=False)
        assert img.shape == (15, 20, 3)


class TestLossesFixture:
    def test_fixture_evaluation(self, tmp_path, capsys):
        fixture = {
            "loss_G": {"fake_scores": [0.0, 0.5, 1.0]},
            "loss_D": {"fake_scores": [1.0], "real_scores": [0.0]},
            "loss_recon": {"a": [[[0.0]]], "b": [[[3.0]]]},
            "loss_total": {"g": 1.0, "d": 1.0, "cycle": 1.0},
        }
        path = tmp_path / "fixture.json"
        path.write_text(json.dumps(fixture))
        assert run("losses", "--fixture", path) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["loss_G"] == pytest.approx(0.5)
        assert out["loss_D"] == pytest.approx(2.0)
        assert out["loss_recon"] == pytest.approx(9.0)
        assert out["loss_total"] == pytest.approx(7.0)  # default lambdas 1 and 5


class TestUsageErrors:
    def test_unknown_flag_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["render", "--bogus"])
        assert exc.value.code == 2

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["decorate"])
        assert exc.value.code == 2
