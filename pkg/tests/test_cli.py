import json
import math

import numpy as np
import pytest

from poncelet_lab.cli import main
from poncelet_lab.engine import generic_pair
from poncelet_lab.exceptions import InadmissiblePair, InvalidConfig
from poncelet_lab.report import PairSource, RunConfig, run_suite
from poncelet_lab.svg import Scene, render_svg, svg_string

BAD = {"outer": {"a": 1.5, "b": 1.0}, "inner": {"xc": 0.1, "yc": 0.05, "ac": 0.5, "bc": 0.3, "theta": 0.2}}


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([*argv, "--out", str(out)])
    return code, (json.loads(out.read_text()) if out.exists() else None)


class TestPairSource:
    def test_schemas(self):
        assert PairSource.from_dict(BAD).kind == "explicit"
        fam = PairSource.from_dict({"family": "confocal", "a": 2, "b": 1})
        assert fam.family == "confocal" and fam.params == {"a": 2.0, "b": 1.0}
        bl = PairSource.from_dict({"blaschke": {"a": 1, "b": 1, "f": [0.3, 0], "g": [0.1, 0.2]}})
        assert bl.params["g"] == 0.1 + 0.2j

    def test_exactly_one_source(self):
        with pytest.raises(InvalidConfig):
            PairSource.from_dict({"family": "confocal", "blaschke": {}})
        with pytest.raises(InvalidConfig):
            PairSource.from_dict({})

    def test_malformed(self):
        with pytest.raises(InvalidConfig):
            PairSource.from_dict({"outer": {"a": 1}, "inner": {}})
        with pytest.raises(InvalidConfig):
            PairSource.from_dict({"family": "nope"})

    def test_inadmissible(self):
        with pytest.raises(InadmissiblePair) as exc:
            PairSource.from_dict(BAD).build()
        assert exc.value.residual > 1e-3

    def test_explicit_admissible(self):
        h = generic_pair(1.5, 1.0, 0.3, 0.1 + 0.2j)
        e = h.pair.inner
        spec = {"outer": {"a": 1.5, "b": 1.0},
                "inner": {"xc": e.center.x, "yc": e.center.y, "ac": e.a, "bc": e.b, "theta": e.theta}}
        back = PairSource.from_dict(spec).build()
        assert abs(back.f - h.f) < 1e-9 and abs(back.g - h.g) < 1e-9

    def test_round_trip(self):
        for d in (BAD, {"family": "confocal", "a": 2.0, "b": 1.0},
                  {"blaschke": {"a": 1.0, "b": 1.0, "f": [0.3, 0.0], "g": [0.1, 0.2]}}):
            assert PairSource.from_dict(d).to_dict() == d


class TestRunSuite:
    def test_verify_confocal(self):
        rep = run_suite(RunConfig("verify", PairSource("family", "confocal", {"a": 2.0, "b": 1.0})))
        assert rep.ok
        p3 = rep.checks[0].data
        assert p3["expected"] == pytest.approx(-math.sqrt(13))

    def test_few_samples(self):
        with pytest.raises(InvalidConfig):
            run_suite(RunConfig("verify", PairSource("family", "confocal", {"a": 2.0, "b": 1.0}), samples=4))

    def test_missing_source(self):
        with pytest.raises(InvalidConfig):
            run_suite(RunConfig("verify"))

    def test_report_is_deterministic(self):
        cfg = RunConfig("search", PairSource("blaschke", "blaschke",
                                             {"a": 1.5, "b": 1.0, "f": 0.3, "g": 0.1 + 0.2j}), grid=16)
        a, b = run_suite(cfg), run_suite(cfg)
        assert a.to_json() == b.to_json()
        assert "wall" not in a.to_json()


class TestCli:
    def test_verify(self, tmp_path):
        code, rep = run(tmp_path, "verify", "--family", "confocal", "--a", "2", "--b", "1")
        assert code == 0 and rep["verdict"] == "pass"
        assert list(rep) == ["config", "pair", "checks", "summary", "verdict"]
        assert (tmp_path / "report.json.timing.json").exists()

    def test_locus_x5(self, tmp_path):
        csv = tmp_path / "locus.csv"
        code, rep = run(tmp_path, "locus", "--family", "blaschke", "--a", "1", "--b", "1",
                        "--f", "0.3,0", "--g", "0.1,0.2", "--center", "X5", "--csv", str(csv))
        assert code == 0
        fit = rep["checks"][0]["fit"]
        assert fit["center"] == pytest.approx([0.2, 0.1], abs=1e-9)
        lines = csv.read_text().split("\n")
        assert lines[0] == "lambda_index,lambda_re,lambda_im,x,y"
        assert len(lines) == 512 + 2 and lines[-1] == ""
        assert "\r" not in csv.read_text()

    def test_bad_pair(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(BAD))
        code, rep = run(tmp_path, "verify", "--pair", str(bad))
        assert code == 2 and rep is None
        assert "inadmissible" in capsys.readouterr().err

    def test_failing_check(self, tmp_path):
        code, rep = run(tmp_path, "verify", "--family", "blaschke", "--a", "1.5", "--b", "1",
                        "--f", "0.3,0", "--g", "0.1,0.2")
        assert code == 1 and rep["summary"]["fail"] == 2

    def test_search_csv(self, tmp_path):
        csv = tmp_path / "var.csv"
        code, rep = run(tmp_path, "search", "--family", "blaschke", "--a", "1.5", "--b", "1",
                        "--f", "0.3,0", "--g", "0.1,0.2", "--grid", "16", "--csv", str(csv), "--kind", "euler")
        assert code == 0
        lines = csv.read_text().splitlines()
        assert lines[0] == "x,y,relspread" and len(lines) == 257

    def test_no_refine(self, tmp_path):
        code, rep = run(tmp_path, "search", "--family", "blaschke", "--a", "1.5", "--b", "1",
                        "--f", "0.3,0", "--g", "0.1,0.2", "--grid", "16", "--no-refine")
        assert code == 1 and rep["config"]["refine"] is False

    def test_pencil(self, tmp_path):
        code, rep = run(tmp_path, "pencil", "--family", "concentric_tilted", "--a", "1.5", "--b", "1",
                        "--ac", "0.8", "--bc", "0.45", "--t", "0.5", "--t", "5")
        assert code == 0 and len(rep["checks"]) == 2

    def test_tol_flag(self, tmp_path):
        code, rep = run(tmp_path, "verify", "--family", "incircle", "--a", "1.5", "--b", "1",
                        "--tol", "1e-20")
        assert code == 1

    def test_samples_flag(self, tmp_path):
        code, rep = run(tmp_path, "verify", "--family", "incircle", "--a", "1.5", "--b", "1",
                        "--samples", "32")
        assert code == 0 and rep["checks"][0]["n"] == 32

    def test_config_errors(self, tmp_path):
        assert main(["verify", "--family", "confocal", "--a", "1", "--b", "2"]) == 2
        assert main(["verify", "--family", "confocal", "--a", "2", "--b", "1", "--samples", "4"]) == 2
        assert main(["verify"]) == 2
        assert main(["nonsense"]) == 2
        assert main(["locus", "--family", "confocal", "--a", "2", "--b", "1", "--center", "X7"]) == 2

    def test_families(self, capsys):
        assert main(["families", "--list"]) == 0
        out = capsys.readouterr().out
        for name in ("confocal", "excentral", "blaschke", "concentric_tilted"):
            assert name in out

    def test_seed_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PONCELET_SEED", "11")
        _, a = run(tmp_path, "verify", "--family", "random")
        _, b = run(tmp_path, "verify", "--family", "random")
        assert a == b and a["config"]["seed"] == 11
        monkeypatch.setenv("PONCELET_SEED", "12")
        _, c = run(tmp_path, "verify", "--family", "random")
        assert c["pair"] != a["pair"]

    def test_render(self, tmp_path):
        svg = tmp_path / "fig.svg"
        code = main(["render", "--family", "confocal", "--a", "2", "--b", "1", "--center", "X3",
                     "--center", "X5", "--circle", "circumcircle", "--svg", str(svg)])
        assert code == 0
        text = svg.read_text()
        assert text.count("<path") == 2 and text.count("<polygon") == 3 and text.count("<circle ") == 1

    def test_render_needs_output(self):
        assert main(["render", "--family", "confocal", "--a", "2", "--b", "1"]) == 2

    def test_byte_identical(self, tmp_path):
        for k in (1, 2):
            main(["locus", "--family", "confocal", "--a", "2", "--b", "1", "--out", str(tmp_path / f"{k}.json"),
                  "--svg", str(tmp_path / f"{k}.svg"), "--csv", str(tmp_path / f"{k}.csv")])
        for ext in ("json", "svg", "csv"):
            assert (tmp_path / f"1.{ext}").read_bytes() == (tmp_path / f"2.{ext}").read_bytes()


class TestSvg:
    def test_equilateral(self, tmp_path):
        h = generic_pair(1.0, 1.0, 0, 0)
        from poncelet_lab.engine import family_vertices
        scene = Scene(h.pair, list(family_vertices(h, 3)))
        p1, p2 = render_svg(scene, tmp_path / "a.svg"), render_svg(scene, tmp_path / "b.svg")
        assert p1.read_bytes() == p2.read_bytes()
        assert p1.read_text().count("<polygon") == 3

    def test_empty(self):
        text = svg_string(Scene())
        assert 'viewBox="-1.200000 -1.200000 2.400000 2.400000"' in text
        assert text.count("<line") == 2
        for tag in ("<ellipse", "<polygon", "<circle", "<path"):
            assert tag not in text

    def test_element_order(self, confocal):
        from poncelet_lab.centers import CenterSpec, named_circle
        from poncelet_lab.engine import family_vertices
        from poncelet_lab.loci import sample_locus
        V = family_vertices(confocal, 3)
        scene = Scene(confocal.pair, [V[0]], [named_circle(V[0], "euler")],
                      [sample_locus(confocal, CenterSpec.X(3), 64)])
        text = svg_string(scene)
        idx = [text.index(f'id="{g}"') for g in ("axes", "outer", "inner", "triangles", "circles", "loci")]
        assert idx == sorted(idx)
        assert 'viewBox="-2.400000 -1.200000 4.800000 2.400000"' in text

    def test_six_decimals(self):
        text = svg_string(Scene())
        assert "1.200000" in text and "1.2000000" not in text

    def test_io_failure(self, tmp_path):
        from poncelet_lab.exceptions import IoFailure
        with pytest.raises(IoFailure):
            render_svg(Scene(), tmp_path / "missing" / "x.svg")
