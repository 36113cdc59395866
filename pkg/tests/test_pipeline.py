import math
import os
import xml.etree.ElementTree as ET

import pytest

from paraglyph.dsl import evaluate, parse
from paraglyph.geometry import bezier_eval
from paraglyph.pipeline import (
    BuiltGlyph,
    ConfigError,
    EducationMode,
    FontMetadata,
    InterpolationError,
    TypographicConfig,
    build_master_set,
    check_compatibility,
    derive_education_variant,
    designspace_document,
    glyph_to_svg,
    interpolate,
    load_config_params,
    load_project,
    read_ufo,
    write_ufo,
)
from paraglyph.pipeline.report import write_check_report

SAMPLE = os.path.join(os.path.dirname(__file__), "..", "sample",
                      "manifest.yaml")


@pytest.fixture(scope="module")
def project():
    return load_project(SAMPLE)


@pytest.fixture(scope="module")
def master_set(project):
    return build_master_set(project)


def master(master_set, name):
    return next(m for m in master_set.masters if m.spec.name == name)


class TestConfig:
    def test_defaults_follow_unit_scheme(self):
        config = TypographicConfig.from_params({})
        assert config.em == 1000
        assert config.u == 100
        assert config.ascent == 800
        assert config.descent == 200
        assert config.mheight == 600
        assert config.thick == 100
        assert config.lbearing == 40

    def test_master_configs_reproduce_published_values(self, project):
        base = os.path.dirname(SAMPLE)
        expected = {
            "Regular.mpg": {"thick": 90.0},
            "Bold.mpg": {"thick": 125.0},
            "Thin.mpg": {"thick": 50.0},
            "Condensed.mpg": {"condense": 0.8},
            "Oblique.mpg": {"slant": 15.0},
            "Sharp.mpg": {"terminalround": 0.15},
        }
        for filename, wants in expected.items():
            params = load_config_params(os.path.join(base, "config", filename))
            config = TypographicConfig.from_params(params)
            for key, value in wants.items():
                assert getattr(config, key) == value

    def test_u_must_track_em(self):
        with pytest.raises(ConfigError):
            TypographicConfig.from_params({"em": 1000, "u": 77})

    def test_thin_is_a_ratio(self):
        with pytest.raises(ConfigError):
            TypographicConfig.from_params({"thin": 1.5})


class TestBuild:
    def test_all_masters_have_all_glyphs(self, master_set):
        names = {"stem", "bowl", "ra", "ring", "box"}
        for m in master_set.masters:
            assert set(m.glyphs) == names

    def test_advance_scales_with_condense(self, master_set):
        regular = master(master_set, "Regular")
        condensed = master(master_set, "Condensed")
        for name in regular.glyphs:
            assert condensed.glyphs[name].advance == pytest.approx(
                0.8 * regular.glyphs[name].advance, abs=1e-9)

    def test_oblique_is_sheared_regular(self, master_set):
        regular = master(master_set, "Regular")
        oblique = master(master_set, "Oblique")
        shear = math.tan(math.radians(15.0))
        for name in ("box", "stem"):
            for c_r, c_o in zip(regular.glyphs[name].outlines,
                                oblique.glyphs[name].outlines):
                for s_r, s_o in zip(c_r.segments, c_o.segments):
                    for p_r, p_o in zip((s_r.p0, s_r.c0, s_r.c1, s_r.p1),
                                        (s_o.p0, s_o.c0, s_o.c1, s_o.p1)):
                        assert p_o.x == pytest.approx(p_r.x + p_r.y * shear,
                                                      abs=1e-9)
                        assert p_o.y == pytest.approx(p_r.y, abs=1e-9)

    def test_left_bearing_applied(self, master_set):
        regular = master(master_set, "Regular")
        from paraglyph.geometry import bbox
        for name, glyph in regular.glyphs.items():
            xmin, _, _, _ = bbox(glyph.outlines)
            assert xmin == pytest.approx(regular.config.lbearing, abs=1e-9)


class TestCompatibility:
    def test_sample_masters_compatible(self, master_set):
        report = check_compatibility(master_set)
        assert report.ok
        assert report.format().startswith("compatible")

    def test_missing_glyph_reported(self, master_set):
        import copy
        broken = copy.deepcopy(master_set)
        del broken.masters[1].glyphs["ra"]
        report = check_compatibility(broken)
        assert not report.ok
        assert any(issue.glyph == "ra" and "missing" in issue.message
                   for issue in report.issues)

    def test_structure_mismatch_reported(self, master_set):
        import copy
        broken = copy.deepcopy(master_set)
        glyph = broken.masters[1].glyphs["box"]
        glyph.outlines = glyph.outlines + glyph.outlines
        report = check_compatibility(broken)
        assert any(issue.glyph == "box" and "contour count" in issue.message
                   for issue in report.issues)

    def test_two_identical_masters_compatible(self, master_set):
        import copy
        twin = copy.deepcopy(master_set)
        twin.masters = [twin.masters[0], copy.deepcopy(twin.masters[0])]
        assert check_compatibility(twin).ok


class TestInterpolation:
    def test_identity_at_every_master(self, master_set):
        for m in master_set.masters:
            out = interpolate(master_set, m.location)
            for name, glyph in out.items():
                assert glyph.outlines == m.glyphs[name].outlines
                assert glyph.advance == m.glyphs[name].advance

    def test_two_master_midpoint_is_mean(self, master_set):
        out = interpolate(master_set, {"wght": 250})
        thin = master(master_set, "Thin")
        regular = master(master_set, "Regular")
        for name, glyph in out.items():
            for c_o, c_t, c_r in zip(glyph.outlines,
                                     thin.glyphs[name].outlines,
                                     regular.glyphs[name].outlines):
                for s_o, s_t, s_r in zip(c_o.segments, c_t.segments,
                                         c_r.segments):
                    for p_o, p_t, p_r in zip(
                            (s_o.p0, s_o.c0, s_o.c1, s_o.p1),
                            (s_t.p0, s_t.c0, s_t.c1, s_t.p1),
                            (s_r.p0, s_r.c0, s_r.c1, s_r.p1)):
                        assert p_o.x == (p_t.x + p_r.x) / 2
                        assert p_o.y == (p_t.y + p_r.y) / 2

    def test_stem_width_tracks_nib_width(self, master_set):
        # 30% of the way to Bold: expect 0.7*90 + 0.3*125 = 100.5 units.
        out = interpolate(master_set, {"wght": 550})
        stem = out["stem"]
        xs = []
        for contour in stem.outlines:
            for seg in contour.segments:
                for k in range(65):
                    p = bezier_eval(seg, k / 64)
                    if abs(p.y - 300.0) < 2.0:
                        xs.append(p.x)
        width = max(xs) - min(xs)
        assert abs(width - 100.5) < 0.5

    def test_out_of_range_location(self, master_set):
        with pytest.raises(Exception):
            interpolate(master_set, {"wght": 1200})

    def test_unreachable_axis_side(self, master_set):
        import copy
        reduced = copy.deepcopy(master_set)
        reduced.masters = [m for m in reduced.masters
                           if m.spec.name != "Expanded"]
        with pytest.raises(InterpolationError):
            interpolate(reduced, {"wdth": 120})

    def test_unknown_axis(self, master_set):
        with pytest.raises(InterpolationError):
            interpolate(master_set, {"opsz": 12})


class TestSvgWriter:
    def test_square_path_data(self):
        src = ("side := 10;\n"
               "draw (0,0) -- (side,0) -- (side,side) -- (0,side) -- (0,0);\n")
        glyph = evaluate(parse(src).program)
        svg = glyph_to_svg(glyph.outlines)
        assert 'viewBox="0 0 10 10"' in svg
        assert 'd="M 0 10 L 10 10 L 10 0 L 0 0 Z"' in svg
        ET.fromstring(svg)  # well-formed XML

    def test_empty_glyph(self):
        svg = glyph_to_svg([])
        assert '<path class="outline" d=""/>' in svg
        ET.fromstring(svg)

    def test_coordinates_rounded_to_3_decimals(self):
        src = "draw (0,0)..controls (26.8,-1.8) and (51.4,14.6)..(60,40);\n"
        glyph = evaluate(parse(src).program)
        svg = glyph_to_svg(glyph.outlines)
        for token in svg.split('d="')[1].split('"')[0].split():
            if token in "MLCZ":
                continue
            assert len(token.rsplit(".", 1)[-1]) <= 3 or "." not in token

    def test_debug_overlay_elements(self, master_set):
        regular = master(master_set, "Regular")
        glyph = regular.glyphs["ra"]
        svg = glyph_to_svg(glyph.outlines, config=regular.config,
                           advance=glyph.advance, debug=True,
                           center_paths=glyph.center_paths)
        assert 'class="knot"' in svg
        assert 'class="handle"' in svg
        assert 'class="center"' in svg
        assert 'data-guide="baseline"' in svg
        ET.fromstring(svg)


class TestUfo:
    def test_round_trip(self, master_set, tmp_path):
        regular = master(master_set, "Regular")
        ufo_dir = str(tmp_path / "Demo-Regular.ufo")
        write_ufo(regular.glyphs, FontMetadata("Demo", "Regular", "1.0"),
                  regular.config, ufo_dir)
        fontinfo, glyphs = read_ufo(ufo_dir)
        assert fontinfo["unitsPerEm"] == 1000
        assert fontinfo["ascender"] == 800
        assert fontinfo["descender"] == -200
        assert set(glyphs) == set(regular.glyphs)
        for name, glif in glyphs.items():
            built = regular.glyphs[name]
            assert glif.unicode == built.unicode
            assert glif.advance == round(built.advance) or \
                abs(glif.advance - built.advance) <= 0.5
            assert len(glif.outlines) == len(built.outlines)
            for c_read, c_built in zip(glif.outlines, built.outlines):
                assert c_read.closed == c_built.closed
                assert len(c_read.segments) == len(c_built.segments)
                for s_read, s_built in zip(c_read.segments, c_built.segments):
                    for p_read, p_built in zip(
                            (s_read.p0, s_read.c0, s_read.c1, s_read.p1),
                            (s_built.p0, s_built.c0, s_built.c1, s_built.p1)):
                        assert abs(p_read.x - p_built.x) <= 0.5
                        assert abs(p_read.y - p_built.y) <= 0.5

    def test_square_glif_uses_line_points(self, tmp_path):
        src = ("side := 100;\n"
               "draw (0,0) -- (side,0) -- (side,side) -- (0,side) -- (0,0);\n")
        result = evaluate(parse(src).program)
        glyph = BuiltGlyph("box", 0x25A1, result.outlines, 180.0)
        ufo_dir = str(tmp_path / "T-R.ufo")
        write_ufo({"box": glyph}, FontMetadata("T", "R"),
                  TypographicConfig(), ufo_dir)
        glif_text = open(os.path.join(ufo_dir, "glyphs", "box.glif")).read()
        assert glif_text.count('type="line"') == 4
        assert "offcurve" not in glif_text
        assert 'hex="25A1"' in glif_text

    def test_duplicate_names_rejected(self, tmp_path):
        from paraglyph.pipeline.ufo import UfoError
        glyph = BuiltGlyph("a", None, [], 100.0)
        twin = BuiltGlyph("a", None, [], 100.0)
        with pytest.raises(UfoError):
            write_ufo({"a": glyph, "b": twin}, FontMetadata("T", "R"),
                      TypographicConfig(), str(tmp_path / "x.ufo"))

    def test_invalid_unicode_rejected(self, tmp_path):
        from paraglyph.pipeline.ufo import UfoError
        glyph = BuiltGlyph("a", 0x110000, [], 100.0)
        with pytest.raises(UfoError):
            write_ufo({"a": glyph}, FontMetadata("T", "R"),
                      TypographicConfig(), str(tmp_path / "x.ufo"))

    def test_smooth_flags_on_smooth_knots(self, master_set, tmp_path):
        regular = master(master_set, "Regular")
        ufo_dir = str(tmp_path / "S-R.ufo")
        write_ufo(regular.glyphs, FontMetadata("S", "R"), regular.config,
                  ufo_dir)
        ra = open(os.path.join(ufo_dir, "glyphs", "ra.glif")).read()
        assert 'smooth="yes"' in ra
        assert 'hex="0D31"' in ra

    def test_ra_envelope_node_accounting(self, master_set):
        # Five path nodes contribute ten edge nodes; the two elliptical
        # terminal caps add one midpoint node each.
        regular = master(master_set, "Regular")
        (outline,) = regular.glyphs["ra"].outlines
        assert outline.closed
        assert outline.node_count() == 10 + 2


class TestDesignspace:
    def test_axes_match_published_table(self, master_set):
        doc = designspace_document(master_set, "Demo",
                                   {m.spec.name: f"Demo-{m.spec.name}.ufo"
                                    for m in master_set.masters})
        root = ET.fromstring(doc)
        axes = {a.get("tag"): a for a in root.find("axes")}
        assert set(axes) == {"wght", "slnt", "wdth", "SOFT"}
        assert (axes["wght"].get("minimum"), axes["wght"].get("default"),
                axes["wght"].get("maximum")) == ("100", "400", "900")
        assert (axes["slnt"].get("minimum"), axes["slnt"].get("default"),
                axes["slnt"].get("maximum")) == ("-15", "0", "0")
        assert (axes["wdth"].get("minimum"), axes["wdth"].get("default"),
                axes["wdth"].get("maximum")) == ("75", "100", "125")
        assert (axes["SOFT"].get("minimum"), axes["SOFT"].get("default"),
                axes["SOFT"].get("maximum")) == ("0", "50", "100")

    def test_sources_and_instances(self, master_set):
        doc = designspace_document(master_set, "Demo",
                                   {m.spec.name: f"Demo-{m.spec.name}.ufo"
                                    for m in master_set.masters})
        root = ET.fromstring(doc)
        sources = root.find("sources").findall("source")
        assert len(sources) == len(master_set.masters)
        assert len(sources) == 8
        instances = root.find("instances").findall("instance")
        assert len(instances) == 32
        condensed_thin = next(i for i in instances
                              if i.get("stylename") == "Condensed Thin")
        dims = {d.get("name"): d.get("xvalue")
                for d in condensed_thin.find("location")}
        assert dims["Width"] == "75"
        assert dims["Weight"] == "100"

    def test_write_requires_master_ufos(self, master_set, tmp_path):
        from paraglyph.pipeline import write_designspace
        with pytest.raises(FileNotFoundError):
            write_designspace(master_set, "Demo",
                              {m.spec.name: f"missing-{m.spec.name}.ufo"
                               for m in master_set.masters},
                              str(tmp_path / "demo.designspace"))

    def test_master_location_outside_axis_range_rejected(self, tmp_path):
        import shutil
        from paraglyph.pipeline import ManifestError
        dest = tmp_path / "sample"
        shutil.copytree(os.path.dirname(os.path.abspath(SAMPLE)), dest)
        manifest = dest / "manifest.yaml"
        manifest.write_text(manifest.read_text().replace(
            "location: {wght: 900}", "location: {wght: 1200}"))
        with pytest.raises(ManifestError):
            load_project(str(manifest))

    def test_default_master_carries_info_copy(self, master_set):
        doc = designspace_document(master_set, "Demo",
                                   {m.spec.name: "x.ufo"
                                    for m in master_set.masters})
        root = ET.fromstring(doc)
        flagged = [s for s in root.find("sources") if s.find("info") is not None]
        assert len(flagged) == 1
        assert flagged[0].get("name") == "Regular"


class TestEducation:
    def _stroked(self, master_set):
        regular = master(master_set, "Regular")
        return {k: v for k, v in regular.glyphs.items() if v.center_paths}, \
            regular.config

    def test_dots_on_straight_stem(self):
        src = ("thick := 10;\n"
               "p := (0,0) -- (0,100);\n"
               "pen_stroke()(p)(s);\nfill s;\n")
        result = evaluate(parse(src).program)
        glyph = BuiltGlyph("stem", None, result.outlines, 100.0,
                           result.center_paths)
        out = derive_education_variant({"stem": glyph}, EducationMode.DOTS,
                                       spacing=20.0, stroke_width=10.0)
        dots = out["stem"].outlines
        assert len(dots) == 6
        for contour in dots:
            assert contour.closed
            assert len(contour.segments) == 4

    def test_arrows_follow_direction(self):
        src = ("thick := 10;\n"
               "p := (0,0) -- (100,0);\n"
               "pen_stroke()(p)(s);\nfill s;\n")
        result = evaluate(parse(src).program)
        glyph = BuiltGlyph("dash", None, result.outlines, 100.0,
                           result.center_paths)
        out = derive_education_variant({"dash": glyph}, EducationMode.ARROWS,
                                       spacing=50.0, stroke_width=10.0)
        assert len(out["dash"].outlines) == 3

    def test_sample_masters_derive_dots(self, master_set):
        glyphs, config = self._stroked(master_set)
        out = derive_education_variant(glyphs, EducationMode.DOTS,
                                       spacing=config.thick * 1.5,
                                       stroke_width=config.thick)
        assert set(out) == set(glyphs)
        assert all(g.outlines for g in out.values())

    def test_missing_center_paths_rejected(self):
        from paraglyph.pipeline.education import EducationError
        glyph = BuiltGlyph("box", None, [], 100.0, [])
        with pytest.raises(EducationError):
            derive_education_variant({"box": glyph}, EducationMode.DOTS,
                                     20.0, 10.0)


class TestReport:
    def test_report_artifacts_written(self, master_set, tmp_path):
        report = check_compatibility(master_set)
        out = write_check_report(report, master_set, str(tmp_path))
        assert (tmp_path / "compatibility.tsv").exists()
        assert (tmp_path / "metrics.tsv").exists()
        assert len(out["figures"]) == 5
        for fig in out["figures"]:
            assert os.path.getsize(fig) > 0
        header = (tmp_path / "metrics.tsv").read_text().splitlines()[0]
        assert header == "master\tglyph\tadvance\tcontours"
