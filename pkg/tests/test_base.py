# coding: utf8
import dcgrid
from dcgrid import presets

from .mockup import preset_text


class TestBasic:
    def test_version(self):
        assert dcgrid.__version__.count(".") == 2, "Version string"

    def test_public_api(self):
        for name in dcgrid.__all__:
            assert hasattr(dcgrid, name), "Exported name {}".format(name)

    def test_parse_presets(self):
        for name in ("iv", "vii", "viii"):
            scenario = dcgrid.parse_scenario(preset_text(name))
            assert scenario.grid.n == 2, "Two branches in preset {}".format(name)
            assert scenario.grid.all_proposed, "Preset {} runs the proposed controller".format(name)

    def test_examples_cover_checklist(self):
        names = sorted(presets.examples())
        assert names == [
            "tableIV_800.toml",
            "tableIV_805.toml",
            "tableIV_810.toml",
            "tableIV_825.toml",
            "tableVII_500.toml",
            "tableVIII_530.toml",
            "tableVIII_sweep.toml",
        ], "Built-in examples"
