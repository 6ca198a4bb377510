import json

import pytest

from geopattern.pipeline import (
    PipelineConfig,
    PipelineError,
    load_manifest,
    report_path,
    run_id_for,
    run_pipeline,
)


def strip_timestamps(report: dict) -> dict:
    out = dict(report)
    out.pop("timestamps", None)
    return out


class TestManifest:
    def test_loads_toy_manifest(self, toy_manifest):
        m = load_manifest(toy_manifest)
        assert m.name == "toy"
        assert m.radius_m == 200.0
        assert [s["name"] for s in m.sources] == ["crimes", "social", "bus"]
        assert m.bins == {"crimes": 2, "bus": 2}

    def test_missing_file_is_ingest_stage(self, tmp_path):
        with pytest.raises(PipelineError) as err:
            load_manifest(tmp_path / "nope.json")
        assert err.value.stage == "ingest"

    def test_bad_version_rejected(self, tmp_path):
        p = tmp_path / "m.json"
        p.write_text('{"version": 99}', encoding="utf-8")
        with pytest.raises(PipelineError):
            load_manifest(p)


class TestRunPipeline:
    def config(self, toy_manifest, tmp_path, **kw):
        defaults = dict(
            manifest=str(toy_manifest),
            rank=2,
            clusters=2,
            seed=0,
            output_dir=str(tmp_path / "out"),
        )
        defaults.update(kw)
        return PipelineConfig(**defaults)

    def test_toy_report_assigns_all_sites(self, toy_manifest, tmp_path):
        report = run_pipeline(self.config(toy_manifest, tmp_path))
        assert report["n_sites"] == 4
        assert len(report["sites"]) == 4
        assert len(report["patterns"]) <= 2
        assert sum(p["site_count"] for p in report["patterns"]) == 4
        labels = {s["pattern"] for s in report["sites"]}
        assert labels <= set(range(len(report["patterns"])))

    def test_single_cluster_takes_everything(self, toy_manifest, tmp_path):
        report = run_pipeline(self.config(toy_manifest, tmp_path, clusters=1))
        assert len(report["patterns"]) == 1
        assert report["patterns"][0]["site_count"] == 4

    def test_decoded_labels_round_trip(self, toy_manifest, tmp_path):
        report = run_pipeline(self.config(toy_manifest, tmp_path))
        modes = report["modes"]
        for pattern in report["patterns"]:
            for k, semantic_id in enumerate(pattern["ids"]):
                assert (
                    pattern["labels"][k]
                    == modes[k]["labels"][semantic_id - 1]
                )

    def test_byte_identical_reports_modulo_timestamps(self, toy_manifest, tmp_path):
        a = run_pipeline(self.config(toy_manifest, tmp_path,
                                     output_dir=str(tmp_path / "o1")))
        b = run_pipeline(
            self.config(toy_manifest, tmp_path, output_dir=str(tmp_path / "o2")),
            use_cache=False,
        )
        assert json.dumps(strip_timestamps(a), sort_keys=True) == json.dumps(
            strip_timestamps(b), sort_keys=True
        )

    def test_cache_returns_stored_report(self, toy_manifest, tmp_path):
        cfg = self.config(toy_manifest, tmp_path)
        first = run_pipeline(cfg)
        stored = report_path(cfg.output_dir, first["run_id"])
        assert stored.exists()
        second = run_pipeline(cfg)
        assert second == first  # timestamps included: served from disk

    def test_outputs_written(self, toy_manifest, tmp_path):
        cfg = self.config(toy_manifest, tmp_path)
        report = run_pipeline(cfg)
        run_dir = report_path(cfg.output_dir, report["run_id"]).parent
        for name in ("report.json", "sites.csv", "run.log",
                     "patterns_radar.png", "sites_map.png"):
            assert (run_dir / name).exists(), name
        csv_lines = (run_dir / "sites.csv").read_text().strip().splitlines()
        assert csv_lines[0] == "site_id,lat,lon,pattern"
        assert len(csv_lines) == 5

    def test_unreadable_manifest_fails_ingest_without_outputs(self, tmp_path):
        cfg = PipelineConfig(
            manifest=str(tmp_path / "missing.json"),
            output_dir=str(tmp_path / "out"),
        )
        with pytest.raises(PipelineError) as err:
            run_pipeline(cfg)
        assert err.value.stage == "ingest"
        assert not (tmp_path / "out").exists()

    def test_run_id_changes_with_parameters(self, toy_manifest, tmp_path):
        m = load_manifest(toy_manifest)
        base = self.config(toy_manifest, tmp_path)
        other = self.config(toy_manifest, tmp_path, rank=1)
        assert run_id_for(m, base) != run_id_for(m, other)

    def test_run_id_changes_with_data(self, toy_manifest, tmp_path):
        m = load_manifest(toy_manifest)
        cfg = self.config(toy_manifest, tmp_path)
        before = run_id_for(m, cfg)
        sites = m.sites_path.read_text(encoding="utf-8")
        m.sites_path.write_text(sites + "e,0.4,0.0\n", encoding="utf-8")
        assert run_id_for(m, cfg) != before

    def test_rank_clamped_with_diagnostic(self, toy_manifest, tmp_path):
        report = run_pipeline(self.config(toy_manifest, tmp_path, rank=50))
        assert any("clamped" in d for d in report["diagnostics"])
