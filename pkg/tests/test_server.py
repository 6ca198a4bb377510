import json
import threading
import urllib.error
import urllib.request

import pytest

from geopattern.pipeline import report_path
from geopattern.server import AppState, make_server

from conftest import write_toy_dataset


@pytest.fixture
def service(tmp_path):
    manifest = write_toy_dataset(tmp_path / "data")
    out_dir = tmp_path / "out"
    state = AppState(out_dir, {"toy": str(manifest)})
    server = make_server("127.0.0.1", 0, state)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    yield base, out_dir
    server.shutdown()
    server.server_close()


def get(url, expect_status=200):
    try:
        with urllib.request.urlopen(url) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as err:
        assert err.code == expect_status, err.read()
        return err.code, err.read()


def post(url, payload, expect_status=200):
    req = urllib.request.Request(
        url,
        data=json.dumps(payload).encode(),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, resp.read()
    except urllib.error.HTTPError as err:
        assert err.code == expect_status, err.read()
        return err.code, err.read()


class TestEndpoints:
    def test_datasets_listing(self, service):
        base, _ = service
        status, body = get(f"{base}/api/datasets")
        assert status == 200
        assert json.loads(body)["datasets"] == ["toy"]

    def test_extract_twice_served_from_cache_identically(self, service):
        base, _ = service
        payload = {"dataset": "toy", "rank": 2, "clusters": 2}
        _, body1 = post(f"{base}/api/extract", payload)
        _, body2 = post(f"{base}/api/extract", payload)
        assert body1 == body2
        report = json.loads(body1)["report"]
        assert report["n_sites"] == 4

    def test_patterns_endpoint_matches_persisted_file(self, service):
        base, out_dir = service
        _, body = post(
            f"{base}/api/extract", {"dataset": "toy", "rank": 2, "clusters": 2}
        )
        run_id = json.loads(body)["run_id"]
        _, payload = get(f"{base}/api/patterns?run={run_id}")
        stored = report_path(out_dir, run_id).read_bytes()
        assert payload == stored

    def test_runs_endpoint(self, service):
        base, _ = service
        _, body = post(
            f"{base}/api/extract", {"dataset": "toy", "rank": 2, "clusters": 2}
        )
        run_id = json.loads(body)["run_id"]
        status, body = get(f"{base}/api/runs/{run_id}")
        assert status == 200
        decoded = json.loads(body)
        assert decoded["status"] == "done"
        assert decoded["report"]["run_id"] == run_id

    def test_sites_filter_matches_pattern_counts(self, service):
        base, _ = service
        _, body = post(
            f"{base}/api/extract", {"dataset": "toy", "rank": 2, "clusters": 2}
        )
        decoded = json.loads(body)
        run_id = decoded["run_id"]
        for pattern in decoded["report"]["patterns"]:
            _, sites_body = get(
                f"{base}/api/sites?run={run_id}&pattern={pattern['index']}"
            )
            sites = json.loads(sites_body)["sites"]
            assert len(sites) == pattern["site_count"]
            assert all(s["pattern"] == pattern["index"] for s in sites)

    def test_unknown_dataset_is_400_with_machine_readable_error(self, service):
        base, _ = service
        status, body = post(
            f"{base}/api/extract", {"dataset": "nope"}, expect_status=400
        )
        assert status == 400
        err = json.loads(body)["error"]
        assert err["code"] == "unknown-dataset"
        assert err["known"] == ["toy"]

    def test_invalid_parameters_rejected(self, service):
        base, _ = service
        status, body = post(
            f"{base}/api/extract",
            {"dataset": "toy", "rank": 0},
            expect_status=400,
        )
        assert status == 400

    def test_unknown_run_is_404(self, service):
        base, _ = service
        status, body = get(f"{base}/api/patterns?run=deadbeef", expect_status=404)
        assert status == 404
        assert json.loads(body)["error"]["code"] == "unknown-run"

    def test_bench_latest_lifecycle(self, service):
        base, out_dir = service
        status, _ = get(f"{base}/api/bench/latest", expect_status=404)
        assert status == 404
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "bench_latest.json").write_text(
            json.dumps({"version": 1, "suites": {}}), encoding="utf-8"
        )
        status, body = get(f"{base}/api/bench/latest")
        assert status == 200
        assert json.loads(body)["version"] == 1

    def test_concurrent_duplicate_extractions_agree(self, service):
        base, _ = service
        payload = {"dataset": "toy", "rank": 2, "clusters": 2, "seed": 7}
        results = []

        def hit():
            results.append(post(f"{base}/api/extract", payload))

        threads = [threading.Thread(target=hit) for _ in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        bodies = {body for _, body in results}
        assert len(bodies) == 1

    def test_unknown_route_404(self, service):
        base, _ = service
        status, _ = get(f"{base}/api/nothing", expect_status=404)
        assert status == 404

    def test_json_responses_embed_schema_version(self, service):
        base, _ = service
        _, listing = get(f"{base}/api/datasets")
        assert json.loads(listing)["schema_version"] == 1
        _, body = post(
            f"{base}/api/extract", {"dataset": "toy", "rank": 2, "clusters": 2}
        )
        decoded = json.loads(body)
        assert decoded["schema_version"] == 1
        assert decoded["report"]["version"] == 1
        status, err_body = post(
            f"{base}/api/extract", {"dataset": "ghost"}, expect_status=400
        )
        assert json.loads(err_body)["schema_version"] == 1
