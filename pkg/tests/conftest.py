import json

import pytest


def write_toy_dataset(root, name="toy"):
    """Four sites, three modes (crime-count bins, social class, bus-stop
    bins); two pairs of sites share identical characteristics."""
    root.mkdir(parents=True, exist_ok=True)
    sites = ["site_id,lat,lon"]
    coords = {"a": 0.0, "b": 0.1, "c": 0.2, "d": 0.3}
    for sid, lat in coords.items():
        sites.append(f"{sid},{lat},0.0")
    (root / "sites.csv").write_text("\n".join(sites) + "\n", encoding="utf-8")

    def near(lat, n, offset=0.0002):
        return [(lat + offset * (i + 1), 0.0) for i in range(n)]

    crimes = ["lat,lon"]
    for lat, n in ((0.0, 6), (0.1, 5), (0.2, 1)):
        crimes += [f"{la},{lo}" for la, lo in near(lat, n)]
    (root / "crimes.csv").write_text("\n".join(crimes) + "\n", encoding="utf-8")

    social = ["lat,lon,category"]
    for lat, cat in ((0.0, "A"), (0.1, "A"), (0.2, "C"), (0.3, "C")):
        for la, lo in near(lat, 2):
            social.append(f"{la},{lo},{cat}")
    (root / "social.csv").write_text("\n".join(social) + "\n", encoding="utf-8")

    bus = ["lat,lon"]
    for lat, n in ((0.1, 1), (0.2, 4), (0.3, 5)):
        bus += [f"{la},{lo}" for la, lo in near(lat, n)]
    (root / "bus.csv").write_text("\n".join(bus) + "\n", encoding="utf-8")

    manifest = {
        "version": 1,
        "name": name,
        "sites": "sites.csv",
        "radius_m": 200.0,
        "sources": [
            {"name": "crimes", "path": "crimes.csv", "kind": "count", "bins": 2},
            {
                "name": "social",
                "path": "social.csv",
                "kind": "categorical-indicator",
            },
            {"name": "bus", "path": "bus.csv", "kind": "count", "bins": 2},
        ],
    }
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def toy_manifest(tmp_path):
    return write_toy_dataset(tmp_path / "toydata")
