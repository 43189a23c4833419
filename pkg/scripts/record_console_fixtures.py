"""Record live service responses as fixtures for the browser-console tests.

Drives the real FastAPI app through one scripted session (register
figure4, open a grouped session, answer N111 = true, preview N112) and
dumps each response under frontend/tests/fixtures/. Session ids are
randomized per run, so they are normalized to "SID" to keep the
fixtures stable.

Run with: python3 scripts/record_console_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from inquest import figure4, network_to_dict
from inquest.service import SessionService, create_app

OUT = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def normalize(data, sid):
    text = json.dumps(data, sort_keys=True)
    return json.loads(text.replace(sid, "SID"))


def main():
    client = TestClient(create_app(SessionService()))
    client.post("/networks", json=network_to_dict(figure4()))

    fixtures = {}
    fixtures["networks"] = client.get("/networks").json()

    created = client.post(
        "/sessions", json={"network": "figure4", "strategy": {"mode": "grouped"}}
    ).json()
    sid = created["session_id"]
    fixtures["create_grouped"] = created

    fixtures["whatif_n111_fresh"] = client.get(
        f"/sessions/{sid}/whatif", params={"node": "N111"}
    ).json()

    fixtures["observe_n111_true"] = client.post(
        f"/sessions/{sid}/observe", json={"node": "N111", "value": 1}
    ).json()

    fixtures["state_after_n111"] = client.get(f"/sessions/{sid}").json()

    fixtures["whatif_n112"] = client.get(
        f"/sessions/{sid}/whatif", params={"node": "N112"}
    ).json()

    OUT.mkdir(parents=True, exist_ok=True)
    for name, data in fixtures.items():
        path = OUT / f"{name}.json"
        path.write_text(json.dumps(normalize(data, sid), indent=2, sort_keys=True) + "\n")
        print("wrote", path)


if __name__ == "__main__":
    main()
