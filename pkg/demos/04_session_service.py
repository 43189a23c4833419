"""A full diagnosis-session walk through the HTTP API, in process.

Run with: python3 demos/04_session_service.py
"""

import json

from fastapi.testclient import TestClient

from inquest import figure4, network_to_dict
from inquest.service import SessionService, create_app

service = SessionService()  # volatile store; pass a directory to persist
client = TestClient(create_app(service))

client.post("/networks", json=network_to_dict(figure4()))
print("registered:", json.dumps(client.get("/networks").json(), indent=2))

view = client.post(
    "/sessions", json={"network": "figure4", "strategy": {"mode": "grouped"}}
).json()
sid = view["session_id"]
print(f"\nsession {sid}: first suggestion {view['suggestion']}")

# Peek before answering: what would each reading of N111 do to the root?
preview = client.get(f"/sessions/{sid}/whatif", params={"node": "N111"}).json()
print(
    f"what-if N111: P(N1) -> {preview['if_true']['N1']:.3f} if present, "
    f"{preview['if_false']['N1']:.3f} if absent (EV {preview['ev_score']:.2f})"
)

# Answer the suggestion, then jump the queue with an override.
view = client.post(f"/sessions/{sid}/observe", json={"node": "N111", "value": 1}).json()
print(f"\nN111 = 1: P(N1) = {view['posteriors']['N1']:.6f}, next {view['suggestion']}")

view = client.post(
    f"/sessions/{sid}/observe", json={"node": "N121", "value": 0.8, "override": True}
).json()
print(f"N121 = 0.8 (soft, out of order): P(N1) = {view['posteriors']['N1']:.6f}")

record = client.post(f"/sessions/{sid}/close").json()
print(f"\nclosed after {record['final']['query_count']} observations; event log:")
for event in record["events"]:
    print("  ", {k: v for k, v in event.items() if k != "strategy"})

# The event log alone reproduces the final state exactly.
replayed = service.replay_events(record["events"])
assert dict(replayed.belief.posterior) == record["final"]["posteriors"]
print("\nreplay of the log matches the live state bit for bit")
