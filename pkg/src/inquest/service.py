"""Interactive diagnosis sessions over a JSON/HTTP API.

The engine itself is pure; this module owns the only mutable state: a
table of live sessions and their append-only event logs. Each session
log replays through the strategy engine to exactly the state the
service reports, which doubles as an integrity check and is how the
index is rebuilt on startup. Requests to one session are serialized by
a per-session lock; different sessions never contend.
"""

import json
import logging
import secrets
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .model import (
    EvidenceError,
    EvidenceValue,
    InquestError,
    NetworkSpec,
    SessionError,
    evidence_value_from_number,
    evidence_value_to_number,
    load_network,
    network_from_dict,
    network_to_dict,
)
from .strategies import (
    SessionState,
    StrategySpec,
    apply_override,
    create_session,
    leaf_score,
    select_next,
    step,
)
from .propagation import propagate_beliefs


class UnknownResourceError(InquestError):
    """Named network, session, or node does not exist."""


log = logging.getLogger(__name__)


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _apply_observation(
    state: SessionState, node: str, value: EvidenceValue, override: bool
) -> SessionState:
    """The one observation rule, shared by the live path and replay."""
    if state.terminated:
        raise SessionError("session closed: the goal criterion has been reached")
    suggestion = select_next(state)
    if node == suggestion and not override:
        return step(state, value)
    if override:
        return apply_override(state, node, value)
    raise SessionError(
        f"node {node} is not the suggested leaf ({suggestion}); "
        "set override=true to observe it anyway"
    )


@dataclass
class _LiveSession:
    session_id: str
    network: str
    created_at: str
    state: SessionState
    events: list[dict] = field(default_factory=list)
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False)


class SessionService:
    """Network registry plus session lifecycle, optionally disk-backed.

    With a store directory, registered networks land in
    ``<store>/networks/<name>.json`` and every session appends its
    events to ``<store>/sessions/<id>.jsonl`` as they happen; on
    startup all unclosed logs are replayed back into live sessions.
    """

    def __init__(self, store_dir: Path | str | None = None):
        self._store = Path(store_dir) if store_dir else None
        self._networks: dict[str, NetworkSpec] = {}
        self._sessions: dict[str, _LiveSession] = {}
        self._table_lock = threading.RLock()
        if self._store:
            (self._store / "networks").mkdir(parents=True, exist_ok=True)
            (self._store / "sessions").mkdir(parents=True, exist_ok=True)
            self._load_store()

    # -- store ----------------------------------------------------------------

    def _load_store(self) -> None:
        """Rebuild the in-memory index; a damaged file is skipped, not fatal."""
        for path in sorted((self._store / "networks").glob("*.json")):
            try:
                spec = load_network(path.read_bytes())
            except InquestError as exc:
                log.warning("skipping unreadable network file %s: %s", path, exc)
                continue
            self._networks[spec.name] = spec
        for path in sorted((self._store / "sessions").glob("*.jsonl")):
            try:
                events = [json.loads(line) for line in path.read_text().splitlines() if line]
                if not events or any(e.get("type") == "closed" for e in events):
                    continue
                state = self.replay_events(events)
                head = events[0]
            except (InquestError, KeyError, ValueError) as exc:
                log.warning("skipping unreplayable session log %s: %s", path, exc)
                continue
            self._sessions[head["session_id"]] = _LiveSession(
                session_id=head["session_id"],
                network=head["network"],
                created_at=head["created_at"],
                state=state,
                events=events,
            )

    def _append_event(self, live: _LiveSession, event: dict) -> None:
        live.events.append(event)
        if self._store:
            path = self._store / "sessions" / f"{live.session_id}.jsonl"
            with path.open("a") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")

    def replay_events(self, events: list[dict]) -> SessionState:
        """Rebuild the session state an event log describes, bit for bit."""
        head = events[0]
        if head["type"] != "created":
            raise InquestError("event log does not start with a created event")
        spec = self._require_network(head["network"])
        state = create_session(spec, StrategySpec.from_dict(head["strategy"]))
        for event in events[1:]:
            if event["type"] == "observed":
                state = _apply_observation(
                    state,
                    event["node"],
                    evidence_value_from_number(event["value"]),
                    bool(event.get("override", False)),
                )
            elif event["type"] not in ("closed",):
                raise InquestError(f"unknown event type {event['type']!r}")
        return state

    # -- networks ---------------------------------------------------------------

    def register_network(self, payload: dict) -> dict:
        """Register (or replace) a network from its file-format JSON object."""
        spec = network_from_dict(payload)
        return self.register_network_spec(spec)

    def register_network_spec(self, spec: NetworkSpec) -> dict:
        with self._table_lock:
            self._networks[spec.name] = spec
            if self._store:
                path = self._store / "networks" / f"{spec.name}.json"
                path.write_text(json.dumps(network_to_dict(spec), indent=2) + "\n")
        return self._network_summary(spec)

    def list_networks(self) -> list[dict]:
        with self._table_lock:
            return [self._network_summary(s) for _, s in sorted(self._networks.items())]

    def _network_summary(self, spec: NetworkSpec) -> dict:
        return {
            "name": spec.name,
            "nodes": len(spec.nodes),
            "links": len(spec.links),
            "root": spec.root,
            "leaves": list(spec.leaves),
            "targets": list(spec.targets()),
            # full file-format object, so clients can lay the tree out
            "definition": network_to_dict(spec),
        }

    def _require_network(self, name: str) -> NetworkSpec:
        spec = self._networks.get(name)
        if spec is None:
            raise UnknownResourceError(f"unknown network {name!r}")
        return spec

    def _require_session(self, session_id: str) -> _LiveSession:
        live = self._sessions.get(session_id)
        if live is None:
            raise UnknownResourceError(f"unknown session {session_id!r}")
        return live

    # -- sessions ---------------------------------------------------------------

    def create_session(self, network: str, strategy: dict | StrategySpec) -> dict:
        spec = self._require_network(network)
        if isinstance(strategy, StrategySpec):
            strategy_spec = strategy
        else:
            strategy_spec = StrategySpec.from_dict(strategy)
        state = create_session(spec, strategy_spec)
        live = _LiveSession(
            session_id=secrets.token_urlsafe(16),
            network=network,
            created_at=_now(),
            state=state,
        )
        with self._table_lock:
            self._sessions[live.session_id] = live
        self._append_event(
            live,
            {
                "type": "created",
                "session_id": live.session_id,
                "network": network,
                "strategy": state.strategy.to_dict(),
                "created_at": live.created_at,
            },
        )
        return self._view(live)

    def get_state(self, session_id: str) -> dict:
        live = self._require_session(session_id)
        with live.lock:
            return self._view(live)

    def suggest(self, session_id: str, exclude: set[str] | None = None) -> str | None:
        """Next suggestion, optionally pretending some leaves are unavailable."""
        live = self._require_session(session_id)
        with live.lock:
            if live.state.terminated:
                return None
            return select_next(live.state, frozenset(exclude or ()))

    def observe(
        self, session_id: str, node: str, value: float, override: bool = False
    ) -> dict:
        live = self._require_session(session_id)
        ev = evidence_value_from_number(value)
        with live.lock:
            live.state = _apply_observation(live.state, node, ev, override)
            self._append_event(
                live,
                {
                    "type": "observed",
                    "node": node,
                    "value": evidence_value_to_number(ev),
                    "override": override,
                },
            )
            return self._view(live)

    def whatif(self, session_id: str, node: str) -> dict:
        """Both hypothetical posteriors for an unobserved leaf; no mutation."""
        live = self._require_session(session_id)
        with live.lock:
            state = live.state
            if state.terminated:
                raise SessionError("session closed: the goal criterion has been reached")
            spec = state.spec
            if node not in spec.node_map:
                raise UnknownResourceError(f"unknown node {node!r}")
            if not spec.is_leaf(node):
                raise EvidenceError(f"what-if preview needs a leaf, got {node}")
            if node in state.belief.evidence:
                raise SessionError(f"node {node} is already observed")
            branches = {}
            for label, value in (("if_true", 1), ("if_false", 0)):
                probe = dict(state.belief.evidence)
                probe[node] = evidence_value_from_number(value)
                posterior = propagate_beliefs(spec, probe).posterior
                branches[label] = {n.id: posterior[n.id] for n in spec.nodes}
            return {
                "session_id": session_id,
                "node": node,
                "ev_score": leaf_score(state, node),
                **branches,
            }

    def close_session(self, session_id: str) -> dict:
        live = self._require_session(session_id)
        with live.lock:
            self._append_event(live, {"type": "closed"})
            record = {
                "session_id": live.session_id,
                "network": live.network,
                "created_at": live.created_at,
                "strategy": live.state.strategy.to_dict(),
                "events": list(live.events),
                "final": self._view(live),
            }
        with self._table_lock:
            self._sessions.pop(session_id, None)
        return record

    # -- views ------------------------------------------------------------------

    def _view(self, live: _LiveSession) -> dict:
        state = live.state
        spec = state.spec
        suggestion = select_next(state) if state.active else None
        return {
            "session_id": live.session_id,
            "network": live.network,
            "created_at": live.created_at,
            "status": "active" if state.active else "terminated",
            "strategy": state.strategy.to_dict(),
            "posteriors": {n.id: state.belief.posterior[n.id] for n in spec.nodes},
            "evidence": {
                node: evidence_value_to_number(v)
                for node, v in state.belief.evidence.items()
            },
            "suggestion": suggestion,
            "focus": list(state.focus_stack),
            "query_log": [
                {"node": r.node, "value": evidence_value_to_number(r.value), "cost": r.cost}
                for r in state.query_log
            ],
            "query_count": state.query_count,
            "total_cost": state.total_cost,
            "decisions": (
                None
                if state.decisions is None
                else {node: d.value for node, d in state.decisions.items()}
            ),
        }


# -- HTTP layer ----------------------------------------------------------------


def create_app(service: SessionService):
    """FastAPI application exposing the service; errors come back as
    ``{"code", "message"}`` with a matching HTTP status."""
    from fastapi import FastAPI, Request
    from fastapi.responses import JSONResponse
    from pydantic import BaseModel

    app = FastAPI(title="inquest session service")

    class CreateSessionBody(BaseModel):
        network: str
        strategy: dict

    class ObserveBody(BaseModel):
        node: str
        value: float
        override: bool = False

    def _error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.exception_handler(InquestError)
    async def _domain_error(request: Request, exc: InquestError):
        if isinstance(exc, UnknownResourceError):
            return _error(404, "not_found", str(exc))
        if isinstance(exc, SessionError):
            return _error(409, "conflict", str(exc))
        return _error(400, "validation", str(exc))

    @app.post("/networks", status_code=201)
    def register_network(body: dict):
        return service.register_network(body)

    @app.get("/networks")
    def list_networks():
        return {"networks": service.list_networks()}

    @app.post("/sessions", status_code=201)
    def create_session_endpoint(body: CreateSessionBody):
        return service.create_session(body.network, body.strategy)

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return service.get_state(session_id)

    @app.post("/sessions/{session_id}/observe")
    def observe(session_id: str, body: ObserveBody):
        return service.observe(session_id, body.node, body.value, body.override)

    @app.get("/sessions/{session_id}/whatif")
    def whatif(session_id: str, node: str):
        return service.whatif(session_id, node)

    @app.post("/sessions/{session_id}/close")
    def close_session(session_id: str):
        return service.close_session(session_id)

    return app
