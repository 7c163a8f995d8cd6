"""Interactive session server.

The wire protocol is JSON messages with envelope {type, session_id, seq,
payload} over a WebSocket (proto 1, default port 8089).  SessionHub.handle
is a pure message-in, messages-out dispatcher so the protocol is testable
without sockets; the FastAPI app pumps it and handles pacing.

Passivity is observable on the wire: actuator commands in the telemetry are
a function of the setpoint schedule alone, never of contact.
"""

from __future__ import annotations

import asyncio
import dataclasses
import itertools
import json
import logging

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import data as bundled
from .errors import PantosimError
from .linkage import LinkageGeometry, load_geometry
from .session import (
    DEFAULT_DT,
    HandSample,
    Scene,
    StepRecord,
    load_scene,
    record_to_dict,
    scene_from_dict,
    set_plane_setpoint,
    step,
)
from .linkage import geometry_from_dict

log = logging.getLogger("pantosim.service")

PROTO_VERSION = 1
DEFAULT_PORT = 8089


@dataclasses.dataclass
class _Session:
    scene: Scene
    geom: LinkageGeometry
    t: float = 0.0
    telemetry_seq: int = 0
    client_seq: int = -1
    prev_constraint: np.ndarray | None = None
    target: np.ndarray | None = None
    handle_pitch: float = 0.0
    handle_yaw: float = 0.0

    def home_target(self) -> np.ndarray:
        """Mid-shell rest pose used before any set_target arrives."""
        g = self.geom
        r = 0.5 * (g.r_min + g.r_max)
        el = 0.5 * (g.elevation_min + g.elevation_max)
        return self.geom.base_position + np.array(
            [r * np.cos(el), 0.0, r * np.sin(el)]
        )


class SessionHub:
    """Owns sessions and implements the message protocol."""

    def __init__(self, default_scene: Scene | None = None, default_geometry=None):
        if default_scene is None or default_geometry is None:
            scene_path, geom_path = bundled.study_bundle("093")
            default_geometry = load_geometry(geom_path)
            default_scene = load_scene(scene_path, default_geometry)
        self._default_scene = default_scene
        self._default_geom = default_geometry
        self._sessions: dict[str, _Session] = {}
        self._ids = itertools.count(1)

    # -- helpers ----------------------------------------------------------

    def _error(self, code: str, detail: str, session_id=None, seq: int = 0) -> dict:
        return {
            "type": "error",
            "session_id": session_id,
            "seq": seq,
            "payload": {"code": code, "detail": detail},
        }

    def _telemetry(self, sid: str, sess: _Session, record: StepRecord) -> dict:
        msg = {
            "type": "telemetry",
            "session_id": sid,
            "seq": sess.telemetry_seq,
            "payload": record_to_dict(record, sess.geom),
        }
        sess.telemetry_seq += 1
        return msg

    def _step_session(self, sid: str, sess: _Session, dt: float) -> StepRecord:
        target = sess.target if sess.target is not None else sess.home_target()
        sample = HandSample(
            t=sess.t,
            target=target,
            handle_pitch=sess.handle_pitch,
            handle_yaw=sess.handle_yaw,
        )
        scene, record = step(
            sess.scene, sess.geom, sample, dt, prev_constraint=sess.prev_constraint
        )
        sess.scene = scene
        sess.prev_constraint = record.constraint_node
        sess.t += dt
        return record

    # -- protocol ---------------------------------------------------------

    def handle(self, msg) -> list[dict]:
        """Dispatch one inbound message; returns the outbound messages."""
        if not isinstance(msg, dict) or "type" not in msg:
            return [self._error("bad_request", "message must be an object with a type")]
        mtype = msg["type"]
        seq = msg.get("seq", 0)
        payload = msg.get("payload") or {}
        if not isinstance(payload, dict):
            return [self._error("bad_request", "payload must be an object", seq=seq)]

        if mtype == "hello":
            return [
                {
                    "type": "hello",
                    "session_id": None,
                    "seq": seq,
                    "payload": {"proto": PROTO_VERSION, "server": "pantosim"},
                }
            ]

        if mtype == "create_session":
            try:
                if "bundle" in payload:
                    scene_path, geom_path = bundled.study_bundle(payload["bundle"])
                    geom = load_geometry(geom_path)
                    scene = load_scene(scene_path, geom)
                elif "scene" in payload or "geometry" in payload:
                    if "scene" not in payload or "geometry" not in payload:
                        return [
                            self._error(
                                "bad_request",
                                "create_session needs both scene and geometry",
                                seq=seq,
                            )
                        ]
                    geom = geometry_from_dict(payload["geometry"])
                    scene = scene_from_dict(payload["scene"], geom)
                else:
                    geom = self._default_geom
                    scene = self._default_scene
            except (PantosimError, ValueError) as exc:
                return [self._error("bad_request", str(exc), seq=seq)]
            sid = f"s{next(self._ids)}"
            sess = _Session(scene=scene, geom=geom)
            self._sessions[sid] = sess
            record = self._step_session(sid, sess, DEFAULT_DT)
            log.info("created session %s", sid)
            return [self._telemetry(sid, sess, record)]

        sid = msg.get("session_id")
        sess = self._sessions.get(sid)
        if sess is None:
            return [self._error("no_session", f"unknown session {sid!r}", sid, seq)]
        if not isinstance(seq, int) or seq <= sess.client_seq:
            return [
                self._error(
                    "bad_request",
                    f"seq must increase (last {sess.client_seq}, got {seq!r})",
                    sid,
                    seq if isinstance(seq, int) else 0,
                )
            ]
        sess.client_seq = seq

        if mtype == "set_target":
            try:
                target = np.asarray(payload["target_m"], dtype=float)
                if target.shape != (3,):
                    raise ValueError("target_m must be a 3-vector")
            except (KeyError, ValueError, TypeError) as exc:
                return [self._error("bad_request", f"bad set_target: {exc}", sid, seq)]
            # last writer wins between steps
            sess.target = target
            sess.handle_pitch = float(payload.get("pitch_rad", 0.0))
            sess.handle_yaw = float(payload.get("yaw_rad", 0.0))
            return []

        if mtype == "set_plane_setpoint":
            try:
                height = float(payload["height_m"])
                sess.scene = set_plane_setpoint(sess.scene, sess.geom, height)
            except (KeyError, ValueError, TypeError) as exc:
                return [
                    self._error("bad_request", f"bad set_plane_setpoint: {exc}", sid, seq)
                ]
            return []

        if mtype == "step":
            dt = payload.get("dt_s", DEFAULT_DT)
            if not isinstance(dt, (int, float)) or dt <= 0.0:
                return [self._error("bad_request", f"dt_s must be > 0, got {dt!r}", sid, seq)]
            record = self._step_session(sid, sess, float(dt))
            return [self._telemetry(sid, sess, record)]

        if mtype == "run":
            steps = payload.get("steps")
            keep_every = payload.get("keep_every", 1)
            dt = payload.get("dt_s", DEFAULT_DT)
            if not isinstance(steps, int) or steps <= 0:
                return [
                    self._error("bad_request", f"steps must be a positive int, got {steps!r}", sid, seq)
                ]
            if not isinstance(keep_every, int) or keep_every < 1:
                return [
                    self._error("bad_request", "keep_every must be a positive int", sid, seq)
                ]
            if not isinstance(dt, (int, float)) or dt <= 0.0:
                return [self._error("bad_request", f"dt_s must be > 0, got {dt!r}", sid, seq)]
            out = []
            for k in range(steps):
                record = self._step_session(sid, sess, float(dt))
                if k % keep_every == 0 or k == steps - 1:
                    out.append(self._telemetry(sid, sess, record))
            return out

        if mtype == "close":
            del self._sessions[sid]
            log.info("closed session %s", sid)
            return [{"type": "close", "session_id": sid, "seq": seq, "payload": {}}]

        return [self._error("bad_request", f"unknown message type {mtype!r}", sid, seq)]


def create_app(hub: SessionHub | None = None):
    """FastAPI app exposing the hub on /ws; one hub shared per app."""
    if hub is None:
        hub = SessionHub()
    app = FastAPI(title="pantosim session service")
    app.state.hub = hub

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    msg = json.loads(raw)
                except json.JSONDecodeError:
                    await ws.send_text(
                        json.dumps(hub._error("bad_request", "invalid JSON"), sort_keys=True)
                    )
                    continue
                speed = 0.0
                if isinstance(msg, dict) and msg.get("type") == "run":
                    payload = msg.get("payload") or {}
                    if isinstance(payload, dict):
                        speed = float(payload.get("speed", 0.0) or 0.0)
                replies = hub.handle(msg)
                for reply in replies:
                    await ws.send_text(json.dumps(reply, sort_keys=True))
                    if speed > 0.0 and reply.get("type") == "telemetry":
                        await asyncio.sleep(DEFAULT_DT / speed)
        except WebSocketDisconnect:
            pass

    return app
