"""Line-delimited JSON over TCP between a simulator and a learning agent.

The server owns one environment per connection. After the server greets with
``hello`` and ``spec``, the client sends requests and the server answers each
one exactly once::

    -> {"type": "reset", "seed": 7}
    <- {"type": "obs", "obs": [p_x, p_y, p_z, v_x, v_y, v_z]}
    -> {"type": "step", "action": [a_x, a_y]}
    <- {"type": "transition", "obs": [...], "reward": r, "done": false,
        "termination": "Running", "zone": "None"}
    -> {"type": "close"}
    <- {"type": "close"}

Floats are written with ``repr`` precision so values survive the round trip
bit-for-bit.
"""
from __future__ import annotations

import json
import logging
import math
import socket
import socketserver
import threading

from uavland.env import (
    ACTION_DIM, STATE_DIM, ActionCmd, LandingEnv, LifecycleError, StepOutcome, Termination,
    VehicleState, Zone, observe,
)

log = logging.getLogger(__name__)

PROTOCOL_VERSION = "1"
DEFAULT_PORT = 7460


class ProtocolError(RuntimeError):
    """The peer sent something that violates the protocol."""


class RemoteError(RuntimeError):
    """The server answered a request with an ``error`` message."""


def parse_address(address, default_host="127.0.0.1"):
    if isinstance(address, (tuple, list)):
        return str(address[0]), int(address[1])
    host, sep, port = str(address).rpartition(":")
    if not sep:
        return default_host, int(port)
    return host or default_host, int(port)


def encode(msg: dict) -> bytes:
    return (json.dumps(msg, allow_nan=False, separators=(",", ":")) + "\n").encode("utf-8")


def decode(line: bytes) -> dict:
    try:
        msg = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProtocolError(f"not a JSON line: {line[:80]!r}") from exc
    if not isinstance(msg, dict) or not isinstance(msg.get("type"), str):
        raise ProtocolError(f"message without a type: {line[:80]!r}")
    return msg


def _floats(values, n, what):
    if not isinstance(values, list) or len(values) != n:
        raise ProtocolError(f"{what} must be a list of {n} numbers")
    out = []
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ProtocolError(f"{what} holds a non-finite or non-numeric entry")
        out.append(float(v))
    return out


def spec_message(env) -> dict:
    a_max = getattr(getattr(env, "config", None), "a_max", 1.0)
    return {"type": "spec", "state_dim": STATE_DIM, "action_dim": ACTION_DIM,
            "action_low": [-a_max] * ACTION_DIM, "action_high": [a_max] * ACTION_DIM}


class _Handler(socketserver.StreamRequestHandler):
    def _send(self, msg):
        self.wfile.write(encode(msg))
        self.wfile.flush()

    def handle(self):
        env = self.server.env_factory()
        self._send({"type": "hello", "version": PROTOCOL_VERSION})
        self._send(spec_message(env))
        while True:
            line = self.rfile.readline()
            if not line:
                return
            try:
                msg = decode(line)
                kind = msg["type"]
                if kind == "reset":
                    seed = msg.get("seed")
                    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
                        raise ProtocolError("seed must be an integer or null")
                    state = env.reset(seed=seed)
                    self._send({"type": "obs", "obs": list(observe(state))})
                elif kind == "step":
                    action = _floats(msg.get("action"), ACTION_DIM, "action")
                    try:
                        out = env.step(action)
                    except LifecycleError as exc:
                        self._send({"type": "error", "message": str(exc)})
                        continue
                    self._send({"type": "transition", "obs": list(observe(out.next_state)),
                                "reward": out.reward, "done": out.done,
                                "termination": out.termination.value, "zone": out.zone.value})
                elif kind == "close":
                    self._send({"type": "close"})
                    return
                else:
                    raise ProtocolError(f"unexpected message type {kind!r}")
            except ProtocolError as exc:
                log.info("closing %s: %s", self.client_address, exc)
                self._send({"type": "error", "message": str(exc)})
                return


class BridgeServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, env_factory=LandingEnv):
        self.env_factory = env_factory
        super().__init__(parse_address(address), _Handler)


def serve(env_factory=LandingEnv, address=("127.0.0.1", DEFAULT_PORT)):
    """Serve environments until interrupted; one fresh environment per connection."""
    with BridgeServer(address, env_factory) as server:
        log.info("bridge listening on %s:%d", *server.server_address)
        server.serve_forever()


def start_server(env_factory=LandingEnv, address=("127.0.0.1", 0)) -> BridgeServer:
    """Run a server on a background thread (port 0 picks a free port)."""
    server = BridgeServer(address, env_factory)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    return server


class RemoteEnv:
    """Client-side environment with the same reset/step/observe surface as ``LandingEnv``."""

    state_dim = STATE_DIM
    action_dim = ACTION_DIM

    def __init__(self, address, timeout=30.0):
        self._sock = socket.create_connection(parse_address(address), timeout=timeout)
        self._file = self._sock.makefile("rwb")
        try:
            hello = self._recv()
            if hello["type"] != "hello":
                raise ProtocolError(f"expected hello, got {hello['type']!r}")
            if hello.get("version") != PROTOCOL_VERSION:
                raise ProtocolError(
                    f"server speaks protocol {hello.get('version')!r}, client supports {PROTOCOL_VERSION!r}")
            spec = self._recv()
            if spec["type"] != "spec" or (spec.get("state_dim"), spec.get("action_dim")) != (STATE_DIM, ACTION_DIM):
                raise ProtocolError(f"unsupported environment spec {spec}")
        except BaseException:
            self.close()
            raise
        self.spec = spec
        self.state: VehicleState | None = None
        self.done = True

    def _recv(self) -> dict:
        line = self._file.readline()
        if not line:
            raise ConnectionError("bridge server closed the connection")
        msg = decode(line)
        if msg["type"] == "error":
            raise RemoteError(msg.get("message", ""))
        return msg

    def _request(self, msg, expect) -> dict:
        self._file.write(encode(msg))
        self._file.flush()
        reply = self._recv()
        if reply["type"] != expect:
            raise ProtocolError(f"expected {expect!r}, got {reply['type']!r}")
        return reply

    def reset(self, seed=None) -> VehicleState:
        reply = self._request({"type": "reset", "seed": None if seed is None else int(seed)}, "obs")
        self.state = VehicleState.from_vector(_floats(reply["obs"], STATE_DIM, "obs"))
        self.done = False
        return self.state

    def step(self, action) -> StepOutcome:
        if self.done:
            raise LifecycleError("step() called on a finished episode; call reset() first")
        if isinstance(action, ActionCmd):
            action = action.as_tuple()
        action = [float(a) for a in action]
        reply = self._request({"type": "step", "action": action}, "transition")
        self.state = VehicleState.from_vector(_floats(reply["obs"], STATE_DIM, "obs"))
        self.done = bool(reply["done"])
        return StepOutcome(self.state, float(reply["reward"]), self.done,
                           Termination(reply["termination"]), Zone(reply["zone"]))

    def observe(self):
        if self.state is None:
            raise LifecycleError("no state before the first reset()")
        return observe(self.state)

    def close(self):
        if self._sock is None:
            return
        try:
            self._sock.settimeout(1.0)
            self._file.write(encode({"type": "close"}))
            self._file.flush()
            self._file.readline()
        except OSError:
            pass
        finally:
            self._file.close()
            self._sock.close()
            self._sock = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def remote_env(address, timeout=30.0) -> RemoteEnv:
    return RemoteEnv(address, timeout)
