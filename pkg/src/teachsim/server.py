"""Asyncio session server speaking newline-delimited JSON, with an optional
WebSocket upgrade on the same port.

The server is a thin adapter: each inbound message maps 1:1 onto a protocol
operation and every reply is built from the resulting session state. Sessions
live in memory, are persisted after every completed episode, and can be
re-attached from a new connection with Resume. Group assignment happens here
(alternating per started session) and is never sent to the client.
"""

from __future__ import annotations

import asyncio
import base64
import hashlib
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import messages
from .errors import InvalidInputError, ProtocolOrderError, TeachSimError
from .persistence import ExperimentConfig, save_session, session_log
from .protocol import (
    SessionConfig,
    SessionState,
    acknowledge_replay,
    begin_session,
    submit_demonstration,
)

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
_MAX_WS_PAYLOAD = 1 << 20


@dataclass
class _Runtime:
    state: SessionState
    lock: asyncio.Lock = field(default_factory=asyncio.Lock)


class SessionHub:
    """All live sessions plus the policy knobs shared between connections."""

    def __init__(self, config: ExperimentConfig | None = None,
                 log_dir: str | Path | None = None):
        self.config = config or ExperimentConfig()
        self.log_dir = Path(log_dir) if log_dir is not None else None
        self.sessions: dict[str, _Runtime] = {}
        self._groups = itertools.cycle(("Target", "Control"))
        self._seed_rng = np.random.default_rng(self.config.master_seed)
        self._counter = itertools.count()

    def start_session(self, embodiment: str, seed: int | None) -> tuple[str, _Runtime]:
        if seed is None:
            seed = int(self._seed_rng.integers(0, 2**31 - 1))
        cfg = SessionConfig(group=next(self._groups), embodiment=embodiment,
                            seed=seed, lam=self.config.lam,
                            kappa_max=self.config.kappa_max)
        session_id = f"session-{next(self._counter):04d}-{seed}"
        runtime = _Runtime(state=begin_session(cfg))
        self.sessions[session_id] = runtime
        return session_id, runtime

    def persist(self, session_id: str) -> None:
        if self.log_dir is None:
            return
        self.log_dir.mkdir(parents=True, exist_ok=True)
        runtime = self.sessions[session_id]
        save_session(session_log(runtime.state, session_id),
                     self.log_dir / f"{session_id}.json")

    async def handle(self, doc, bound_id: str | None) -> tuple[list[dict], str | None]:
        """Apply one client message; returns (replies, new bound session id)."""
        try:
            mtype, msg_sid, payload = messages.parse_client_message(doc)
        except InvalidInputError as exc:
            return [messages.error(bound_id, "invalid-input", str(exc))], bound_id

        if mtype == "StartSession":
            session_id, runtime = self.start_session(
                payload.get("embodiment", "SimArm"), payload.get("seed"))
            async with runtime.lock:
                return [messages.session_started(session_id, runtime.state),
                        messages.query_state(session_id, runtime.state)], session_id

        if mtype == "Resume":
            session_id = payload.get("session_id", msg_sid)
            runtime = self.sessions.get(session_id)
            if runtime is None:
                return [messages.error(session_id, "unknown-session",
                                       f"no session {session_id!r}")], bound_id
            async with runtime.lock:
                return ([messages.session_started(session_id, runtime.state)]
                        + self._pending_view(session_id, runtime.state)), session_id

        session_id = msg_sid or bound_id
        runtime = self.sessions.get(session_id) if session_id else None
        if runtime is None:
            return [messages.error(session_id, "unknown-session",
                                   "no active session; StartSession or Resume "
                                   "first")], bound_id

        async with runtime.lock:
            try:
                if mtype == "SubmitAction":
                    replies = self._submit(session_id, runtime,
                                           np.asarray(payload["u"], dtype=float))
                else:  # AcknowledgeReplay
                    replies = self._acknowledge(session_id, runtime)
            except (ProtocolOrderError, InvalidInputError) as exc:
                code = ("protocol-order" if isinstance(exc, ProtocolOrderError)
                        else "invalid-input")
                replies = [messages.error(session_id, code, str(exc))]
            except TeachSimError as exc:
                replies = [messages.error(session_id, "internal", str(exc))]
        return replies, session_id

    def _submit(self, session_id: str, runtime: _Runtime, u) -> list[dict]:
        state, frame = submit_demonstration(runtime.state, u)
        replies = []
        if frame is not None:
            replies.append(messages.guidance(session_id, frame))
        if state.status == "ShowingReplay":
            replies.append(messages.replay(session_id, state))
            self.persist(session_id)
        else:
            replies.append(messages.query_state(session_id, state))
        return replies

    def _acknowledge(self, session_id: str, runtime: _Runtime) -> list[dict]:
        phase_before = runtime.state.phase
        state = acknowledge_replay(runtime.state)
        replies = []
        if state.status == "Finished":
            replies.append(messages.session_finished(session_id, state))
            self.persist(session_id)
            return replies
        if state.phase != phase_before:
            replies.append(messages.phase_changed(session_id, state))
        replies.append(messages.query_state(session_id, state))
        return replies

    def _pending_view(self, session_id: str, state: SessionState) -> list[dict]:
        if state.status in ("AwaitingAction", "ShowingGuidance"):
            return [messages.query_state(session_id, state)]
        if state.status == "ShowingReplay":
            return [messages.replay(session_id, state)]
        return [messages.session_finished(session_id, state)]


# -- Transports ---------------------------------------------------------------

class _NdjsonTransport:
    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter,
                 first_chunk: bytes):
        self._reader = reader
        self._writer = writer
        self._buffer = bytearray(first_chunk)

    async def recv(self) -> str | None:
        while b"\n" not in self._buffer:
            chunk = await self._reader.read(4096)
            if not chunk:
                return None
            self._buffer.extend(chunk)
        line, _, rest = bytes(self._buffer).partition(b"\n")
        self._buffer = bytearray(rest)
        return line.decode("utf-8", errors="replace")

    async def send(self, text: str) -> None:
        self._writer.write(text.encode() + b"\n")
        await self._writer.drain()


class _WebSocketTransport:
    """Minimal RFC 6455 server endpoint: text, ping/pong, and close frames."""

    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        self._reader = reader
        self._writer = writer

    @staticmethod
    def accept_key(client_key: str) -> str:
        digest = hashlib.sha1((client_key + _WS_GUID).encode()).digest()
        return base64.b64encode(digest).decode()

    async def handshake(self, first_chunk: bytes) -> bool:
        data = bytearray(first_chunk)
        while b"\r\n\r\n" not in data:
            chunk = await self._reader.read(4096)
            if not chunk:
                return False
            data.extend(chunk)
            if len(data) > 65536:
                return False
        head, _, _ = bytes(data).partition(b"\r\n\r\n")
        headers = {}
        for line in head.decode("latin-1").split("\r\n")[1:]:
            name, _, value = line.partition(":")
            headers[name.strip().lower()] = value.strip()
        key = headers.get("sec-websocket-key")
        if headers.get("upgrade", "").lower() != "websocket" or not key:
            self._writer.write(b"HTTP/1.1 400 Bad Request\r\n\r\n")
            await self._writer.drain()
            return False
        response = ("HTTP/1.1 101 Switching Protocols\r\n"
                    "Upgrade: websocket\r\n"
                    "Connection: Upgrade\r\n"
                    f"Sec-WebSocket-Accept: {self.accept_key(key)}\r\n\r\n")
        self._writer.write(response.encode())
        await self._writer.drain()
        return True

    async def recv(self) -> str | None:
        while True:
            try:
                header = await self._reader.readexactly(2)
            except asyncio.IncompleteReadError:
                return None
            opcode = header[0] & 0x0F
            masked = header[1] & 0x80
            length = header[1] & 0x7F
            if length == 126:
                length = int.from_bytes(await self._reader.readexactly(2), "big")
            elif length == 127:
                length = int.from_bytes(await self._reader.readexactly(8), "big")
            if length > _MAX_WS_PAYLOAD:
                await self._close(1009)
                return None
            mask = await self._reader.readexactly(4) if masked else b"\x00" * 4
            payload = bytearray(await self._reader.readexactly(length))
            if masked:
                for i in range(length):
                    payload[i] ^= mask[i % 4]
            if opcode == 0x1:  # text
                return payload.decode("utf-8", errors="replace")
            if opcode == 0x8:  # close
                await self._close(1000)
                return None
            if opcode == 0x9:  # ping -> pong
                await self._send_frame(0xA, bytes(payload))
                continue
            if opcode == 0xA:  # pong
                continue
            await self._close(1003)  # binary/continuation unsupported
            return None

    async def send(self, text: str) -> None:
        await self._send_frame(0x1, text.encode())

    async def _send_frame(self, opcode: int, payload: bytes) -> None:
        header = bytearray([0x80 | opcode])
        n = len(payload)
        if n < 126:
            header.append(n)
        elif n < (1 << 16):
            header.append(126)
            header.extend(n.to_bytes(2, "big"))
        else:
            header.append(127)
            header.extend(n.to_bytes(8, "big"))
        self._writer.write(bytes(header) + payload)
        await self._writer.drain()

    async def _close(self, code: int) -> None:
        try:
            await self._send_frame(0x8, code.to_bytes(2, "big"))
        except (ConnectionError, RuntimeError):
            pass


# -- Server entry points --------------------------------------------------------

async def _handle_connection(hub: SessionHub, reader: asyncio.StreamReader,
                             writer: asyncio.StreamWriter) -> None:
    try:
        first = await reader.read(4)
        if not first:
            return
        if first == b"GET ":
            ws = _WebSocketTransport(reader, writer)
            if not await ws.handshake(first):
                return
            transport = ws
        else:
            transport = _NdjsonTransport(reader, writer, first)

        bound_id: str | None = None
        while True:
            raw = await transport.recv()
            if raw is None:
                return
            if not raw.strip():
                continue
            try:
                doc = json.loads(raw)
            except json.JSONDecodeError as exc:
                await transport.send(json.dumps(messages.error(
                    bound_id, "malformed", f"bad JSON: {exc}")))
                continue
            replies, bound_id = await hub.handle(doc, bound_id)
            for reply in replies:
                await transport.send(json.dumps(reply))
    except (ConnectionError, asyncio.IncompleteReadError):
        pass
    finally:
        writer.close()
        try:
            await writer.wait_closed()
        except (ConnectionError, OSError):
            pass


async def serve(host: str, port: int, config: ExperimentConfig | None = None,
                log_dir: str | Path | None = None) -> tuple[asyncio.AbstractServer, SessionHub]:
    """Bind the session server; the caller drives serve_forever/close."""
    hub = SessionHub(config=config, log_dir=log_dir)

    async def _client(reader, writer):
        await _handle_connection(hub, reader, writer)

    server = await asyncio.start_server(_client, host, port)
    return server, hub
