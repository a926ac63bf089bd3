"""Network bindings for the controller: TCP and WebSocket, both speaking
newline-delimited UTF-8 JSON, one message per line.

Clients send command objects ({"cmd": "connect"}, {"cmd": "jog", ...});
every command gets exactly one {"ok": ...} reply with any client "id"
echoed back. Telemetry and state-change events are pushed unsolicited to
every connected client.

All controller access happens on the event loop, so commands interleave
only at tick boundaries. Telemetry never blocks the loop: each client has
a bounded outbox; when a client stalls, the oldest telemetry frames are
dropped first, while command replies and state events are never dropped.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import itertools
import logging
from collections import deque
from typing import Optional

import websockets

from .controller import Controller

log = logging.getLogger("wristlab.server")

TELEMETRY_BACKLOG_LIMIT = 256


class _Client:
    _ids = itertools.count(1)

    def __init__(self):
        self.id = next(self._ids)
        self.lines: deque[tuple[bool, str]] = deque()  # (is_telemetry, line)
        self.wake = asyncio.Event()
        self._telemetry_count = 0

    def push(self, line: str, telemetry: bool = False) -> None:
        if telemetry:
            if self._telemetry_count >= TELEMETRY_BACKLOG_LIMIT:
                self._drop_oldest_telemetry()
            self._telemetry_count += 1
        self.lines.append((telemetry, line))
        self.wake.set()

    def _drop_oldest_telemetry(self) -> None:
        for i, (is_tel, _) in enumerate(self.lines):
            if is_tel:
                del self.lines[i]
                self._telemetry_count -= 1
                return

    def pop_all(self) -> list[str]:
        out = [line for _, line in self.lines]
        self.lines.clear()
        self._telemetry_count = 0
        self.wake.clear()
        return out


class ControlService:
    """Runs the control loop and fans telemetry out to clients."""

    def __init__(self, controller: Controller, real_time: bool = True):
        self.controller = controller
        self.real_time = real_time
        self.clients: dict[int, _Client] = {}
        self.tcp_port: Optional[int] = None
        self.ws_port: Optional[int] = None
        self._stopping = asyncio.Event()
        self._tcp_server = None
        self._ws_server = None
        self._loop_task = None

    # -- lifecycle ---------------------------------------------------------

    async def start(self, host: str = "127.0.0.1", tcp_port: int = 0, ws_port: int = 0):
        self._tcp_server = await asyncio.start_server(self._serve_tcp, host, tcp_port)
        self.tcp_port = self._tcp_server.sockets[0].getsockname()[1]
        self._ws_server = await websockets.serve(self._serve_ws, host, ws_port)
        self.ws_port = next(iter(self._ws_server.sockets)).getsockname()[1]
        self._loop_task = asyncio.create_task(self._run_loop())
        log.info("listening tcp=%s:%s ws=%s:%s", host, self.tcp_port, host, self.ws_port)

    async def stop(self):
        self._stopping.set()
        if self._loop_task:
            self._loop_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await self._loop_task
        for server in (self._tcp_server, self._ws_server):
            if server is not None:
                server.close()
                await server.wait_closed()

    async def run_forever(self):
        await self._stopping.wait()

    # -- the loop ------------------------------------------------------------

    async def _run_loop(self):
        period = 1.0 / self.controller.config.tick_hz
        loop = asyncio.get_running_loop()
        next_t = loop.time()
        while True:
            self.controller.tick()
            self._broadcast(self.controller.drain_events())
            if self.real_time:
                next_t += period
                await asyncio.sleep(max(0.0, next_t - loop.time()))
            elif self.controller.tick_count % 64 == 0:
                await asyncio.sleep(0)  # keep the loop cooperative

    def _broadcast(self, events: list[dict]) -> None:
        if not events or not self.clients:
            return
        lines = [(ev.get("ev") == "telemetry", json.dumps(ev)) for ev in events]
        for client in self.clients.values():
            for telemetry, line in lines:
                client.push(line, telemetry=telemetry)

    def _handle_line(self, client: _Client, line: str) -> None:
        try:
            cmd = json.loads(line)
        except json.JSONDecodeError as exc:
            client.push(json.dumps({"ok": False, "reason": f"bad json: {exc.msg}"}))
            return
        reply = self.controller.handle_command(cmd)
        self._broadcast(self.controller.drain_events())
        client.push(json.dumps(reply))

    # -- TCP binding ---------------------------------------------------------

    async def _serve_tcp(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        client = _Client()
        self.clients[client.id] = client

        async def pump_out():
            while True:
                await client.wake.wait()
                batch = client.pop_all()
                writer.write("".join(line + "\n" for line in batch).encode("utf-8"))
                await writer.drain()

        out_task = asyncio.create_task(pump_out())
        try:
            while True:
                raw = await reader.readline()
                if not raw:
                    break
                line = raw.decode("utf-8", errors="replace").strip()
                if line:
                    self._handle_line(client, line)
        except ConnectionResetError:
            pass
        finally:
            self.clients.pop(client.id, None)
            out_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await out_task
            writer.close()
            with contextlib.suppress(Exception):
                await writer.wait_closed()

    # -- WebSocket binding -----------------------------------------------------

    async def _serve_ws(self, websocket):
        client = _Client()
        self.clients[client.id] = client

        async def pump_out():
            while True:
                await client.wake.wait()
                for line in client.pop_all():
                    await websocket.send(line)

        out_task = asyncio.create_task(pump_out())
        try:
            async for message in websocket:
                if isinstance(message, bytes):
                    message = message.decode("utf-8", errors="replace")
                message = message.strip()
                if message:
                    self._handle_line(client, message)
        except websockets.ConnectionClosed:
            pass
        finally:
            self.clients.pop(client.id, None)
            out_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await out_task


async def serve(
    controller: Controller,
    host: str = "127.0.0.1",
    tcp_port: int = 8765,
    ws_port: int = 8766,
    real_time: bool = True,
) -> ControlService:
    service = ControlService(controller, real_time=real_time)
    await service.start(host=host, tcp_port=tcp_port, ws_port=ws_port)
    return service
