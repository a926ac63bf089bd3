#!/usr/bin/env python3
"""Run the network service and drive a short operator session over plain
TCP: newline-delimited JSON, one message per line. The WebSocket binding
speaks exactly the same protocol (the browser console uses it)."""
import asyncio
import json
import tempfile

from wristlab import Controller, ControllerConfig
from wristlab.server import ControlService
from wristlab.sim import SimConfig


async def session():
    config = ControllerConfig(data_dir=tempfile.mkdtemp(prefix="wristlab_"))
    controller = Controller(config, sim_config=SimConfig(tick_hz=config.tick_hz))
    service = ControlService(controller, real_time=True)
    await service.start(host="127.0.0.1", tcp_port=0, ws_port=0)
    print(f"service up: tcp={service.tcp_port} ws={service.ws_port}")

    reader, writer = await asyncio.open_connection("127.0.0.1", service.tcp_port)

    async def send(cmd):
        writer.write(json.dumps(cmd).encode() + b"\n")
        await writer.drain()

    await send({"cmd": "connect", "id": 1})
    await send({"cmd": "jog", "dp": 30.0, "cr": 8.0, "id": 2})

    frames = 0
    while frames < 12:
        line = await reader.readline()
        msg = json.loads(line)
        if "ok" in msg:
            print("reply    :", msg)
        elif msg["ev"] == "state":
            print("state    :", msg["from"], "->", msg["to"])
        else:
            frames += 1
            if frames % 4 == 0:
                print(f"telemetry: t={msg['t_ms']:7.0f} ms {msg['state']:5} "
                      f"dp={msg['dp']:6.2f} cr={msg['cr']:6.2f} "
                      f"target=({msg['target_dp']:.2f}, {msg['target_cr']:.2f})")

    await send({"cmd": "estop", "id": 3})
    line = await reader.readline()
    print("after e-stop:", json.loads(line))

    writer.close()
    await service.stop()
    print("service stopped")


asyncio.run(session())
