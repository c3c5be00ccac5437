"""FastAPI application hosting the wire protocol.

The protocol rides a WebSocket at ``/ws``: each text frame is one JSON
envelope. A per-connection writer task drains a FIFO so event delivery
preserves the runtime's mutation order; replies to different clients may
interleave, but each connection sees a consistent sequence.

In ticked mode (the ``serve`` command) a background task advances the
simulation with a fixed dt on a wall-clock cadence whenever a program or
manual move is active, which keeps live subscribers animated without
making the simulated timeline depend on wall time.
"""
from __future__ import annotations

import asyncio
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .hub import Subscription
from .runtime import Runtime


class WsConnection:
    """FIFO between the runtime (producer) and one websocket writer task."""

    def __init__(self) -> None:
        self._queue: asyncio.Queue[tuple[str, Optional[Subscription]]] = asyncio.Queue()

    def enqueue(self, text: str, subscription: Optional[Subscription]) -> None:
        self._queue.put_nowait((text, subscription))

    async def drain(self, websocket: WebSocket) -> None:
        while True:
            text, subscription = await self._queue.get()
            await websocket.send_text(text)
            if subscription is not None:
                subscription.pending -= 1


def create_app(runtime: Runtime, *, ticked: bool = False, tick_interval: float = 0.02) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        ticker: Optional[asyncio.Task] = None
        if ticked:
            ticker = asyncio.create_task(_tick_loop(runtime, tick_interval))
        try:
            yield
        finally:
            if ticker is not None:
                ticker.cancel()

    app = FastAPI(title="speared", lifespan=lifespan)
    app.state.runtime = runtime

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "idle": runtime.sim.idle}

    @app.websocket("/ws")
    async def websocket_endpoint(websocket: WebSocket) -> None:
        await websocket.accept()
        connection = WsConnection()
        writer = asyncio.create_task(connection.drain(websocket))
        try:
            while True:
                text = await websocket.receive_text()
                runtime.handle_frame(text, connection)
        except WebSocketDisconnect:
            pass
        finally:
            runtime.hub.drop_sink(connection)
            writer.cancel()

    return app


async def _tick_loop(runtime: Runtime, interval: float) -> None:
    while True:
        await asyncio.sleep(interval)
        runtime.tick(interval)
