"""Live session transport: one presenter feeds frames, any number of
consumers receive hello, snapshots, diffs, and debug action/command events.

Every message is one JSON object. The first message on any connection is the
server's hello carrying the schema version and story id, followed by a full
state snapshot. Frame records arriving on the socket are the same records
that live in ``*.frames.jsonl`` files, wrapped as ``{"type": "frame",
"frame": {...}}``. The first connection to send a frame becomes the session's
single producer; frames from anyone else are a protocol error.
"""
from __future__ import annotations

import asyncio
import json
import logging
from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .command_sets import CommandSet
from .commands import command_to_dict
from .errors import NetboardError, ParseError, RangeError, TimestampError
from .events import event_to_dict
from .frames import parse_frame, serialize_frame
from .pipeline import PresenterPipeline
from .recognizer import RecognizerConfig
from .story import StoryDocument, validate_story
from .vizstate import state_to_dict

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class SessionHub:
    """Owns the pipeline and fans out messages to connected consumers."""

    def __init__(
        self,
        story: StoryDocument,
        command_set: CommandSet,
        recognizer_config: RecognizerConfig | None = None,
        log_dir: str | None = None,
    ):
        report = validate_story(story)
        if not report.ok():
            raise NetboardError(f"story failed validation: {report}")
        self.story = story
        self.pipeline = PresenterPipeline(story, command_set, recognizer_config)
        self.lock = asyncio.Lock()
        self.consumers: dict[int, WebSocket] = {}
        self.next_id = 0
        self.producer_id: int | None = None
        self.log_path: Path | None = None
        self.frames_log_path: Path | None = None
        self._log_fh = None
        self._frames_fh = None
        if log_dir:
            base = Path(log_dir)
            base.mkdir(parents=True, exist_ok=True)
            self.log_path = base / "session.log.jsonl"
            self.frames_log_path = base / "session.frames.jsonl"
            self._log_fh = self.log_path.open("a", encoding="utf-8")
            self._frames_fh = self.frames_log_path.open("a", encoding="utf-8")

    def hello_message(self) -> dict:
        return {
            "type": "hello",
            "schema_version": SCHEMA_VERSION,
            "story_id": self.story.story_id,
        }

    def snapshot_message(self) -> dict:
        return {"type": "state", "mode": "snapshot", "data": state_to_dict(self.pipeline.state)}

    def _log(self, record: dict) -> None:
        if self._log_fh is not None:
            self._log_fh.write(json.dumps(record, sort_keys=True) + "\n")

    async def register(self, ws: WebSocket) -> int:
        await ws.accept()
        conn_id = self.next_id
        self.next_id += 1
        self.consumers[conn_id] = ws
        await ws.send_json(self.hello_message())
        await ws.send_json(self.snapshot_message())
        return conn_id

    def unregister(self, conn_id: int) -> None:
        self.consumers.pop(conn_id, None)
        if self.producer_id == conn_id:
            self.producer_id = None

    async def broadcast(self, message: dict) -> None:
        dead = []
        for conn_id, ws in list(self.consumers.items()):
            try:
                await ws.send_json(message)
            except Exception:
                dead.append(conn_id)
        for conn_id in dead:
            self.unregister(conn_id)

    async def handle_message(self, conn_id: int, raw: str) -> None:
        try:
            message = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"malformed session message: {exc.msg}") from exc
        if not isinstance(message, dict) or "type" not in message:
            raise ParseError("session message must be an object with a type")
        kind = message["type"]
        if kind == "frame":
            await self._handle_frame(conn_id, message)
        elif kind == "snapshot_request":
            await self.consumers[conn_id].send_json(self.snapshot_message())
        elif kind == "hello":
            pass  # clients may announce themselves; nothing to do
        else:
            raise ParseError(f"unsupported message type {kind!r}")

    async def _handle_frame(self, conn_id: int, message: dict) -> None:
        if self.producer_id is None:
            self.producer_id = conn_id
        elif self.producer_id != conn_id:
            raise TimestampError("another producer already owns this session")
        frame = parse_frame(json.dumps(message.get("frame", {})))
        async with self.lock:
            step = self.pipeline.feed_frame(frame)
            if self._frames_fh is not None:
                self._frames_fh.write(serialize_frame(frame) + "\n")
            self._log({"type": "frame", "frame": json.loads(serialize_frame(frame))})
            for event in step.events:
                record = {"type": "action", "action": event_to_dict(event)}
                self._log(record)
                await self.broadcast(record)
            for command in step.commands:
                record = {"type": "command", "command": command_to_dict(command)}
                self._log(record)
                await self.broadcast(record)
            for diff in step.diffs:
                record = {"type": "state", "mode": "diff", "data": diff.to_dict()}
                self._log(record)
                await self.broadcast(record)

    async def shutdown(self) -> None:
        async with self.lock:
            step = self.pipeline.finish()
            for diff in step.diffs:
                await self.broadcast({"type": "state", "mode": "diff", "data": diff.to_dict()})
            self.close_logs()

    def close_logs(self) -> None:
        for fh in (self._log_fh, self._frames_fh):
            if fh is not None:
                fh.flush()
                fh.close()
        self._log_fh = self._frames_fh = None


def create_app(hub: SessionHub) -> FastAPI:
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        yield
        await hub.shutdown()

    app = FastAPI(title="netboard session", lifespan=lifespan)
    app.state.hub = hub

    @app.get("/story")
    async def story():
        from .story import story_to_dict

        return story_to_dict(hub.story)

    @app.get("/snapshot")
    async def snapshot():
        return state_to_dict(hub.pipeline.state)

    @app.websocket("/session")
    async def session(ws: WebSocket):
        conn_id = await hub.register(ws)
        try:
            while True:
                raw = await ws.receive_text()
                try:
                    await hub.handle_message(conn_id, raw)
                except (ParseError, RangeError, TimestampError) as exc:
                    await ws.send_json(
                        {"type": "error", "code": type(exc).__name__, "detail": str(exc)}
                    )
                    break
        except WebSocketDisconnect:
            pass
        finally:
            hub.unregister(conn_id)
            try:
                await ws.close()
            except Exception:
                pass

    return app
