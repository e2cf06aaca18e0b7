"""FastAPI service exposing one live conductor session.

Clients (the rehearsal UI, external keypoint producers, test harnesses)
talk JSON over a WebSocket at /ws. A hand raised by a UI click and one
seen by the pose detector become the same request signal on the bus;
the conductor cannot tell them apart.

Simulated agents can cover any subset of seats, so one human at a desk
can rehearse with two bots.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
from typing import Literal

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from pydantic import BaseModel, ValidationError

from . import fsm
from .ensemble import AgentConfig, Ensemble
from .errors import IllegalEvent
from .gestures import (
    DEFAULT_CODEBOOK,
    DEFAULT_KINEMATICS,
    CodebookConfig,
    Kinematics,
    compile_gesture,
    duration_of,
)
from .score import Bearing, Score
from .session import FileRecorder, Recorder, make_header


def midi_to_hz(midi: int) -> float:
    return 440.0 * 2.0 ** ((midi - 69) / 12.0)


# --- wire models ----------------------------------------------------------

class ClientMessage(BaseModel):
    type: Literal["start", "abort", "raise_hand"]
    part: str | None = None


class PartInfo(BaseModel):
    part_id: str
    display_name: str
    simulated: bool


class HelloMsg(BaseModel):
    type: Literal["hello"] = "hello"
    seq: int
    parts: list[PartInfo]
    state: dict


class StateChangedMsg(BaseModel):
    type: Literal["state_changed"] = "state_changed"
    seq: int = 0
    state: dict


class GestureMsg(BaseModel):
    type: Literal["gesture"] = "gesture"
    seq: int = 0
    gesture: dict
    motion_plan: dict
    duration_ms: float


class PitchAnnounceMsg(BaseModel):
    type: Literal["pitch_announce"] = "pitch_announce"
    seq: int = 0
    part: str
    midi: int
    freq_hz: float


class PitchStateMsg(BaseModel):
    type: Literal["pitch_state"] = "pitch_state"
    seq: int = 0
    pitches: dict[str, int | None]


class EndOfPieceMsg(BaseModel):
    type: Literal["end_of_piece"] = "end_of_piece"
    seq: int = 0


class ErrorMsg(BaseModel):
    type: Literal["error"] = "error"
    seq: int = 0
    reason: str


class SessionInfo(BaseModel):
    # Parts and current phase only; the score itself stays hidden.
    state: dict
    parts: list[PartInfo]


# --- session engine -------------------------------------------------------

class LiveSession:
    """Single conductor session driven by an asyncio event queue."""

    def __init__(
        self,
        score: Score,
        agent_configs: list[AgentConfig] | None = None,
        codebook: CodebookConfig = DEFAULT_CODEBOOK,
        kinematics: Kinematics = DEFAULT_KINEMATICS,
        speed: float = 1.0,
        log_path=None,
    ):
        self.score = score
        self.codebook = codebook
        self.kinematics = kinematics
        self.speed = speed
        self.agent_configs = agent_configs or []
        self.simulated_parts = {c.part_id for c in self.agent_configs}

        self.state: fsm.ConductorState = fsm.Idle()
        self.ids = fsm.GestureIds()
        # Zero-error shadow ensemble: tracks what a compliant ensemble
        # sounds like, for pitch_state broadcasts to every seat.
        self.shadow = Ensemble(
            [AgentConfig(part_id=pid) for pid in score.part_ids()]
        )
        self.agents = Ensemble(self.agent_configs) if self.agent_configs else None

        self.queue: asyncio.Queue = asyncio.Queue()
        self.clients: set[WebSocket] = set()
        self.history: list[dict] = []
        self._seq = 0
        self._cursor = Bearing(0.0, 0.0)
        self._motion_queue: list = []
        self._motion_task: asyncio.Task | None = None
        self._patience_task: asyncio.Task | None = None
        self._consumer: asyncio.Task | None = None
        self._t0: float | None = None
        header = make_header(score, {"agents": [c.part_id for c in self.agent_configs]})
        self.recorder = FileRecorder(log_path, header) if log_path else Recorder(header)

    # -- lifecycle --

    async def start(self):
        self._consumer = asyncio.create_task(self._consume())

    async def shutdown(self):
        for task in (self._consumer, self._motion_task, self._patience_task):
            if task is not None:
                task.cancel()
                with contextlib.suppress(asyncio.CancelledError):
                    await task
        self.recorder.close()

    def now_ms(self) -> float:
        loop = asyncio.get_event_loop()
        if self._t0 is None:
            self._t0 = loop.time()
        return (loop.time() - self._t0) * 1000.0 * self.speed

    # -- broadcasting --

    async def broadcast(self, msg: BaseModel):
        self._seq += 1
        doc = msg.model_dump()
        doc["seq"] = self._seq
        self.history.append(doc)
        dead = []
        for ws in list(self.clients):
            try:
                await ws.send_json(doc)
            except Exception:
                dead.append(ws)
        for ws in dead:
            self.clients.discard(ws)

    # -- event pump --

    async def post(self, event: fsm.ConductorEvent):
        await self.queue.put(event)

    async def _consume(self):
        while True:
            event = await self.queue.get()
            await self._handle(event)

    async def _handle(self, event: fsm.ConductorEvent):
        t = self.now_ms()
        self.recorder.record(t, {"kind": "conductor_event", "event": event.to_dict()})
        try:
            new_state, output = fsm.step(event=event, state=self.state, score=self.score, ids=self.ids)
        except IllegalEvent as exc:
            await self.broadcast(ErrorMsg(reason=str(exc)))
            return
        self.state = new_state
        for emission in output:
            self.recorder.record(t, {"kind": "emission", **emission.to_dict()})
            if isinstance(emission, fsm.PitchAnnounce):
                self.shadow.initialize_pitch(emission.part_id, emission.midi)
                await self.broadcast(
                    PitchAnnounceMsg(
                        part=emission.part_id,
                        midi=emission.midi,
                        freq_hz=midi_to_hz(emission.midi),
                    )
                )
            elif isinstance(emission, fsm.GestureRequest):
                self._motion_queue.append(emission.gesture)
            elif isinstance(emission, fsm.StateChanged):
                await self.broadcast(StateChangedMsg(state=fsm.state_to_dict(emission.state)))
                if isinstance(emission.state, fsm.Sustain):
                    pitches = self.shadow.pitches()
                    self.recorder.record(
                        self.now_ms(), {"kind": "pitch_state", "pitches": pitches}
                    )
                    await self.broadcast(PitchStateMsg(pitches=pitches))
                    self._schedule_patience()
                elif isinstance(emission.state, fsm.EndOfPiece):
                    await self.broadcast(EndOfPieceMsg())
        if self._motion_queue and (self._motion_task is None or self._motion_task.done()):
            self._motion_task = asyncio.create_task(self._run_motions())

    async def _run_motions(self):
        while self._motion_queue:
            gesture = self._motion_queue.pop(0)
            plan = compile_gesture(
                gesture, self.score.seat_map(), Bearing(0.0, 0.0), self.codebook
            )
            dur = duration_of(plan, self.kinematics, start=self._cursor)
            last = plan.segments[-1]
            self._cursor = Bearing(last.target_pan, last.target_tilt)
            await self.broadcast(
                GestureMsg(gesture=gesture.to_dict(), motion_plan=plan.to_dict(), duration_ms=dur)
            )
            await asyncio.sleep(dur / 1000.0 / self.speed)
            self.shadow.observe_gesture(gesture)
            if self.agents is not None:
                self.agents.observe_gesture(gesture)
            await self._handle(fsm.MotionDone(gesture_id=gesture.gesture_id))

    def _schedule_patience(self):
        """Let the least patient simulated agent raise a hand."""
        if not self.agents or not self.simulated_parts:
            return
        if self._patience_task is not None and not self._patience_task.done():
            self._patience_task.cancel()
        winner, winner_t = None, None
        for part_id in self.simulated_parts:
            t = self.agents.draw_patience(part_id)
            if winner_t is None or t < winner_t:
                winner, winner_t = part_id, t

        async def raise_later():
            await asyncio.sleep(winner_t / 1000.0 / self.speed)
            await self.post(fsm.RequestSignal(part_id=winner, timestamp_ms=self.now_ms()))

        self._patience_task = asyncio.create_task(raise_later())

    # -- client messages --

    async def handle_client_message(self, ws: WebSocket, msg: ClientMessage):
        if msg.type == "start":
            if not isinstance(self.state, fsm.Idle):
                await self.broadcast(ErrorMsg(reason="session already started"))
                return
            await self.post(fsm.Start())
        elif msg.type == "abort":
            await self.post(fsm.Abort())
        elif msg.type == "raise_hand":
            if msg.part is None or msg.part not in self.score.part_ids():
                await ws.send_json(
                    ErrorMsg(reason=f"unknown part {msg.part!r}").model_dump()
                )
                return
            if isinstance(self.state, fsm.Idle):
                await ws.send_json(
                    ErrorMsg(reason="session not started").model_dump()
                )
                return
            await self.post(fsm.RequestSignal(part_id=msg.part, timestamp_ms=self.now_ms()))

    def part_infos(self) -> list[PartInfo]:
        return [
            PartInfo(
                part_id=p.part_id,
                display_name=p.display_name,
                simulated=p.part_id in self.simulated_parts,
            )
            for p in self.score.parts
        ]


def create_app(
    score: Score,
    agent_configs: list[AgentConfig] | None = None,
    codebook: CodebookConfig = DEFAULT_CODEBOOK,
    kinematics: Kinematics = DEFAULT_KINEMATICS,
    speed: float = 1.0,
    log_path=None,
) -> FastAPI:
    session = LiveSession(
        score,
        agent_configs=agent_configs,
        codebook=codebook,
        kinematics=kinematics,
        speed=speed,
        log_path=log_path,
    )

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        await session.start()
        yield
        await session.shutdown()

    app = FastAPI(title="camconductor", version="0.1.0", lifespan=lifespan)
    app.state.session = session

    @app.get("/health")
    async def health():
        return {"status": "ok"}

    @app.get("/session", response_model=SessionInfo)
    async def session_info():
        # The score itself stays hidden: parts and current state only.
        return SessionInfo(state=fsm.state_to_dict(session.state), parts=session.part_infos())

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket):
        await ws.accept()
        since = int(ws.query_params.get("since", 10**12))
        session.clients.add(ws)
        hello = HelloMsg(
            seq=session._seq,
            parts=session.part_infos(),
            state=fsm.state_to_dict(session.state),
        )
        await ws.send_json(hello.model_dump())
        for doc in session.history:
            if doc["seq"] > since:
                await ws.send_json(doc)
        try:
            while True:
                text = await ws.receive_text()
                try:
                    msg = ClientMessage.model_validate(json.loads(text))
                except (ValueError, ValidationError) as exc:
                    await ws.send_json(
                        ErrorMsg(reason=f"malformed message: {exc}").model_dump()
                    )
                    continue
                await session.handle_client_message(ws, msg)
        except WebSocketDisconnect:
            pass
        finally:
            session.clients.discard(ws)

    return app
