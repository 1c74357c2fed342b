"""The frame-to-state pipeline shared by the live session and offline replay.

One frame in: recognized action events, mapped commands, applied state diffs
out. All stages are sequential and deterministic; a pipeline instance is
owned by exactly one feeder.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .command_sets import CommandSet
from .commands import InteractionCommand
from .errors import IllegalCommand, UnknownTarget
from .events import UserActionEvent
from .frames import ObservationFrame
from .mapper import PendingIntent, SessionBindings, map_action, resolve_pending
from .recognizer import RecognizerConfig, RecognizerState, finalize, ingest_frame
from .story import StoryDocument
from .vizstate import StateDiff, VizState, apply_command, initial_state

logger = logging.getLogger(__name__)


@dataclass
class PipelineStep:
    t_ms: int
    events: list[UserActionEvent] = field(default_factory=list)
    commands: list[InteractionCommand] = field(default_factory=list)
    diffs: list[StateDiff] = field(default_factory=list)
    elapsed_s: float = 0.0


class PresenterPipeline:
    """recognize -> map -> apply, with the mutable state owned in one place."""

    def __init__(
        self,
        story: StoryDocument,
        command_set: CommandSet,
        recognizer_config: RecognizerConfig | None = None,
    ):
        self.story = story
        self.command_set = command_set
        self.config = recognizer_config or RecognizerConfig()
        self.recognizer = RecognizerState.for_roster(list(story.magnets))
        self.bindings = SessionBindings.for_story(story)
        self.pending = PendingIntent()
        self.state: VizState = initial_state(story)
        self.frame_count = 0
        self.latencies_s: list[float] = []

    def feed_frame(self, frame: ObservationFrame) -> PipelineStep:
        started = time.perf_counter()
        self.recognizer, events = ingest_frame(self.recognizer, frame, self.config)
        step = self._advance(frame.t_ms, events)
        step.elapsed_s = time.perf_counter() - started
        self.latencies_s.append(step.elapsed_s)
        self.frame_count += 1
        return step

    def finish(self, t_end_ms: int | None = None) -> PipelineStep:
        if t_end_ms is None:
            t_end_ms = self.recognizer.last_t or 0
        events = finalize(self.recognizer, t_end_ms, self.config)
        return self._advance(t_end_ms, events)

    def _advance(self, t_ms: int, events: list[UserActionEvent]) -> PipelineStep:
        step = PipelineStep(t_ms=t_ms, events=list(events))
        for event in events:
            self.bindings, self.pending, commands = map_action(
                self.bindings, self.pending, self.command_set, event, self.story, self.state
            )
            self._apply_all(commands, step)
        self.pending, promoted = resolve_pending(
            self.bindings, self.pending, self.command_set, t_ms, self.story, self.state
        )
        self._apply_all(promoted, step)
        return step

    def _apply_all(self, commands: list[InteractionCommand], step: PipelineStep) -> None:
        for command in commands:
            try:
                self.state, diff = apply_command(self.state, self.story, command)
            except (UnknownTarget, IllegalCommand) as exc:
                logger.warning("command %s rejected: %s", command.kind, exc)
                continue
            step.commands.append(command)
            step.diffs.append(diff)

    def magnet_poses(self) -> dict[str, tuple[float, float]]:
        """Last tracked pose per attached magnet (live layout input)."""
        return {
            magnet_id: track.pose
            for magnet_id, track in self.recognizer.tracks.items()
            if track.attached and track.pose is not None
        }

    def latency_quantile(self, q: float) -> float:
        if not self.latencies_s:
            return 0.0
        ordered = sorted(self.latencies_s)
        index = min(len(ordered) - 1, max(0, round(q * (len(ordered) - 1))))
        return ordered[index]


def run_offline(
    story: StoryDocument,
    command_set: CommandSet,
    frames: list[ObservationFrame],
    recognizer_config: RecognizerConfig | None = None,
) -> tuple[list[UserActionEvent], list[InteractionCommand], VizState, PresenterPipeline]:
    """Feed a whole stream through a fresh pipeline and finalize it."""
    pipeline = PresenterPipeline(story, command_set, recognizer_config)
    all_events: list[UserActionEvent] = []
    all_commands: list[InteractionCommand] = []
    for frame in frames:
        step = pipeline.feed_frame(frame)
        all_events.extend(step.events)
        all_commands.extend(step.commands)
    step = pipeline.finish()
    all_events.extend(step.events)
    all_commands.extend(step.commands)
    return all_events, all_commands, pipeline.state, pipeline
