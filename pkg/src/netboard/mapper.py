"""Maps recognized user actions to visualization commands.

The mapper owns session bindings (magnet-to-node registrations made in the
registration area), short-lived intent (pending tap for link sequencing, open
holds, slot-dwell registrations), and reads the current visualization state
to keep its output applicable: it never emits a command whose precondition
visibly fails.

Mapping is a pure function of (bindings, pending, command set, event, story,
state): identical event traces always yield identical command traces.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import commands as cmd
from .command_sets import CommandSet
from .commands import InteractionCommand
from .events import UserActionEvent
from .geometry import dist
from .story import RegistrationSlot, StoryDocument
from .vizstate import VizState

logger = logging.getLogger(__name__)

# recognizer event kind -> command-set action pattern name
_EVENT_ACTION = {
    "attach": "attach",
    "detach": "detach",
    "slide_end": "slide",
    "rotate_delta": "rotate",
    "full_revolution": "full_revolution",
    "flip": "flip",
    "tap": "tap",
    "hold_begin": "hold",
    "hold_end": "hold",
    "point_dwell": "point_dwell",
    "bring_closer": "bring_closer",
    "moved_apart": "moved_apart",
    "cover_begin": "cover",
    "cover_end": "cover",
    "stack": "stack",
    "unstack": "unstack",
}


def scale_factor(degrees: float) -> float:
    """Clockwise rotation doubles per full turn; counter-clockwise halves."""
    return 2.0 ** (degrees / 360.0)


@dataclass
class SessionBindings:
    """Bijective magnet-to-node registrations plus the board zone geometry."""

    registration_zone: tuple[float, float, float, float]
    storyboard_zone: tuple[float, float, float, float]
    magnet_to_node: dict[str, str] = field(default_factory=dict)
    node_to_magnet: dict[str, str] = field(default_factory=dict)

    @staticmethod
    def for_story(story: StoryDocument) -> "SessionBindings":
        return SessionBindings(
            registration_zone=story.registration_zone,
            storyboard_zone=story.storyboard_zone,
        )

    def bind(self, magnet_id: str, node_id: str) -> None:
        old_node = self.magnet_to_node.pop(magnet_id, None)
        if old_node is not None:
            self.node_to_magnet.pop(old_node, None)
        old_magnet = self.node_to_magnet.pop(node_id, None)
        if old_magnet is not None:
            self.magnet_to_node.pop(old_magnet, None)
        self.magnet_to_node[magnet_id] = node_id
        self.node_to_magnet[node_id] = magnet_id

    def node_of(self, magnet_id: str) -> str | None:
        return self.magnet_to_node.get(magnet_id)

    def magnet_of(self, node_id: str) -> str | None:
        return self.node_to_magnet.get(node_id)

    def zone_of(self, xy: tuple[float, float] | None) -> str:
        if xy is None:
            return "any"
        if _rect_contains(self.registration_zone, xy):
            return "registration"
        if _rect_contains(self.storyboard_zone, xy):
            return "storyboard"
        return "storyboard"  # dead space maps to the manipulation surface


def _rect_contains(rect, xy) -> bool:
    return rect[0] <= xy[0] <= rect[2] and rect[1] <= xy[1] <= rect[3]


@dataclass
class _OpenHold:
    magnet: str
    node: str
    begin_t: int
    dirty: bool = False  # another magnet acted while the hold was open
    suppressed: bool = False  # consumed by a link-type pairing


@dataclass
class _PendingRegistration:
    magnet: str
    node: str
    slot: RegistrationSlot
    since_t: int


@dataclass
class PendingIntent:
    """Short-lived mapping state between events."""

    tap: tuple[str, int] | None = None  # (magnet, t_ms)
    open_holds: dict[str, _OpenHold] = field(default_factory=dict)
    completed_holds: list[_OpenHold] = field(default_factory=list)
    registrations: dict[str, _PendingRegistration] = field(default_factory=dict)


def map_action(
    bindings: SessionBindings,
    pending: PendingIntent,
    command_set: CommandSet,
    event: UserActionEvent,
    story: StoryDocument,
    state: VizState,
) -> tuple[SessionBindings, PendingIntent, list[InteractionCommand]]:
    """Apply the mapping rules for one event."""
    out: list[InteractionCommand] = []
    t = event.t_ms

    # any activity from another magnet taints open holds (annotation intent
    # requires an undisturbed hold)
    participants = set(event.magnets())
    for hold in pending.open_holds.values():
        if hold.magnet not in participants:
            hold.dirty = True

    action = _EVENT_ACTION.get(event.kind)
    if action is None:
        return bindings, pending, out
    binding_status = "bound" if bindings.node_of(event.magnet) else "unbound"
    zone = bindings.zone_of(_event_position(event))
    pattern = command_set.match(action, binding_status, zone)
    if pattern is None:
        logger.debug("no pattern for %s (%s/%s); event dropped", event.kind, binding_status, zone)
        _maintain_pending(bindings, pending, event)
        return bindings, pending, out

    handler = _HANDLERS.get(pattern.command)
    if handler is not None:
        handler(bindings, pending, command_set, event, story, state, out)
    _maintain_pending(bindings, pending, event)
    return bindings, pending, out


def _event_position(event: UserActionEvent) -> tuple[float, float] | None:
    if event.kind == "slide_end":
        return event.to_xy
    return event.xy


def _maintain_pending(bindings, pending: PendingIntent, event: UserActionEvent) -> None:
    """Cancel dwelling registrations invalidated by this event."""
    reg = pending.registrations.get(event.magnet)
    if reg is None:
        return
    if event.kind == "detach":
        del pending.registrations[event.magnet]
    elif event.kind == "slide_end":
        if dist(event.to_xy, reg.slot.center) > reg.slot.radius:
            del pending.registrations[event.magnet]


# --------------------------------------------------------------------------
# template handlers


def _handle_register(bindings, pending, command_set, event, story, state, out) -> None:
    if event.xy is None:
        return
    slot = _slot_at(story, event.xy)
    if slot is None:
        return
    if bindings.magnet_of(slot.node_id):
        logger.debug("slot %s already bound; attach ignored", slot.node_id)
        return
    current = bindings.node_of(event.magnet)
    if current is not None:
        if current == slot.node_id:
            return
        if state.node_visible(current):
            logger.debug(
                "magnet %s bound to visible node %s; re-registration refused",
                event.magnet, current,
            )
            return
    pending.registrations[event.magnet] = _PendingRegistration(
        magnet=event.magnet, node=slot.node_id, slot=slot, since_t=event.t_ms
    )


def _slot_at(story: StoryDocument, xy) -> RegistrationSlot | None:
    best = None
    best_d = None
    for slot in story.registration_slots:
        d = dist(xy, slot.center)
        if d <= slot.radius and (best_d is None or d < best_d):
            best, best_d = slot, d
    return best


def _handle_place_node(bindings, pending, command_set, event, story, state, out) -> None:
    node = bindings.node_of(event.magnet)
    xy = _event_position(event)
    if node is None or xy is None:
        return
    if not state.node_visible(node):
        out.append(cmd.show_node(event.t_ms, node))
    out.append(cmd.reposition_node(event.t_ms, node, xy))


def _handle_hide_node(bindings, pending, command_set, event, story, state, out) -> None:
    node = bindings.node_of(event.magnet)
    if node is not None and state.node_visible(node):
        out.append(cmd.hide_node(event.t_ms, node))


def _handle_scale(bindings, pending, command_set, event, story, state, out) -> None:
    if command_set.rotate_semantics == "revolution-only":
        return
    node = bindings.node_of(event.magnet)
    if node is None:
        return
    factor = scale_factor(event.degrees)
    partner = _latest_other_hold(pending, event.magnet)
    if partner is not None:
        held_node = partner.node
        if story.link_between(held_node, node) is not None:
            out.append(cmd.scale_link(event.t_ms, held_node, node, factor))
            return
        logger.debug("no link %s-%s to scale; rotation dropped", held_node, node)
        return
    if state.node_visible(node):
        out.append(cmd.scale_node(event.t_ms, node, factor))


def _latest_other_hold(pending: PendingIntent, magnet: str) -> _OpenHold | None:
    holds = [h for h in pending.open_holds.values() if h.magnet != magnet]
    if not holds:
        return None
    return max(holds, key=lambda h: (h.begin_t, h.magnet))


def _handle_toggle_child(bindings, pending, command_set, event, story, state, out) -> None:
    if command_set.rotate_semantics == "scale-only":
        return
    node = bindings.node_of(event.magnet)
    if node is None or not state.node_visible(node):
        return
    if story.node(node).child_network:
        out.append(cmd.toggle_child_network(event.t_ms, node))


def _handle_cycle_state(bindings, pending, command_set, event, story, state, out) -> None:
    node = bindings.node_of(event.magnet)
    if node is not None and state.node_visible(node):
        out.append(cmd.change_node_state(event.t_ms, node))


def _handle_link_sequence(bindings, pending, command_set, event, story, state, out) -> None:
    node = bindings.node_of(event.magnet)
    if node is None:
        return
    if pending.tap is None or pending.tap[0] == event.magnet:
        pending.tap = (event.magnet, event.t_ms)
        return
    first_magnet, first_t = pending.tap
    if event.t_ms - first_t > command_set.w_seq_ms:
        pending.tap = (event.magnet, event.t_ms)
        return
    pending.tap = None
    first_node = bindings.node_of(first_magnet)
    if first_node is None:
        return
    link = story.link_between(first_node, node)
    if link is None:
        logger.debug("tap pair %s-%s has no story link; dropped", first_node, node)
        return
    if command_set.tap_pair_semantics == "set-direction":
        out.append(cmd.change_link_direction(event.t_ms, first_node, node))
        return
    if link.reveal == "auto":
        logger.debug("link %s is auto-revealed; tap pair dropped", link.link_id)
        return
    view = state.links[link.link_id]
    if view.visible:
        out.append(cmd.hide_link(event.t_ms, first_node, node))
    elif state.node_visible(link.source) and state.node_visible(link.target):
        out.append(cmd.show_link(event.t_ms, first_node, node))


def _handle_hold_intent(bindings, pending, command_set, event, story, state, out) -> None:
    node = bindings.node_of(event.magnet)
    if node is None:
        return
    if event.kind == "hold_begin":
        hold = _OpenHold(magnet=event.magnet, node=node, begin_t=event.t_ms)
        partner = _pair_candidate(pending, command_set, hold)
        pending.open_holds[event.magnet] = hold
        if partner is not None:
            link = story.link_between(partner.node, node)
            if link is not None and state.links[link.link_id].visible:
                hold.suppressed = True
                partner.suppressed = True
                out.append(cmd.change_link_type(event.t_ms, partner.node, node))
        return
    # hold_end: queue for annotation promotion unless disqualified
    hold = pending.open_holds.pop(event.magnet, None)
    if hold is None:
        return
    if command_set.annotation_trigger not in ("hold", "either"):
        return
    if hold.dirty or hold.suppressed:
        return
    if story.node(node).annotation is None or not state.node_visible(node):
        return
    pending.completed_holds.append(hold)


def _pair_candidate(pending, command_set, hold: _OpenHold) -> _OpenHold | None:
    candidates = [
        h
        for h in pending.open_holds.values()
        if h.magnet != hold.magnet
        and not h.suppressed
        and hold.begin_t - h.begin_t <= command_set.w_sim_ms
    ]
    if not candidates:
        return None
    return max(candidates, key=lambda h: (h.begin_t, h.magnet))


def _handle_annotate(bindings, pending, command_set, event, story, state, out) -> None:
    if command_set.annotation_trigger not in ("point-dwell", "either"):
        return
    node = bindings.node_of(event.magnet)
    if node is None or not state.node_visible(node):
        return
    if story.node(node).annotation is not None:
        out.append(cmd.toggle_annotation(event.t_ms, node))


def _handle_extend_group(bindings, pending, command_set, event, story, state, out) -> None:
    if event.kind != "bring_closer":
        return
    node_a = bindings.node_of(event.magnet)
    node_b = bindings.node_of(event.magnet_b)
    if node_a and node_b and state.node_visible(node_a) and state.node_visible(node_b):
        group_a, group_b = state.group_of(node_a), state.group_of(node_b)
        if group_a is not None and group_a is group_b:
            return
        out.append(cmd.show_or_extend_group(event.t_ms, node_a, node_b))


def _handle_shrink_group(bindings, pending, command_set, event, story, state, out) -> None:
    if event.kind != "cover_begin":
        return
    node = bindings.node_of(event.magnet)
    if node is None or not state.node_visible(node):
        return
    if state.group_of(node) is not None:
        out.append(cmd.hide_or_shrink_group(event.t_ms, node))


def _handle_highlight(bindings, pending, command_set, event, story, state, out) -> None:
    base_node = bindings.node_of(event.magnet_b)
    if base_node is None or not state.node_visible(base_node):
        return
    out.append(cmd.highlight_node(event.t_ms, base_node, on=event.kind == "stack"))


_HANDLERS = {
    "register-node": _handle_register,
    "place-node": _handle_place_node,
    "hide-node": _handle_hide_node,
    "scale": _handle_scale,
    "toggle-child": _handle_toggle_child,
    "cycle-node-state": _handle_cycle_state,
    "link-sequence": _handle_link_sequence,
    "hold-intent": _handle_hold_intent,
    "annotate": _handle_annotate,
    "extend-group": _handle_extend_group,
    "shrink-group": _handle_shrink_group,
    "highlight": _handle_highlight,
}


def resolve_pending(
    bindings: SessionBindings,
    pending: PendingIntent,
    command_set: CommandSet,
    now_ms: int,
    story: StoryDocument,
    state: VizState,
) -> tuple[PendingIntent, list[InteractionCommand]]:
    """Expire stale intent and promote matured intent into commands."""
    out: list[InteractionCommand] = []

    if pending.tap is not None and now_ms - pending.tap[1] > command_set.w_seq_ms:
        pending.tap = None

    matured = [
        reg
        for reg in pending.registrations.values()
        if now_ms - reg.since_t >= command_set.slot_dwell_ms
    ]
    for reg in sorted(matured, key=lambda r: (r.since_t, r.magnet)):
        del pending.registrations[reg.magnet]
        if bindings.magnet_of(reg.node):
            continue  # someone else claimed the node during the dwell
        current = bindings.node_of(reg.magnet)
        if current is not None and state.node_visible(current):
            continue
        bindings.bind(reg.magnet, reg.node)
        out.append(cmd.register(now_ms, reg.magnet, reg.node))

    for hold in pending.completed_holds:
        out.append(cmd.toggle_annotation(now_ms, hold.node))
    pending.completed_holds.clear()

    return pending, out
