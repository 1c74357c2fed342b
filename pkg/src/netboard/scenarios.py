"""Bundled demo content and scripted-scenario generators.

``demo_story`` is a pre-registered alliance network (seven countries, one
automatic secondary, a child network) sized for a 120x70 cm board with 4 cm
magnets. ``golden_script`` drives the full command repertoire through that
story; the expected traces are committed test fixtures.

``random_script`` produces unconstrained gesture soups for differential
testing of the recognizer; ``margin_script`` produces staggered,
threshold-respecting choreographies whose recognition must be identical at
different sampling rates.
"""
from __future__ import annotations

import random

from .scripting import GestureScript, ScriptStep
from .story import (
    Annotation,
    ChildLink,
    ChildNetwork,
    ChildNode,
    GroupStyle,
    LinkSpec,
    LinkType,
    MagnetSpec,
    NodeSpec,
    NodeState,
    RegistrationSlot,
    StoryDocument,
)

MAGNET_DIAMETER = round(4.0 / 120.0, 6)  # 4 cm on the 120 cm edge


def demo_story() -> StoryDocument:
    countries = [
        ("germany", "Germany", [("German Empire", "#4878d0")]),
        ("austria", "Austria-Hungary", [("Austria-Hungary", "#956cb4")]),
        ("italy", "Italy", [("Italy", "#6acc64")]),
        ("uk", "United Kingdom", [("United Kingdom", "#d65f5f")]),
        ("france", "France", [("France", "#82c6e2")]),
        ("russia", "Russia", [("Russian Empire", "#8c613c"), ("Soviet Union", "#d65f5f")]),
        ("serbia", "Serbia", [("Serbia", "#d5bb67")]),
    ]
    annotations = {
        "germany": Annotation(text="Military spending doubled between 1910 and 1914"),
        "serbia": Annotation(text="Assassination of Archduke Franz Ferdinand, June 1914"),
    }
    nodes = [
        NodeSpec(
            node_id=node_id,
            label=label,
            kind="primary",
            states=tuple(NodeState(label=s, fill=fill) for s, fill in states),
            annotation=annotations.get(node_id),
            child_network="de-command" if node_id == "germany" else "",
        )
        for node_id, label, states in countries
    ]
    nodes.append(
        NodeSpec(
            node_id="bosnia",
            label="Bosnia",
            kind="secondary",
            states=(NodeState(label="Bosnia", fill="#797979"),),
            anchors=("austria", "serbia"),
            anchor_mode="all",
            base_scale=0.8,
        )
    )

    alliance = (LinkType("alliance", "#2a7d2a"),)
    alliance_or_rift = (LinkType("alliance", "#2a7d2a"), LinkType("hostility", "#c03028"))
    war = (LinkType("war declaration", "#c03028"),)
    links = [
        LinkSpec("l-ga", "germany", "austria", types=alliance_or_rift),
        LinkSpec("l-gi", "germany", "italy", types=alliance),
        LinkSpec("l-gf", "germany", "france", types=war, directed="forward"),
        LinkSpec("l-gr", "germany", "russia", types=war, directed="forward"),
        LinkSpec("l-as", "austria", "serbia", reveal="auto",
                 types=(LinkType("tension", "#c03028"),)),
        LinkSpec("l-sb", "serbia", "bosnia", reveal="auto",
                 types=(LinkType("kinship", "#797979"),)),
    ]

    magnets = [
        MagnetSpec(f"mag-{node_id}", 2 * k + 1, 2 * k + 2, MAGNET_DIAMETER)
        for k, (node_id, _, _) in enumerate(countries)
    ]
    magnets.append(MagnetSpec("mag-widget", 31, 32, MAGNET_DIAMETER, role="widget"))

    slots = [
        RegistrationSlot(node_id, (0.08 + 0.12 * k, 0.075), 0.035)
        for k, (node_id, _, _) in enumerate(countries)
    ]

    return StoryDocument(
        story_id="alliance-shift-1914",
        board=(120.0, 70.0),
        magnets=tuple(sorted(magnets, key=lambda m: m.magnet_id)),
        nodes=tuple(sorted(nodes, key=lambda n: n.node_id)),
        links=tuple(sorted(links, key=lambda l: l.link_id)),
        child_networks=(
            ChildNetwork(
                child_id="de-command",
                nodes=(
                    ChildNode("army", "Army"),
                    ChildNode("navy", "Navy"),
                    ChildNode("staff", "General Staff"),
                ),
                links=(ChildLink("army", "staff"), ChildLink("navy", "staff")),
            ),
        ),
        group_styles=(
            GroupStyle("gs-alliance", label="Triple Alliance", fill="#ffe9b3"),
            GroupStyle("gs-entente", label="Triple Entente", fill="#d6e7f5"),
        ),
        registration_slots=tuple(sorted(slots, key=lambda s: s.node_id)),
    )


def _register_and_place(steps, magnet, slot_xy, target_xy, t0) -> int:
    """Place in a slot, dwell for registration, slide out to the storyboard."""
    steps.append(ScriptStep(op="place", magnet=magnet, side="a", xy=slot_xy, t=t0))
    steps.append(
        ScriptStep(op="glide", magnet=magnet, from_xy=slot_xy, to_xy=target_xy,
                   t0=t0 + 800, t1=t0 + 1600)
    )
    return t0 + 2400


def _tap(steps, magnet, t0, duration=150) -> int:
    steps.append(ScriptStep(op="touch", magnet=magnet, t0=t0, t1=t0 + duration))
    return t0 + duration


def golden_script() -> GestureScript:
    """Scripted performance of the alliance story, scenes one through six."""
    steps: list[ScriptStep] = []
    slots = {
        "mag-germany": (0.08, 0.075),
        "mag-austria": (0.20, 0.075),
        "mag-italy": (0.32, 0.075),
        "mag-uk": (0.44, 0.075),
        "mag-france": (0.56, 0.075),
        "mag-russia": (0.68, 0.075),
        "mag-serbia": (0.80, 0.075),
    }

    # scene 1: Germany, Austria, Italy enter; the Dual Alliance link appears
    t = _register_and_place(steps, "mag-germany", slots["mag-germany"], (0.30, 0.45), 0)
    t = _register_and_place(steps, "mag-austria", slots["mag-austria"], (0.45, 0.45), t)
    t = _register_and_place(steps, "mag-italy", slots["mag-italy"], (0.30, 0.70), t)
    _tap(steps, "mag-germany", 7400)
    _tap(steps, "mag-austria", 8200)
    _tap(steps, "mag-germany", 9200)
    _tap(steps, "mag-italy", 10000)

    # scene 2: the Triple Alliance forms as magnets come together
    steps.append(ScriptStep(op="glide", magnet="mag-austria",
                            from_xy=(0.45, 0.45), to_xy=(0.36, 0.45), t0=11000, t1=11800))
    steps.append(ScriptStep(op="glide", magnet="mag-italy",
                            from_xy=(0.30, 0.70), to_xy=(0.30, 0.51), t0=13000, t1=13800))

    # scene 3: the Entente powers enter and group
    t = _register_and_place(steps, "mag-uk", slots["mag-uk"], (0.70, 0.30), 15000)
    t = _register_and_place(steps, "mag-france", slots["mag-france"], (0.85, 0.30), t)
    t = _register_and_place(steps, "mag-russia", slots["mag-russia"], (0.85, 0.55), t)
    steps.append(ScriptStep(op="glide", magnet="mag-russia",
                            from_xy=(0.85, 0.55), to_xy=(0.85, 0.36), t0=22400, t1=23200))
    steps.append(ScriptStep(op="glide", magnet="mag-uk",
                            from_xy=(0.70, 0.30), to_xy=(0.79, 0.30), t0=24400, t1=25200))

    # scene 4: Serbia enters (Bosnia follows automatically); pointing reveals
    # the assassination note; a held finger annotates Germany
    _register_and_place(steps, "mag-serbia", slots["mag-serbia"], (0.55, 0.70), 26600)
    steps.append(ScriptStep(op="hover", magnet="mag-serbia", t0=29000, t1=30200))
    steps.append(ScriptStep(op="touch", magnet="mag-germany", t0=30700, t1=31700))

    # Germany's rise: scale up, then a full turn opens its command network
    steps.append(ScriptStep(op="spin", magnet="mag-germany", delta_deg=270.0,
                            t0=32400, t1=33900))
    steps.append(ScriptStep(op="spin", magnet="mag-germany", delta_deg=360.0,
                            t0=35000, t1=37000))

    # scene 5: war declarations fan out from Germany
    _tap(steps, "mag-germany", 37800)
    _tap(steps, "mag-france", 38600)
    _tap(steps, "mag-germany", 39500)
    _tap(steps, "mag-russia", 40300)

    # scene 6: Russia transforms; Italy leaves the alliance and the board
    steps.append(ScriptStep(op="flip", magnet="mag-russia", t=41200))
    steps.append(ScriptStep(op="hover", magnet="mag-italy", t0=41900, t1=43500))
    steps.append(ScriptStep(op="occlude", magnet="mag-italy", t0=42000, t1=43400))
    _tap(steps, "mag-germany", 44300)
    _tap(steps, "mag-italy", 45100)
    steps.append(ScriptStep(op="remove", magnet="mag-italy", t=46000))
    steps.append(ScriptStep(op="spin", magnet="mag-germany", delta_deg=360.0,
                            t0=48000, t1=50000))
    steps.append(ScriptStep(op="glide", magnet="mag-serbia",
                            from_xy=(0.55, 0.70), to_xy=(0.55, 0.60), t0=50500, t1=51100))

    return GestureScript(rate_hz=60.0, steps=tuple(steps), duration_ms=53000)


# --------------------------------------------------------------------------
# random scenario generators


def random_roster(rng: random.Random, max_magnets: int = 12) -> list[MagnetSpec]:
    count = rng.randint(2, max_magnets)
    roster = []
    for k in range(count):
        role = "widget" if k and rng.random() < 0.2 else "node-carrier"
        roster.append(MagnetSpec(f"m{k:02d}", 2 * k + 1, 2 * k + 2, MAGNET_DIAMETER, role=role))
    return roster


_SITES = [
    (round(0.10 + 0.15 * i, 3), round(0.25 + 0.15 * j, 3))
    for i in range(6)
    for j in range(5)
]


def random_script(
    rng: random.Random,
    roster: list[MagnetSpec],
    max_duration_ms: int = 30000,
    rate_hz: float = 60.0,
) -> GestureScript:
    """Unconstrained gesture soup: magnets act independently and overlap."""
    steps: list[ScriptStep] = []
    sites = list(_SITES)
    rng.shuffle(sites)
    hand_budget = 0
    for index, magnet in enumerate(roster):
        site = sites[index % len(sites)]
        cursor = rng.randrange(0, 1200)
        placed = False
        side = rng.choice(("a", "b"))
        carriers = [m for m in roster if m.role == "node-carrier" and m is not magnet]
        while cursor < max_duration_ms - 2000:
            if not placed:
                if magnet.role == "widget" and carriers and rng.random() < 0.6:
                    base_index = rng.randrange(len(carriers))
                    site = sites[roster.index(carriers[base_index]) % len(sites)]
                steps.append(ScriptStep(op="place", magnet=magnet.magnet_id, side=side,
                                        xy=site, t=cursor, rot=rng.choice((0.0, 45.0, 180.0))))
                placed = True
                cursor += rng.randrange(400, 1200)
                continue
            move = rng.random()
            if move < 0.18:
                target = rng.choice(sites)
                duration = rng.randrange(500, 1500)
                steps.append(ScriptStep(op="glide", magnet=magnet.magnet_id,
                                        from_xy=site, to_xy=target,
                                        t0=cursor, t1=cursor + duration))
                site = target
                cursor += duration + rng.randrange(100, 900)
            elif move < 0.34:
                delta = rng.choice((-540, -360, -180, -90, 90, 180, 360, 540))
                duration = max(400, int(abs(delta) / rng.uniform(0.09, 0.24)))
                steps.append(ScriptStep(op="spin", magnet=magnet.magnet_id,
                                        delta_deg=float(delta), t0=cursor, t1=cursor + duration))
                cursor += duration + rng.randrange(100, 900)
            elif move < 0.50 and hand_budget < 6:
                duration = rng.choice((120, 200, 280, 450, 700, 900, 1200))
                steps.append(ScriptStep(op="touch", magnet=magnet.magnet_id,
                                        t0=cursor, t1=cursor + duration))
                hand_budget += 1
                cursor += duration + rng.randrange(100, 900)
            elif move < 0.62 and hand_budget < 6:
                duration = rng.randrange(300, 1400)
                steps.append(ScriptStep(op="hover", magnet=magnet.magnet_id,
                                        t0=cursor, t1=cursor + duration))
                hand_budget += 1
                cursor += duration + rng.randrange(100, 900)
            elif move < 0.72:
                steps.append(ScriptStep(op="flip", magnet=magnet.magnet_id, t=cursor))
                cursor += rng.randrange(300, 1000)
            elif move < 0.84:
                duration = rng.randrange(150, 1600)
                steps.append(ScriptStep(op="occlude", magnet=magnet.magnet_id,
                                        t0=cursor, t1=cursor + duration))
                if rng.random() < 0.5 and hand_budget < 6:
                    steps.append(ScriptStep(op="hover", magnet=magnet.magnet_id,
                                            t0=max(0, cursor - 80), t1=cursor + duration + 80))
                    hand_budget += 1
                # companion hovers pad 80 ms past both ends; keep them disjoint
                cursor += duration + rng.randrange(250, 900)
            else:
                steps.append(ScriptStep(op="remove", magnet=magnet.magnet_id, t=cursor))
                placed = False
                cursor += rng.randrange(1200, 2600)
        if placed and rng.random() < 0.4:
            steps.append(ScriptStep(op="remove", magnet=magnet.magnet_id,
                                    t=max_duration_ms - rng.randrange(200, 1800)))
    if rng.random() < 0.3:
        t0 = rng.randrange(0, max_duration_ms - 1000)
        steps.append(ScriptStep(op="handoff", xy=rng.choice(sites), t0=t0,
                                t1=t0 + rng.randrange(200, 1500)))
    return GestureScript(rate_hz=rate_hz, steps=tuple(steps),
                         duration_ms=max_duration_ms)


def margin_script(
    rng: random.Random,
    story: StoryDocument,
    rate_hz: float = 60.0,
    gestures: int = 14,
) -> GestureScript:
    """Staggered, threshold-respecting choreography over a full story.

    Every primitive keeps at least twice the coarsest sampling period plus
    the governing threshold margin away from decision boundaries, so the
    recognized actions (and hence mapped commands) are rate independent.
    """
    steps: list[ScriptStep] = []
    slots = {s.node_id: s for s in story.registration_slots}
    carriers = [m for m in story.magnets if m.role == "node-carrier"]
    chosen = carriers[: rng.randint(3, min(5, len(carriers)))]

    bound_nodes = []
    sites = [(round(0.15 + 0.17 * k, 3), 0.5) for k in range(len(chosen))]
    positions: dict[str, tuple[float, float]] = {}
    cursor = 0
    for k, magnet in enumerate(chosen):
        node_id = magnet.magnet_id.removeprefix("mag-")
        slot = slots[node_id]
        cursor = _register_and_place(steps, magnet.magnet_id, slot.center, sites[k], cursor)
        positions[magnet.magnet_id] = sites[k]
        bound_nodes.append((magnet.magnet_id, node_id))

    cursor += 600
    for _ in range(gestures):
        magnet_id, node_id = bound_nodes[rng.randrange(len(bound_nodes))]
        x, y = positions[magnet_id]
        kind = rng.random()
        if kind < 0.2:
            # tap pair for a link command
            other, _ = bound_nodes[rng.randrange(len(bound_nodes))]
            if other == magnet_id:
                continue
            cursor = _tap(steps, magnet_id, cursor) + rng.randrange(500, 1500)
            cursor = _tap(steps, other, cursor) + rng.randrange(600, 1100)
        elif kind < 0.38:
            delta = float(rng.choice((-270, -180, -90, 90, 180, 270, 360, -360)))
            duration = int(abs(delta) / 0.18)
            steps.append(ScriptStep(op="spin", magnet=magnet_id, delta_deg=delta,
                                    t0=cursor, t1=cursor + duration))
            cursor += duration + 700
        elif kind < 0.52:
            target = (x, round(max(0.25, min(0.9, y + rng.choice((-0.15, 0.15)))), 3))
            duration = 800
            steps.append(ScriptStep(op="glide", magnet=magnet_id, from_xy=(x, y),
                                    to_xy=target, t0=cursor, t1=cursor + duration))
            positions[magnet_id] = target
            cursor += duration + 700
        elif kind < 0.64:
            steps.append(ScriptStep(op="flip", magnet=magnet_id, t=cursor))
            cursor += 700
        elif kind < 0.76:
            duration = rng.choice((700, 900, 1100))
            steps.append(ScriptStep(op="touch", magnet=magnet_id, t0=cursor,
                                    t1=cursor + duration))
            cursor += duration + 700
        elif kind < 0.88:
            steps.append(ScriptStep(op="hover", magnet=magnet_id, t0=cursor,
                                    t1=cursor + 1100))
            cursor += 1100 + 700
        else:
            steps.append(ScriptStep(op="hover", magnet=magnet_id, t0=cursor - 100,
                                    t1=cursor + 1300))
            steps.append(ScriptStep(op="occlude", magnet=magnet_id, t0=cursor,
                                    t1=cursor + 1200))
            cursor += 1300 + 700
    return GestureScript(rate_hz=rate_hz, steps=tuple(steps), duration_ms=cursor + 1800)
