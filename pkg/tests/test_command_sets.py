import json

import pytest

from netboard.command_sets import (
    BUILTIN_SETS,
    ActionPattern,
    check_ambiguity,
    command_set_to_dict,
    load_command_set,
    serialize_command_set,
)
from netboard.errors import AmbiguityError, ParseError, SchemaError


def test_builtin_default_loads_clean():
    cs = BUILTIN_SETS["default"]
    check_ambiguity(cs.patterns)
    assert cs.tap_pair_semantics == "toggle-visibility"
    assert cs.rotate_semantics == "scale-with-revolution-toggle"
    assert cs.annotation_trigger == "either"


def test_builtin_directional_maps_tap_to_direction():
    cs = BUILTIN_SETS["directional"]
    check_ambiguity(cs.patterns)
    assert cs.tap_pair_semantics == "set-direction"
    assert cs.rotate_semantics == "scale-only"
    assert cs.annotation_trigger == "point-dwell"


def test_builtins_round_trip():
    for cs in BUILTIN_SETS.values():
        assert load_command_set(serialize_command_set(cs)) == cs


def test_ambiguous_tap_mapping_rejected():
    data = command_set_to_dict(BUILTIN_SETS["default"])
    data["set_id"] = "broken"
    data["patterns"].append(
        {"action": "tap", "binding": "bound", "zone": "any", "command": "annotate"}
    )
    with pytest.raises(AmbiguityError) as err:
        load_command_set(json.dumps(data))
    message = str(err.value)
    assert "tap" in message and "annotate" in message and "link-sequence" in message


def test_zone_split_patterns_are_unambiguous():
    patterns = (
        ActionPattern("attach", "any", "registration", "register-node"),
        ActionPattern("attach", "bound", "storyboard", "place-node"),
    )
    check_ambiguity(patterns)


def test_any_binding_conflicts_with_specific():
    patterns = (
        ActionPattern("flip", "any", "any", "cycle-node-state"),
        ActionPattern("flip", "bound", "any", "annotate"),
    )
    with pytest.raises(AmbiguityError):
        check_ambiguity(patterns)


def test_malformed_json_is_parse_error():
    with pytest.raises(ParseError):
        load_command_set(b"{nope")


@pytest.mark.parametrize(
    "patch",
    [
        {"set_id": None},
        {"tap_pair_semantics": "coin-flip"},
        {"rotate_semantics": "vigorous"},
        {"annotation_trigger": "telepathy"},
        {"patterns": [{"action": "yodel", "command": "annotate"}]},
        {"patterns": [{"action": "tap", "command": "make-coffee"}]},
        {"patterns": [{"action": "tap", "binding": "loose", "command": "annotate"}]},
    ],
)
def test_schema_errors(patch):
    data = command_set_to_dict(BUILTIN_SETS["default"])
    data.update(patch)
    with pytest.raises(SchemaError):
        load_command_set(json.dumps(data))
