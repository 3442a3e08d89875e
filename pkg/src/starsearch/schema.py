"""JSON schema for strategy files."""

from __future__ import annotations

import jsonschema

from .errors import SchemaError

STRATEGY_SCHEMA = {
    "type": "object",
    "required": ["m", "segments"],
    "additionalProperties": False,
    "properties": {
        "m": {"type": "integer", "minimum": 2},
        "segments": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["len", "ray"],
                "additionalProperties": False,
                "properties": {
                    "len": {"type": "number", "exclusiveMinimum": 0},
                    "ray": {"type": "integer", "minimum": 0},
                },
            },
        },
        "tail": {
            "oneOf": [
                {"type": "null"},
                {
                    "type": "object",
                    "required": ["base", "scale", "ray_cycle", "mult"],
                    "additionalProperties": False,
                    "properties": {
                        "base": {"type": "number", "exclusiveMinimum": 1},
                        "scale": {"type": "number", "exclusiveMinimum": 0},
                        "ray_cycle": {
                            "type": "array",
                            "minItems": 1,
                            "items": {"type": "integer", "minimum": 0},
                        },
                        "mult": {
                            "type": "array",
                            "minItems": 1,
                            "items": {"type": "number", "exclusiveMinimum": 0},
                        },
                    },
                },
            ]
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(STRATEGY_SCHEMA)


def validate_strategy_document(doc: object) -> None:
    """Raise :class:`SchemaError` naming the offending field path."""
    err = jsonschema.exceptions.best_match(_VALIDATOR.iter_errors(doc))
    if err is not None:
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(f"{path}: {err.message}")
