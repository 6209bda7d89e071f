"""Published response schemas; each file is self-contained draft-07."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    """Load a schema by bare name, e.g. ``view`` for view.json."""
    path = resources.files(__package__).joinpath(f"{name}.json")
    return json.loads(path.read_text("utf-8"))


def validate(payload: dict, name: str) -> None:
    """Raise jsonschema.ValidationError when payload breaks the schema."""
    import jsonschema

    jsonschema.validate(payload, load_schema(name))
