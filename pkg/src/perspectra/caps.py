"""Enumeration caps, overridable through ``PERSPECTRA_CAPS``.

The variable holds comma separated ``name=value`` pairs, for example
``PERSPECTRA_CAPS="subgroups=2048,ring=256"``.
"""

from __future__ import annotations

import os

from .errors import CapExceeded

DEFAULTS = {
    "subgroups": 1024,   # |G| for subgroup / summand enumeration
    "sweep": 256,        # |G| for full perspectivity sweeps
    "ring": 4096,        # |R| for ring enumeration and condition (4)
    "enumerate": 4096,   # |G| below which element enumeration is allowed
    "end_ring": 2**25,   # |End(G)| for the table-free corner check
}


def caps() -> dict[str, int]:
    out = dict(DEFAULTS)
    raw = os.environ.get("PERSPECTRA_CAPS", "")
    for item in filter(None, (s.strip() for s in raw.split(","))):
        name, _, value = item.partition("=")
        if name not in out:
            raise ValueError(f"unknown cap {name!r} in PERSPECTRA_CAPS")
        out[name] = int(value)
    return out


def require(name: str, size: int, what: str | None = None) -> None:
    cap = caps()[name]
    if size > cap:
        raise CapExceeded(what or name, size, cap)
