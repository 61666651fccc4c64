"""JSON encodings for scalars, ring elements and Witt vectors."""

from __future__ import annotations

from .padic import PAdic, PAdicRing
from .rings import Elem, ring_from_descriptor
from .witt import WittVec


def encode_element(x) -> dict:
    if isinstance(x, PAdic):
        return x.to_json()
    if isinstance(x, Elem):
        return x.ring.encode(x)
    raise TypeError(f"cannot encode {type(x).__name__}")


def decode_element(ring, d: dict):
    if isinstance(ring, PAdicRing):
        return PAdic(int(d["p"]), int(d["N"]), int(d["residue"]))
    return ring.decode(d)


def decode_witt(d: dict) -> WittVec:
    ring = ring_from_descriptor(d["base"])
    comps = tuple(decode_element(ring, c) for c in d["comps"])
    if len(comps) != int(d["L"]):
        raise ValueError("component count does not match L")
    return WittVec(comps)
