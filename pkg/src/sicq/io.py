"""JSON wire formats for operators, POVMs, frames and probability vectors.

Complex entries are encoded as two-element [re, im] arrays, matrices as
row-major nested lists.  Floats round-trip losslessly (shortest repr, at
most 17 significant digits); exact rationals are written as "p/q" strings.
Every document emitted by the CLI carries a "meta" header with the tool
version, dimension, seeds and tolerances in play.
"""

from __future__ import annotations

import json
from fractions import Fraction

import numpy as np

from .sicframe import MubFrame, Provenance, SicFrame


class DocumentError(ValueError):
    """A document failed to parse or had the wrong shape; carries the path."""

    def __init__(self, path, message: str):
        self.path = str(path)
        super().__init__(f"{self.path}: {message}")


def encode_complex_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def decode_complex_matrix(data, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError(f"{name} must be a nested list of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def fraction_str(x) -> str:
    f = Fraction(x)
    return str(f)


def parse_fraction(s) -> Fraction:
    return Fraction(s)


# -- documents ---------------------------------------------------------------

def operator_doc(m: np.ndarray, meta: dict | None = None) -> dict:
    doc = {"dim": int(m.shape[0]), "matrix": encode_complex_matrix(m)}
    if meta:
        doc["meta"] = meta
    return doc


def povm_doc(effects: np.ndarray, meta: dict | None = None) -> dict:
    effects = np.asarray(effects, dtype=complex)
    doc = {"dim": int(effects.shape[1]),
           "effects": [encode_complex_matrix(f) for f in effects]}
    if meta:
        doc["meta"] = meta
    return doc


def prob_doc(p: np.ndarray, meta: dict | None = None) -> dict:
    p = np.asarray(p, dtype=float)
    doc = {"n": int(p.shape[0]), "p": [float(x) for x in p]}
    if meta:
        doc["meta"] = meta
    return doc


def frame_doc(frame: SicFrame, meta: dict | None = None) -> dict:
    doc = {
        "dim": frame.dim,
        "provenance": frame.provenance.to_dict(),
        "projectors": [encode_complex_matrix(p) for p in frame.projectors],
    }
    if frame.vectors is not None:
        doc["vectors"] = [[[float(z.real), float(z.imag)] for z in v] for v in frame.vectors]
    if meta:
        doc["meta"] = meta
    return doc


def mub_doc(mub: MubFrame, meta: dict | None = None) -> dict:
    doc = {
        "dim": mub.dim,
        "kind": "mub",
        "projectors": [encode_complex_matrix(p) for p in mub.projectors],
    }
    if meta:
        doc["meta"] = meta
    return doc


# -- parsing -----------------------------------------------------------------

def parse_operator(doc: dict, name: str = "operator") -> np.ndarray:
    d = int(doc["dim"])
    m = decode_complex_matrix(doc["matrix"], name=name)
    if m.shape != (d, d):
        raise ValueError(f"{name} matrix shape {m.shape} does not match dim {d}")
    return m


def parse_povm(doc: dict) -> np.ndarray:
    d = int(doc["dim"])
    effects = np.array([decode_complex_matrix(f, name="effect") for f in doc["effects"]])
    if effects.shape[1:] != (d, d):
        raise ValueError(f"effects shape {effects.shape} does not match dim {d}")
    return effects


def parse_prob(doc: dict) -> np.ndarray:
    p = np.asarray(doc["p"], dtype=float)
    if p.ndim != 1 or p.shape[0] != int(doc["n"]):
        raise ValueError("probability document length mismatch")
    return p


def parse_frame(doc: dict) -> SicFrame:
    """Rebuild a frame, taking stored arrays verbatim so save/load round-trips
    are byte-stable; projectors are derived only from vectors-only documents."""
    d = int(doc["dim"])
    provenance = Provenance.from_dict(doc.get("provenance", {"kind": "analytic"}))
    vectors = None
    if "vectors" in doc:
        raw = np.asarray(doc["vectors"], dtype=float)
        if raw.ndim != 3 or raw.shape[1:] != (d, 2):
            raise ValueError(f"vectors must be {d * d} length-{d} [re, im] arrays")
        vectors = raw[..., 0] + 1j * raw[..., 1]
    if "projectors" in doc:
        projs = np.array([decode_complex_matrix(p, name="projector") for p in doc["projectors"]])
    elif vectors is not None:
        projs = np.einsum("ia,ib->iab", vectors, vectors.conj())
    else:
        raise ValueError("frame document needs 'projectors' or 'vectors'")
    return SicFrame(dim=d, projectors=projs, vectors=vectors, provenance=provenance)


def parse_mub(doc: dict) -> MubFrame:
    d = int(doc["dim"])
    projs = np.array([decode_complex_matrix(p, name="projector") for p in doc["projectors"]])
    return MubFrame(dim=d, projectors=projs)


# -- files -------------------------------------------------------------------

def load_json(path) -> dict:
    """Load a JSON document; DocumentError carries the byte offset on parse failure."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DocumentError(path, f"cannot read file: {exc}") from exc
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DocumentError(path, f"malformed JSON at byte offset {exc.pos}: {exc.msg}") from exc


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def save_json(doc: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_json(doc))
