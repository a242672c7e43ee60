"""Bit-string interpretations of P built from machine runs, and their inverse.

Growing layout: chunk ``i`` starts at ``d * 4**i``; a chunk starting at ``s``
holds ``001011 1^line`` on ``[s, 2s)``, ``0011 1^c1`` on ``[2s, 3s)`` and
``0011 1^c2`` on ``[3s, 4s)``.  Fixed-width layout: chunk ``i`` starts at
``3 * d * i`` with sub-delimiters at ``+d`` and ``+2d``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .machine import Configuration, MachineError

CHUNK = (0, 0, 1, 0, 1, 1)
BREAK = (0, 0, 1, 1)
START = (0, 1)
END = (1, 0)


class ModelError(Exception):
    pass


class CapacityError(ModelError):
    """A value does not fit into its subchunk."""


class MalformedModel(ModelError):
    pass


class ModelAccessError(ModelError):
    """A read past what the model defines; signals a bound misconfiguration."""

    def __init__(self, position: int, limit: int):
        super().__init__(f"P accessed at {position}, model defined below {limit} only")
        self.position = position
        self.limit = limit


@dataclass(frozen=True)
class Growing:
    d: int
    n_chunks: int


@dataclass(frozen=True)
class FixedWidth:
    d: int
    n_chunks: int
    e: int


@dataclass(frozen=True, eq=False)
class BitModel:
    """Bits ``0..length-1`` of ``P``.

    ``finite_support`` models are zero everywhere past ``length``; other models
    say nothing there and reads raise ``ModelAccessError``.
    """

    bits: np.ndarray
    layout: object
    finite_support: bool = False

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.uint8, copy=True)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def length(self) -> int:
        return int(self.bits.size)

    def bit(self, n: int) -> int:
        if n < self.bits.size:
            return int(self.bits[n])
        if self.finite_support:
            return 0
        raise ModelAccessError(n, self.bits.size)

    def ones(self) -> list[int]:
        return np.flatnonzero(self.bits).tolist()

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitModel):
            return NotImplemented
        return (
            self.layout == other.layout
            and self.finite_support == other.finite_support
            and np.array_equal(self.bits, other.bits)
        )

    def to_string(self) -> str:
        return self.bits.tobytes().translate(bytes.maketrans(b"\x00\x01", b"01")).decode()


def chunk_start(i: int, d: int) -> int:
    if i < 0 or d < 0:
        raise ValueError("chunk index and d must be natural numbers")
    return d * 4**i


def chunks_to_cover(bound: int, d: int) -> int:
    """Smallest chunk count whose last chunk starts at or beyond ``bound``.

    With that many chunks (plus the trailing delimiter every growing model
    carries) no sentence instantiated with values up to ``bound`` reads past the
    model, provided premises are evaluated before conclusions.
    """
    n = 1
    while chunk_start(n - 1, d) < bound:
        n += 1
    return n


def _write(bits: np.ndarray, at: int, pattern) -> None:
    bits[at : at + len(pattern)] = pattern


def _place(bits, base: int, value: int, first: int, limit: int, what: str) -> None:
    if first + value > limit:
        raise CapacityError(f"{what}={value} does not fit the subchunk at {base}")
    bits[first : first + value] = 1


def build_canonical(configs: Sequence[Configuration], d: int, finite: bool = False) -> BitModel:
    """The canonical model of a configuration sequence in the growing layout.

    By default the delimiter of the chunk after the last one is written too and
    the model ends right behind it.  ``finite=True`` omits it and declares every
    later bit zero (the shape used for finite-support encodings).
    """
    n = len(configs)
    if n == 0:
        return BitModel(np.zeros(6, dtype=np.uint8), Growing(d, 0), finite)
    end = chunk_start(n, d)
    bits = np.zeros(end if finite else end + 6, dtype=np.uint8)
    for i, (line, c1, c2) in enumerate(configs):
        s = chunk_start(i, d)
        _write(bits, s, CHUNK)
        _place(bits, s, line, s + 6, 2 * s, "line")
        _write(bits, 2 * s, BREAK)
        _place(bits, 2 * s, c1, 2 * s + 4, 3 * s, "c1")
        _write(bits, 3 * s, BREAK)
        _place(bits, 3 * s, c2, 3 * s + 4, 4 * s, "c2")
    if not finite:
        _write(bits, end, CHUNK)
    return BitModel(bits, Growing(d, n), finite)


def build_fixed_width(configs: Sequence[Configuration], d_val: int) -> BitModel:
    """Fixed-width layout with stride ``3 * d_val``; the model has finite support.

    ``e`` (the start of the last chunk) is recorded in the layout.
    """
    n = len(configs)
    if n == 0:
        raise ModelError("a fixed-width model needs at least one configuration")
    stride = 3 * d_val
    bits = np.zeros(stride * n, dtype=np.uint8)
    for i, (line, c1, c2) in enumerate(configs):
        x = stride * i
        _write(bits, x, CHUNK)
        _place(bits, x, line, x + 6, x + d_val, "line")
        _write(bits, x + d_val, BREAK)
        _place(bits, x + d_val, c1, x + d_val + 4, x + 2 * d_val, "c1")
        _write(bits, x + 2 * d_val, BREAK)
        _place(bits, x + 2 * d_val, c2, x + 2 * d_val + 4, x + 3 * d_val, "c2")
    return BitModel(bits, FixedWidth(d_val, n, stride * (n - 1)), True)


def fixed_width_d(configs: Sequence[Configuration], k: int) -> int:
    """Smallest admissible fixed subchunk length for a run: at least ``k`` and
    large enough for every line and counter value that occurs."""
    need = k
    for line, c1, c2 in configs:
        need = max(need, line + 6, c1 + 4, c2 + 4)
    return need


def halting_prefix(configs: Sequence[Configuration], K: int) -> tuple[Configuration, ...]:
    """Configurations up to and including the first one at line ``K``."""
    for i, c in enumerate(configs):
        if c.line == K:
            return tuple(configs[: i + 1])
    raise MachineError(f"line {K} is never reached in {len(configs)} configurations")


# ---------------------------------------------------------------------------
# decoding


def _regions(layout) -> list[tuple[int, list[tuple[int, int, int, str]]]]:
    """Per chunk: its start and the three (delimiter end, value origin, stop) regions."""
    out = []
    for i in range(layout.n_chunks):
        if isinstance(layout, Growing):
            s = chunk_start(i, layout.d)
            subs = [(s + 5, s + 5, 2 * s, "line"), (2 * s + 3, 2 * s + 3, 3 * s, "c1"), (3 * s + 3, 3 * s + 3, 4 * s, "c2")]
            breaks = (2 * s, 3 * s)
        else:
            s = 3 * layout.d * i
            dd = layout.d
            subs = [(s + 5, s + 5, s + dd, "line"), (s + dd + 3, s + dd + 3, s + 2 * dd, "c1"), (s + 2 * dd + 3, s + 2 * dd + 3, s + 3 * dd, "c2")]
            breaks = (s + dd, s + 2 * dd)
        out.append((s, breaks, subs))
    return out


def _padded(model: BitModel, upto: int) -> np.ndarray:
    if upto <= model.length:
        return model.bits
    if not model.finite_support:
        raise MalformedModel(f"model ends at {model.length}, layout needs {upto}")
    return np.concatenate([model.bits, np.zeros(upto - model.length, dtype=np.uint8)])


def decode(model: BitModel) -> list[Configuration]:
    """Read the configuration sequence back from a model's layout."""
    layout = model.layout
    regions = _regions(layout)
    if not regions:
        return []
    last_stop = regions[-1][2][-1][2]
    bits = _padded(model, last_stop + 1)
    ends = kernels.pattern_mask(bits, END)
    configs = []
    for s, breaks, subs in regions:
        if not np.array_equal(bits[s : s + 6], CHUNK):
            raise MalformedModel(f"missing chunk delimiter at {s}")
        for b in breaks:
            if not np.array_equal(bits[b : b + 4], BREAK):
                raise MalformedModel(f"missing subchunk delimiter at {b}")
        values = []
        for lo, origin, stop, what in subs:
            hits = np.flatnonzero(ends[lo:stop]) + lo
            if hits.size != 1:
                raise MalformedModel(f"{hits.size} end positions for {what} in [{lo}, {stop})")
            value = int(hits[0]) - origin
            if not bits[origin + 1 : origin + 1 + value].all() or bits[origin + 1 + value : stop].any():
                raise MalformedModel(f"{what} at {origin} is not a unary block")
            values.append(value)
        configs.append(Configuration(*values))
    return configs


# ---------------------------------------------------------------------------
# structural observations on growing models


def scan_positions(model: BitModel, pattern) -> np.ndarray:
    return np.flatnonzero(kernels.pattern_mask(model.bits, pattern))


def expected_positions(layout: Growing) -> dict[str, set[int]]:
    starts = [chunk_start(i, layout.d) for i in range(layout.n_chunks)]
    return {
        "chunk": set(starts),
        "break": {2 * s for s in starts} | {3 * s for s in starts},
        "start": {r for s in starts for r in (s + 1, s + 3, 2 * s + 1, 3 * s + 1)},
    }


def observations(model: BitModel) -> dict[str, bool]:
    """Check the structural facts every model of the delimiter axioms has.

    Keys ``a``/``b``/``c``: chunk, break and ``01`` positions below the trailing
    delimiter are exactly the layout's.  ``d``/``e``/``f``: each line, c1 and c2
    subchunk interval holds exactly one end position (this also gives ``g``,
    existence).
    """
    layout = model.layout
    if not isinstance(layout, Growing):
        raise ModelError("observations are stated for the growing layout")
    horizon = chunk_start(layout.n_chunks, layout.d)
    expect = expected_positions(layout)
    found = {
        "chunk": scan_positions(model, CHUNK),
        "break": scan_positions(model, BREAK),
        "start": scan_positions(model, START),
    }
    result = {}
    for key, name in (("a", "chunk"), ("b", "break"), ("c", "start")):
        got = {int(r) for r in found[name] if r < horizon}
        result[key] = got == expect[name]
    ends = kernels.pattern_mask(model.bits, END)
    starts = [chunk_start(i, layout.d) for i in range(layout.n_chunks)]
    for key, lo_of, hi_of in (
        ("d", lambda s: s + 5, lambda s: 2 * s),
        ("e", lambda s: 2 * s + 3, lambda s: 3 * s),
        ("f", lambda s: 3 * s + 3, lambda s: 4 * s),
    ):
        counts = kernels.count_in_ranges(ends, [lo_of(s) for s in starts], [hi_of(s) for s in starts])
        result[key] = bool((counts == 1).all())
    result["g"] = result["d"] and result["e"] and result["f"]
    return result


# ---------------------------------------------------------------------------
# dump format


def dump(model: BitModel) -> str:
    layout = model.layout
    if isinstance(layout, Growing):
        head = f"d={layout.d} layout=growing chunks={layout.n_chunks}"
    else:
        head = f"d={layout.d} layout=fixed chunks={layout.n_chunks} e={layout.e}"
    if model.finite_support and isinstance(layout, Growing):
        head += " support=finite"
    return f"{head}\n{model.to_string()}\n"


def load(text: str) -> BitModel:
    lines = text.strip().splitlines()
    if len(lines) != 2:
        raise ModelError("a model dump has a header line and a bit line")
    fields = dict(tok.split("=", 1) for tok in lines[0].split())
    bitline = lines[1].strip()
    if set(bitline) - {"0", "1"}:
        raise ModelError("bit line may contain only 0 and 1")
    bits = np.frombuffer(bitline.encode(), dtype=np.uint8) - ord("0")
    try:
        d, n = int(fields["d"]), int(fields["chunks"])
        if fields["layout"] == "growing":
            return BitModel(bits, Growing(d, n), fields.get("support") == "finite")
        if fields["layout"] == "fixed":
            return BitModel(bits, FixedWidth(d, n, int(fields["e"])), True)
    except KeyError as exc:
        raise ModelError(f"model header lacks {exc}") from None
    raise ModelError(f"unknown layout {fields['layout']!r}")


__all__ = [
    "BitModel",
    "Growing",
    "FixedWidth",
    "chunk_start",
    "chunks_to_cover",
    "build_canonical",
    "build_fixed_width",
    "fixed_width_d",
    "halting_prefix",
    "decode",
    "observations",
    "dump",
    "load",
    "ModelError",
    "CapacityError",
    "MalformedModel",
    "ModelAccessError",
]
