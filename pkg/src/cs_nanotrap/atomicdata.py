"""Cs transition data: parsing, validation and conversion to dipole strengths.

Transition tables are comma-separated text with the header
``lower,upper,lambda_nm,tau_us,source``; ``#`` starts a comment. Each row is
one fine-structure transition with its vacuum wavelength and the partial
lifetime of the upper level for decay into the lower one.
"""

from __future__ import annotations

import enum
import io
import math
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, TextIO

from . import constants as const
from .angular import HalfInt
from .errors import DatasetError

HEADER = ("lower", "upper", "lambda_nm", "tau_us", "source")
DEFAULT_DATASET = "cs_mckeever_corrected.csv"
CLARK_DATASET = "cs_clark.csv"
DATA_ENV_VAR = "CS_NANOTRAP_DATA"

#: nuclear spin of 133Cs
CS_NUCLEAR_SPIN = HalfInt(7)

_L_LETTERS = "SPDFGHIK"
_LEVEL_RE = re.compile(r"^\s*(\d+)\s*([A-Za-z])\s*(\d+)(?:/(2))?\s*$")


class Source(str, enum.Enum):
    MCKEEVER_CORRECTED = "McKeeverCorrected"
    CLARK = "Clark"
    EXTERNAL = "External"


@dataclass(frozen=True, order=True)
class LevelId:
    """Fine-structure level nL_J, e.g. ``LevelId.parse("6P3/2")``."""

    n: int
    L: int
    J: HalfInt

    def __post_init__(self):
        if self.n < 1 or self.L < 0:
            raise ValueError(f"invalid quantum numbers n={self.n}, L={self.L}")
        if self.L >= self.n:
            raise ValueError(f"L={self.L} not allowed for n={self.n}")
        if abs(2 * self.L - self.J.twice) != 1:
            raise ValueError(f"J={self.J} incompatible with L={self.L} for one electron")

    @classmethod
    def parse(cls, text: str) -> "LevelId":
        m = _LEVEL_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse level label {text!r}")
        n, letter, jnum, jden = m.groups()
        letter = letter.upper()
        if letter not in _L_LETTERS:
            raise ValueError(f"unknown orbital letter {letter!r} in {text!r}")
        twice_j = int(jnum) if jden else 2 * int(jnum)
        return cls(int(n), _L_LETTERS.index(letter), HalfInt(twice_j))

    def __str__(self):
        return f"{self.n}{_L_LETTERS[self.L]}{self.J}"


@dataclass(frozen=True)
class TransitionRecord:
    lower: LevelId
    upper: LevelId
    lambda_nm: float
    tau_us: float
    source: Source = Source.EXTERNAL

    def __post_init__(self):
        if not (self.lambda_nm > 0 and math.isfinite(self.lambda_nm)):
            raise ValueError(f"wavelength must be positive, got {self.lambda_nm}")
        if not (self.tau_us > 0 and math.isfinite(self.tau_us)):
            raise ValueError(f"partial lifetime must be positive, got {self.tau_us}")
        if self.lower == self.upper:
            raise ValueError(f"transition {self.lower} -> itself")
        if abs(self.lower.L - self.upper.L) != 1:
            raise ValueError(f"E1 selection rule violated: {self.lower} <-> {self.upper}")
        if abs(self.lower.J.twice - self.upper.J.twice) > 2:
            raise ValueError(f"|dJ| > 1 for {self.lower} <-> {self.upper}")

    @property
    def key(self) -> tuple[LevelId, LevelId]:
        return (self.lower, self.upper)

    def partner(self, level: LevelId) -> LevelId:
        if level == self.lower:
            return self.upper
        if level == self.upper:
            return self.lower
        raise KeyError(level)


def transition_omega(rec: TransitionRecord) -> float:
    """Angular frequency 2 pi c / lambda of the transition (rad/s, > 0)."""
    return const.wavelength_to_omega(rec.lambda_nm * 1e-9)


def reduced_dipole_sq(rec: TransitionRecord) -> float:
    """Squared reduced dipole matrix element |<J||d||J'>|^2 in C^2 m^2.

    J is the lower and J' the upper level, so the degeneracy factor is
    2J'+1 of the upper level and tau is the upper -> lower partial lifetime.
    """
    omega = transition_omega(rec)
    tau = rec.tau_us * 1e-6
    return (3.0 * math.pi * const.EPS0 * const.HBAR * const.C**3 / omega**3
            * (rec.upper.J.twice + 1) / tau)


def _parse_number(text: str, what: str, line: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(f"{what} {text!r} is not a number", line) from None
    if not (value > 0 and math.isfinite(value)):
        raise DatasetError(f"{what} must be positive, got {text}", line)
    return value


def load_transition_table(stream: TextIO | str, source: Source | str | None = None
                          ) -> list[TransitionRecord]:
    """Parse a transition table. Any malformed row aborts the whole load.

    ``source`` overrides the per-row provenance column when given; rows may
    then omit the fifth column.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    override = Source(source) if source is not None else None
    records: list[TransitionRecord] = []
    header_seen = False
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        cells = [c.strip() for c in line.split(",")]
        if not header_seen:
            if tuple(c.lower() for c in cells) != HEADER:
                raise DatasetError(f"expected header {','.join(HEADER)}", lineno)
            header_seen = True
            continue
        if len(cells) not in (4, 5) or (len(cells) == 4 and override is None):
            raise DatasetError(f"expected 5 columns, got {len(cells)}", lineno)
        try:
            lower, upper = LevelId.parse(cells[0]), LevelId.parse(cells[1])
        except ValueError as exc:
            raise DatasetError(str(exc), lineno) from None
        lam = _parse_number(cells[2], "lambda_nm", lineno)
        tau = _parse_number(cells[3], "tau_us", lineno)
        if override is not None:
            src = override
        else:
            try:
                src = Source(cells[4])
            except ValueError:
                raise DatasetError(f"unknown source tag {cells[4]!r}", lineno) from None
        try:
            records.append(TransitionRecord(lower, upper, lam, tau, src))
        except ValueError as exc:
            raise DatasetError(str(exc), lineno) from None
    if not header_seen:
        raise DatasetError("empty table (no header)")
    return records


def format_transition_table(records: Iterable[TransitionRecord]) -> str:
    """Inverse of :func:`load_transition_table` (comments are not kept)."""
    lines = [",".join(HEADER)]
    for r in records:
        lines.append(f"{r.lower},{r.upper},{r.lambda_nm!r},{r.tau_us!r},{r.source.value}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class AtomModel:
    """Immutable set of transitions for one atom (133Cs by default)."""

    transitions: tuple[TransitionRecord, ...]
    nuclear_spin: HalfInt = CS_NUCLEAR_SPIN
    name: str = field(default="133Cs", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "transitions", tuple(self.transitions))
        seen = set()
        for rec in self.transitions:
            if rec.key in seen:
                raise DatasetError(f"duplicate transition {rec.lower} -> {rec.upper}")
            seen.add(rec.key)

    @property
    def constants(self) -> dict:
        return dict(const.CONSTANTS)

    @property
    def levels(self) -> set[LevelId]:
        out = set()
        for rec in self.transitions:
            out.update(rec.key)
        return out

    def couplings(self, level: LevelId) -> list[tuple[LevelId, TransitionRecord, int]]:
        """(partner, record, sign) for every transition touching ``level``.

        ``sign`` is +1 when the partner lies above ``level``, -1 when below.
        """
        out = []
        for rec in self.transitions:
            if rec.lower == level:
                out.append((rec.upper, rec, +1))
            elif rec.upper == level:
                out.append((rec.lower, rec, -1))
        return out

    def get(self, lower: LevelId | str, upper: LevelId | str) -> TransitionRecord:
        lo = LevelId.parse(lower) if isinstance(lower, str) else lower
        up = LevelId.parse(upper) if isinstance(upper, str) else upper
        for rec in self.transitions:
            if rec.key == (lo, up):
                return rec
        raise KeyError(f"{lo} -> {up}")


def data_dir() -> Path:
    return Path(str(resources.files("cs_nanotrap") / "data"))


def resolve_dataset(name: str | os.PathLike | None = None) -> Path:
    """Locate a dataset file.

    Lookup order: the path as given, ``$CS_NANOTRAP_DATA/<name>``, then the
    files shipped with the package.
    """
    name = DEFAULT_DATASET if name is None else name
    p = Path(name)
    if p.is_file():
        return p
    env = os.environ.get(DATA_ENV_VAR)
    if env and (Path(env) / p).is_file():
        return Path(env) / p
    shipped = data_dir() / p.name
    if shipped.is_file():
        return shipped
    raise DatasetError(f"dataset {str(name)!r} not found")


def load_atom(dataset: str | os.PathLike | None = None) -> AtomModel:
    path = resolve_dataset(dataset)
    try:
        with open(path, encoding="utf-8") as fh:
            records = load_transition_table(fh)
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from None
    return AtomModel(tuple(records))


def hyperfine_levels(J: HalfInt, I: HalfInt = CS_NUCLEAR_SPIN) -> list[HalfInt]:
    """Allowed F for J coupled with I, ascending."""
    return [HalfInt(t) for t in range(abs(J.twice - I.twice), J.twice + I.twice + 1, 2)]
