"""Spin-system model and the line-oriented input format.

A system file looks like::

    # anything after '#' is a comment
    N 3
    ISOTOPES 1H 1H 19F
    SHIFT 0 1.2970
    SHIFT 1 1.2970
    SHIFT 2 -184.1865
    J 0 1 -15.1172
    J 0 2 14.0478

``N`` must appear before any other directive, ``ISOTOPES`` lists one symbol
per spin, every spin needs exactly one ``SHIFT`` (ppm), and ``J`` lines give
scalar couplings in Hz with ``i < j``.  Anything else is rejected with the
offending line number.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .isotopes import BUILTIN_ISOTOPES, Isotope, resolve_isotope


@dataclass(frozen=True)
class FieldConfig:
    """Static-field setting; reference frequencies derive from it per isotope."""

    b0_tesla: float

    def __post_init__(self) -> None:
        if not (self.b0_tesla > 0):
            raise ValidationError(f"B0 must be positive, got {self.b0_tesla}")

    @classmethod
    def from_proton_frequency_mhz(cls, nu_mhz: float) -> "FieldConfig":
        """Build the field that puts 1H at the given reference frequency."""
        gamma_h = BUILTIN_ISOTOPES["1H"].gamma
        return cls(2.0 * math.pi * nu_mhz * 1e6 / gamma_h)

    def larmor_frequency_hz(self, isotope: Isotope) -> float:
        return isotope.larmor_frequency_hz(self.b0_tesla)


@dataclass(frozen=True)
class SpinSystem:
    """Chemical shifts (ppm) and scalar couplings (Hz) for n spin-1/2 nuclei."""

    name: str
    isotopes: tuple[str, ...]
    shifts_ppm: tuple[float, ...]
    couplings_hz: dict[tuple[int, int], float] = field(default_factory=dict)
    isotope_table: dict[str, Isotope] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.n_spins
        if n < 1:
            raise ValidationError("a spin system needs at least one spin")
        if len(self.shifts_ppm) != n:
            raise ValidationError(
                f"{len(self.shifts_ppm)} shifts for {n} spins"
            )
        for sym in self.isotopes:
            resolve_isotope(sym, self.isotope_table)
        for (i, j), val in self.couplings_hz.items():
            if not (0 <= i < j < n):
                raise ValidationError(f"coupling index ({i},{j}) out of range for n={n}")
            if val == 0.0:
                raise ValidationError(f"zero coupling listed for ({i},{j}); omit it")

    @property
    def n_spins(self) -> int:
        return len(self.isotopes)

    def isotope(self, k: int) -> Isotope:
        return resolve_isotope(self.isotopes[k], self.isotope_table)

    def species_indices(self, symbol: str) -> tuple[int, ...]:
        """Spins belonging to one species, in index order."""
        hits = tuple(k for k, sym in enumerate(self.isotopes) if sym == symbol)
        if not hits:
            raise ValidationError(f"system {self.name!r} has no {symbol} spins")
        return hits

    def coupling(self, i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        return self.couplings_hz.get((i, j), 0.0)


def parse_spin_system(
    text: str,
    name: str = "<string>",
    isotope_table: dict[str, Isotope] | None = None,
) -> SpinSystem:
    """Parse the system format described in the module docstring."""
    n: int | None = None
    isotopes: tuple[str, ...] | None = None
    shifts: dict[int, float] = {}
    couplings: dict[tuple[int, int], float] = {}

    def fail(line_no: int, message: str):
        raise ParseError(name, line_no, message)

    def parse_float(token: str, line_no: int, what: str) -> float:
        try:
            return float(token)
        except ValueError:
            fail(line_no, f"bad {what} {token!r}")

    def parse_index(token: str, line_no: int) -> int:
        try:
            k = int(token)
        except ValueError:
            fail(line_no, f"bad spin index {token!r}")
        if n is None or not (0 <= k < n):
            fail(line_no, f"spin index {k} out of range 0..{(n or 0) - 1}")
        return k

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        keyword = parts[0]
        if keyword == "N":
            if n is not None:
                fail(line_no, "duplicate N directive")
            if len(parts) != 2:
                fail(line_no, "expected: N <count>")
            try:
                n = int(parts[1])
            except ValueError:
                fail(line_no, f"bad spin count {parts[1]!r}")
            if n < 1:
                fail(line_no, "spin count must be >= 1")
            continue
        if n is None:
            fail(line_no, f"{keyword} before N directive")
        if keyword == "ISOTOPES":
            if isotopes is not None:
                fail(line_no, "duplicate ISOTOPES directive")
            if len(parts) != n + 1:
                fail(line_no, f"expected {n} isotope symbols, got {len(parts) - 1}")
            isotopes = tuple(parts[1:])
        elif keyword == "SHIFT":
            if len(parts) != 3:
                fail(line_no, "expected: SHIFT <spin> <ppm>")
            k = parse_index(parts[1], line_no)
            if k in shifts:
                fail(line_no, f"duplicate SHIFT for spin {k}")
            shifts[k] = parse_float(parts[2], line_no, "shift")
        elif keyword == "J":
            if len(parts) != 4:
                fail(line_no, "expected: J <i> <j> <hz>")
            i = parse_index(parts[1], line_no)
            j = parse_index(parts[2], line_no)
            if i >= j:
                fail(line_no, f"J indices must satisfy i < j, got ({i},{j})")
            if (i, j) in couplings:
                fail(line_no, f"duplicate J for ({i},{j})")
            value = parse_float(parts[3], line_no, "coupling")
            if value != 0.0:
                couplings[(i, j)] = value
        else:
            fail(line_no, f"unknown directive {keyword!r}")

    if n is None:
        raise ParseError(name, 1, "missing N directive")
    if isotopes is None:
        raise ParseError(name, 1, "missing ISOTOPES directive")
    missing = [k for k in range(n) if k not in shifts]
    if missing:
        raise ParseError(name, 1, f"missing SHIFT for spins {missing}")

    shift_list = tuple(shifts[k] for k in range(n))
    try:
        return SpinSystem(
            name=name,
            isotopes=isotopes,
            shifts_ppm=shift_list,
            couplings_hz=couplings,
            isotope_table=dict(isotope_table or {}),
        )
    except ValidationError as exc:
        raise ParseError(name, 1, str(exc)) from exc


def load_spin_system(
    path: str, isotope_table: dict[str, Isotope] | None = None
) -> SpinSystem:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read spin system {path}: {exc}") from exc
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_spin_system(text, name=name, isotope_table=isotope_table)


def bundled_system_path(name: str) -> str:
    """Filesystem path of a spin-system file shipped with the package.

    Accepts a bare name ("dfh") or a filename ("dfh.spins").
    """
    from importlib.resources import files

    if not name.endswith(".spins"):
        name = name + ".spins"
    resource = files("qnmr") / "data" / name
    if not resource.is_file():
        available = sorted(
            p.name for p in (files("qnmr") / "data").iterdir()
            if p.name.endswith(".spins")
        )
        raise ValidationError(
            f"no bundled spin system {name!r}; available: {', '.join(available)}"
        )
    return str(resource)
