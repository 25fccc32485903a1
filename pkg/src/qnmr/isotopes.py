"""Nuclear isotope registry.

Ships the spin-1/2 nuclei used by the bundled spin systems; more can be
registered at runtime or loaded from a small table file (one ``symbol
gamma`` pair per line, gamma in rad s^-1 T^-1).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError, ValidationError


@dataclass(frozen=True)
class Isotope:
    symbol: str
    gamma: float  # gyromagnetic ratio, rad s^-1 T^-1

    def larmor_frequency_hz(self, b0_tesla: float) -> float:
        """Reference (0 ppm) precession frequency at the given field."""
        import math

        return self.gamma * b0_tesla / (2.0 * math.pi)


# Standard gyromagnetic ratios for common spin-1/2 nuclei.
BUILTIN_ISOTOPES = {
    "1H": Isotope("1H", 2.6752218744e8),
    "19F": Isotope("19F", 2.5181480e8),
    "31P": Isotope("31P", 1.0839400e8),
}


def resolve_isotope(symbol: str, extra: dict[str, Isotope] | None = None) -> Isotope:
    if extra and symbol in extra:
        return extra[symbol]
    try:
        return BUILTIN_ISOTOPES[symbol]
    except KeyError:
        known = sorted(BUILTIN_ISOTOPES) + sorted(extra or ())
        raise ValidationError(
            f"unknown isotope {symbol!r}; known: {', '.join(known)}"
        ) from None


def load_isotope_table(path: str) -> dict[str, Isotope]:
    """Parse a two-column isotope table: ``symbol gamma`` per line."""
    table: dict[str, Isotope] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(path, line_no, "expected: SYMBOL GAMMA")
            symbol, gamma_text = parts
            try:
                gamma = float(gamma_text)
            except ValueError:
                raise ParseError(path, line_no, f"bad gamma {gamma_text!r}") from None
            if gamma <= 0:
                raise ParseError(path, line_no, "gamma must be positive")
            table[symbol] = Isotope(symbol, gamma)
    return table
