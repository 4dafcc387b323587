"""Named benchmark polynomials shared by the CLI, scripts, and tests."""

from __future__ import annotations

from .poly import Poly, parse_poly

# All presets live on the first Heisenberg group (variables x, y, s).
PRESETS: dict[str, str] = {
    "paper-f": "x + 6*y*s - x^3",
    "paper-fmia": "x^3 + x*y^2 - 8*y*s - x",
    "p1": "x",
    "p3": "6*y*s - x^3",
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def resolve_poly(text: str, spec_or_shape) -> Poly:
    """Resolve a preset name or parse polynomial text for the given group."""
    source = PRESETS.get(text, text)
    return parse_poly(source, spec_or_shape)
