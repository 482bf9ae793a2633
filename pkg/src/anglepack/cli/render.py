"""SVG and ASCII rendering of layout files.

Rendering works from the layout document alone (placements carry their
absolute sub-rectangles).  The SVG y axis is flipped at draw time so the
image matches the y-up model convention.
"""

from __future__ import annotations

from .formats import FormatError, LayoutDoc

_CELL = 32
_MARGIN = 8

# Fill colors cycle deterministically by piece id.
_PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
    "#fabfd2", "#b6992d",
)


def _id_char(piece_id: int) -> str:
    digits = "0123456789abcdefghijklmnopqrstuvwxyz"
    return digits[piece_id % len(digits)]


def render_svg(doc: LayoutDoc) -> str:
    """One filled rectangle per sub-rectangle, a piece-id label, and the
    end_x x end_y frame."""
    if doc.end_x is None or doc.end_y is None:
        raise FormatError("cannot render a layout file without a layout")
    width = doc.end_x * _CELL + 2 * _MARGIN
    height = doc.end_y * _CELL + 2 * _MARGIN

    def px(x: int) -> int:
        return _MARGIN + x * _CELL

    def py(y: int, h: int) -> int:
        return _MARGIN + (doc.end_y - y - h) * _CELL

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    for p in doc.placements:
        fill = _PALETTE[(p.piece - 1) % len(_PALETTE)]
        for r in p.rects:
            lines.append(
                f'<rect x="{px(r.x)}" y="{py(r.y, r.h)}" width="{r.w * _CELL}" '
                f'height="{r.h * _CELL}" fill="{fill}" stroke="#333" stroke-width="1"/>'
            )
        first = p.rects[0]
        tx = px(first.x) + first.w * _CELL // 2
        ty = py(first.y, first.h) + first.h * _CELL // 2 + 5
        lines.append(
            f'<text x="{tx}" y="{ty}" font-size="14" text-anchor="middle" '
            f'fill="#111">{p.piece}</text>'
        )
    lines.append(
        f'<rect x="{px(0)}" y="{py(0, doc.end_y)}" width="{doc.end_x * _CELL}" '
        f'height="{doc.end_y * _CELL}" fill="none" stroke="#000" stroke-width="2"/>'
    )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_ascii(doc: LayoutDoc) -> str:
    """A grid of piece-id characters, top row first; '.' marks empty."""
    if doc.end_x is None or doc.end_y is None:
        raise FormatError("cannot render a layout file without a layout")
    grid = [["." for _ in range(doc.end_x)] for _ in range(doc.end_y)]
    for p in doc.placements:
        ch = _id_char(p.piece)
        for r in p.rects:
            for col in range(r.x, r.x + r.w):
                for row in range(r.y, r.y + r.h):
                    if 0 <= col < doc.end_x and 0 <= row < doc.end_y:
                        grid[row][col] = ch
    return "\n".join("".join(grid[row]) for row in range(doc.end_y - 1, -1, -1)) + "\n"
