"""Figure-style SVG rendering of an interpretation model.

The overlay never decodes pixels: it draws on a canvas sized like the
source image, optionally referencing the image file as a background.
Symmetric pairs and singles get green boxes (pairs joined by a chord),
non-symmetric ones red, unmatched elements gray; the symmetry axis is a
dashed vertical line and pose joints are colored by body part.
"""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape, quoteattr

from .joints import part_of
from .model import InterpretationModel, symmetrical_elements

SYMMETRIC_COLOR = "#1a9641"
NON_SYMMETRIC_COLOR = "#d7191c"
UNMATCHED_COLOR = "#888888"
AXIS_COLOR = "#404040"
PART_COLORS = {"upper_body": "#2b83ba", "legs": "#fdae61"}
JOINT_FALLBACK_COLOR = "#6a51a3"


def _rect(m: InterpretationModel, element_id: str, color: str) -> str:
    b = m.elements[element_id].bbox
    return (
        f'  <rect x="{b.x:g}" y="{b.y:g}" width="{b.w:g}" height="{b.h:g}" '
        f'fill="none" stroke="{color}" stroke-width="2">'
        f"<title>{escape(element_id)}</title></rect>\n"
    )


def _chord(m: InterpretationModel, left_id: str, right_id: str, color: str) -> str:
    bl = m.elements[left_id].bbox
    br = m.elements[right_id].bbox
    return (
        f'  <line x1="{bl.x + bl.w / 2:g}" y1="{bl.y + bl.h / 2:g}" '
        f'x2="{br.x + br.w / 2:g}" y2="{br.y + br.h / 2:g}" '
        f'stroke="{color}" stroke-width="1" opacity="0.7">'
        f"<title>{escape(left_id)} | {escape(right_id)}</title></line>\n"
    )


def _joints(m: InterpretationModel, element_id: str) -> str:
    e = m.elements[element_id]
    if e.pose is None:
        return ""
    out = []
    for name in sorted(e.pose.joints):
        kp = e.pose.joints[name]
        color = PART_COLORS.get(part_of(name) or "", JOINT_FALLBACK_COLOR)
        out.append(
            f'  <circle cx="{kp.point.x:g}" cy="{kp.point.y:g}" r="3" fill="{color}">'
            f"<title>{escape(element_id)}:{escape(name)}</title></circle>\n"
        )
    return "".join(out)


def render_overlay(m: InterpretationModel, image_ref: str | None = None) -> str:
    """Render the model to a standalone SVG document string."""
    w = m.axis.image_width
    h = m.axis.image_height
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:g} {h:g}" '
        f'width="{w:g}" height="{h:g}">\n'
    ]
    if image_ref is not None:
        parts.append(
            f'  <image href={quoteattr(image_ref)} x="0" y="0" '
            f'width="{w:g}" height="{h:g}"/>\n'
        )
    symmetric = set(symmetrical_elements(m))

    for p in m.pairs:
        color = SYMMETRIC_COLOR if (p.left_id, p.right_id) in symmetric else NON_SYMMETRIC_COLOR
        parts.append(_rect(m, p.left_id, color))
        parts.append(_rect(m, p.right_id, color))
        parts.append(_chord(m, p.left_id, p.right_id, color))
    for s in m.singles:
        color = SYMMETRIC_COLOR if (s.element_id,) in symmetric else NON_SYMMETRIC_COLOR
        parts.append(_rect(m, s.element_id, color))
    for element_id in m.unmatched:
        parts.append(_rect(m, element_id, UNMATCHED_COLOR))
    for element_id in sorted(m.elements):
        parts.append(_joints(m, element_id))
    parts.append(
        f'  <line x1="{m.axis.x:g}" y1="0" x2="{m.axis.x:g}" y2="{h:g}" '
        f'stroke="{AXIS_COLOR}" stroke-width="1.5" stroke-dasharray="8 5"/>\n'
    )
    parts.append("</svg>\n")
    return "".join(parts)


def write_overlay(m: InterpretationModel, path: str | Path, image_ref: str | None = None) -> None:
    Path(path).write_text(render_overlay(m, image_ref), encoding="utf-8")
