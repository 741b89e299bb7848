"""SVG drawing of a scenario and, optionally, a solution."""

from __future__ import annotations

from xml.sax.saxutils import escape

OBSTACLE = "#9e9e9e"
ROBOT_A = "#d62728"
ROBOT_B = "#1f77b4"
CABLE_START = "#2ca02c"
CABLE_END = "#8b0000"


def _bounds(points) -> tuple[float, float, float, float]:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    w = max(x1 - x0, 1e-6)
    h = max(y1 - y0, 1e-6)
    return x0 - 0.05 * w, y0 - 0.05 * h, w * 1.1, h * 1.1


def render_svg(s, sol=None, width: int = 800) -> str:
    pts = list(s.points())
    if sol is not None:
        pts += list(sol.pi_a) + list(sol.pi_b) + list(sol.final_cable.verts)
    x0, y0, w, h = _bounds(pts)
    height = max(1, round(width * h / w))
    unit = w / width  # one pixel in world units

    def flip(p) -> tuple[float, float]:
        # svg y grows downward; mirror so the drawing reads like a plot
        return p[0], 2 * y0 + h - p[1]

    def xy(p) -> str:
        x, y = flip(p)
        return f"{x:.6g},{y:.6g}"

    def circle(p, r, attrs) -> str:
        x, y = flip(p)
        return f'<circle cx="{x:.6g}" cy="{y:.6g}" r="{r * unit:.4g}" {attrs}/>'

    def line(path, color, sw, dash=False) -> str:
        extra = f' stroke-dasharray="{6 * unit:.4g},{4 * unit:.4g}"' if dash else ""
        return (f'<polyline points="{" ".join(xy(p) for p in path)}" fill="none" '
                f'stroke="{color}" stroke-width="{sw * unit:.4g}"{extra}/>')

    def dots(path, color, r) -> list[str]:
        return [circle(p, r, f'fill="{color}"') for p in path]

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="{x0:.6g} {y0:.6g} {w:.6g} {h:.6g}">']
    if s.name:
        out.append(f"<title>{escape(s.name)}</title>")
    out.append(f'<rect x="{x0:.6g}" y="{y0:.6g}" width="{w:.6g}" height="{h:.6g}" fill="white"/>')
    for poly in s.obstacles:
        out.append(f'<polygon points="{" ".join(xy(p) for p in poly.vertices)}" '
                   f'fill="{OBSTACLE}" stroke="#616161" stroke-width="{unit:.4g}"/>')
    out.append(line(s.c0, CABLE_START, 2.5))
    if sol is not None:
        out.append(line(sol.final_cable.verts, CABLE_END, 2.5))
        out.append(line(sol.pi_a, ROBOT_A, 2, dash=True))
        out.append(line(sol.pi_b, ROBOT_B, 2, dash=True))
        out.extend(dots(sol.pi_a, ROBOT_A, 3))
        out.extend(dots(sol.pi_b, ROBOT_B, 3))
    for p, color in ((s.r_a, ROBOT_A), (s.r_b, ROBOT_B)):
        out.extend(dots([p], color, 6))
    for p, color in ((s.d_a, ROBOT_A), (s.d_b, ROBOT_B)):
        out.append(circle(p, 6, f'fill="none" stroke="{color}" stroke-width="{2 * unit:.4g}"'))
    out.append("</svg>")
    return "\n".join(out) + "\n"
