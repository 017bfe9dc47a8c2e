"""Brute-force reference implementations used only by the tests.

None of these import the package under test; each is the most literal
reading of the definition it checks.
"""

from fractions import Fraction
import math


def alpha_exact(depth, depth_of_hand, d_limit, u_limit):
    raw = 255 - Fraction(255) * (Fraction(depth) - Fraction(depth_of_hand) + Fraction(d_limit)) / (
        Fraction(d_limit) + Fraction(u_limit))
    value = math.trunc(raw)
    return min(max(value, 0), 255)


def boundary_bruteforce(bits):
    """Foreground pixels with a background 4-neighbour or on the image border."""
    h, w = len(bits), len(bits[0])
    out = set()
    for y in range(h):
        for x in range(w):
            if not bits[y][x]:
                continue
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nx, ny = x + dx, y + dy
                if not (0 <= nx < w and 0 <= ny < h) or not bits[ny][nx]:
                    out.add((x, y))
                    break
    return out


def majority3x3_bruteforce(bits):
    h, w = len(bits), len(bits[0])
    out = [[False] * w for _ in range(h)]
    for y in range(h):
        for x in range(w):
            n = 0
            for dy in (-1, 0, 1):
                for dx in (-1, 0, 1):
                    nx, ny = x + dx, y + dy
                    if 0 <= nx < w and 0 <= ny < h and bits[ny][nx]:
                        n += 1
            out[y][x] = n >= 5
    return out


def edit_distance(a, b):
    table = [[0] * (len(b) + 1) for _ in range(len(a) + 1)]
    for i in range(len(a) + 1):
        table[i][0] = i
    for j in range(len(b) + 1):
        table[0][j] = j
    for i in range(1, len(a) + 1):
        for j in range(1, len(b) + 1):
            table[i][j] = min(table[i - 1][j] + 1, table[i][j - 1] + 1,
                              table[i - 1][j - 1] + (a[i - 1] != b[j - 1]))
    return table[len(a)][len(b)]


def quantize_walk(samples, min_step):
    """Scalar re-statement of the direction quantizer."""
    names = ["E", "NE", "N", "NW", "W", "SW", "S", "SE"]
    out = []
    if not samples:
        return out
    anchor = samples[0][1:]
    for s in samples[1:]:
        p = s[1:]
        d = [p[k] - anchor[k] for k in range(3)]
        if math.sqrt(sum(v * v for v in d)) < min_step:
            continue
        if abs(d[2]) > max(abs(d[0]), abs(d[1])):
            sym = "PUSH" if d[2] < 0 else "PULL"
        else:
            deg = math.degrees(math.atan2(-d[1], d[0])) % 360.0
            sym = names[int(((deg + 22.5) % 360.0) // 45.0)]
        if not out or out[-1] != sym:
            out.append(sym)
        anchor = p
    return out


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def point_in_triangle(p, a, b, c):
    """Closed point-in-triangle test via signs of the three cross products."""
    d1, d2, d3 = _cross(a, b, p), _cross(b, c, p), _cross(c, a, p)
    if _cross(a, b, c) == 0:
        return False
    has_neg = d1 < 0 or d2 < 0 or d3 < 0
    has_pos = d1 > 0 or d2 > 0 or d3 > 0
    return not (has_neg and has_pos)


def coverage_bruteforce(triangles, width, height):
    """Pixels (col, row) whose centre lies in any triangle; buffer coordinates, y up."""
    covered = set()
    for a, b, c in triangles:
        for row in range(height):
            for col in range(width):
                if point_in_triangle((col + 0.5, row + 0.5), a, b, c):
                    covered.add((col, row))
    return covered


def parse_ppm(data):
    """Minimal binary PPM reader: returns (width, height, rows of (r, g, b))."""
    fields, pos = [], 0
    while len(fields) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    pos += 1
    assert fields[0] == b"P6" and fields[3] == b"255"
    w, h = int(fields[1]), int(fields[2])
    px = data[pos:]
    assert len(px) == w * h * 3
    return w, h, [[tuple(px[(y * w + x) * 3:(y * w + x) * 3 + 3]) for x in range(w)] for y in range(h)]
