from __future__ import annotations

from .rule import BLACK, WHITE, DegenerateRule, SubdivisionRule, build_rule


# Pillow coordinates are doubled so that vertices, edge midpoints and tile
# centers all sit on integer points: the pillow is the quotient of the plane
# by z -> ±z + (px, 0)·Z + (0, py)·Z, and one fundamental strip is
# [0, px) x [0, py/2].
ZERO_VERTICES = {(0, 0): 0, (2, 0): 1, (2, 2): 2, (0, 2): 3}
ZERO_EDGES = {(1, 0): 0, (2, 1): 1, (1, 2): 2, (0, 1): 3}
ZERO_TILES = {(1, 1): WHITE, (3, 1): BLACK}


def _canon(x: int, y: int, px: int, py: int) -> tuple[int, int]:
    x %= px
    y %= py
    if y > py // 2:
        x, y = (-x) % px, py - y
    if y == 0 or y == py // 2:
        x = min(x, (-x) % px)
    return x, y


def _pillow_rule(px: int, py: int, d: int, image) -> SubdivisionRule:
    """Rule of a pillow map given on the level-1 pillow of period px x py.

    Level-1 tiles are the 2 x 2 grid squares; ``image`` sends a point of the
    level-1 pillow to the level-0 pillow of period 4 x 4.
    """

    def level1(x, y):
        return _canon(x, y, px, py)

    labels = {}
    edges = {}
    tiles = []

    def vertex(x, y):
        key = ("v",) + level1(x, y)
        if key not in labels:
            labels[key] = ZERO_VERTICES[image(x, y)]
        return key

    def edge(p, q):
        mx, my = (p[0] + q[0]) // 2, (p[1] + q[1]) // 2
        key = ("e",) + level1(mx, my)
        if key not in edges:
            u, v = vertex(*p), vertex(*q)
            target = ZERO_EDGES[image(mx, my)]
            edges[key] = ((u, v), target, labels[u] != target)
        return key

    w, h = px // 2, py // 2
    for j in range(py // 4):
        for i in range(w):
            cx, cy = 2 * i + 1, 2 * j + 1
            corners = [(cx - 1, cy - 1), (cx + 1, cy - 1), (cx + 1, cy + 1), (cx - 1, cy + 1)]
            color = ZERO_TILES[image(cx, cy)]
            location = WHITE if cx < w else BLACK
            tv = [vertex(*p) for p in corners]
            te = [edge(corners[k], corners[(k + 1) % 4]) for k in range(4)]
            tiles.append((color, location, tv, te))

    def chain(points):
        return (
            [vertex(*p) for p in points],
            [edge(points[k], points[k + 1]) for k in range(len(points) - 1)],
        )

    curve = [
        chain([(2 * k, 0) for k in range(w // 2 + 1)]),
        chain([(w, 2 * k) for k in range(h // 2 + 1)]),
        chain([(w - 2 * k, h) for k in range(w // 2 + 1)]),
        chain([(0, h - 2 * k) for k in range(h // 2 + 1)]),
    ]
    return build_rule(4, d, labels, edges, tiles, curve)


def generate_checkerboard(a: int, b: int) -> SubdivisionRule:
    """Lattès-type rule: each 0-square is cut into an a x b checkerboard grid.

    The map is z -> (a·x, b·y) on the pillow, so d = a·b and m = 4.
    """
    if a < 1 or b < 1 or a * b < 2:
        raise DegenerateRule(f"checkerboard({a}, {b}) has degree {a * b} < 2")
    return _pillow_rule(4 * a, 4 * b, a * b, lambda x, y: _canon(x, y, 4, 4))


def generate_quarter_turn(a: int, b: int) -> SubdivisionRule:
    """Lattès-type rule of z -> (-a·y, b·x) on the pillow, d = a·b.

    Level-1 tiles are 1/b x 1/a rectangles. The second iterate is the
    a·b checkerboard map, so for a != b the tiles only stop joining
    opposite sides at level 2.
    """
    if a < 1 or b < 1 or a * b < 2:
        raise DegenerateRule(f"quarter_turn({a}, {b}) has degree {a * b} < 2")
    return _pillow_rule(4 * b, 4 * a, a * b, lambda x, y: _canon(-y, x, 4, 4))


def generate_barycentric() -> SubdivisionRule:
    """m = 3 rule: both 0-triangles are barycentrically subdivided (d = 6).

    Corners map to 0-vertex 0, edge midpoints to 0-vertex 1 and face centers
    to 0-vertex 2. Corner 0-vertex 0 is a fixed critical point.
    """
    labels = {"A": 0, "B": 0, "C": 0, "mAB": 1, "mBC": 1, "mCA": 1, "cW": 2, "cB": 2}
    edges = {}

    def edge(u, v):
        key = frozenset((u, v))
        if key not in edges:
            lu, lv = labels[u], labels[v]
            target = lu if (lv - lu) % 3 == 1 else lv
            edges[key] = ((u, v), target, lu != target)
        return key

    def tile(vertices, location):
        # a white triangle reads labels 0, 1, 2 counterclockwise
        first = [labels[v] for v in vertices]
        color = WHITE if (first[1] - first[0]) % 3 == 1 else BLACK
        te = [edge(vertices[k], vertices[(k + 1) % 3]) for k in range(3)]
        return (color, location, list(vertices), te)

    white_side = ["A", "mAB", "B", "mBC", "C", "mCA"]
    black_side = ["A", "mCA", "C", "mBC", "B", "mAB"]
    tiles = []
    for ring, center, location in (
        (white_side, "cW", WHITE),
        (black_side, "cB", BLACK),
    ):
        for k in range(6):
            tiles.append(tile((ring[k], ring[(k + 1) % 6], center), location))

    def chain(points):
        return (
            list(points),
            [edge(points[k], points[k + 1]) for k in range(len(points) - 1)],
        )

    curve = [
        chain(["A", "mAB", "B"]),
        chain(["B", "mBC", "C"]),
        chain(["C", "mCA", "A"]),
    ]
    return build_rule(3, 6, labels, edges, tiles, curve)


def generate_basilica() -> SubdivisionRule:
    """z -> z^2 - 1 with C the extended real line, m = 3, d = 2.

    0-vertices are -1, 0 and infinity; f^-1(C) adds the imaginary axis.
    The critical point 0 lies on the 2-cycle 0 -> -1 -> 0 and infinity is
    a fixed critical point, so the map is not expanding.
    """
    labels = {"-1": 1, "0": 0, "1": 1, "inf": 2}
    edges = {
        "(-1,0)": (("-1", "0"), 0, True),
        "(0,1)": (("0", "1"), 0, False),
        "(1,inf)": (("1", "inf"), 1, False),
        "(inf,-1)": (("inf", "-1"), 1, True),
        "(0,+i)": (("0", "inf"), 2, True),
        "(0,-i)": (("0", "inf"), 2, True),
    }
    # the four quadrants, counterclockwise from the first
    tiles = [
        (WHITE, WHITE, ["0", "1", "inf"], ["(0,1)", "(1,inf)", "(0,+i)"]),
        (BLACK, WHITE, ["0", "inf", "-1"], ["(0,+i)", "(inf,-1)", "(-1,0)"]),
        (WHITE, BLACK, ["0", "-1", "inf"], ["(-1,0)", "(inf,-1)", "(0,-i)"]),
        (BLACK, BLACK, ["0", "inf", "1"], ["(0,-i)", "(1,inf)", "(0,1)"]),
    ]
    curve = [
        (["-1", "0"], ["(-1,0)"]),
        (["0", "1", "inf"], ["(0,1)", "(1,inf)"]),
        (["inf", "-1"], ["(inf,-1)"]),
    ]
    return build_rule(3, 2, labels, edges, tiles, curve)
