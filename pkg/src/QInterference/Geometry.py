import logging
import math
import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

RHS_TOL = 1e-9
COEF_SNAP = 1e-12
CONTAINS_TOL = 1e-9


class HalfspaceSystem:
    def __init__(self, var_names, rows=()):
        """Rate polytope {r >= 0 : a . r <= b for every row (a, b)}.
        var_names orders the coefficient vectors; nonnegativity of every variable is implicit and never stored as
        a row. rows is any iterable of (coefficients, rhs) with coefficients either a vector or a dict by name."""
        self.var_names = list(var_names)
        if len(set(self.var_names)) != len(self.var_names):
            raise ValueError("Variable names must be unique, got " + str(self.var_names))
        n = len(self.var_names)
        a_rows = []
        b_rows = []
        for coeffs, rhs in rows:
            a_rows.append(self._vector(coeffs))
            b_rows.append(float(rhs))
        self.A = np.array(a_rows, dtype=float).reshape(len(a_rows), n)
        self.b = np.array(b_rows, dtype=float)
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.b))):
            raise ValueError("Halfspace rows must be finite")

    def _vector(self, coeffs):
        if isinstance(coeffs, dict):
            vec = np.zeros(len(self.var_names))
            for name, c in coeffs.items():
                vec[self.index_of(name)] += c
            return vec
        vec = np.array(coeffs, dtype=float).ravel()
        if vec.size != len(self.var_names):
            raise ValueError("Row has " + str(vec.size) + " coefficients for " + str(len(self.var_names)) + " variables")
        return vec

    def index_of(self, name):
        try:
            return self.var_names.index(name)
        except ValueError:
            raise ValueError("Unknown variable " + str(name) + " (variables are " + str(self.var_names) + ")")

    @property
    def rows(self):
        return [(tuple(float(c) for c in a), float(b)) for a, b in zip(self.A, self.b)]

    def __len__(self):
        return len(self.b)

    def add_row(self, coeffs, rhs):
        return HalfspaceSystem(self.var_names, self.rows + [(self._vector(coeffs), rhs)])

    def contains(self, point, tol=CONTAINS_TOL):
        p = self._vector(point)
        if np.any(p < -tol):
            return False
        return bool(np.all(self.A @ p <= self.b + tol))

    def substitute(self, var, expr):
        """Replace var by the linear expression expr (a dict {name: coefficient}), e.g. S1 = R1 - T1.
        Names in expr that are new become variables appended at the end. Since var was nonnegative, the row
        -expr <= 0 is added."""
        k = self.index_of(var)
        names = [v for v in self.var_names if v != var]
        names = names + [v for v in expr if v not in names]
        rows = []
        for a, b in zip(self.A, self.b):
            coeffs = {v: a[i] for i, v in enumerate(self.var_names) if i != k}
            for v, c in expr.items():
                coeffs[v] = coeffs.get(v, 0.0) + a[k] * c
            rows.append((coeffs, b))
        rows.append(({v: -c for v, c in expr.items()}, 0.0))
        return HalfspaceSystem(names, rows)

    def to_frame(self):
        frame = pd.DataFrame(self.A, columns=self.var_names)
        frame["rhs"] = self.b
        return frame

    def to_dict(self):
        return {"vars": list(self.var_names), "rows": [{"a": list(a), "b": b} for a, b in self.rows]}

    def __repr__(self):
        return "HalfspaceSystem(" + str(self.var_names) + ", " + str(len(self)) + " rows)"


def fm_eliminate(sys, var):
    """Fourier-Motzkin elimination of var (with its implicit var >= 0) followed by LP-free pruning of redundant
    rows. The result describes exactly the projection of sys onto the remaining variables."""
    k = sys.index_of(var)
    A = np.vstack([sys.A, -np.eye(len(sys.var_names))[k]])
    b = np.append(sys.b, 0.0)
    pos = np.nonzero(A[:, k] > COEF_SNAP)[0]
    neg = np.nonzero(A[:, k] < -COEF_SNAP)[0]
    zero = np.nonzero(np.abs(A[:, k]) <= COEF_SNAP)[0]

    new_a = [A[i] for i in zero]
    new_b = [b[i] for i in zero]
    for i in pos:
        for j in neg:
            wi = 1.0 / A[i, k]
            wj = -1.0 / A[j, k]
            new_a.append(wi * A[i] + wj * A[j])
            new_b.append(wi * b[i] + wj * b[j])
    keep = [c for c in range(len(sys.var_names)) if c != k]
    names = [sys.var_names[c] for c in keep]
    if len(pos) == 0:
        # var only has lower bounds, so it can always be raised: the other rows are the projection
        return HalfspaceSystem(names, zip(A[zero][:, keep], b[zero]))
    A_out = np.array(new_a)[:, keep]
    out = prune(A_out, np.array(new_b))
    logger.debug("Eliminated %s: %d pos x %d neg, %d zero rows -> %d rows", var, len(pos), len(neg), len(zero),
                 len(out[1]))
    return HalfspaceSystem(names, zip(out[0], out[1]))


def prune(A, b, tol=RHS_TOL):
    """Drops rows implied by the others and by nonnegativity, without solving any LP.
    A row is dropped when it is trivial (0 <= b with b >= 0), implied by r >= 0, dominated by another row after
    normalization (a_i <= a_j componentwise and b_j <= b_i), or bounded by the box the single-variable rows
    define. Returns (A, b) with rows in lexicographic order."""
    A = np.where(np.abs(A) < COEF_SNAP, 0.0, np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float)
    scale = np.max(np.abs(A), axis=1) if A.size else np.zeros(len(b))

    rows_a = []
    rows_b = []
    infeasible = False
    for a, rhs, s in zip(A, b, scale):
        if s == 0.0:
            if rhs < -tol:
                infeasible = True
            continue
        a = a / s
        rhs = rhs / s
        if np.all(a <= 0) and rhs >= -tol:
            continue
        rows_a.append(a)
        rows_b.append(rhs)
    if infeasible:
        zero = np.zeros((1, A.shape[1]))
        return zero, np.array([-1.0])
    if not rows_a:
        return np.zeros((0, A.shape[1])), np.zeros(0)
    A = np.array(rows_a)
    b = np.array(rows_b)

    order = np.lexsort((b,) + tuple(A.T[::-1]))
    A = A[order]
    b = b[order]

    n_rows, n_vars = A.shape
    keep = np.ones(n_rows, dtype=bool)
    for i in range(n_rows):
        for j in range(n_rows):
            if i == j or not keep[j]:
                continue
            if np.all(A[i] <= A[j] + COEF_SNAP) and b[j] <= b[i] + tol:
                identical = np.all(np.abs(A[i] - A[j]) <= COEF_SNAP) and abs(b[i] - b[j]) <= tol
                if not identical or j < i:
                    keep[i] = False
                    break
    A = A[keep]
    b = b[keep]

    upper = np.full(n_vars, np.inf)
    for a, rhs in zip(A, b):
        support = np.nonzero(a > 0)[0]
        if len(support) == 1 and np.all(a[a != 0] > 0):
            v = support[0]
            upper[v] = min(upper[v], rhs / a[v])
    keep = np.ones(len(b), dtype=bool)
    for i, (a, rhs) in enumerate(zip(A, b)):
        positive = a > 0
        if np.count_nonzero(a) == 1 and np.count_nonzero(positive) == 1:
            continue
        if np.all(np.isfinite(upper[positive])):
            if float(np.dot(a[positive], upper[positive])) <= rhs - tol:
                keep[i] = False
    return A[keep], b[keep]


class RateRegion2D:
    def __init__(self, vertices, metadata=None):
        """Convex, downward-closed polygon of rate pairs (R1, R2), vertices counterclockwise from the origin.
        An empty vertex list is the empty region. Build regions with from_points or to_region2d rather than by
        hand; the constructor trusts its input."""
        self.vertices = [(float(x), float(y)) for x, y in vertices]
        self.metadata = {} if metadata is None else dict(metadata)

    @staticmethod
    def from_points(points, metadata=None):
        """Downward closure of the convex hull of points (coded time-sharing plus resource wasting)."""
        pts = []
        for x, y in points:
            if x < -CONTAINS_TOL or y < -CONTAINS_TOL:
                raise ValueError("Rate pair (" + str(x) + ", " + str(y) + ") is negative")
            x = max(float(x), 0.0)
            y = max(float(y), 0.0)
            pts.extend([(x, y), (x, 0.0), (0.0, y)])
        if not pts:
            return RateRegion2D([], metadata)
        pts.append((0.0, 0.0))
        return RateRegion2D(convex_hull(pts), metadata)

    def is_empty(self):
        return not self.vertices

    def frontier(self):
        """Upper-right boundary from (0, max R2) to (max R1, 0), increasing in R1."""
        if len(self.vertices) <= 1:
            return list(self.vertices)
        return list(reversed(self.vertices[1:]))

    def max_r1(self):
        return max((v[0] for v in self.vertices), default=0.0)

    def max_r2(self):
        return max((v[1] for v in self.vertices), default=0.0)

    def max_sum(self):
        return max((v[0] + v[1] for v in self.vertices), default=0.0)

    def support(self, direction):
        """max over the region of direction . r; -inf for the empty region."""
        return max((direction[0] * v[0] + direction[1] * v[1] for v in self.vertices), default=-math.inf)

    def distance_to(self, point):
        """Euclidean distance from point to the region (0 inside)."""
        if self.is_empty():
            return math.inf
        if len(self.vertices) >= 3 and self.contains(point, tol=0.0):
            return 0.0
        if len(self.vertices) == 1:
            return math.dist(point, self.vertices[0])
        n = len(self.vertices)
        edges = [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]
        return min(_segment_distance(point, p, q) for p, q in edges)

    def contains(self, point, tol=CONTAINS_TOL):
        if self.is_empty():
            return False
        if len(self.vertices) < 3:
            return self.distance_to(point) <= tol
        n = len(self.vertices)
        for i in range(n):
            p = self.vertices[i]
            q = self.vertices[(i + 1) % n]
            length = math.dist(p, q)
            if _cross(p, q, point) / length < -tol:
                return False
        return True

    def halfspaces(self):
        """The region as a HalfspaceSystem over R1, R2."""
        if self.is_empty():
            return HalfspaceSystem(["R1", "R2"], [((0.0, 0.0), -1.0)])
        rows = [((1.0, 0.0), self.max_r1()), ((0.0, 1.0), self.max_r2())]
        n = len(self.vertices)
        if n >= 3:
            for i in range(n):
                p = self.vertices[i]
                q = self.vertices[(i + 1) % n]
                normal = (q[1] - p[1], p[0] - q[0])
                length = math.hypot(normal[0], normal[1])
                normal = (normal[0] / length, normal[1] / length)
                rows.append((normal, normal[0] * p[0] + normal[1] * p[1]))
        return HalfspaceSystem(["R1", "R2"], rows)

    def vertex_distance(self, other):
        """Hausdorff distance between two regions (attained at vertices for convex polygons)."""
        if self.is_empty() or other.is_empty():
            return 0.0 if self.is_empty() and other.is_empty() else math.inf
        return max(max(other.distance_to(v) for v in self.vertices),
                   max(self.distance_to(v) for v in other.vertices))

    def to_frame(self):
        return pd.DataFrame(self.frontier(), columns=["R1", "R2"])

    def to_dict(self):
        return {"polygon": [list(v) for v in self.vertices], "frontier": [list(v) for v in self.frontier()],
                "metadata": self.metadata}

    def __repr__(self):
        return "RateRegion2D(" + str(len(self.vertices)) + " vertices, max sum " + repr(self.max_sum()) + ")"


def _cross(p, q, r):
    return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])


def _segment_distance(point, p, q):
    dx = q[0] - p[0]
    dy = q[1] - p[1]
    length2 = dx * dx + dy * dy
    if length2 == 0.0:
        return math.dist(point, p)
    t = ((point[0] - p[0]) * dx + (point[1] - p[1]) * dy) / length2
    t = min(1.0, max(0.0, t))
    return math.dist(point, (p[0] + t * dx, p[1] + t * dy))


def convex_hull(points):
    """Monotone chain hull, counterclockwise from the lowest-leftmost point. Collinear points are dropped."""
    pts = sorted(set((round(x, 15), round(y, 15)) for x, y in points))
    if len(pts) <= 1:
        return pts
    scale = max(1.0, max(max(abs(x), abs(y)) for x, y in pts))
    eps = 1e-12 * scale * scale
    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= eps:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= eps:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull if hull else pts[:1]


def to_region2d(sys, metadata=None):
    """Vertex enumeration of a two-variable system by pairwise intersection of its rows and the axes, followed by
    a feasibility filter and downward closure. Raises ValueError for an unbounded system; an infeasible system
    gives the empty region."""
    if len(sys.var_names) != 2:
        raise ValueError("to_region2d needs exactly two variables, got " + str(sys.var_names))
    A = sys.A
    b = sys.b
    for d in _recession_candidates(A):
        if np.all(A @ d <= COEF_SNAP):
            raise ValueError("Rate region is unbounded along direction " + str(tuple(float(x) for x in d)))

    lines_a = list(A) + [np.array([-1.0, 0.0]), np.array([0.0, -1.0])]
    lines_b = list(b) + [0.0, 0.0]
    points = []
    for i in range(len(lines_a)):
        for j in range(i + 1, len(lines_a)):
            m = np.array([lines_a[i], lines_a[j]])
            if abs(np.linalg.det(m)) <= COEF_SNAP:
                continue
            p = np.linalg.solve(m, np.array([lines_b[i], lines_b[j]]))
            if sys.contains(p, tol=CONTAINS_TOL * max(1.0, float(np.max(np.abs(p))))):
                points.append((max(float(p[0]), 0.0), max(float(p[1]), 0.0)))
    if not points:
        if sys.contains([0.0, 0.0]):
            points.append((0.0, 0.0))
        else:
            return RateRegion2D([], metadata)
    return RateRegion2D.from_points(points, metadata)


def _recession_candidates(A):
    out = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    for a in A:
        if a[0] * a[1] < 0:
            d = np.array([abs(a[1]), abs(a[0])])
            out.append(d / np.max(d))
    return out


def intersect(a, b, metadata=None):
    if a.is_empty() or b.is_empty():
        return RateRegion2D([], metadata)
    ha = a.halfspaces()
    hb = b.halfspaces()
    return to_region2d(HalfspaceSystem(["R1", "R2"], ha.rows + hb.rows), metadata)


def union_hull(regions, metadata=None):
    """Convex hull of the union: the time-sharing closure of a family of regions."""
    points = [v for r in regions for v in r.vertices]
    return RateRegion2D.from_points(points, metadata)


def contains(region, point, tol=CONTAINS_TOL):
    return region.contains(point, tol)


def is_subset(inner, outer, tol=CONTAINS_TOL):
    if inner.is_empty():
        return True
    return all(outer.contains(v, tol) for v in inner.vertices)
