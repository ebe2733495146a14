"""Reduced point configurations in the plane.

Genericity predicates are determinant/rank computations; ideal slices are
kernels of evaluation matrices; minimal free resolutions are computed degree
by degree (new generators are a complement of the shifted previous slice,
syzygies likewise), with the Hilbert function of the resolved ideal checked
against the slices at every degree up to the cap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .forms import (Form, ParseError, divides, monomial_index, monomials,
                    mult_map, space_dim)
from .linalg import IncrementalSpan, QMatrix, from_columns
from .presentation import Presentation


class PointError(ValueError):
    pass


class GenericityError(PointError):
    """A claim's genericity precondition fails; names the predicate."""


def _normalize(coords):
    coords = tuple(Fraction(c) for c in coords)
    if len(coords) != 3:
        raise PointError("points need three coordinates")
    last = None
    for c in reversed(coords):
        if c != 0:
            last = c
            break
    if last is None:
        raise PointError("the zero vector is not a projective point")
    return tuple(c / last for c in coords)


class PointConfig:
    """Pairwise distinct projective points, last nonzero coordinate scaled to 1."""

    __slots__ = ("points",)

    def __init__(self, points):
        pts = tuple(_normalize(p) for p in points)
        if len(set(pts)) != len(pts):
            raise PointError("duplicate points in configuration")
        self.points = pts

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return isinstance(other, PointConfig) and self.points == other.points

    @classmethod
    def from_json(cls, obj) -> "PointConfig":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            pts = obj["points"]
        except (KeyError, TypeError) as exc:
            raise ParseError("point JSON needs a 'points' list") from exc
        return cls([[Fraction(str(c)) for c in p] for p in pts])

    def to_json(self) -> dict:
        return {"points": [[str(c) for c in p] for p in self.points]}

    def subset(self, idxs) -> "PointConfig":
        return PointConfig([self.points[i] for i in idxs])


def colinear_triple_exists(cfg: PointConfig) -> bool:
    if len(cfg) < 3:
        return False
    for tri in combinations(range(len(cfg)), 3):
        m = QMatrix.from_rows([list(cfg.points[i]) for i in tri])
        if m.det() == 0:
            return True
    return False


def colinear_subset_exists(cfg: PointConfig, k: int) -> bool:
    """True iff some k points lie on a line (coordinate rank at most 2)."""
    if len(cfg) < k:
        return False
    for sub in combinations(range(len(cfg)), k):
        m = QMatrix.from_rows([list(cfg.points[i]) for i in sub])
        if m.rank() <= 2:
            return True
    return False


def evaluation_matrix(cfg: PointConfig, t: int) -> QMatrix:
    """Rows are the degree-t monomials evaluated at each point."""
    rows = []
    for (x, y, z) in cfg.points:
        rows.append([x**a * y**b * z**c for (a, b, c) in monomials(t)])
    return QMatrix(len(cfg), space_dim(t), rows)


def contained_in_curve_of_degree(cfg: PointConfig, k: int) -> bool:
    if k < 1:
        raise PointError("curve degree must be positive")
    return evaluation_matrix(cfg, k).rank() < space_dim(k)


def ideal_slice(cfg: PointConfig, t: int):
    """Basis of the degree-t forms vanishing at every point."""
    if t < 0:
        return []
    return [Form(t, v) for v in evaluation_matrix(cfg, t).kernel_basis()]


def subset_on_curve_exists(cfg: PointConfig, size: int, degree: int) -> bool:
    if len(cfg) < size:
        return False
    return any(contained_in_curve_of_degree(cfg.subset(sub), degree)
               for sub in combinations(range(len(cfg)), size))


# ---------------------------------------------------------------------------
# minimal free resolutions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BettiShape:
    generators: tuple
    syzygies: tuple

    def to_json(self):
        return {"gens": list(self.generators), "syz": list(self.syzygies)}


def _complement_basis(sub_vectors, all_vectors, dim, rng=None):
    """Members of all_vectors extending span(sub_vectors); optionally shuffled
    to exercise independence of the chosen complement."""
    order = list(range(len(all_vectors)))
    if rng is not None:
        rng.shuffle(order)
    span = IncrementalSpan(dim)
    for v in sub_vectors:
        span.insert(v)
    chosen = []
    for idx in order:
        if span.insert(all_vectors[idx]):
            chosen.append(all_vectors[idx])
    return chosen


def minimal_resolution(cfg: PointConfig, degree_cap: int = 8, rng=None) -> BettiShape:
    """Generator and syzygy degrees of the minimal free resolution of the
    point ideal.  Errors out if the cap truncates the computation."""
    if len(cfg) > 15:
        raise PointError("configurations above 15 points exceed the degree cap")
    gens = []            # (degree, Form)
    slice_dims = {}
    prev_slice = []
    for t in range(degree_cap + 1):
        cur = ideal_slice(cfg, t)
        slice_dims[t] = len(cur)
        shifted = []
        for f in prev_slice:
            for var in (Form.monomial(1, 0, 0), Form.monomial(0, 1, 0), Form.monomial(0, 0, 1)):
                shifted.append((f * var).coeffs)
        new = _complement_basis(shifted, [f.coeffs for f in cur], space_dim(t), rng)
        gens.extend((t, Form(t, v)) for v in new)
        prev_slice = cur
    if gens and gens[-1][0] >= degree_cap:
        raise PointError("degree cap %d reached with unresolved generators" % degree_cap)

    gen_degrees = [d for d, _ in gens]
    syz = []             # (degree, coefficient vector over the generator summands)

    def relation_columns(t):
        cols = []
        for d, g in gens:
            for (a, b, c) in monomials(t - d):
                cols.append((g * Form.monomial(a, b, c)).coeffs)
        return cols

    prev_basis = []
    for t in range(degree_cap + 1):
        length = sum(space_dim(t - d) for d in gen_degrees)
        # the generators span every slice by construction, so the relation
        # space dimension is forced by counting
        forced = length - slice_dims[t]
        if forced == 0:
            prev_basis = []
            continue
        span = IncrementalSpan(length)
        for vec in prev_basis:
            for var in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
                span.insert(_shift_syzygy(vec, gen_degrees, t - 1, var))
        if span.rank == forced:
            # no new syzygies: the shifted span is the whole relation space
            prev_basis = [row for _, row in span.rows]
            continue
        cols = relation_columns(t)
        kernel = from_columns(cols, space_dim(t)).kernel_basis()
        if len(kernel) != forced:
            raise PointError("relation space dimension %d does not match the "
                             "forced count %d at degree %d" % (len(kernel), forced, t))
        new = _complement_basis([row for _, row in span.rows], kernel, length, rng)
        syz.extend((t, v) for v in new)
        prev_basis = kernel

    syz_degrees = [d for d, _ in syz]
    if syz_degrees and max(syz_degrees) >= degree_cap:
        raise PointError("degree cap %d reached with unresolved syzygies" % degree_cap)

    shape = BettiShape(tuple(sorted(gen_degrees)), tuple(sorted(syz_degrees)))
    _check_hilbert(cfg, shape, degree_cap, slice_dims)
    return shape


def _shift_syzygy(vec, gen_degrees, t, var):
    """Multiply a degree-t syzygy vector by a variable, re-indexed at t+1."""
    out = []
    pos = 0
    for d in gen_degrees:
        width_old = space_dim(t - d)
        width_new = space_dim(t + 1 - d)
        block = vec[pos:pos + width_old]
        pos += width_old
        newblock = [Fraction(0)] * width_new
        if width_old:
            idx_new = monomial_index(t + 1 - d)
            for mono, c in zip(monomials(t - d), block):
                if c:
                    m = (mono[0] + var[0], mono[1] + var[1], mono[2] + var[2])
                    newblock[idx_new[m]] += c
        out.extend(newblock)
    return out


def _check_hilbert(cfg: PointConfig, shape: BettiShape, cap: int, slice_dims=None):
    n = len(cfg)
    for t in range(cap + 1):
        if slice_dims is not None and t in slice_dims:
            expected = slice_dims[t]
        else:
            expected = space_dim(t) - evaluation_matrix(cfg, t).rank()
        from_shape = (sum(space_dim(t - a) for a in shape.generators)
                      - sum(space_dim(t - b) for b in shape.syzygies))
        if expected != from_shape:
            raise PointError(
                "resolution inconsistent with the ideal at degree %d (%d vs %d)"
                % (t, from_shape, expected))
    if len(shape.generators) != len(shape.syzygies) + 1:
        raise PointError("resolution is not of codimension-two shape")
    # tail check: the resolved module must eventually count exactly the points
    for t in (cap + 1, cap + 2, cap + 3):
        covolume = (space_dim(t) - sum(space_dim(t - a) for a in shape.generators)
                    + sum(space_dim(t - b) for b in shape.syzygies))
        if covolume != n:
            raise PointError(
                "resolution incomplete within the degree cap: "
                "the tail counts %d instead of %d points" % (covolume, n))


# ---------------------------------------------------------------------------
# named claims
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointClaim:
    size: int
    shape: BettiShape
    predicates: tuple   # (name, callable) pairs


def _pred_no_colinear(k):
    return ("no_%d_colinear" % k, lambda cfg: not colinear_subset_exists(cfg, k))


def _pred_colinear(k):
    return ("all_%d_colinear" % k, lambda cfg: QMatrix.from_rows(
        [list(p) for p in cfg.points]).rank() <= 2)


CLAIMS = {
    "len8_general": PointClaim(
        8, BettiShape((3, 3, 4), (5, 5)),
        (_pred_no_colinear(4),
         ("no_7_on_conic", lambda cfg: not subset_on_curve_exists(cfg, 7, 2)))),
    "len5_general": PointClaim(
        5, BettiShape((2, 3, 3), (4, 4)),
        (_pred_no_colinear(3),)),
    "len7_no_conic": PointClaim(
        7, BettiShape((3, 3, 3), (4, 5)),
        (("not_on_conic", lambda cfg: not contained_in_curve_of_degree(cfg, 2)),
         _pred_no_colinear(4))),
    "len9_unique_cubic": PointClaim(
        9, BettiShape((3, 4, 4, 4), (5, 5, 5)),
        (("unique_cubic", lambda cfg: len(ideal_slice(cfg, 3)) == 1),)),
    "len1": PointClaim(1, BettiShape((1, 1), (2,)), ()),
    "len2": PointClaim(2, BettiShape((1, 2), (3,)), ()),
    "len3_general": PointClaim(
        3, BettiShape((2, 2, 2), (3, 3)),
        (("not_colinear", lambda cfg: not colinear_triple_exists(cfg)),)),
    "len3_colinear": PointClaim(
        3, BettiShape((1, 3), (4,)),
        (("colinear", lambda cfg: colinear_triple_exists(cfg)),)),
}


@dataclass
class ClaimResult:
    matched: bool
    expected: BettiShape
    found: BettiShape

    def to_json(self):
        return {"match": self.matched,
                "expected": self.expected.to_json(),
                "found": self.found.to_json()}


def verify_point_claim(claim_id: str, cfg: PointConfig) -> ClaimResult:
    if claim_id not in CLAIMS:
        raise PointError("unknown claim %r" % claim_id)
    claim = CLAIMS[claim_id]
    if len(cfg) != claim.size:
        raise GenericityError("claim %s needs %d points, got %d"
                              % (claim_id, claim.size, len(cfg)))
    for name, pred in claim.predicates:
        if not pred(cfg):
            raise GenericityError("genericity predicate %r fails" % name)
    found = minimal_resolution(cfg)
    return ClaimResult(found == claim.shape, claim.shape, found)


# ---------------------------------------------------------------------------
# the two-points-on-a-sextic construction
# ---------------------------------------------------------------------------

def line_through(p, q) -> Form:
    kern = QMatrix.from_rows([list(p), list(q)]).kernel_basis()
    if len(kern) != 1:
        raise PointError("points do not span a unique line")
    return Form(1, kern[0])


def flag_pair_presentation(two_points: PointConfig, sextic: Form) -> Presentation:
    """Presentation O(-4)+O(-1) -> O+O(1) of the twisted ideal of two points
    inside the sextic curve through them; classifies to (1, X_5)."""
    if len(two_points) != 2:
        raise PointError("exactly two points required")
    if sextic.degree != 6 or sextic.is_zero():
        raise PointError("a nonzero sextic form is required")
    for pt in two_points.points:
        if sextic.evaluate(pt) != 0:
            raise PointError("sextic does not vanish at %s" % (pt,))
    ell = line_through(*two_points.points)
    conic = None
    for vec in evaluation_matrix(two_points, 2).kernel_basis():
        cand = Form(2, vec)
        if not divides(ell, cand):
            conic = cand
            break
    if conic is None:
        raise PointError("no conic through the points avoids the line")
    # solve  sextic = h * conic - g * line  for h (quartic), g (quintic)
    mq = mult_map(conic, 4)
    ml = mult_map(ell, 5)
    system = mq.hstack(QMatrix(ml.rows, ml.cols,
                               [[-x for x in row] for row in ml.data]))
    solution = system.solve(list(sextic.coeffs))
    if solution is None:
        raise PointError("sextic is not in the ideal of the two points")
    h = Form(4, solution[:space_dim(4)])
    g = Form(5, solution[space_dim(4):])
    return Presentation((-4, -1), (0, 1), [[h, ell], [g, conic]])
