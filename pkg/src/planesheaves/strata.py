"""The strata registry for multiplicity-6 moduli (chi = 0, 1, 2, 3).

Each registry row records a stratum: its cohomological conditions, the twist
shape of the presentations realizing it, the exact side conditions used as
generator filters, and the expected codimension inside the 37-dimensional
moduli space.  Classification authority is the cohomology profile; matrix
side conditions are enforced only where they are closed-form.

The classifier assumes its input is semistable: a non-semistable injective
presentation whose profile happens to sit in the registry is classified
silently.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from .forms import Form, form_gcd, divides, linearly_independent, mult_map, space_dim
from .kronecker import KroneckerModule, is_semistable
from .linalg import QMatrix
from .presentation import (CohomologyProfile, Presentation, PresentationError,
                           derive_seed, dual, hilbert, h0_omega, h0_twist,
                           h1_omega, h1_twist, is_injective, profile, twist)
from .stability import (BoundsQuery, bounds_check, minor_gcd_criterion,
                        pencil_block_criterion, two_by_two_criterion)

MODULI_DIM = 37   # r^2 + 1 for multiplicity 6


class StrataError(ValueError):
    pass


class ClassifyError(StrataError):
    pass


class GenerationError(StrataError):
    pass


@dataclass(frozen=True)
class StratumRow:
    chi: int
    id: str
    codim: int
    source: tuple
    target: tuple
    conditions: dict
    side_condition: str
    zero_cells: tuple
    quotient_kind: str
    dual_id: str | None
    stability_asserted: bool

    def condition_keys(self):
        return tuple(sorted(self.conditions))

    def matches(self, prof: CohomologyProfile) -> bool:
        values = {"h0_Fm1": prof.h0_Fm1, "h1_F": prof.h1_F,
                  "h0_omega": prof.h0_omega, "h1_F1": prof.h1_F1}
        return all(values[k] == v for k, v in self.conditions.items())


@dataclass(frozen=True)
class StratumLabel:
    chi: int
    id: str
    codim: int

    def to_json(self):
        return {"chi": self.chi, "stratum": self.id, "codim": self.codim}


def _load_registry():
    with resources.files("planesheaves.data").joinpath("strata_registry.json").open() as fh:
        raw = json.load(fh)
    rows = []
    for row in raw["rows"]:
        rows.append(StratumRow(
            chi=row["chi"], id=row["id"], codim=row["codim"],
            source=tuple(row["source"]), target=tuple(row["target"]),
            conditions=dict(row["conditions"]),
            side_condition=row["side_condition"],
            zero_cells=tuple(tuple(c) for c in row["zero_cells"]),
            quotient_kind=row["quotient_kind"],
            dual_id=row["dual_id"],
            stability_asserted=row["stability_asserted"],
        ))
    return tuple(rows)


REGISTRY = _load_registry()


def rows_for_chi(chi: int):
    return tuple(r for r in REGISTRY if r.chi == chi)


def get_row(chi: int, stratum_id: str) -> StratumRow:
    for r in REGISTRY:
        if r.chi == chi and r.id == stratum_id:
            return r
    raise StrataError("no registry row (chi=%d, %s)" % (chi, stratum_id))


# ---------------------------------------------------------------------------
# chi normalization
# ---------------------------------------------------------------------------

def normalize_chi(r: int, chi: int):
    """Canonical chi in {0,1,2,3} plus the twist/dualize recipe reaching it."""
    if r != 6:
        raise StrataError("only multiplicity 6 is in scope")
    recipe = []
    residue = chi % 6
    if residue > 3:
        recipe.append({"op": "dualize"})
        chi = -chi
        residue = chi % 6
    k = (residue - chi) // 6
    if k:
        recipe.append({"op": "twist", "k": k})
    return residue, recipe


def apply_recipe(P: Presentation, recipe) -> Presentation:
    for step in recipe:
        if step["op"] == "twist":
            P = twist(P, step["k"])
        elif step["op"] == "dualize":
            P = dual(P)
        else:
            raise StrataError("unknown recipe step %r" % step)
    return P


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------

def classify(P: Presentation, with_profile: bool = False):
    """Label a validated injective presentation by its cohomology profile.

    The input is assumed semistable; profiles outside the registry raise."""
    hd = hilbert(P)
    chi_bar, recipe = normalize_chi(hd.r, hd.chi)
    Q = apply_recipe(P, recipe)
    prof = profile(Q)
    matches = [row for row in rows_for_chi(chi_bar) if row.matches(prof)]
    if len(matches) != 1:
        raise ClassifyError(
            "profile not in table: chi=%d profile=%s" % (chi_bar, prof.as_tuple()))
    row = matches[0]
    label = StratumLabel(chi_bar, row.id, row.codim)
    if with_profile:
        return label, prof, recipe
    return label


# ---------------------------------------------------------------------------
# side conditions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SideResult:
    status: str            # "pass" | "fail" | "unknown"
    reason: str = ""


_PASS = SideResult("pass")
_ORBIT_UNKNOWN = SideResult("unknown", "orbit-form membership undecided")


def _block(P, rows, cols):
    return [[P.matrix[i][j] for j in cols] for i in rows]


def _check(flag: bool) -> SideResult:
    return _PASS if flag else SideResult("fail")


def _entries_independent(forms) -> bool:
    return linearly_independent([f for f in forms])


def _pencil_minors_independent(block) -> bool:
    """Maximal minors of a 3x2 or 2x3 block of linear forms."""
    if len(block) == 2:
        block = [[block[i][j] for i in range(2)] for j in range(3)]
    minors = []
    for skip in range(3):
        rows = [r for r in range(3) if r != skip]
        a, b = block[rows[0]]
        c, d = block[rows[1]]
        minors.append(a * d - b * c)
    return linearly_independent(minors)


def _kron_filter(block, budget=40, seed=0) -> SideResult:
    """Kronecker semistability as a side condition: exact where closed-form."""
    K = KroneckerModule(block)
    if K.p <= 1 or K.q <= 1 or (K.p, K.q) in ((2, 3), (3, 2)):
        verdict = is_semistable(K)
        return _check(verdict.kind == "semistable")
    verdict = is_semistable(K, budget=budget, seed=seed)
    if verdict.kind == "unstable":
        return SideResult("fail")
    return SideResult("unknown", "Kronecker semistability only semi-decided for this shape")


def _zero_cells_hold(P: Presentation, row: StratumRow) -> bool:
    return all(P.matrix[i][j].is_zero() for i, j in row.zero_cells)


def _claim_pencil_conditions(q1, q2, l11, l12, l21, l22) -> bool:
    det = l11 * l22 - l12 * l21
    if det.is_zero():
        return False
    m1 = q1 * l21 - q2 * l11
    m2 = q1 * l22 - q2 * l12
    if m1.is_zero() or m2.is_zero():
        return False
    x, y, z = Form.monomial(1, 0, 0), Form.monomial(0, 1, 0), Form.monomial(0, 0, 1)
    rows = [list((det * v).coeffs) for v in (x, y, z)]
    base_rank = QMatrix.from_rows(rows).rank()
    return QMatrix.from_rows(rows + [list(m1.coeffs), list(m2.coeffs)]).rank() == base_rank + 2


def _coprime(f, g) -> bool:
    if f.is_zero() or g.is_zero():
        return False
    return form_gcd(f, g).degree == 0


def _side_chi1_X0(P):
    return _kron_filter(_block(P, range(4), range(5)))

def _side_chi1_X2(P):
    l1, l2 = P.matrix[2][3], P.matrix[3][3]
    if l1.is_zero() or l2.is_zero() or not _entries_independent([l1, l2]):
        return SideResult("fail")
    return _check(_claim_pencil_conditions(
        P.matrix[0][0], P.matrix[1][0],
        P.matrix[0][1], P.matrix[0][2], P.matrix[1][1], P.matrix[1][2]))

def _side_chi1_X3(P):
    if not _entries_independent([P.matrix[0][0], P.matrix[0][1]]):
        return SideResult("fail")
    return _check(_pencil_minors_independent(_block(P, (1, 2, 3), (2, 3))))

def _side_chi1_X4(P):
    return _check(_coprime(P.matrix[0][0], P.matrix[0][1]))

def _side_chi1_X5(P):
    l = P.matrix[0][1]
    return _check(not l.is_zero() and not divides(l, P.matrix[1][1]))

def _side_chi2_X1(P):
    inner = _kron_filter(_block(P, (0, 1, 2), (0, 1, 2, 3)))
    if inner.status == "fail":
        return inner
    if not _entries_independent([P.matrix[3][4], P.matrix[4][4]]):
        return SideResult("fail")
    return inner

def _side_chi2_X3(P):
    f12 = P.matrix[0][1]
    if f12.is_zero() or divides(f12, P.matrix[0][0]):
        return SideResult("fail")
    return _check(_pencil_minors_independent(_block(P, (1, 2, 3), (2, 3))))

def _side_chi2_X5(P):
    if not _entries_independent([P.matrix[0][0], P.matrix[0][1]]):
        return SideResult("fail")
    f22 = P.matrix[1][2]
    return _check(not f22.is_zero() and not divides(f22, P.matrix[2][2]))

def _side_chi2_X6(P):
    return _check(_entries_independent([P.matrix[0][1], P.matrix[1][1]]))

def _side_chi3_X1(P):
    span1 = QMatrix.from_rows([list(P.matrix[0][j].coeffs) if not P.matrix[0][j].is_zero()
                               else [Fraction(0)] * 3 for j in range(3)])
    span2 = QMatrix.from_rows([list(P.matrix[i][3].coeffs) if not P.matrix[i][3].is_zero()
                               else [Fraction(0)] * 3 for i in (1, 2, 3)])
    if span1.rank() < 2 or span2.rank() < 2:
        return SideResult("fail")
    return _ORBIT_UNKNOWN

def _side_chi3_X2(P):
    if not _pencil_minors_independent(_block(P, (0, 1), (0, 1, 2))):
        return SideResult("fail")
    return _check(_pencil_minors_independent(_block(P, (2, 3, 4), (3, 4))))

def _side_chi3_X3(P):
    return _kron_filter(_block(P, range(4), (1, 2, 3)))

def _side_chi3_X3D(P):
    return _kron_filter(_block(P, (0, 1, 2), range(4)))

def _side_chi3_X4(P):
    return _check(not P.matrix[0][1].is_zero())

def _side_chi3_X5(P):
    f12, f23 = P.matrix[0][1], P.matrix[1][2]
    if f12.is_zero() or f23.is_zero():
        return SideResult("fail")
    if divides(f12, P.matrix[0][0]) or divides(f23, P.matrix[2][2]):
        return SideResult("fail")
    return _PASS

def _side_chi3_X6(P):
    if not _entries_independent([P.matrix[0][0], P.matrix[0][1]]):
        return SideResult("fail")
    return _check(_entries_independent([P.matrix[1][2], P.matrix[2][2]]))

def _side_chi0_X0(P):
    return _kron_filter(_block(P, range(6), range(6)))

def _side_chi0_X1(P):
    return _kron_filter(_block(P, (0, 1, 2), (1, 2, 3)))

def _side_chi0_X2(P):
    return _check(_coprime(P.matrix[0][1], P.matrix[1][1]))

def _side_chi0_X3(P):
    return _check(_pencil_minors_independent(_block(P, (0, 1, 2), (1, 2))))

def _side_chi0_X3D(P):
    return _check(_pencil_minors_independent(_block(P, (0, 1), (0, 1, 2))))

def _side_chi0_X4(P):
    return _check(not P.matrix[0][1].is_zero())


_SIDE_CATALOGUE = {
    "none": lambda P: _PASS,
    "chi1_X0": _side_chi1_X0,
    "chi1_X1": lambda P: _ORBIT_UNKNOWN,
    "chi1_X2": _side_chi1_X2,
    "chi1_X3": _side_chi1_X3,
    "chi1_X4": _side_chi1_X4,
    "chi1_X5": _side_chi1_X5,
    "chi2_X0": lambda P: _ORBIT_UNKNOWN,
    "chi2_X1": _side_chi2_X1,
    "chi2_X2": lambda P: _ORBIT_UNKNOWN,
    "chi2_X3": _side_chi2_X3,
    "chi2_X4": lambda P: _ORBIT_UNKNOWN,
    "chi2_X5": _side_chi2_X5,
    "chi2_X6": _side_chi2_X6,
    "chi3_X1": _side_chi3_X1,
    "chi3_X2": _side_chi3_X2,
    "chi3_X3": _side_chi3_X3,
    "chi3_X3D": _side_chi3_X3D,
    "chi3_X4": _side_chi3_X4,
    "chi3_X5": _side_chi3_X5,
    "chi3_X6": _side_chi3_X6,
    "chi0_X0": _side_chi0_X0,
    "chi0_X1": _side_chi0_X1,
    "chi0_X2": _side_chi0_X2,
    "chi0_X3": _side_chi0_X3,
    "chi0_X3D": _side_chi0_X3D,
    "chi0_X4": _side_chi0_X4,
}


def side_condition(P: Presentation, row: StratumRow) -> SideResult:
    if P.source != row.source or P.target != row.target:
        raise StrataError("presentation shape does not match row (chi=%d, %s)"
                          % (row.chi, row.id))
    if not _zero_cells_hold(P, row):
        return SideResult("fail", "forced zero cell is nonzero")
    return _SIDE_CATALOGUE[row.side_condition](P)


# ---------------------------------------------------------------------------
# instance generation
# ---------------------------------------------------------------------------

def _random_entry(degree: int, rng) -> Form:
    return Form(degree, [Fraction(rng.randint(-9, 9)) for _ in range(space_dim(degree))])


def generate(chi: int, stratum_id: str, seed: int, max_attempts: int = 1000) -> Presentation:
    """Rejection sampling: random integer matrices of the row's shape with its
    forced zero pattern, accepted when validation, injectivity, the exact side
    conditions and the classifier all agree with the row."""
    row = get_row(chi, stratum_id)
    zero = set(row.zero_cells)
    rng = random.Random(derive_seed("generate", chi, stratum_id, seed))
    for attempt in range(max_attempts):
        matrix = []
        for i, e in enumerate(row.target):
            out = []
            for j, d in enumerate(row.source):
                deg = e - d
                if deg < 0 or (i, j) in zero:
                    out.append(Form.zero(0))
                else:
                    out.append(_random_entry(deg, rng))
            matrix.append(out)
        try:
            P = Presentation(row.source, row.target, matrix)
        except PresentationError:
            continue
        if not is_injective(P, seed=derive_seed(seed, attempt)):
            continue
        side = _SIDE_CATALOGUE[row.side_condition](P)
        if side.status == "fail":
            continue
        try:
            label = classify(P)
        except (ClassifyError, PresentationError):
            continue
        if (label.chi, label.id) == (chi, stratum_id):
            return P
    raise GenerationError(
        "no instance of (chi=%d, %s) in %d attempts (seed %d)"
        % (chi, stratum_id, max_attempts, seed))


# ---------------------------------------------------------------------------
# dimension audit
# ---------------------------------------------------------------------------

@dataclass
class DimAudit:
    chi: int
    id: str
    codim: int
    dimW: int
    dimG: int
    dimX: int
    check: bool
    forced_zero_dims: int
    stabilizer_dim: int
    dimX_corrected: int
    check_corrected: bool

    def to_json(self):
        return {
            "chi": self.chi, "stratum": self.id, "codim": self.codim,
            "dimW": self.dimW, "dimG": self.dimG, "dimX": self.dimX,
            "check": self.check,
            "forced_zero_dims": self.forced_zero_dims,
            "stabilizer_dim": self.stabilizer_dim,
            "dimX_corrected": self.dimX_corrected,
            "check_corrected": self.check_corrected,
        }


def generic_stabilizer_dim(P: Presentation) -> int:
    """Dimension of the stabilizer of P in the symmetry group, computed exactly
    as the solution space of gB . phi = phi . gA minus the global scalar."""
    d, e = P.source, P.target
    var_blocks = []          # (side, a, b, degree, offset)
    offset = 0
    for b in range(len(d)):          # gA[a][b]: O(d_b) -> O(d_a)
        for a in range(len(d)):
            deg = d[a] - d[b]
            if deg >= 0:
                var_blocks.append(("A", a, b, deg, offset))
                offset += space_dim(deg)
    for b in range(len(e)):          # gB[a][b]: O(e_b) -> O(e_a)
        for a in range(len(e)):
            deg = e[a] - e[b]
            if deg >= 0:
                var_blocks.append(("B", a, b, deg, offset))
                offset += space_dim(deg)
    nvars = offset
    lookup = {(side, a, b): (deg, off) for side, a, b, deg, off in var_blocks}
    rows = []
    for i in range(len(e)):
        for j in range(len(d)):
            cell_deg = e[i] - d[j]
            if cell_deg < 0:
                continue
            block = QMatrix(space_dim(cell_deg), nvars)
            any_term = False
            for k in range(len(e)):      # + gB[i][k] * phi[k][j]
                key = ("B", i, k)
                if key in lookup and not P.matrix[k][j].is_zero():
                    deg, off = lookup[key]
                    mm = mult_map(P.matrix[k][j], deg)
                    for rr in range(mm.rows):
                        row = block.data[rr]
                        for cc in range(mm.cols):
                            row[off + cc] += mm.data[rr][cc]
                    any_term = True
            for k in range(len(d)):      # - phi[i][k] * gA[k][j]
                key = ("A", k, j)
                if key in lookup and not P.matrix[i][k].is_zero():
                    deg, off = lookup[key]
                    mm = mult_map(P.matrix[i][k], deg)
                    for rr in range(mm.rows):
                        row = block.data[rr]
                        for cc in range(mm.cols):
                            row[off + cc] -= mm.data[rr][cc]
                    any_term = True
            if any_term:
                rows.extend(block.data)
    if not rows:
        return (nvars - 1) if nvars else 0
    system = QMatrix(len(rows), nvars, rows)
    solutions = nvars - system.rank()
    return solutions - 1


def dim_audit(row: StratumRow, seed: int = 0) -> DimAudit:
    """dimW and dimG from the twist lists; the corrected stratum dimension
    additionally subtracts forced zero cells and adds the generic stabilizer,
    both computed exactly."""
    d, e = row.source, row.target
    dimW = sum(space_dim(ei - dj) for ei in e for dj in d)
    dimG = (sum(space_dim(b - a) for a in d for b in d)
            + sum(space_dim(b - a) for a in e for b in e) - 1)
    dimX = dimW - dimG
    z = sum(space_dim(e[i] - d[j]) for i, j in row.zero_cells)
    P = generate(row.chi, row.id, seed=derive_seed("audit", row.chi, row.id, seed))
    stab = generic_stabilizer_dim(P)
    corrected = dimW - z - dimG + stab
    return DimAudit(
        chi=row.chi, id=row.id, codim=row.codim,
        dimW=dimW, dimG=dimG, dimX=dimX,
        check=(dimX == MODULI_DIM - row.codim),
        forced_zero_dims=z,
        stabilizer_dim=stab,
        dimX_corrected=corrected,
        check_corrected=(corrected == MODULI_DIM - row.codim),
    )


# ---------------------------------------------------------------------------
# per-row verification
# ---------------------------------------------------------------------------

_STABILITY_SPOT_CHECKS = {
    ("chi1", "X_4"): ("two_by_two", "inconclusive"),
    ("chi1", "X_5"): ("two_by_two", "stable"),
    ("chi2", "X_2"): ("minor_gcd", "stable"),
    ("chi2", "X_4"): ("pencil_block", "stable"),
    ("chi3", "X_4"): ("two_by_two", "stable"),
    ("chi0", "X_2"): ("two_by_two", "stable"),
    ("chi0", "X_3"): ("minor_gcd", "stable"),
    ("chi0", "X_4"): ("two_by_two", "stable"),
}

_CRITERIA = {
    "two_by_two": two_by_two_criterion,
    "minor_gcd": minor_gcd_criterion,
    "pencil_block": pencil_block_criterion,
}


@dataclass
class RowReport:
    chi: int
    id: str
    attempted: int
    accepted: int
    hilbert_matches: int
    profile_matches: int
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (self.accepted == self.attempted
                and self.hilbert_matches == self.attempted
                and self.profile_matches == self.attempted
                and not self.failures)

    def to_json(self):
        return {
            "chi": self.chi, "stratum": self.id,
            "attempted": self.attempted, "accepted": self.accepted,
            "hilbert_matches": self.hilbert_matches,
            "profile_matches": self.profile_matches,
            "failures": self.failures, "passed": self.passed,
        }


def verify_row(chi: int, stratum_id: str, samples: int, seed: int) -> RowReport:
    """Generate instances and assert the row's contract on each one."""
    row = get_row(chi, stratum_id)
    report = RowReport(chi=chi, id=stratum_id, attempted=samples, accepted=0,
                       hilbert_matches=0, profile_matches=0)
    spot = _STABILITY_SPOT_CHECKS.get(("chi%d" % chi, stratum_id))
    for k in range(samples):
        sample_seed = derive_seed("verify", chi, stratum_id, seed, k)
        try:
            P = generate(chi, stratum_id, seed=sample_seed)
        except GenerationError as exc:
            report.failures.append({"sample": k, "seed": sample_seed,
                                    "check": "generate", "detail": str(exc)})
            continue
        report.accepted += 1
        hd = hilbert(P)
        if (hd.r, hd.chi) == (6, chi):
            report.hilbert_matches += 1
        else:
            report.failures.append({"sample": k, "seed": sample_seed,
                                    "check": "hilbert", "detail": str((hd.r, hd.chi))})
        prof = profile(P)
        if row.matches(prof):
            report.profile_matches += 1
        else:
            report.failures.append({"sample": k, "seed": sample_seed,
                                    "check": "profile", "detail": str(prof.as_tuple())})
        bounds = bounds_check(BoundsQuery(6, chi, h0_Fm1=prof.h0_Fm1,
                                          h1_F=prof.h1_F, h1_F1=prof.h1_F1))
        if not bounds.allowed:
            report.failures.append({"sample": k, "seed": sample_seed,
                                    "check": "bounds", "detail": bounds.rule})
        D = dual(P)
        for t in range(-3, 4):
            if h1_twist(P, t) != h0_twist(D, -t):
                report.failures.append({"sample": k, "seed": sample_seed,
                                        "check": "serre_duality", "detail": "t=%d" % t})
                break
        if h0_omega(P) - h1_omega(P) != 2 * chi - 6:
            report.failures.append({"sample": k, "seed": sample_seed,
                                    "check": "euler_contraction", "detail": ""})
        if spot is not None:
            criterion, expected = spot
            verdict = _CRITERIA[criterion](P)
            if verdict.kind != expected:
                report.failures.append({"sample": k, "seed": sample_seed,
                                        "check": "stability_" + criterion,
                                        "detail": verdict.kind + ": " + verdict.reason})
    return report
