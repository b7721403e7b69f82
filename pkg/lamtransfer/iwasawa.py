"""Local lambda-invariants, hypothesis checks and the lambda transfer identity.

For congruent weight-2r newforms f1, f2 (f1 = f2 mod p) over an imaginary
quadratic field K in which p and every prime of N1*N2 split,

    lambda(f1) + 2 sum_ell lambda_ell(f1) = lambda(f2) + 2 sum_ell lambda_ell(f2)

with ell running over the primes of N1*N2 and lambda_ell = s_ell * d_ell, where
d_ell is the multiplicity of ell^-1 as a root of the Euler factor mod p and
s_ell the number of primes above ell in the anticyclotomic Z_p-extension.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

from .arith import PolyModP, euler_phi, inverse_mod, is_prime, root_multiplicity
from .curves import (
    BadReductionError,
    Reduction,
    TorsionVerdict,
    local_data,
    reduced_curve_p_torsion_trivial,
    tamagawa_p_part,
    tamagawa_product,
    torsion_p_trivial_over_K,
)
from .forms import ReductionKind, ValidationError, as_form
from .quadfield import BrinkResult, ImagQuadField, Splitting, brink_s_ell, splitting_type

logger = logging.getLogger(__name__)


class EulerFactorError(ValueError):
    pass


class InertPrime(ValueError):
    pass


class MissingCertificate(LookupError):
    pass


class InconsistentInvariants(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# Euler factors and d_ell
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EulerFactorData:
    ell: int
    kind: ReductionKind
    a_ell: int
    poly: PolyModP
    weight: int = 2

    @property
    def normalization_sensitive(self) -> bool:
        return self.weight > 2

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "kind": self.kind.value,
            "a_ell": self.a_ell,
            "p": self.poly.p,
            "poly": str(self.poly),
            "normalization_sensitive": self.normalization_sensitive,
        }


def euler_factor(a_ell: int, ell: int, kind: ReductionKind, p: int, weight: int = 2) -> EulerFactorData:
    """1 - a X + ell X^2 (good), 1 - a X (multiplicative) or 1 (additive), over F_p."""
    if ell == p:
        raise EulerFactorError(f"no Euler factor at ell = p = {p}")
    if kind is ReductionKind.GOOD:
        coeffs = [1, -a_ell, ell]
    elif kind is ReductionKind.MULTIPLICATIVE:
        coeffs = [1, -a_ell]
    else:
        coeffs = [1]
    if weight > 2:
        logger.warning("Euler factor at %d for weight %d uses a_ell as given", ell, weight)
    return EulerFactorData(ell, kind, a_ell, PolyModP.from_ints(coeffs, p), weight)


def d_ell(factor: EulerFactorData, p: int) -> int:
    """Multiplicity of ell^-1 as a root of the Euler factor mod p."""
    if factor.ell % p == 0:
        raise EulerFactorError(f"ell = {factor.ell} is not invertible mod {p}")
    return root_multiplicity(factor.poly, inverse_mod(factor.ell, p))


@dataclass(frozen=True)
class LocalLambdaData:
    ell: int
    factor: EulerFactorData
    d_ell: int
    s_ell: Optional[int]
    lambda_ell: int
    brink: Optional[BrinkResult] = None

    def to_dict(self) -> dict:
        return {
            "ell": self.ell,
            "kind": self.factor.kind.value,
            "a_ell": self.factor.a_ell,
            "euler_factor": str(self.factor.poly),
            "d_ell": self.d_ell,
            "s_ell": self.s_ell,
            "lambda_ell": self.lambda_ell,
            "brink": self.brink.to_dict() if self.brink else None,
        }


def local_lambda(f, K: ImagQuadField, ell: int, p: int, *, audit_brink: bool = False) -> LocalLambdaData:
    """lambda_ell(f) = s_ell * d_ell at a prime ell split in K.

    s_ell is only computed when d_ell > 0, or always with audit_brink.
    """
    f = as_form(f)
    kind = splitting_type(K, ell)
    if kind is not Splitting.SPLIT:
        raise InertPrime(f"{ell} is {kind.value} in {K}; lambda_ell needs a split prime")
    factor = euler_factor(f.a(ell), ell, f.kind(ell), p, f.weight)
    d = d_ell(factor, p)
    if d == 0 and not audit_brink:
        return LocalLambdaData(ell, factor, 0, None, 0)
    brink = brink_s_ell(K, ell, p)
    return LocalLambdaData(ell, factor, d, brink.s_ell, brink.s_ell * d, brink)


# ---------------------------------------------------------------------------
# Hypotheses
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HypothesisCertificate:
    """Facts the tool cannot compute, quoted with their provenance.

    A field left as None is absent; checks that need it raise MissingCertificate.
    """

    source: str
    rank_one: Optional[bool] = None
    heegner_point_infinite_order: Optional[bool] = None
    heegner_index_equals_tamagawa_p_part: Optional[bool] = None
    sha_p_trivial: Optional[bool] = None
    mu_zero: Optional[bool] = None
    residually_irreducible: Optional[bool] = None
    lambda_known: Optional[int] = None

    def __post_init__(self):
        if not self.source or not self.source.strip():
            raise ValidationError("certificate needs a source", key="source")
        if self.lambda_known is not None:
            if self.lambda_known < 0:
                raise ValidationError("lambda_known must be non-negative", key="lambda_known")
            if self.mu_zero is not True:
                raise ValidationError("lambda_known is only quoted together with mu_zero = true", key="lambda_known")

    @classmethod
    def fact_names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls) if f.name not in ("source", "lambda_known"))

    def require(self, name: str) -> bool:
        """Value of a certificate fact; MissingCertificate when it is absent."""
        value = getattr(self, name)
        if value is None:
            raise MissingCertificate(f"certificate ({self.source}) lacks '{name}'")
        return value

    def without(self, *names: str) -> "HypothesisCertificate":
        """Copy with the named facts removed."""
        data = asdict(self)
        for name in names:
            data[name] = None
        return HypothesisCertificate(**data)

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


class Status(Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SubCheck:
    name: str
    status: Status
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status.value, "detail": self.detail}


def _sub(name: str, ok: bool, detail: str = "") -> SubCheck:
    return SubCheck(name, Status.PASS if ok else Status.FAIL, detail)


@dataclass(frozen=True)
class HypothesisReport:
    name: str
    tag: str
    items: Tuple[SubCheck, ...]
    value: Optional[int] = None
    note: str = ""

    @property
    def status(self) -> Status:
        states = {item.status for item in self.items}
        if Status.FAIL in states:
            return Status.FAIL
        if Status.INCONCLUSIVE in states:
            return Status.INCONCLUSIVE
        return Status.PASS

    @property
    def passed(self) -> bool:
        return self.status is Status.PASS

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "tag": self.tag,
            "status": self.status.value,
            "value": self.value,
            "note": self.note,
            "items": [item.to_dict() for item in self.items],
        }


def check_heegner(f, K: ImagQuadField) -> HypothesisReport:
    """Every prime dividing the level splits in K."""
    f = as_form(f)
    items = []
    for ell in f.bad_primes:
        kind = splitting_type(K, ell)
        items.append(_sub(f"{ell} split", kind is Splitting.SPLIT, kind.value))
    return HypothesisReport("heegner", "(Heeg.)", tuple(items), note=f"{f.label} over {K}")


def check_admissibility(f, K: ImagQuadField, p: int) -> HypothesisReport:
    """p nmid 6 (2r-1)! N phi(N) h_K, p split, a_p a unit, and a_p^2 != 1 mod p when r = 1."""
    f = as_form(f)
    N = f.level
    r = f.weight // 2
    items = [
        _sub("p prime", is_prime(p), str(p)),
        _sub("p ∤ 6", p not in (2, 3)),
    ]
    if r > 1:
        fact = 1
        for i in range(2, 2 * r):
            fact *= i
        items.append(_sub("p ∤ (2r-1)!", fact % p != 0, str(fact)))
    phi = euler_phi(N)
    items += [
        _sub("p ∤ N", N % p != 0, str(N)),
        _sub("p ∤ φ(N)", phi % p != 0, str(phi)),
        _sub("p ∤ h_K", K.class_number % p != 0, str(K.class_number)),
    ]
    kind = splitting_type(K, p)
    items.append(_sub("p split in K", kind is Splitting.SPLIT, kind.value))

    a_p = None
    try:
        a_p = f.a(p)
    except LookupError as exc:
        items.append(SubCheck("ordinary", Status.INCONCLUSIVE, str(exc)))
    if a_p is not None:
        items.append(_sub("ordinary", a_p % p != 0, f"a_p = {a_p}"))
        if r == 1:
            items.append(_sub("a_p^2 ≢ 1", (a_p * a_p - 1) % p != 0, f"a_p^2 = {(a_p * a_p) % p} mod {p}"))
    return HypothesisReport("admissibility", "(admiss.)", tuple(items), value=a_p, note=f"{f.label}, p = {p}")


def check_finite_submodule(f, K: ImagQuadField, p: int, cert: HypothesisCertificate) -> HypothesisReport:
    """No nonzero finite Lambda-submodule: Heegner point of index prod c_ell^(p), plus
    p split (case 1) or p inert with no p-torsion on E mod p over F_{p^2} (case 2)."""
    f = as_form(f)
    items = [
        _sub("Heegner point of infinite order", cert.require("heegner_point_infinite_order")),
        _sub(
            "Heegner index = Tamagawa p-part",
            cert.require("heegner_index_equals_tamagawa_p_part"),
            cert.source,
        ),
    ]
    value = None
    if f.curve is not None:
        value = tamagawa_p_part(f.curve, p)
    kind = splitting_type(K, p)
    if kind is Splitting.SPLIT:
        items.append(_sub("case 1: p split", True))
    elif kind is Splitting.INERT:
        if f.curve is None:
            items.append(SubCheck("case 2: E~(F_p^2)[p] = 0", Status.INCONCLUSIVE, "needs a curve"))
        else:
            try:
                trivial = reduced_curve_p_torsion_trivial(f.curve, p * p, p)
                items.append(_sub("case 2: E~(F_p^2)[p] = 0", trivial))
            except BadReductionError as exc:
                items.append(_sub("case 2: E~(F_p^2)[p] = 0", False, str(exc)))
    else:
        items.append(_sub("p split or inert", False, "p ramified"))
    return HypothesisReport("finite_submodule", "(fin.)", tuple(items), value=value, note=f.label)


def check_mn19_lambda_zero(f, K: ImagQuadField, p: int, cert: HypothesisCertificate) -> HypothesisReport:
    """Co-freeness of the Selmer group, hence lambda(f) = 0.

    (a) E(K)[p] = 0, (b) p nmid N a_p (a_p - 1) prod c_ell, (c) the Heegner
    point has infinite order, (d) rank 1 and Sha[p^oo] = 0.
    """
    f = as_form(f)
    heegner = cert.require("heegner_point_infinite_order")
    rank_one = cert.require("rank_one")
    sha = cert.require("sha_p_trivial")
    items: List[SubCheck] = []
    if f.curve is None:
        items.append(SubCheck("(a) E(K)[p] = 0", Status.INCONCLUSIVE, "needs a curve"))
        items.append(SubCheck("(b) p ∤ N a_p (a_p - 1) ∏ c_ell", Status.INCONCLUSIVE, "needs a curve"))
    else:
        evidence = torsion_p_trivial_over_K(f.curve, K, p)
        status = Status.PASS if evidence.verdict is TorsionVerdict.VERIFIED_TRIVIAL else Status.INCONCLUSIVE
        items.append(
            SubCheck(
                "(a) E(K)[p] = 0",
                status,
                f"gcd #E(F_q) = {evidence.gcd_untwisted}, twist {evidence.gcd_twisted}",
            )
        )
        a_p = f.a(p)
        product = f.level * a_p * (a_p - 1) * tamagawa_product(f.curve)
        items.append(_sub("(b) p ∤ N a_p (a_p - 1) ∏ c_ell", product % p != 0, str(product)))
    items.append(_sub("(c) Heegner point of infinite order", heegner, cert.source))
    items.append(_sub("(d) rank 1 and Sha[p^∞] = 0", rank_one and sha, cert.source))
    report = HypothesisReport("cofree", "(co-free)", tuple(items), note=f.label)
    if report.passed:
        return HypothesisReport(report.name, report.tag, report.items, value=0, note=report.note)
    return report


def mu_zero_certified(
    heegner: HypothesisReport,
    admissibility: HypothesisReport,
    congruence_strict_pass: bool,
    cert: Optional[HypothesisCertificate],
) -> bool:
    """mu(f) = 0 once (Heeg.), (admiss.), a strict congruence and (irred.) all hold."""
    irreducible = cert is not None and cert.residually_irreducible is True
    return heegner.passed and admissibility.passed and congruence_strict_pass and irreducible


# ---------------------------------------------------------------------------
# Transfer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransferResult:
    lambda_f1: int
    local_table: Tuple[Tuple[int, int, int], ...]
    lambda_f2: int
    formula_trace: str

    def to_dict(self) -> dict:
        return {
            "lambda_f1": self.lambda_f1,
            "lambda_f2": self.lambda_f2,
            "local_table": [
                {"ell": ell, "lambda_ell_f1": l1, "lambda_ell_f2": l2} for ell, l1, l2 in self.local_table
            ],
            "formula_trace": self.formula_trace,
        }


def transfer_lambda(lambda_f1: int, table: Iterable[Sequence[int]]) -> TransferResult:
    """lambda(f2) = lambda(f1) + 2 * sum (lambda_ell(f1) - lambda_ell(f2))."""
    if lambda_f1 < 0:
        raise ValueError(f"lambda(f1) must be non-negative, got {lambda_f1}")
    rows = sorted((int(ell), int(l1), int(l2)) for ell, l1, l2 in table)
    ells = [ell for ell, _, _ in rows]
    if len(set(ells)) != len(ells):
        raise ValueError(f"duplicate primes in local table: {ells}")
    delta = sum(l1 - l2 for _, l1, l2 in rows)
    lambda_f2 = lambda_f1 + 2 * delta
    terms = " + ".join(f"({l1} - {l2})" for _, l1, l2 in rows) or "0"
    trace = f"λ(f2) = λ(f1) + 2·Σ(λ_ℓ(f1) - λ_ℓ(f2)) = {lambda_f1} + 2·[{terms}] = {lambda_f2}"
    if lambda_f2 < 0:
        raise InconsistentInvariants(f"transfer gives negative lambda: {trace}")
    return TransferResult(lambda_f1, tuple(rows), lambda_f2, trace)


# ---------------------------------------------------------------------------
# Cokernel diagnostic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CokerDiagnostic:
    ell: int
    dim: Optional[int]
    status: str
    ord_min_disc: Optional[int] = None

    def to_dict(self) -> dict:
        return {"ell": self.ell, "dim": self.dim, "status": self.status, "ord_min_disc": self.ord_min_disc}


def coker_dim_diagnostic(f, ell: int, p: int) -> CokerDiagnostic:
    """dim_F_p of A^{I_ell} / p A^{I_ell} for the local control map at ell.

    Good: 0. Multiplicative: 1 iff p | ord_ell(Delta_min), via the Tate curve.
    Additive: not computed.
    """
    if ell == p:
        raise ValueError("ell must differ from p")
    f = as_form(f)
    kind = f.kind(ell)
    if kind is ReductionKind.GOOD:
        return CokerDiagnostic(ell, 0, "computed")
    if kind is ReductionKind.ADDITIVE or f.curve is None:
        return CokerDiagnostic(ell, None, "not_computed")
    data = local_data(f.curve, ell)
    assert data.reduction is not Reduction.GOOD
    dim = 1 if data.ord_min_disc % p == 0 else 0
    return CokerDiagnostic(ell, dim, "computed", data.ord_min_disc)
