"""Verification pipeline.

Every command produces a dossier, a plain JSON-ready dict. The hypothesis
checks behind `verify` and `transfer` run as a VerificationGraph: a DAG of
named steps executed in a deterministic topological order, where a step whose
dependencies did not all pass is blocked.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import networkx as nx
from rich.console import Console

from .arith import is_prime, primes_in_range
from .congruence import CongruenceError, LevelChoice, Verdict, check_congruence
from .curves import (
    BadReductionError,
    EllipticCurveQ,
    InsufficientPrimesError,
    SingularCurveError,
    bad_primes,
    conductor,
    local_data,
    tamagawa_product,
    torsion_p_trivial_over_K,
)
from .forms import CurveForm, FormView, MissingCoefficient, ValidationError, as_form
from .iwasawa import (
    EulerFactorError,
    HypothesisCertificate,
    HypothesisReport,
    InconsistentInvariants,
    InertPrime,
    MissingCertificate,
    Status,
    check_admissibility,
    check_finite_submodule,
    check_heegner,
    check_mn19_lambda_zero,
    coker_dim_diagnostic,
    d_ell,
    euler_factor,
    local_lambda,
    mu_zero_certified,
    transfer_lambda,
)
from .quadfield import DegenerateBrinkError, ImagQuadField, NoRepresentation, QuadFieldError, brink_s_ell
from .records import CurveRecord, ParseError, Record, fixture_labels, load_fixture, load_record
from .remote import CacheCorrupt, NetworkError, NotFound, RemoteConfig, config_from_env, fetch_remote

logger = logging.getLogger(__name__)

SCHEMA = "lambda-transfer/1"

EXIT_OK = 0
EXIT_HYPOTHESIS = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3

COMMANDS = ("inspect", "congruent", "euler", "brink", "verify", "transfer")
_ARITY = {"inspect": 1, "congruent": 2, "euler": 1, "brink": 0, "verify": 1, "transfer": 2}


class InputError(ValueError):
    pass


INPUT_ERRORS = (
    InputError,
    ParseError,
    ValidationError,
    NotFound,
    NetworkError,
    CacheCorrupt,
    SingularCurveError,
    BadReductionError,
    QuadFieldError,
    NoRepresentation,
    DegenerateBrinkError,
    CongruenceError,
    EulerFactorError,
    MissingCoefficient,
    FileNotFoundError,
)


@dataclass
class RunConfig:
    command: str
    inputs: Tuple[str, ...] = ()
    p: Optional[int] = None
    D: Optional[int] = None
    ell: Optional[int] = None
    offline: bool = False
    cache_dir: Optional[str] = None
    strict_congruence: bool = False
    level_choice: LevelChoice = LevelChoice.LCM
    emit: str = "text"
    audit_brink: bool = False

    def validate(self) -> None:
        """Raise InputError for arguments no command could run with."""
        if self.command not in COMMANDS:
            raise InputError(f"unknown command '{self.command}'")
        arity = _ARITY[self.command]
        if len(self.inputs) != arity:
            raise InputError(f"{self.command} takes {arity} input(s), got {len(self.inputs)}")
        if self.emit not in ("text", "json"):
            raise InputError(f"unknown report format '{self.emit}'")
        needs_p = self.command in ("congruent", "euler", "brink", "verify", "transfer")
        needs_D = self.command in ("brink", "verify", "transfer")
        if needs_p and self.p is None:
            raise InputError(f"{self.command} needs --p")
        if needs_D and self.D is None:
            raise InputError(f"{self.command} needs --D")
        if self.command == "brink" and self.ell is None:
            raise InputError("brink needs --ell")
        if self.p is not None and not is_prime(self.p):
            raise InputError(f"p = {self.p} is not prime")
        if self.ell is not None and not is_prime(self.ell):
            raise InputError(f"ell = {self.ell} is not prime")
        if self.D is not None and self.D <= 0:
            raise InputError(f"D must be positive, got {self.D}")
        if self.D is not None and self.p == 2:
            raise InputError("p must be odd when --D is given")

    def remote_config(self) -> RemoteConfig:
        return config_from_env().with_overrides(offline=self.offline, cache_dir=self.cache_dir)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "D": self.D,
            "ell": self.ell,
            "level_choice": self.level_choice.value,
            "strict_congruence": self.strict_congruence,
            "audit_brink": self.audit_brink,
        }


def resolve_input(ref: str, config: RunConfig) -> Record:
    """A record file path, a bundled fixture label, or a database label (cache first)."""
    path = Path(ref).expanduser()
    if path.suffix == ".json" or path.exists():
        logger.debug("reading %s from file", ref)
        return load_record(path)
    if ref in fixture_labels():
        logger.debug("using bundled fixture %s", ref)
        return load_fixture(ref)
    return fetch_remote(ref, config.remote_config())


def certificate_of(record: Record) -> Optional[HypothesisCertificate]:
    """Hypothesis certificate of a curve record; eigenform records carry none."""
    return record.certificate if isinstance(record, CurveRecord) else None


def form_of(record: Record) -> FormView:
    """FormView over a curve or eigenform record."""
    if isinstance(record, CurveRecord):
        return CurveForm(record.curve)
    return as_form(record)


def describe_input(record: Record) -> dict:
    """Input summary for the dossier header."""
    form = form_of(record)
    out: Dict[str, Any] = {"label": form.label, "level": form.level, "weight": form.weight}
    if isinstance(record, CurveRecord):
        out["kind"] = "curve"
        out["ainvs"] = [str(a) for a in record.ainvs]
        out["source"] = record.source.value
        out["certificate"] = record.certificate.to_dict() if record.certificate else None
    else:
        out["kind"] = "eigenform"
    return out


# ---------------------------------------------------------------------------
# Verification graph
# ---------------------------------------------------------------------------


class StepStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"
    BLOCKED = "blocked"


@dataclass
class StepOutcome:
    status: StepStatus
    result: Dict[str, Any] = field(default_factory=dict)
    detail: str = ""

    @classmethod
    def from_report(cls, report: HypothesisReport) -> "StepOutcome":
        """Map a hypothesis report to a step outcome; detail lists the items that did not pass."""
        status = {
            Status.PASS: StepStatus.PASS,
            Status.FAIL: StepStatus.FAIL,
            Status.INCONCLUSIVE: StepStatus.INCONCLUSIVE,
        }[report.status]
        failed = [i.name for i in report.items if i.status is not Status.PASS]
        detail = f"{report.tag} " + (", ".join(failed) if failed else "ok")
        return cls(status, report.to_dict(), detail)


@dataclass
class StepNode:
    name: str
    action: Callable[[], StepOutcome]
    depends_on: Tuple[str, ...]
    outcome: Optional[StepOutcome] = None

    def to_dict(self) -> dict:
        outcome = self.outcome
        return {
            "name": self.name,
            "depends_on": list(self.depends_on),
            "status": outcome.status.value if outcome else None,
            "detail": outcome.detail if outcome else "",
            "result": outcome.result if outcome else {},
        }


_INCONCLUSIVE_ERRORS = (MissingCertificate, MissingCoefficient, InsufficientPrimesError)
_FAIL_ERRORS = (InertPrime, InconsistentInvariants)


class VerificationGraph:
    """Named steps with dependencies, run once each in insertion-stable topological order."""

    def __init__(self):
        self.steps: Dict[str, StepNode] = {}
        self.graph = nx.DiGraph()
        self._index: Dict[str, int] = {}

    def add_step(self, name: str, action: Callable[[], StepOutcome], depends_on: Iterable[str] = ()) -> StepNode:
        """Register a step after all of its dependencies."""
        if name in self.steps:
            raise ValueError(f"duplicate step '{name}'")
        deps = tuple(depends_on)
        for dep in deps:
            if dep not in self.steps:
                raise ValueError(f"step '{name}' depends on unknown step '{dep}'")
        node = StepNode(name, action, deps)
        self.steps[name] = node
        self._index[name] = len(self._index)
        self.graph.add_node(name)
        for dep in deps:
            self.graph.add_edge(dep, name)
        return node

    def order(self) -> List[str]:
        return list(nx.lexicographical_topological_sort(self.graph, key=self._index.__getitem__))

    def _execute(self, node: StepNode) -> StepOutcome:
        waiting = [
            f"{dep} ({self.steps[dep].outcome.status.value})"
            for dep in node.depends_on
            if self.steps[dep].outcome.status is not StepStatus.PASS
        ]
        if waiting:
            return StepOutcome(StepStatus.BLOCKED, detail="waiting on " + ", ".join(waiting))
        try:
            return node.action()
        except _INCONCLUSIVE_ERRORS as exc:
            return StepOutcome(StepStatus.INCONCLUSIVE, detail=str(exc))
        except INPUT_ERRORS:
            raise
        except _FAIL_ERRORS as exc:
            return StepOutcome(StepStatus.FAIL, detail=f"{type(exc).__name__}: {exc}")

    def run(self, progress: Optional[Console] = None) -> "VerificationGraph":
        """Execute every step; input errors abort the run, other outcomes are recorded."""
        names = self.order()
        for i, name in enumerate(names, 1):
            node = self.steps[name]
            node.outcome = self._execute(node)
            logger.info("step %s: %s", name, node.outcome.status.value)
            if progress is not None:
                progress.print(
                    f"[{i}/{len(names)}] {name}: {node.outcome.status.value}", markup=False, highlight=False
                )
        return self

    def failed(self) -> List[str]:
        return [name for name in self.order() if self.status(name) is StepStatus.FAIL]

    def status(self, name: str) -> Optional[StepStatus]:
        node = self.steps.get(name)
        return node.outcome.status if node and node.outcome else None

    @property
    def exit_code(self) -> int:
        """1 if any step failed, else 3 if any step is inconclusive or blocked, else 0."""
        states = {node.outcome.status for node in self.steps.values() if node.outcome}
        if StepStatus.FAIL in states:
            return EXIT_HYPOTHESIS
        if states & {StepStatus.INCONCLUSIVE, StepStatus.BLOCKED}:
            return EXIT_INCONCLUSIVE
        return EXIT_OK

    def to_list(self) -> List[dict]:
        return [self.steps[name].to_dict() for name in self.order()]


def _dossier(command: str, config: RunConfig, **body: Any) -> Dict[str, Any]:
    out = {"schema": SCHEMA, "command": command, "config": config.to_dict()}
    out.update(body)
    return out


# ---------------------------------------------------------------------------
# inspect / congruent / euler / brink
# ---------------------------------------------------------------------------


def _curve_summary(E: EllipticCurveQ, config: RunConfig) -> dict:
    N = conductor(E)
    b2, b4, b6, b8 = E.b_invariants
    rows = []
    for ell in bad_primes(E):
        data = local_data(E, ell)
        rows.append(
            {
                "ell": ell,
                "reduction": data.reduction.value,
                "kodaira": data.kodaira,
                "conductor_exponent": data.conductor_exponent,
                "tamagawa": data.tamagawa,
                "ord_min_disc": data.ord_min_disc,
            }
        )
    form = CurveForm(E)
    traces = [{"ell": ell, "a_ell": form.a(ell)} for ell in primes_in_range(2, 50) if N.value % ell]
    out: Dict[str, Any] = {
        "ainvs": [str(a) for a in E.ainvs],
        "b_invariants": [str(b) for b in (b2, b4, b6, b8)],
        "c4": str(E.c4),
        "c6": str(E.c6),
        "discriminant": str(E.discriminant),
        "j_invariant": str(Fraction(E.c4 ** 3, E.discriminant)),
        "conductor": N.value,
        "conductor_factorization": str(N),
        "tamagawa_product": tamagawa_product(E),
        "local_data": rows,
        "traces": traces,
    }
    if config.p is not None:
        out["a_p"] = form.a(config.p)
        if config.D is not None:
            evidence = torsion_p_trivial_over_K(E, ImagQuadField(config.D), config.p)
            out["torsion"] = {
                "verdict": evidence.verdict.value,
                "gcd_untwisted": evidence.gcd_untwisted,
                "gcd_twisted": evidence.gcd_twisted,
                "primes": list(evidence.primes),
            }
    return out


def run_inspect(record: Record, config: RunConfig) -> Dict[str, Any]:
    """Invariants, local data and traces of one input."""
    form = form_of(record)
    if isinstance(record, CurveRecord):
        body = _curve_summary(record.curve, config)
    else:
        body = {
            "level": form.level,
            "weight": form.weight,
            "bad_prime_kinds": [{"ell": ell, "kind": form.kind(ell).value} for ell in form.bad_primes],
            "a_coeffs": [{"ell": ell, "a_ell": a} for ell, a in sorted(record.a_coeffs.items())],
        }
    return _dossier("inspect", config, input=describe_input(record), inspect=body, exit_code=EXIT_OK)


def run_congruent(r1: Record, r2: Record, config: RunConfig) -> Dict[str, Any]:
    """Coefficient comparison mod p up to the Sturm bound."""
    report = check_congruence(form_of(r1), form_of(r2), config.p, config.level_choice)
    verdict = report.verdict
    if verdict is Verdict.FAIL:
        code = EXIT_HYPOTHESIS
    elif verdict is Verdict.PASS_WITH_SKIPS and config.strict_congruence:
        code = EXIT_INCONCLUSIVE
    else:
        code = EXIT_OK
    return _dossier(
        "congruent",
        config,
        inputs=[describe_input(r1), describe_input(r2)],
        congruence=report.to_dict(),
        exit_code=code,
    )


def run_euler(record: Record, config: RunConfig) -> Dict[str, Any]:
    """Euler factors mod p, d_ell and the cokernel diagnostic at --ell or every bad prime."""
    form = form_of(record)
    p = config.p
    ells = [config.ell] if config.ell is not None else list(form.bad_primes)
    rows = []
    for ell in ells:
        factor = euler_factor(form.a(ell), ell, form.kind(ell), p, form.weight)
        row = factor.to_dict()
        row["d_ell"] = d_ell(factor, p)
        row["coker"] = coker_dim_diagnostic(form, ell, p).to_dict()
        rows.append(row)
    return _dossier("euler", config, input=describe_input(record), euler=rows, exit_code=EXIT_OK)


def run_brink(config: RunConfig) -> Dict[str, Any]:
    """s_ell for the prime --ell in the anticyclotomic tower of Q(sqrt -D)."""
    K = ImagQuadField(config.D)
    result = brink_s_ell(K, config.ell, config.p)
    field_info = {"D": K.D, "disc": K.disc, "class_number": K.class_number}
    return _dossier("brink", config, field=field_info, brink=result.to_dict(), exit_code=EXIT_OK)


# ---------------------------------------------------------------------------
# verify / transfer
# ---------------------------------------------------------------------------


def _require_certificate(record: Record, form: FormView) -> HypothesisCertificate:
    cert = certificate_of(record)
    if cert is None:
        raise MissingCertificate(f"no certificate supplied for {form.label}")
    return cert


class TransferRun:
    """Shared state of one verify/transfer run; each step is a bound method."""

    def __init__(self, records: List[Record], config: RunConfig):
        self.records = records
        self.config = config
        self.forms = [form_of(r) for r in records]
        self.K = ImagQuadField(config.D)
        self.p = config.p
        self.reports: Dict[str, HypothesisReport] = {}
        self.lambda_f1: Optional[int] = None
        self.lambda_provenance: Optional[str] = None
        self.cofree_passed = False
        self.local_rows: Dict[int, dict] = {}
        self.congruence_strict = False
        self.graph = VerificationGraph()

    def _tag(self, i: int) -> str:
        return f"f{i + 1}"

    def _report_step(self, key: str, make: Callable[[], HypothesisReport]) -> Callable[[], StepOutcome]:
        def action() -> StepOutcome:
            report = make()
            self.reports[key] = report
            return StepOutcome.from_report(report)

        return action

    def heegner(self, i: int) -> Callable[[], StepOutcome]:
        return self._report_step(f"heegner:{self._tag(i)}", lambda: check_heegner(self.forms[i], self.K))

    def admissibility(self, i: int) -> Callable[[], StepOutcome]:
        return self._report_step(
            f"admissibility:{self._tag(i)}", lambda: check_admissibility(self.forms[i], self.K, self.p)
        )

    def congruence(self) -> StepOutcome:
        report = check_congruence(self.forms[0], self.forms[1], self.p, self.config.level_choice)
        verdict = report.verdict
        self.congruence_strict = verdict is Verdict.PASS
        result = report.to_dict()
        if verdict is Verdict.FAIL:
            bad = ", ".join(f"ell={c.ell}" for c in report.failures)
            return StepOutcome(StepStatus.FAIL, result, f"(cong.) a_ell differ mod {self.p} at {bad}")
        if verdict is Verdict.PASS_WITH_SKIPS and self.config.strict_congruence:
            return StepOutcome(StepStatus.INCONCLUSIVE, result, "(cong.) additive primes skipped")
        return StepOutcome(StepStatus.PASS, result, f"(cong.) {verdict.value} up to {report.sturm_bound}")

    def lambda_f1_step(self) -> StepOutcome:
        """lambda(f1) from the certificate, or 0 from a passing co-freeness check."""
        form = self.forms[0]
        cert = _require_certificate(self.records[0], form)
        if cert.lambda_known is not None:
            self.lambda_f1 = cert.lambda_known
            self.lambda_provenance = "certificate"
            return StepOutcome(
                StepStatus.PASS,
                {"lambda": cert.lambda_known, "provenance": "certificate", "source": cert.source},
                f"λ({form.label}) = {cert.lambda_known} quoted",
            )
        outcome = self.cofree()
        if self.cofree_passed:
            self.lambda_f1 = 0
            self.lambda_provenance = "computed (co-free Selmer group)"
            outcome.result = {"lambda": 0, "provenance": self.lambda_provenance, "report": outcome.result}
        return outcome

    def cofree(self) -> StepOutcome:
        cert = _require_certificate(self.records[0], self.forms[0])
        report = check_mn19_lambda_zero(self.forms[0], self.K, self.p, cert)
        self.reports["cofree:f1"] = report
        self.cofree_passed = report.passed
        return StepOutcome.from_report(report)

    def finite_submodule(self, i: int) -> Callable[[], StepOutcome]:
        """(fin.) for form i; for f1 a passing co-freeness check stands in for a missing Heegner index."""
        def action() -> StepOutcome:
            form = self.forms[i]
            cert = _require_certificate(self.records[i], form)
            try:
                report = check_finite_submodule(form, self.K, self.p, cert)
            except MissingCertificate:
                if i == 0 and self.cofree_passed:
                    return StepOutcome(
                        StepStatus.PASS,
                        {"via": "cofree"},
                        "(fin.) dual Selmer group is free, so it has no finite submodule",
                    )
                raise
            self.reports[f"finite_submodule:{self._tag(i)}"] = report
            return StepOutcome.from_report(report)

        return action

    def local(self, ell: int) -> Callable[[], StepOutcome]:
        """lambda_ell of both forms at a bad prime ell, with the cokernel diagnostic."""
        def action() -> StepOutcome:
            row: Dict[str, Any] = {"ell": ell}
            for i, form in enumerate(self.forms):
                data = local_lambda(form, self.K, ell, self.p, audit_brink=self.config.audit_brink)
                row[self._tag(i)] = data.to_dict()
                row[f"coker_{self._tag(i)}"] = coker_dim_diagnostic(form, ell, self.p).to_dict()
            self.local_rows[ell] = row
            l1, l2 = row["f1"]["lambda_ell"], row["f2"]["lambda_ell"]
            return StepOutcome(StepStatus.PASS, row, f"λ_{ell}: {l1} vs {l2}")

        return action

    def transfer(self) -> StepOutcome:
        table = [(ell, r["f1"]["lambda_ell"], r["f2"]["lambda_ell"]) for ell, r in sorted(self.local_rows.items())]
        result = transfer_lambda(self.lambda_f1, table)
        return StepOutcome(StepStatus.PASS, result.to_dict(), f"λ(f2) = {result.lambda_f2}")

    def build_verify(self) -> VerificationGraph:
        """Steps of a one-form hypothesis dossier."""
        g = self.graph
        g.add_step("heegner:f1", self.heegner(0))
        g.add_step("admissibility:f1", self.admissibility(0))
        cert = certificate_of(self.records[0])
        # co-freeness is only claimed for forms whose certificate quotes the rank
        if cert is not None and cert.rank_one is not None:
            g.add_step("cofree:f1", self.cofree)
        g.add_step("finite_submodule:f1", self.finite_submodule(0))
        return g

    def build_transfer(self) -> VerificationGraph:
        """Steps of a transfer run; local rows wait on (Heeg.) and (admiss.) for both forms."""
        g = self.graph
        for i in range(2):
            g.add_step(f"heegner:{self._tag(i)}", self.heegner(i))
        for i in range(2):
            g.add_step(f"admissibility:{self._tag(i)}", self.admissibility(i))
        hypotheses = tuple(g.steps)
        g.add_step("congruence", self.congruence)
        g.add_step("lambda:f1", self.lambda_f1_step)
        for i in range(2):
            g.add_step(f"finite_submodule:{self._tag(i)}", self.finite_submodule(i))
        primes = sorted(set(self.forms[0].bad_primes) | set(self.forms[1].bad_primes))
        for ell in primes:
            g.add_step(f"local:{ell}", self.local(ell), depends_on=hypotheses)
        g.add_step("transfer", self.transfer, depends_on=tuple(g.steps))
        return g

    def mu_zero(self) -> Dict[str, Any]:
        """mu = 0 for both forms, stated only for a run without failed steps."""
        heegner = self.reports.get("heegner:f1")
        admissibility = self.reports.get("admissibility:f1")
        value = False
        if heegner is not None and admissibility is not None and not self.graph.failed():
            value = mu_zero_certified(heegner, admissibility, self.congruence_strict, certificate_of(self.records[0]))
        labels = " = ".join(f"μ({f.label})" for f in self.forms)
        return {"value": value, "statement": f"{labels} = 0" if value else "not established"}


def run_verify(record: Record, config: RunConfig, progress: Optional[Console] = None) -> Dict[str, Any]:
    """Hypothesis dossier for one form: (Heeg.), (admiss.), (co-free) and (fin.)."""
    run = TransferRun([record], config)
    graph = run.build_verify().run(progress)
    return _dossier(
        "verify",
        config,
        input=describe_input(record),
        field={"D": run.K.D, "disc": run.K.disc, "class_number": run.K.class_number},
        steps=graph.to_list(),
        exit_code=graph.exit_code,
    )


def run_transfer(r1: Record, r2: Record, config: RunConfig, progress: Optional[Console] = None) -> Dict[str, Any]:
    """Full transfer dossier; result carries lambda(f2) only when every step passed."""
    run = TransferRun([r1, r2], config)
    graph = run.build_transfer().run(progress)
    result = None
    if graph.status("transfer") is StepStatus.PASS:
        result = graph.steps["transfer"].outcome.result
        result = dict(result, lambda_f1_provenance=run.lambda_provenance)
    failed = [graph.steps[name].outcome.detail or name for name in graph.failed()]
    return _dossier(
        "transfer",
        config,
        inputs=[describe_input(r1), describe_input(r2)],
        field={"D": run.K.D, "disc": run.K.disc, "class_number": run.K.class_number},
        steps=graph.to_list(),
        local_table=[run.local_rows[ell] for ell in sorted(run.local_rows)],
        mu_zero=run.mu_zero(),
        violations=failed,
        result=result,
        exit_code=graph.exit_code,
    )


def run_command(config: RunConfig, progress: Optional[Console] = None) -> Dict[str, Any]:
    """Resolve inputs and dispatch; input problems surface as INPUT_ERRORS.

    Graph-based commands print one line per step to progress when given.
    """
    config.validate()
    records = [resolve_input(ref, config) for ref in config.inputs]
    if config.command == "inspect":
        return run_inspect(records[0], config)
    if config.command == "congruent":
        return run_congruent(records[0], records[1], config)
    if config.command == "euler":
        return run_euler(records[0], config)
    if config.command == "brink":
        return run_brink(config)
    if config.command == "verify":
        return run_verify(records[0], config, progress)
    return run_transfer(records[0], records[1], config, progress)
