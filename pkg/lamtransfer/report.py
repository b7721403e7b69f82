"""Render dossiers as JSON or as plain text tables.

Both renderings are pure functions of the dossier: no timestamps, no colour,
fixed width, so identical runs give identical bytes.
"""

from __future__ import annotations

import io
import json
from typing import Any, Dict, Iterable, List

from rich import box
from rich.console import Console
from rich.table import Table

TEXT_WIDTH = 100


def render_json(dossier: Dict[str, Any]) -> str:
    return json.dumps(dossier, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _console(buffer: io.StringIO) -> Console:
    return Console(
        file=buffer,
        width=TEXT_WIDTH,
        color_system=None,
        force_terminal=False,
        highlight=False,
        emoji=False,
        markup=False,
        log_time=False,
        log_path=False,
    )


def _table(title: str, columns: Iterable[str], rows: Iterable[Iterable[Any]]) -> Table:
    table = Table(title=title, box=box.ASCII, title_justify="left", show_lines=False)
    for column in columns:
        table.add_column(column)
    for row in rows:
        table.add_row(*("" if cell is None else str(cell) for cell in row))
    return table


def _fmt(value: Any) -> str:
    return "-" if value is None else str(value)


def _render_inputs(console: Console, dossier: Dict[str, Any]) -> None:
    inputs: List[dict] = dossier.get("inputs") or ([dossier["input"]] if "input" in dossier else [])
    for i, item in enumerate(inputs, start=1):
        line = f"f{i}: {item['label']} (level {item['level']}, weight {item['weight']}, {item['kind']})"
        if item.get("ainvs"):
            line += f" [{', '.join(item['ainvs'])}]"
        console.print(line)
    field = dossier.get("field")
    if field:
        console.print(f"K = Q(sqrt -{field['D']}), disc {field['disc']}, class number {field['class_number']}")
    config = dossier["config"]
    if config.get("p") is not None:
        console.print(f"p = {config['p']}")


def _render_inspect(console: Console, body: Dict[str, Any]) -> None:
    if "ainvs" not in body:
        console.print(f"level {body['level']}, weight {body['weight']}")
        console.print(_table("bad primes", ["ell", "kind"], [(r["ell"], r["kind"]) for r in body["bad_prime_kinds"]]))
        console.print(_table("coefficients", ["ell", "a_ell"], [(r["ell"], r["a_ell"]) for r in body["a_coeffs"]]))
        return
    console.print(f"c4 = {body['c4']}, c6 = {body['c6']}")
    console.print(f"discriminant = {body['discriminant']}, j = {body['j_invariant']}")
    console.print(f"conductor = {body['conductor']} = {body['conductor_factorization']}")
    console.print(f"Tamagawa product = {body['tamagawa_product']}")
    console.print(
        _table(
            "local reduction data",
            ["ell", "reduction", "Kodaira", "f_ell", "c_ell", "ord(Δ_min)"],
            [
                (r["ell"], r["reduction"], r["kodaira"], r["conductor_exponent"], r["tamagawa"], r["ord_min_disc"])
                for r in body["local_data"]
            ],
        )
    )
    console.print("a_ell: " + ", ".join(f"a_{t['ell']} = {t['a_ell']}" for t in body["traces"]))
    if "a_p" in body:
        console.print(f"a_p = {body['a_p']}")
    torsion = body.get("torsion")
    if torsion:
        console.print(
            f"E(K)[p]: {torsion['verdict']} (gcd #E(F_q) = {torsion['gcd_untwisted']}, "
            f"twist {torsion['gcd_twisted']}, {len(torsion['primes'])} primes)"
        )


def _render_congruence(console: Console, report: Dict[str, Any]) -> None:
    console.print(
        f"congruence mod {report['p']}: {report['verdict']} "
        f"(Sturm bound {report['sturm_bound']} at level {report['level_used']}, {report['level_choice']})"
    )
    console.print(
        _table(
            "coefficient checks",
            ["ell", "kind", "lhs", "rhs", "pass"],
            [(c["ell"], c["kind"], _fmt(c["lhs"]), _fmt(c["rhs"]), "yes" if c["pass"] else "NO") for c in report["checks"]],
        )
    )


def _render_euler(console: Console, rows: List[dict]) -> None:
    console.print(
        _table(
            "Euler factors",
            ["ell", "kind", "a_ell", "P(X) mod p", "d_ell", "coker dim"],
            [
                (r["ell"], r["kind"], r["a_ell"], r["poly"], r["d_ell"], _fmt(r["coker"]["dim"]))
                for r in rows
            ],
        )
    )


def _render_brink(console: Console, dossier: Dict[str, Any]) -> None:
    b = dossier["brink"]
    console.print(f"ell = {b['ell']}: ell^h = a^2 + ab + ((D+1)/4) b^2 with (a, b) = ({b['a']}, {b['b']})")
    sign = "-" if b["bstar"] < 0 else "+"
    console.print(f"(a + bω)^(p-1) = {b['astar']} {sign} {abs(b['bstar'])}ω")
    console.print(f"t = v_p(b*) = {b['t']}, s_ell = {b['s_ell']}")
    if b["flags"]:
        console.print("flags: " + ", ".join(b["flags"]))


def _render_steps(console: Console, steps: List[dict]) -> None:
    console.print(
        _table("hypothesis dossier", ["step", "status", "detail"], [(s["name"], s["status"], s["detail"]) for s in steps])
    )


def _render_local(console: Console, rows: List[dict]) -> None:
    def cells(row: dict) -> List[Any]:
        out: List[Any] = [row["ell"]]
        for tag in ("f1", "f2"):
            data = row[tag]
            out += [data["euler_factor"], data["d_ell"], _fmt(data["s_ell"]), data["lambda_ell"]]
        out += [_fmt(row["coker_f1"]["dim"]), _fmt(row["coker_f2"]["dim"])]
        return out

    console.print(
        _table(
            "local invariants",
            ["ell", "P_f1", "d_f1", "s", "λ_ell(f1)", "P_f2", "d_f2", "s", "λ_ell(f2)", "coker f1", "coker f2"],
            [cells(r) for r in rows],
        )
    )


def render_text(dossier: Dict[str, Any]) -> str:
    buffer = io.StringIO()
    console = _console(buffer)
    command = dossier["command"]
    console.print(f"lamtransfer {command} ({dossier['schema']})")
    _render_inputs(console, dossier)

    if command == "inspect":
        _render_inspect(console, dossier["inspect"])
    elif command == "congruent":
        _render_congruence(console, dossier["congruence"])
    elif command == "euler":
        _render_euler(console, dossier["euler"])
    elif command == "brink":
        _render_brink(console, dossier)
    else:
        _render_steps(console, dossier["steps"])
        if dossier.get("local_table"):
            _render_local(console, dossier["local_table"])
        if command == "transfer":
            console.print(dossier["mu_zero"]["statement"])
            result = dossier.get("result")
            if result:
                console.print(result["formula_trace"])
                console.print(f"λ(f1) provenance: {result['lambda_f1_provenance']}")
                console.print(f"λ(f2) = {result['lambda_f2']}")
            else:
                console.print("no λ emitted")
                for violation in dossier.get("violations", []):
                    console.print(f"  violated: {violation}")
    console.print(f"exit code {dossier['exit_code']}")
    return buffer.getvalue()


def render(dossier: Dict[str, Any], emit: str = "text") -> str:
    return render_json(dossier) if emit == "json" else render_text(dossier)
