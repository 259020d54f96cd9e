"""Command-line front end: ``multikoszul <command> [file] [options]``."""
from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from importlib import resources
from typing import Dict, List, Optional

from .jspaces import JFamily, compute_Jtilde
from .komplex import (CAP, MK, bar_tor_oracle, build_bimodule_complex, decide_multikoszul, homology_table,
                      is_exact, left_right_complexes, minimal_resolution, verify_complex, euler_check)
from .linalg import LinAlgError
from .presentation import (Presentation, TruncatedAlgebra, free_product, load_presentation, opposite,
                           parse_field)
from .tensoralg import CapExceeded, InputError, format_poly
from . import yoneda

SCHEMA = 1
EXIT_OK, EXIT_NOT_MK, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
COMMANDS = ("hilbert", "jspaces", "tor", "oracle", "check", "yoneda", "ainfty", "corpus")


# -- serialization --------------------------------------------------------------

def table_json(table: Dict[int, Dict[int, int]]) -> dict:
    """Nonzero entries keyed by homological then Adams degree."""
    out = {}
    for i in sorted(table):
        row = {str(n): d for n, d in sorted(table[i].items()) if d}
        if row:
            out[str(i)] = row
    return out


def emit_report(report: dict, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2)
    return render_text(report)


def _grid(table: dict, H: int, D: int, zeros: Optional[set] = None) -> List[str]:
    zeros = zeros or set()
    lines = ["  i\\n " + " ".join(f"{n:>3}" for n in range(D + 1))]
    for i in range(H + 1):
        row = table.get(str(i), {})
        cells = []
        for n in range(D + 1):
            d = row.get(str(n), 0)
            cells.append(f"{d:>3}" if d else ("  ." if (i, n) in zeros else "  0"))
        lines.append(f"{i:>5} " + " ".join(cells))
    return lines


def render_text(r: dict) -> str:
    H, D = r["bounds"]
    lines = [f"command: {r['command']}   bounds: H={H}, D={D}"]
    if "presentation" in r:
        pr = r["presentation"]
        lines.append(f"field {pr['field']}; gens " + ", ".join(f"{a}:{b}" for a, b in pr["gens"]))
        lines += [f"rel {x}" for x in pr["rels"]]
    if "hilbert" in r:
        lines.append("Hilbert series: " + " ".join(str(x) for x in r["hilbert"]))
    zeros = {tuple(c) for c in r.get("structural_zero", [])}
    for key, title in (("J", "dim J_i (rows i, columns Adams degree n)"), ("jdims", "dim J_i (rows i, columns Adams degree n)"),
                       ("tor", "dim Tor_i(k,k)_n"), ("bar_tor", "dim Tor_i(k,k)_n from the bar complex")):
        if key in r:
            lines.append(title + ("; '.' marks structural zeros" if zeros and key == "jdims" else ""))
            h = r.get("oracle_bounds", {}).get("H", H) if key == "bar_tor" else H
            d = r.get("oracle_bounds", {}).get("D", D) if key == "bar_tor" else D
            lines += _grid(r[key], h, d, zeros if key in ("J", "jdims") else None)
    if "verdict" in r:
        v = r["verdict"]
        lines.append(f"verdict: {v['status']} (H={H}, D={D})")
        if v.get("witness"):
            lines.append(f"first mismatch at (i, n) = {tuple(v['witness'])}: "
                         f"dim J = {v['witness_dims'][0]}, dim Tor = {v['witness_dims'][1]}")
        if v.get("euler_ok") is not None:
            lines.append(f"Euler identity: {'ok' if v['euler_ok'] else 'FAILS'}")
        for k, val in sorted(v.get("crosscheck", {}).items()):
            lines.append(f"cross-check {k}: {val}")
        lines += [f"note: {n}" for n in v.get("notes", [])]
        if v.get("message"):
            lines.append(v["message"])
    for key in ("stasheff", "stasheff_dual", "stasheff_reduced", "twisted", "k2", "associative", "unit",
                "counit", "agree", "jtilde_equal"):
        if key in r:
            val = r[key]
            if isinstance(val, dict):
                ok = val.get("ok", val.get("equal"))
                lines.append(f"{key}: {'ok' if ok else 'FAILED'}")
            else:
                lines.append(f"{key}: {val}")
    if "corpus" in r:
        for name, res in sorted(r["corpus"].items()):
            bad = [k for k, ok in sorted(res["checks"].items()) if not ok]
            lines.append(f"{name:<16} {res['status']:<28} " + ("all checks pass" if not bad else "FAILED: " + ", ".join(bad)))
    lines += [f"note: {n}" for n in r.get("notes", [])]
    if "timing" in r:
        lines.append(f"time: {r['timing']:.2f} s")
    return "\n".join(lines)


# -- commands -------------------------------------------------------------------

def _base(cmd: str, args, p: Optional[Presentation]) -> dict:
    r = {"schema": SCHEMA, "command": cmd, "bounds": [args.hdeg, args.adeg]}
    if p is not None:
        r["presentation"] = p.echo()
    return r


def _basis_json(jf: JFamily, H: int) -> dict:
    out = {}
    for i in range(H + 1):
        J = jf[i]
        row = {str(n): [format_poly(jf.gens, b, jf.F) for b in J[n].basis] for n in J.support()}
        if row:
            out[str(i)] = row
    return out


def cmd_hilbert(p, args) -> dict:
    r = _base("hilbert", args, p)
    r["hilbert"] = TruncatedAlgebra(p, args.adeg).hilbert_series()
    return r


def cmd_jspaces(p, args) -> dict:
    r = _base("jspaces", args, p)
    jf = JFamily(p, args.adeg, debug=args.debug).upto(args.hdeg)
    r["J"] = table_json(jf.dims(args.hdeg))
    if p.degree1_generated():
        jt = compute_Jtilde(p, args.hdeg, args.adeg)
        r["jtilde_equal"] = all(jt[i] == jf[i] for i in range(args.hdeg + 1))
    if args.debug:
        r["agree"] = not jf.mismatch_debug
    if args.basis:
        r["basis"] = _basis_json(jf, args.hdeg)
    return r


def cmd_tor(p, args) -> dict:
    r = _base("tor", args, p)
    res, tor = minimal_resolution(TruncatedAlgebra(p, args.adeg), args.hdeg, args.adeg)
    r["tor"] = table_json(tor)
    return r


def cmd_oracle(p, args) -> dict:
    h, d = args.oracle_bounds
    r = _base("oracle", args, p)
    A = TruncatedAlgebra(p, max(d, args.adeg))
    bar = bar_tor_oracle(A, h, d)
    _, tor = minimal_resolution(A, h, d)
    r["oracle_bounds"] = {"H": h, "D": d}
    r["bar_tor"] = table_json(bar)
    r["tor"] = table_json(tor)
    r["agree"] = r["bar_tor"] == r["tor"]
    r["bounds"] = [h, d]
    return r


def verdict_json(v) -> dict:
    return {"status": v.status, "bounds": list(v.bounds),
            "witness": list(v.witness) if v.witness else None,
            "witness_dims": list(v.witness_dims) if v.witness_dims else None,
            "euler_ok": v.euler_ok, "notes": list(v.notes), "crosscheck": dict(v.crosscheck),
            "message": v.message}


def cmd_check(p, args) -> dict:
    r = _base("check", args, p)
    v = decide_multikoszul(p, args.hdeg, args.adeg, debug=args.debug)
    if v.status == CAP:
        raise CapExceeded(v.message)
    r["verdict"] = verdict_json(v)
    r["witness"] = r["verdict"]["witness"]
    r["euler_ok"] = v.euler_ok
    r["jdims"] = table_json(v.jdims)
    r["tor"] = table_json(v.tor)
    r["structural_zero"] = [list(c) for c in v.structural_zero]
    return r


def _structure(p, args, n_max: int):
    v = decide_multikoszul(p, args.hdeg, args.adeg, consezero=False)
    if v.status == CAP:
        raise CapExceeded(v.message)
    jf = JFamily(p, args.adeg).upto(args.hdeg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        s = yoneda.ainf_coproducts(jf, n_max, args.adeg, args.hdeg, koszul=v.is_koszul, force=args.force)
    for note in s.notes:
        print(f"warning: {note}", file=sys.stderr)
    return v, jf, s


def cmd_yoneda(p, args) -> dict:
    r = _base("yoneda", args, p)
    v, jf, s = _structure(p, args, 2)
    tab = yoneda.yoneda_products(jf, args.hdeg, args.adeg, structure=s)
    r["verdict"] = verdict_json(v)
    r["products"] = tab.to_json()
    r["associative"] = yoneda.check_associativity(tab)
    r["unit"] = yoneda.check_unit(tab)
    r["k2"] = yoneda.k2_check(tab).to_json()
    r["notes"] = list(s.notes)
    return r


def _tensor_json(t: dict) -> list:
    return [[[list(e) for e in k], str(c)] for k, c in sorted(t.items())]


def cmd_ainfty(p, args) -> dict:
    r = _base("ainfty", args, p)
    v, jf, s = _structure(p, args, args.nmax)
    deltas = {}
    for n in range(2, args.nmax + 1):
        rows = {}
        for i in range(args.hdeg + 1):
            for x in s.elements(i):
                t = s.delta(n, x)
                if t:
                    rows[",".join(map(str, x))] = _tensor_json(t)
        deltas[str(n)] = rows
    products = {}
    for n in range(3, args.nmax + 1):
        rows = []
        for i in range(args.hdeg + 1):
            for inp, out in sorted(s.m_table(n, i).items()):
                rows.append({"inputs": [list(e) for e in inp],
                             "value": [[list(w), str(c)] for w, c in sorted(out.items())]})
        products[str(n)] = rows
    r["verdict"] = verdict_json(v)
    r["n_max"] = args.nmax
    r["coproducts"] = deltas
    r["higher_products"] = products
    r["stasheff"] = yoneda.check_stasheff(s).to_json()
    r["stasheff_dual"] = yoneda.check_stasheff(s, dual=True).to_json()
    r["stasheff_reduced"] = yoneda.check_stasheff(s, reduced=True).to_json()
    r["counit"] = yoneda.check_counit(s)
    r["twisted"] = yoneda.twisted_complex_check(s, TruncatedAlgebra(p, args.adeg)).to_json()
    r["notes"] = list(s.notes)
    return r


# -- corpus suite -------------------------------------------------------------------

def corpus_files() -> List[str]:
    base = resources.files("multikoszul") / "corpus"
    return sorted(str(f) for f in base.iterdir() if f.name.endswith(".alg"))


def run_property_suite(p: Presentation, H: int, D: int) -> dict:
    """All module-level properties on one algebra; returns {status, checks}."""
    checks: Dict[str, bool] = {}
    v = decide_multikoszul(p, H, D, debug=True)
    checks["recursion_variants_agree"] = v.crosscheck.get("recursion_variants_agree", False)
    mk = v.is_koszul
    checks["left_exact_matches_verdict"] = v.crosscheck.get("left_exact") == mk
    checks["right_exact_matches_verdict"] = v.crosscheck.get("right_exact") == mk
    A = TruncatedAlgebra(p, D)
    oh, od = min(H, 4), min(D, 8)
    _, tor = minimal_resolution(A, oh, od)
    checks["bar_oracle"] = table_json(bar_tor_oracle(A, oh, od)) == table_json(tor)
    jf = JFamily(p, D).upto(H)
    bi = build_bimodule_complex(A, jf, H)
    for c in (bi,) + left_right_complexes(bi):
        rep = verify_complex(c)
        checks[f"{c.kind}_square_zero"] = rep.ok
        checks[f"{c.kind}_minimal"] = rep.minimal
    if p.degree1_generated():
        jt = compute_Jtilde(p, H, min(D, 10))
        jfs = JFamily(p, min(D, 10)).upto(H)
        checks["j_equals_jtilde"] = all(jt[i] == jfs[i] for i in range(H + 1))
    checks["opposite_same_verdict"] = decide_multikoszul(opposite(p), H, D).status == v.status
    if mk:
        checks["euler"] = bool(v.euler_ok)
        s = yoneda.ainf_coproducts(jf, 4, D, H, koszul=True)
        checks["stasheff"] = yoneda.check_stasheff(s).ok
        checks["stasheff_dual"] = yoneda.check_stasheff(s, dual=True).ok
        checks["counit"] = yoneda.check_counit(s)
        checks["twisted"] = yoneda.twisted_complex_check(s, A).equal
        tab = yoneda.yoneda_products(jf, H, D, structure=s)
        checks["associative"] = yoneda.check_associativity(tab)
        checks["k2"] = yoneda.k2_check(tab).ok
    return {"status": v.status, "checks": checks}


def free_product_checks(a: Presentation, b: Presentation, H: int, D: int) -> dict:
    """The free product is multi-Koszul with J_i (i ≥ 1) the direct sum of the factors' J_i."""
    v = decide_multikoszul(free_product(a, b), H, D, consezero=False)
    va = decide_multikoszul(a, H, D, consezero=False)
    vb = decide_multikoszul(b, H, D, consezero=False)
    additive = v.status != CAP and all(
        v.jdims[i][n] == va.jdims[i][n] + vb.jdims[i][n] for i in range(1, H + 1) for n in range(D + 1))
    return {"status": v.status, "checks": {"free_product_koszul": v.is_koszul, "j_additive": additive}}


def cmd_corpus(p, args) -> dict:
    r = _base("corpus", args, None)
    files = [args.file] if args.file else corpus_files()
    results = {}
    for f in files:
        q = load_presentation(f, args.field_obj)
        results[q.name] = run_property_suite(q, args.hdeg, args.adeg)
    mk = sorted(n for n, res in results.items() if res["status"] == MK)
    pair = ["trunc2", "trunc3"] if {"trunc2", "trunc3"} <= set(mk) else mk[:2]
    if len(pair) == 2 and not args.file:
        by_name = {load_presentation(f).name: f for f in files}
        a, b = (load_presentation(by_name[n], args.field_obj) for n in pair)
        results["*".join(pair)] = free_product_checks(a, b, args.hdeg, args.adeg)
    r["corpus"] = results
    r["ok"] = all(all(res["checks"].values()) for res in results.values())
    return r


HANDLERS = {"hilbert": cmd_hilbert, "jspaces": cmd_jspaces, "tor": cmd_tor, "oracle": cmd_oracle,
            "check": cmd_check, "yoneda": cmd_yoneda, "ainfty": cmd_ainfty, "corpus": cmd_corpus}


# -- argument handling ------------------------------------------------------------

def _pair(text: str):
    try:
        h, d = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected H,D")
    return h, d


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="multikoszul", description="Multi-Koszul property, J spaces, Tor and "
                                 "A-infinity structures of graded algebras, exactly up to degree bounds.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("file", nargs="?" if name == "corpus" else None,
                        help="presentation file" + (" (default: the shipped corpus)" if name == "corpus" else ""))
        sp.add_argument("--hdeg", type=int, default=6, help="homological bound H (default 6)")
        sp.add_argument("--adeg", type=int, default=12, help="Adams degree bound D (default 12)")
        sp.add_argument("--field", default=None, help="'Q' or 'F <p>' (overrides the file)")
        out = sp.add_mutually_exclusive_group()
        out.add_argument("--json", dest="format", action="store_const", const="json")
        out.add_argument("--text", dest="format", action="store_const", const="text")
        sp.add_argument("--debug", action="store_true", help="run cross-checks")
        sp.add_argument("--basis", action="store_true", help="dump J bases")
        sp.add_argument("--timing", action="store_true", help="include wall time (breaks byte-identical output)")
        sp.add_argument("--oracle-bounds", type=_pair, default=(4, 8), metavar="H,D")
        sp.add_argument("--expect-koszul", action="store_true", help="exit 1 unless multi-Koszul")
        sp.add_argument("--force", action="store_true", help="compute formal tables without the hypothesis")
        sp.add_argument("--nmax", type=int, default=4, help="highest coproduct Δ_n (default 4)")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    args.format = args.format or "json"
    try:
        if args.hdeg < 1 or args.adeg < 2:
            raise InputError("bounds need H >= 1 and D >= 2")
        args.field_obj = parse_field(args.field) if args.field else None
        p = None
        if args.command != "corpus":
            p = load_presentation(args.file, args.field_obj)
        start = time.perf_counter()
        report = HANDLERS[args.command](p, args)
        if args.timing:
            report["timing"] = time.perf_counter() - start
    except CapExceeded as e:
        print(f"error: cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except (InputError, LinAlgError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    print(emit_report(report, args.format))
    if args.command == "corpus" and not report["ok"]:
        return EXIT_NOT_MK
    if args.expect_koszul and "verdict" in report and report["verdict"]["status"] != MK:
        return EXIT_NOT_MK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
