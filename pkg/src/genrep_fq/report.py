"""Verification suites and the report format shared by the command line.

A report is a plain dict with a top-level ``"schema": 1``.  Wall-clock
timings are kept under ``"timing"`` keys and removed by :func:`canonical`
before JSON output, so repeated runs produce identical bytes.
"""
from __future__ import annotations

import json
import time

from .genrep import (builtin_case, make_builtin, rank_filtration, splitting_solver, verify_genrep,
                     theta, is_trivial, psi)
from .kovacs import solve_singular_unit, verify_unit
from .matmonoid import format_mat, hom_set
from .morita import hom_vanishing, verify_morita, verify_recollement
from .rook import verify_rook
from .scalars import QQ

SCHEMA = 1

PROFILES = {
    "desk": {
        "kovacs": [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 2), (5, 2)],
        "morita": [(2, 1, None), (2, 2, None), (3, 1, None), (3, 2, None), (2, 3, 10**5)],
        "hom_vanishing": [(2, 3)],
        "rook": [(0, None), (1, None), (2, None), (3, None), (4, None)],
        "genrep": [(2, 3), (3, 2)],
        "recollement": [(2, 1), (2, 2)],
    },
    "extended": {
        "kovacs": [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 2), (5, 2), (7, 2)],
        "morita": [(2, 1, None), (2, 2, None), (3, 1, None), (3, 2, None), (4, 2, None),
                   (2, 3, 10**5)],
        "hom_vanishing": [(2, 3), (3, 2)],
        "rook": [(0, None), (1, None), (2, None), (3, None), (4, None), (5, 10**5)],
        "genrep": [(2, 3), (3, 2)],
        "recollement": [(2, 1), (2, 2), (3, 1), (3, 2)],
    },
}


def new_report(command: str, config: dict) -> dict:
    return {"schema": SCHEMA, "command": command, "config": config, "checks": [],
            "status": "pass", "payload": {}}


def add_check(report: dict, name: str, ok: bool | None, **extra) -> None:
    status = "skip" if ok is None else ("pass" if ok else "fail")
    report["checks"].append({"name": name, "status": status, **extra})
    if status == "fail":
        report["status"] = "fail"


def absorb(report: dict, prefix: str, sub: dict) -> None:
    """Copy the checks of a module-level report under ``prefix``."""
    for c in sub["checks"]:
        extra = {k: v for k, v in c.items() if k not in ("name", "status")}
        add_check(report, f"{prefix}: {c['name']}", c["status"] == "pass", **extra)


def canonical(obj):
    """Drop timing entries recursively."""
    if isinstance(obj, dict):
        return {k: canonical(v) for k, v in obj.items() if k != "timing"}
    if isinstance(obj, list):
        return [canonical(v) for v in obj]
    return obj


def dumps(report: dict) -> str:
    return json.dumps(canonical(report), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# suites


def idempotent_payload(u) -> dict:
    H = hom_set(u.eS.ctx, u.n, u.n)
    return {"orbits": u.to_json()["orbits"],
            "support": [{"matrix": format_mat(H.mat(a)), "coefficient": u.ring.fmt(c)}
                        for a, c in sorted(u.eS.terms.items())],
            "support_size": len(u.eS.terms)}


def suite_kovacs(report: dict, sizes, ring=QQ) -> None:
    out = []
    for q, n in sizes:
        t0 = time.perf_counter()
        u = solve_singular_unit(q, n, ring)
        rep = verify_unit(u)
        absorb(report, f"kovacs q={q} n={n}", rep)
        out.append({"q": q, "n": n, "orbits": u.to_json()["orbits"],
                    "timing": round(time.perf_counter() - t0, 3)})
    report["payload"]["kovacs"] = out


def suite_morita(report: dict, sizes, ring=QQ, seed: int = 0) -> None:
    out = []
    for q, n, samples in sizes:
        rep = verify_morita(q, n, ring, samples=samples, seed=seed)
        absorb(report, f"morita q={q} n={n}", rep)
        ident = next(c["identity"] for c in rep["checks"] if c["name"] == "dimension_identity")
        out.append({"q": q, "n": n, "dimension_identity": ident, "timing": rep["timing"]})
    report["payload"]["morita"] = out


def suite_hom_vanishing(report: dict, sizes, ring=QQ) -> None:
    out = []
    for q, top in sizes:
        for m in range(top + 1):
            for n in range(top + 1):
                r = hom_vanishing(q, m, n, ring)
                add_check(report, f"hom_vanishing q={q} m={m} n={n}", r["ok"],
                          **{k: v for k, v in r.items() if k not in ("ok", "m", "n")})
                out.append({"q": q, **r})
    report["payload"]["hom_vanishing"] = out


def suite_rook(report: dict, sizes, ring=QQ, seed: int = 0) -> None:
    out = []
    for n, samples in sizes:
        rep = verify_rook(n, ring, samples=samples, seed=seed)
        absorb(report, f"rook n={n}", rep)
        ident = next(c["identity"] for c in rep["checks"] if c["name"] == "dimension_identity")
        out.append({"n": n, "dimension_identity": ident, "timing": rep["timing"]})
    report["payload"]["rook"] = out


def suite_genrep(report: dict, sizes, ring=QQ, seed: int = 0) -> None:
    out = []
    for q, N in sizes:
        rep = verify_genrep(q, N, ring, seed=seed)
        for row in rep["functors"]:
            for k, v in row.items():
                if isinstance(v, bool):
                    add_check(report, f"genrep q={q} N={N} {row['functor']}: {k}", v)
        add_check(report, f"genrep q={q} N={N}: multiplicity_identity",
                  rep["multiplicity_identity"])
        out.append({"q": q, "N": N, "functors": [
            {k: v for k, v in r.items() if not isinstance(v, bool)} for r in rep["functors"]]})
    report["payload"]["genrep"] = out


def suite_recollement(report: dict, sizes, ring=QQ) -> None:
    out = []
    for q, n in sizes:
        rep = verify_recollement(q, n, ring)
        for row in rep["battery"]:
            ok = row["l_equals_r"] and row["e_l_is_N"] and row["e_r_is_N"]
            add_check(report, f"recollement q={q} n={n} {row['module']}", ok,
                      dims=[row["dim"], row["dim_l"], row["dim_r"]])
        for t in rep["round_trips"]:
            add_check(report, f"recollement q={q} n={n} {t['case']}", t["ok"])
        out.append({"q": q, "n": n, "battery": rep["battery"]})
    report["payload"]["recollement"] = out


def suite_split(report: dict, ring=QQ, N: int = 2) -> None:
    out = []
    for cat, case, expect in (("fin", "eps", False), ("epi", "incl12", False),
                              ("fin", "identity", True), ("epi", "identity", True)):
        res = split_case(cat, case, N, ring)
        ok = res.split == expect and (expect or bool(res.certificate_valid))
        add_check(report, f"split {cat} {case} N={N}", ok,
                  result="Split" if res.split else "NoSplit")
        out.append({"category": cat, "case": case, **res.to_json(ring)})
    report["payload"]["split"] = out


def split_case(category: str, case: str, N: int, ring=QQ):
    F, G, tau, mode = builtin_case(category, case, N, ring)
    return splitting_solver(F, G, tau, mode)


def run_verify(target: str, profile: str = "desk", q=None, n=None, N=None, ring=QQ,
               seed: int = 0, samples=None, command: str = "") -> dict:
    """Run one suite (or ``all``) at the profile sizes, or at a single given size."""
    prof = PROFILES[profile]
    config = {"target": target, "profile": profile, "coeff_ring": ring.name, "seed": seed}
    if q is not None:
        config["q"] = q
    if n is not None:
        config["n"] = n
    if N is not None:
        config["N"] = N
    report = new_report(command, config)

    def pick(name, default):
        if name == "kovacs" and (q or n):
            return [(q or 2, n if n is not None else 2)]
        if name == "morita" and (q or n):
            nn = n if n is not None else 2
            qq = q or 2
            return [(qq, nn, samples if samples else (10**5 if qq ** (nn * nn) > 256 else None))]
        if name == "hom_vanishing" and (q or n):
            return [(q or 2, n if n is not None else 3)]
        if name == "rook" and n is not None:
            return [(n, samples)]
        if name == "genrep" and (q or N):
            return [(q or 2, N if N is not None else 3)]
        if name == "recollement" and (q or n):
            return [(q or 2, n if n is not None else 2)]
        return default

    targets = ["kovacs", "morita", "rook", "genrep", "recollement"] if target == "all" else [target]
    for t in targets:
        if t == "kovacs":
            suite_kovacs(report, pick("kovacs", prof["kovacs"]), ring)
        elif t == "morita":
            suite_morita(report, pick("morita", prof["morita"]), ring, seed)
            suite_hom_vanishing(report, pick("hom_vanishing", prof["hom_vanishing"]), ring)
        elif t == "rook":
            suite_rook(report, pick("rook", prof["rook"]), ring, seed)
        elif t == "genrep":
            suite_genrep(report, pick("genrep", prof["genrep"]), ring, seed)
            suite_split(report, ring)
        elif t == "recollement":
            suite_recollement(report, pick("recollement", prof["recollement"]), ring)
    return report


def run_genrep(functor: str, q: int, N: int, action: str, ring=QQ, command: str = "",
               F=None) -> dict:
    report = new_report(command, {"functor": functor, "q": q, "N": N, "action": action,
                                  "coeff_ring": ring.name})
    F = F if F is not None else make_builtin(functor, q, ring, N)
    func = F.check_functoriality()
    add_check(report, "functoriality", True, pairs=func["pairs"], exhaustive=func["exhaustive"])
    report["payload"]["dims"] = F.dims
    if action == "filtration":
        filt = rank_filtration(F)
        add_check(report, "monotone", filt.checks["monotone"])
        add_check(report, "stabilizes", filt.checks["stabilizes"])
        add_check(report, "splitting_dimension_formula", filt.checks["splitting"],
                  **({"note": filt.checks["splitting_note"]} if "splitting_note" in filt.checks
                     else {}))
        report["payload"]["filtration"] = filt.to_json()
        if filt.checks["splitting"] is None:
            report["status"] = "hypothesis_failure"
        return report
    mods = theta(F)
    report["payload"]["theta"] = [{"k": k, "dim": M.dim, "trivial": is_trivial(M),
                                   "character": [ring.fmt(c) for c in M.character()]}
                                  for k, M in enumerate(mods)]
    if action == "roundtrip":
        G = psi(mods, q, ring, N)
        add_check(report, "psi_theta_dims", G.dims == F.dims, dims=G.dims)
        back = theta(G)
        add_check(report, "theta_psi_characters",
                  all(a.character() == b.character() for a, b in zip(mods, back)))
    return report


def format_text(report: dict) -> str:
    lines = [f"{report['command'] or 'report'}: {report['status'].upper()}"]
    for key, val in sorted(report["config"].items()):
        lines.append(f"  {key} = {val}")
    for c in report["checks"]:
        extra = {k: v for k, v in c.items() if k not in ("name", "status")}
        tail = "  " + ", ".join(f"{k}={v}" for k, v in extra.items()) if extra else ""
        lines.append(f"  [{c['status']}] {c['name']}{tail}")
    pay = report["payload"]
    for key in ("morita", "rook"):
        for row in pay.get(key, []):
            tag = f"q={row['q']} n={row['n']}" if key == "morita" else f"n={row['n']}"
            lines.append(f"  {key} {tag}: {row['dimension_identity']}")
    if "orbits" in pay:
        lines.append("  orbit form of e^S:")
        for o in pay["orbits"]:
            lines.append(f"    {o['coefficient']:>8} * sum over orbit of {o['representative']} "
                         f"(size {o['size']})")
        lines.append(f"  full support ({pay['support_size']} matrices):")
        for t in pay["support"]:
            lines.append(f"    {t['coefficient']:>8}  {t['matrix']}")
    if "theta" in pay:
        for row in pay["theta"]:
            lines.append(f"  theta_{row['k']}: dim {row['dim']}"
                         f"{' (trivial action)' if row['trivial'] and row['dim'] else ''}")
    if "filtration" in pay:
        tab = pay["filtration"]["table"]
        lines.append("  dim F^k(F^m), rows k, columns m:")
        for k, row in enumerate(tab):
            lines.append(f"    k={k}: " + " ".join(f"{v:>5}" for v in row))
    if "split" in pay:
        for row in pay["split"] if isinstance(pay["split"], list) else [pay["split"]]:
            lines.append(f"  {row.get('category', '')} {row.get('case', '')}: {row['result']}")
            if "certificate" in row:
                lines.append(f"    certificate (equation: multiplier): {row['certificate']}")
                lines.append(f"    equations combined: {row['explanation']}")
    return "\n".join(lines) + "\n"
