"""Command-line front end: ``regrep <command> --ring SPEC --n N ...``.

All payloads are JSON with sorted keys so that identical invocations give
byte-identical output; ``--pretty`` renders a plain-text summary instead.
Exit codes: 0 ok, 1 a mathematical check failed, 2 usage error, 3 cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import construction as cn
from . import matrices as mx
from . import oracle as orc
from . import parahoric as ph
from .errors import CapExceeded, ParseError, RegRepError
from .localring import make_ring, parse_ring_spec
from .orbits import parse_orbit, partition_of

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3

# ledger entries that are observations, not assertions
RECORDED_ONLY = ("centralizer-surjective-m",)

PARAHORIC_LEMMAS = {
    "trace-duality": "trace-duality", "trace-form": "trace-duality",
    "lattice-chain": "filtration", "parahoric-algebra": "filtration",
    "radical-powers": "filtration", "shift-lattices": "filtration",
    "shift-transporter": "filtration", "shift-algebra": "filtration",
    "pA = P^e": "filtration", "filtration-strict": "filtration",
    "bottom-layers": "filtration", "commutators": "groups",
    "abelian-layer": "groups", "layer-orders": "groups",
}


class UsageError(RegRepError):
    pass


def dumps(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def is_failure(entry: dict) -> bool:
    return entry["status"] == "fail" and not entry["lemma"].startswith(RECORDED_ONLY)


def resolve_cap(arg: int | None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get("REGREP_CAP")
    if env is None:
        return ph.DEFAULT_CAP
    try:
        return int(env)
    except ValueError:
        raise ParseError(f"REGREP_CAP must be an integer, got {env!r}") from None


def _ring(args):
    return make_ring(parse_ring_spec(args.ring))


def select_orbits(ring, n: int, selector: str):
    if selector == "all-regular":
        return cn.regular_orbits(ring, n)
    orbit = parse_orbit(ring, selector, default_level=ring.r // 2)
    if orbit.n != n:
        raise ParseError(f"orbit {selector!r} has degree {orbit.n}, expected {n}")
    return [orbit]


# ---------------------------------------------------------------------------
# commands


def cmd_ring_info(args) -> tuple[dict, int]:
    ring = _ring(args)
    units = sum(1 for a in range(ring.size) if ring.is_unit(a))
    return {
        "ring": str(ring.spec), "p": ring.p, "f": ring.spec.f, "r": ring.r, "q": ring.q,
        "size": ring.size, "units": units, "psi_modulus": ring.psi_modulus,
        "gl_order": {str(n): mx.unit_group_order(ring, n) for n in (1, 2, 3)},
    }, EXIT_OK


def cmd_orbits(args) -> tuple[dict, int]:
    ring = _ring(args)
    level = args.level if args.level is not None else max(ring.r // 2, 1)
    if not 1 <= level <= ring.r:
        raise ParseError(f"level {level} outside [1, {ring.r}]")
    out = []
    for orbit in cn.regular_class_list(ring, args.n, level):
        part = partition_of(orbit.rep)
        out.append({"orbit": str(orbit), "charpoly": orbit.label(),
                    "blocks": list(part.block_sizes()), "shape": [list(s) for s in part.shape()]})
    return {"ring": str(ring.spec), "N": args.n, "level": level, "count": len(out),
            "orbits": out}, EXIT_OK


def _wanted(checks: list[str] | None, lemma: str) -> bool:
    return not checks or any(lemma == c or lemma.startswith(c + "-") for c in checks)


def cmd_verify_lemmas(args) -> tuple[dict, int]:
    ring = _ring(args)
    cap = resolve_cap(args.cap)
    checks = [c.strip() for c in args.checks.split(",")] if args.checks else None
    suites = None
    if checks:
        suites = {PARAHORIC_LEMMAS[c] for c in checks if c in PARAHORIC_LEMMAS}
        suites |= {c for c in checks if c in ph.SUITES}
    entries = []
    if suites is None or suites:
        entries += ph.lemma_suite(ring, args.n, sorted(suites) if suites else None, cap=cap)
    construction_wanted = not checks or any(c not in PARAHORIC_LEMMAS and c not in ph.SUITES
                                            for c in checks)
    if construction_wanted and ring.r >= 2:
        for rep in _run_constructions(ring, args.n, select_orbits(ring, args.n, args.orbit),
                                      cap, args.jobs):
            entries += rep["lemma_ledger"]
    entries = [e for e in entries if _wanted(checks, e["lemma"])
               or (checks and PARAHORIC_LEMMAS.get(e["lemma"]) in set(checks) - set(PARAHORIC_LEMMAS))]
    failed = [e for e in entries if is_failure(e)]
    return {"ring": str(ring.spec), "N": args.n, "checks": checks or "all",
            "total": len(entries), "failed": len(failed), "ledger": entries}, \
        EXIT_FAIL if failed else EXIT_OK


def _construct_one(ring_text: str, n: int, orbit_text: str, cap: int) -> dict:
    ring = make_ring(parse_ring_spec(ring_text))
    orbit = parse_orbit(ring, orbit_text)
    return _report_json(cn.construct(ring, n, orbit, cap=cap))


def _report_json(rep: cn.RepReport) -> dict:
    out = rep.to_json()
    out["ok"] = rep.ok
    return out


def _run_constructions(ring, n: int, orbits, cap: int, jobs: int) -> list[dict]:
    if jobs <= 1 or len(orbits) <= 1:
        G = None
        out = []
        for orbit in orbits:
            rep = cn.construct(ring, n, orbit, G=G, cap=cap)
            G = rep.reps[0].chi.group if rep.reps else G
            out.append(_report_json(rep))
        return out
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_construct_one, str(ring.spec), n, str(o), cap) for o in orbits]
        return [f.result() for f in futures]


def cmd_construct(args) -> tuple[dict, int]:
    ring = _ring(args)
    if ring.r < 2:
        raise UsageError("construct needs r >= 2")
    cap = resolve_cap(args.cap)
    reports = _run_constructions(ring, args.n, select_orbits(ring, args.n, args.orbit),
                                 cap, args.jobs)
    payload = {"ring": str(ring.spec), "N": args.n, "r": ring.r, "reports": reports}
    if args.out:
        _write(args.out, payload)
    return payload, EXIT_OK if all(r["ok"] for r in reports) else EXIT_FAIL


def cmd_oracle(args) -> tuple[dict, int]:
    ring = _ring(args)
    cap = min(resolve_cap(args.cap), orc.ORACLE_CAP)
    census = orc.full_census(ring, args.n, cap=cap)
    payload = census.to_json()
    if args.dump:
        _write(args.dump, payload)
    ok = payload["sum_degree_squares"] == payload["order"] and all(
        i["clifford_ok"] for i in payload["irreps"])
    return payload, EXIT_OK if ok else EXIT_FAIL


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None


def _reports_from(payload) -> list[dict]:
    if isinstance(payload, list):
        return payload
    return payload["reports"] if "reports" in payload else [payload]


def cmd_compare(args) -> tuple[dict, int]:
    census = _load(args.census)
    reports = []
    for path in args.report:
        reports += _reports_from(_load(path))
    verdict = orc.compare(census, reports)
    if census["N"] == 2:
        verdict["pullback_remark"] = orc.pullback_remark(census)
    return verdict, EXIT_OK if verdict["match"] else EXIT_FAIL


def cmd_census(args) -> tuple[dict, int]:
    ring = _ring(args)
    if ring.r < 2:
        raise UsageError("census needs r >= 2")
    cap = min(resolve_cap(args.cap), orc.ORACLE_CAP)
    census = orc.full_census(ring, args.n, cap=cap)
    reports = _run_constructions(ring, args.n, cn.regular_orbits(ring, args.n), cap, args.jobs)
    verdict = orc.compare(census, reports)
    kernel = orc.kernel_check(census)
    summary = {
        "ring": str(ring.spec), "N": args.n, "order": census.group.order,
        "verdict": verdict, "kernel_check": kernel,
        "degrees": {o["orbit"]: sorted({p["degree"] for r in reports
                                        if r["orbit"].split("charpoly=")[1].split(",")[0] == o["orbit"]
                                        for p in r["reps"]}) for o in verdict["orbits"]},
        "ledger_ok": all(r["ok"] for r in reports),
    }
    if args.out:
        _write(args.out, summary)
    ok = verdict["match"] and summary["ledger_ok"]
    return summary, EXIT_OK if ok else EXIT_FAIL


def _write(path: str, payload) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(payload) + "\n")


# ---------------------------------------------------------------------------
# rendering


def render(command: str, payload: dict) -> str:
    lines = []
    if command == "ring-info":
        lines += [f"{k}: {payload[k]}" for k in sorted(payload)]
    elif command == "orbits":
        lines.append(f"{payload['count']} regular orbits of gl_{payload['N']} at level {payload['level']}")
        lines += [f"  {o['charpoly']:<24} blocks={o['blocks']}" for o in payload["orbits"]]
    elif command == "verify-lemmas":
        lines.append(f"{payload['total']} checks, {payload['failed']} failed")
        lines += [f"  {'fail' if is_failure(e) else 'note'} {e['lemma']:<28} {e['instance']}" for e in payload["ledger"]
                  if e["status"] != "pass"]
    elif command == "construct":
        for rep in payload["reports"]:
            degs = sorted(p["degree"] for p in rep["reps"])
            lines.append(f"{rep['orbit']}: {len(degs)} reps, degrees {degs}, ok={rep['ok']}")
    elif command == "oracle":
        regular = sum(1 for i in payload["irreps"] if i["regular"])
        lines.append(f"|G| = {payload['order']}, {len(payload['irreps'])} irreps, {regular} regular")
    elif command == "compare":
        lines.append(f"match: {payload['match']}")
        lines += [f"  {o['orbit']:<24} built {o['constructed']:>3}  oracle {o['oracle']:>3}  "
                  f"{'ok' if o['match'] else 'MISMATCH'}" for o in payload["orbits"]]
        if "pullback_remark" in payload:
            lines.append(f"non-regular pull-backs: {payload['pullback_remark']}")
    elif command == "census":
        v = payload["verdict"]
        lines.append(f"|G| = {payload['order']}, match: {v['match']}")
        lines += [f"  {o['orbit']:<24} {o['constructed']:>3} reps, degrees "
                  f"{payload['degrees'][o['orbit']]}" for o in v["orbits"]]
        k = payload["kernel_check"]
        lines.append(f"non-regular irreps: {k['nonregular']}, pull-backs: {k['pullbacks']}, "
                     f"after twist: {k['pullbacks_after_twist']}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point

COMMANDS = {
    "ring-info": cmd_ring_info,
    "orbits": cmd_orbits,
    "verify-lemmas": cmd_verify_lemmas,
    "construct": cmd_construct,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "census": cmd_census,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regrep", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=None,
                        help="enumeration cap (default: $REGREP_CAP or 2^22)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for per-orbit work")
    common.add_argument("--pretty", action="store_true", help="plain-text summary instead of JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_ring(name, n_required=True):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--ring", required=True, help="e.g. Zp:p=2,r=3 or Fqt:p=2,f=1,r=3")
        if n_required:
            p.add_argument("--n", type=int, required=True)
        return p

    with_ring("ring-info", n_required=False)
    p = with_ring("orbits")
    p.add_argument("--level", type=int, default=None)
    p = with_ring("verify-lemmas")
    p.add_argument("--checks", default=None, help="comma-separated lemma ids")
    p.add_argument("--orbit", default="all-regular")
    p = with_ring("construct")
    p.add_argument("--orbit", default="all-regular", help="all-regular or charpoly=...")
    p.add_argument("--out", default=None)
    p = with_ring("oracle")
    p.add_argument("--dump", default=None)
    p = sub.add_parser("compare", parents=[common])
    p.add_argument("--census", required=True)
    p.add_argument("--report", required=True, action="append")
    p = with_ring("census")
    p.add_argument("--out", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "n", 1) < 1:
        print("error: --n must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        payload, code = COMMANDS[args.command](args)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ValueError as exc:
        # bad ring parameters, non-regular orbits and the like
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RegRepError as exc:
        print(f"check failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(render(args.command, payload) if args.pretty else dumps(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
