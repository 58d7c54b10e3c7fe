"""Command-line runner for JSON scenarios.

``hwcolim run FILE`` executes every task; ``hwcolim <command> FILE`` runs only
tasks of that command. Exit status: 0 all pass, 1 a verdict failed, 2 parse or
validation error, 3 unsound window without ``--allow-heuristic``.
"""

import argparse
import json
import os
import sys
import time

import numpy as np

from . import intmat as im
from .chain import GradedAbelianGroup, UnsoundWindow, homology
from .scenario import ScenarioError, ValidationFailure, build_all, check_task_refs, load

REPORT_VERSION = 1
COMMANDS = ["validate", "homology", "wcolim", "bar-compare", "hocolim", "cofrep", "reedy", "cube",
            "dold-kan", "dwyer-kan", "collapse"]
DEFAULT_WINDOW = (0, 2)


class TaskError(ValueError):
    pass


def _jsonable(x):
    """Plain JSON values with deterministic ordering."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (frozenset, set)):
        return sorted(str(v) for v in x)
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, float):
        return "inf" if x == float("inf") else x
    try:
        return int(x)
    except (TypeError, ValueError):
        return str(x)


def _hom_json(H):
    return H.to_json()


def _verdict_json(v):
    return {"ok": bool(v.ok), "where": _jsonable(v.where), "message": v.message}


# ---------------------------------------------------------------------------
# task runners: each returns a dict; a "verdict" key makes the task verdict-bearing


def _window(task, opts):
    if opts.window is not None:
        return opts.window
    w = task.get("window")
    if w is None:
        return DEFAULT_WINDOW
    if not (isinstance(w, list) and len(w) == 2):
        raise TaskError("window must be [a, b]")
    return int(w[0]), int(w[1])


def _N(task, opts):
    if opts.truncate is not None:
        return opts.truncate
    return task.get("N")


def _ref(sc, task, key, section):
    if key not in task:
        raise TaskError("task needs %r" % key)
    return sc.get(section, task[key], "task.%s" % key)


def run_validate(sc, task, opts):
    names = ["%s.%s" % (sec, n) for sec, n in sc.order]
    return {"validated": names, "verdict": {"ok": True, "where": None, "message": ""}}


def run_homology(sc, task, opts):
    if "complex" in task:
        C = _ref(sc, task, "complex", "complexes")
        H = homology(C, task.get("window") and _window(task, opts))
        return {"homology": _hom_json(H), "ranks": _jsonable({n: C.rank(n) for n in C.degrees()})}
    from .simplicial import realize
    X = _ref(sc, task, "simplicial", "simplicial")
    w = _window(task, opts)
    R = realize(X, w)
    if not R.certificate.sound and not opts.allow_heuristic:
        raise UnsoundWindow("realization of %s is %s on %s" % (task["simplicial"], R.certificate.mode, w))
    return {"homology": _hom_json(homology(R.complex, w)), "certificate": R.certificate.to_json(),
            "rank_table": _jsonable(X.rank_table())}


def run_wcolim(sc, task, opts):
    from .colim import weighted_colimit, yoneda_check
    W = _ref(sc, task, "weight", "presheaves")
    D = _ref(sc, task, "diagram", "diagrams")
    out = {}
    try:
        col = weighted_colimit(W, D)
        out["homology"] = _hom_json(homology(col.complex))
        out["free"] = True
    except im.NonFreeCokernel as exc:
        out["free"] = False
        out["torsion"] = _jsonable(exc.torsion)
        out["where"] = _jsonable(exc.where)
    if "yoneda" in task:
        c = sc._obj(D.host, task["yoneda"], "task.yoneda")
        out["verdict"] = _verdict_json(yoneda_check(D, c))
    return out


def run_bar_compare(sc, task, opts):
    from .colim import bar_compare
    W = _ref(sc, task, "weight", "presheaves")
    D = _ref(sc, task, "diagram", "diagrams")
    r = bar_compare(W, D, _window(task, opts), N=_N(task, opts), allow_heuristic=opts.allow_heuristic)
    return {"verdict": _verdict_json(r.verdict), "bar_homology": _hom_json(r.bar_homology),
            "colimit_homology": _hom_json(r.colimit_homology), "certificate": r.certificate.to_json(),
            "rank_table": _jsonable(r.rank_table), "cofibrancy": r.cofibrancy, "N": r.N}


def run_hocolim(sc, task, opts):
    from .colim import bar_compare, bk_hocolim, bk_terminal_map, cofibrant_replacement
    from .enriched import constant_presheaf
    from .simplicial import window_quasi_iso
    D = _ref(sc, task, "diagram", "diagrams")
    w = _window(task, opts)
    hc = bk_hocolim(D, w, N=_N(task, opts), allow_heuristic=opts.allow_heuristic)
    H = homology(hc.complex, w)
    out = {"homology": _hom_json(H), "certificate": hc.certificate.to_json(),
           "rank_table": _jsonable(hc.simplicial.rank_table())}
    if "terminal" in task:
        t = sc._obj(D.host, task["terminal"], "task.terminal")
        out["verdict"] = _verdict_json(window_quasi_iso(bk_terminal_map(D, t, hc), w))
    if task.get("compare_bar"):
        rep = cofibrant_replacement(constant_presheaf(D.host), w, allow_heuristic=opts.allow_heuristic)
        r = bar_compare(rep.weight, D, w, allow_heuristic=opts.allow_heuristic)
        same = r.bar_homology == H
        out["weighted_homology"] = _hom_json(r.bar_homology)
        out["verdict"] = {"ok": bool(same and r.quasi_iso), "where": None,
                          "message": "" if same else "weighted and conical homotopy colimits differ"}
    return out


def run_cofrep(sc, task, opts):
    from .colim import cofibrant_replacement
    W = _ref(sc, task, "weight", "presheaves")
    w = _window(task, opts)
    rep = cofibrant_replacement(W, w, N=_N(task, opts), allow_heuristic=opts.allow_heuristic)
    objs = W.host.objects
    bad = [c for c in objs if not rep.verdicts[c]]
    return {"pointwise": {str(c): _verdict_json(rep.verdicts[c]) for c in objs},
            "certificates": {str(c): rep.certificates[c].to_json() for c in objs},
            "values": {str(c): _hom_json(homology(rep.weight.value(c), w)) for c in objs},
            "verdict": {"ok": not bad, "where": _jsonable(bad[0]) if bad else None,
                        "message": rep.verdicts[bad[0]].message if bad else ""}}


def run_reedy(sc, task, opts):
    from .colim import reedy_report
    X = _ref(sc, task, "simplicial", "simplicial")
    if getattr(X, "bar", None) is None:
        raise TaskError("reedy needs a bar construction")
    rep = reedy_report(X)
    bad = [v for v in rep if not v]
    return {"levels": [_verdict_json(v) for v in rep],
            "verdict": _verdict_json(bad[0]) if bad else {"ok": True, "where": None, "message": ""}}


def run_cube(sc, task, opts):
    from .chain import is_cofibration
    from .colim import composition_law_check, pushout_corner_map
    if "composition" in task:
        f, g = (sc.get("maps", m, "task.composition") for m in task["composition"])
        return {"verdict": _verdict_json(composition_law_check(f, g))}
    X = _ref(sc, task, "cube", "cubes")
    try:
        cm = pushout_corner_map(X)
    except im.NonFreeCokernel as exc:
        return {"corner_free": False, "torsion": _jsonable(exc.torsion),
                "verdict": {"ok": False, "where": _jsonable(exc.where), "message": str(exc)}}
    v = is_cofibration(cm.map)
    return {"corner_free": True, "corner_source_homology": _hom_json(homology(cm.map.source)),
            "verdict": _verdict_json(v)}


def run_dold_kan(sc, task, opts):
    from .simplicial import dold_kan_gamma, dold_kan_normalize
    C = _ref(sc, task, "complex", "complexes")
    if C.rank(C.lo) and C.lo < 0:
        raise TaskError("dold-kan needs a complex in degrees >= 0")
    N = _N(task, opts) or max(1, C.hi)
    A = dold_kan_gamma(C, N)
    back = dold_kan_normalize(A)
    ok = back == _truncate(C, N)
    return {"ranks": _jsonable(A.rank_table()), "N": N,
            "verdict": {"ok": ok, "where": None, "message": "" if ok else "normalize(gamma(C)) != C"}}


def _truncate(C, N):
    """Degrees 0..N of C, the part a level-N simplicial object can see."""
    from .chain import ChainComplex
    ranks = {n: C.rank(n) for n in C.degrees() if 0 <= n <= N}
    return ChainComplex(ranks, {n: C.d(n) for n in ranks if n - 1 in ranks})


def run_dwyer_kan(sc, task, opts):
    from .dwyerkan import derived_counit_check, h0_retract_witness, is_homotopically_ff
    F = _ref(sc, task, "functor", "functors")
    w = _window(task, opts)
    hff = is_homotopically_ff(F)
    out = {"hff": {"%s,%s" % k: _verdict_json(v) for k, v in hff.items()}}
    witnesses, counits = {}, {}
    for c in F.target.objects:
        res = h0_retract_witness(F, c)
        witnesses[str(c)] = {"status": res.status, "detail": res.detail,
                             "summands": _jsonable(res.witness.summands) if res.witness else None}
        try:
            v = derived_counit_check(F, c, w, N=_N(task, opts), allow_heuristic=opts.allow_heuristic,
                                     trust_tail_bound=not task.get("heuristic_only", False))
            counits[str(c)] = dict(_verdict_json(v), mode=v.data["mode"])
        except im.NonFreeCokernel as exc:
            counits[str(c)] = {"ok": False, "where": _jsonable(exc.where), "message": str(exc), "mode": None}
    out["witnesses"] = witnesses
    out["counit"] = counits
    hff_ok = all(hff.values())
    counit_ok = all(v["ok"] for v in counits.values())
    flags = sorted({v["mode"] for v in counits.values() if v["mode"] not in (None, "sound")})
    out["caveats"] = flags
    bad = [k for k, v in hff.items() if not v]
    msg = ""
    if bad:
        msg = hff[bad[0]].message
    elif not counit_ok:
        first = [k for k, v in counits.items() if not v["ok"]][0]
        msg = "counit at %s: %s" % (first, counits[first]["message"])
    out["verdict"] = {"ok": hff_ok and counit_ok, "where": _jsonable(bad[0]) if bad else None, "message": msg}
    return out


def run_collapse(sc, task, opts):
    from .simplicial import collapse_check
    X = _ref(sc, task, "simplicial", "simplicial")
    v = collapse_check(X, _window(task, opts), allow_heuristic=opts.allow_heuristic)
    out = {"verdict": _verdict_json(v)}
    if "certificate" in v.data:
        out["certificate"] = v.data["certificate"].to_json()
    return out


RUNNERS = {
    "validate": run_validate, "homology": run_homology, "wcolim": run_wcolim,
    "bar-compare": run_bar_compare, "hocolim": run_hocolim, "cofrep": run_cofrep,
    "reedy": run_reedy, "cube": run_cube, "dold-kan": run_dold_kan,
    "dwyer-kan": run_dwyer_kan, "collapse": run_collapse,
}


# ---------------------------------------------------------------------------
# scenario execution


class Options:
    def __init__(self, window=None, truncate=None, allow_heuristic=False, seed=0, only=None):
        self.window, self.truncate = window, truncate
        self.allow_heuristic, self.seed, self.only = allow_heuristic, seed, only


def run_scenario(text, opts=None, name="scenario"):
    """Execute a scenario. Returns (report dict, exit code); never raises on bad input."""
    opts = opts or Options()
    report = {"version": REPORT_VERSION, "scenario": name, "tasks": [],
              "options": {"window": _jsonable(opts.window), "truncate": opts.truncate,
                          "allow_heuristic": opts.allow_heuristic, "seed": opts.seed,
                          "command": opts.only}}
    timings = []
    try:
        sc = load(text, seed=opts.seed)
        check_task_refs(sc)
        build_all(sc)
    except ScenarioError as exc:
        report["error"] = {"kind": "parse", "where": _jsonable(exc.where), "message": exc.bare}
        return _finish(report, 2, timings)
    except ValidationFailure as exc:
        report["error"] = {"kind": "validation", "where": [exc.name, _jsonable(exc.verdict.where)],
                           "message": str(exc)}
        return _finish(report, 2, timings)
    code = 0
    for i, task in enumerate(sc.raw["tasks"]):
        cmd = task.get("command") if isinstance(task, dict) else None
        if cmd not in RUNNERS:
            report["error"] = {"kind": "parse", "where": "tasks.%d.command" % i,
                               "message": "unknown command %r" % (cmd,)}
            return _finish(report, 2, timings)
        if opts.only and cmd != opts.only:
            continue
        entry = {"index": i, "command": cmd, "inputs": _jsonable({k: v for k, v in task.items()
                                                                 if k not in ("command", "expect")})}
        t0 = time.perf_counter()
        try:
            result = RUNNERS[cmd](sc, task, opts)
        except UnsoundWindow as exc:
            entry["status"] = "unsound"
            entry["message"] = str(exc)
            code = max(code, 3) if code != 2 else 2
            report["tasks"].append(entry)
            timings.append(time.perf_counter() - t0)
            continue
        except (ScenarioError, TaskError, KeyError) as exc:
            report["error"] = {"kind": "parse", "where": "tasks.%d" % i,
                               "message": getattr(exc, "bare", str(exc))}
            report["tasks"].append(dict(entry, status="error"))
            timings.append(time.perf_counter() - t0)
            return _finish(report, 2, timings)
        timings.append(time.perf_counter() - t0)
        entry["result"] = result
        if "verdict" in result:
            expect = bool(task.get("expect", True))
            passed = result["verdict"]["ok"] == expect
            entry["expect"] = expect
            entry["status"] = "pass" if passed else "fail"
            if not passed and code == 0:
                code = 1
        else:
            entry["status"] = "done"
        report["tasks"].append(entry)
    return _finish(report, code, timings)


def _finish(report, code, timings):
    counts = {}
    for t in report["tasks"]:
        counts[t["status"]] = counts.get(t["status"], 0) + 1
    report["summary"] = {"exit": code, "counts": counts}
    report["_timings"] = timings
    return report, code


def structured(report):
    body = {k: v for k, v in report.items() if not k.startswith("_")}
    return json.dumps(body, sort_keys=True, indent=2) + "\n"


def _fmt_hom(H):
    if not H:
        return "0"
    return ", ".join("H_%s = %s" % (n, GradedAbelianGroup.format_group(g["free"], g["torsion"]))
                     for n, g in sorted(H.items(), key=lambda kv: int(kv[0])))


def text(report):
    lines = ["hwcolim report v%d: %s" % (report["version"], report["scenario"])]
    if "error" in report:
        e = report["error"]
        lines.append("error (%s) at %s: %s" % (e["kind"], e["where"], e["message"]))
    times = report.get("_timings", [])
    for k, t in enumerate(report["tasks"]):
        dt = " (%.3fs)" % times[k] if k < len(times) else ""
        lines.append("[%d] %s: %s%s" % (t["index"], t["command"], t["status"], dt))
        if t["status"] == "unsound":
            lines.append("    " + t["message"])
        r = t.get("result", {})
        for key in ("homology", "bar_homology", "colimit_homology", "weighted_homology"):
            if key in r:
                lines.append("    %s: %s" % (key.replace("_", " "), _fmt_hom(r[key])))
        if "certificate" in r:
            lines.append("    truncation: %s" % r["certificate"]["mode"])
        if "rank_table" in r:
            lines.append("    ranks: %s" % r["rank_table"])
        if "torsion" in r:
            lines.append("    torsion: %s" % r["torsion"])
        if "levels" in r:
            for n, v in enumerate(r["levels"]):
                lines.append("    level %d: %s %s" % (n, "ok" if v["ok"] else "FAIL", v["message"]))
        for key in ("hff", "counit", "pointwise"):
            for k2, v in sorted(r.get(key, {}).items()):
                mode = " [%s]" % v["mode"] if v.get("mode") else ""
                lines.append("    %s %s: %s%s %s" % (key, k2, "ok" if v["ok"] else "FAIL", mode, v["message"]))
        if r.get("caveats"):
            lines.append("    caveats: %s" % ", ".join(r["caveats"]))
        for k2, v in sorted(r.get("witnesses", {}).items()):
            lines.append("    retract %s: %s" % (k2, v["status"]))
        if "verdict" in r:
            v = r["verdict"]
            lines.append("    verdict: %s (expected %s)%s" % (v["ok"], t.get("expect"),
                                                         " - " + v["message"] if v["message"] else ""))
    lines.append("exit %d" % report["summary"]["exit"])
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# argument parsing


def _parse_window(s):
    try:
        a, b = s.split(":")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError("window must look like a:b")


def build_parser():
    p = argparse.ArgumentParser(prog="hwcolim", description="Run weighted-colimit scenarios.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenario", help="path to a JSON scenario file ('-' for stdin)")
    common.add_argument("--window", type=_parse_window, help="degree window a:b (overrides task windows)")
    common.add_argument("--truncate", type=int, help="simplicial truncation level N")
    common.add_argument("--allow-heuristic", action="store_true", help="accept uncertified truncations")
    common.add_argument("--format", choices=["text", "structured"], default="text")
    common.add_argument("--seed", type=int, default=0, help="seed for random definitions")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("run", parents=[common], help="run every task")
    for c in COMMANDS:
        sub.add_parser(c, parents=[common], help="run only %s tasks" % c)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.scenario == "-":
        src, name = sys.stdin.read(), "stdin"
    else:
        try:
            with open(args.scenario) as fh:
                src = fh.read()
        except OSError as exc:
            print("cannot read %s: %s" % (args.scenario, exc), file=sys.stderr)
            return 2
        name = os.path.basename(args.scenario)
    opts = Options(args.window, args.truncate, args.allow_heuristic, args.seed,
                   None if args.command == "run" else args.command)
    report, code = run_scenario(src, opts, name)
    sys.stdout.write(structured(report) if args.format == "structured" else text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
