"""Command-line surface: classify, dualize, verify, simulate, render,
models-list.

Exit codes are a stable contract: 0 success, 1 verification failure,
2 usage or parse errors.  Every subcommand is deterministic given its
flags and seed; JSON/CSV/SVG outputs are byte-identical across reruns.
"""

import argparse
import json
import sys

from . import duality as du
from . import flow
from . import markov
from . import models
from . import percolation as pc
from . import poset as ps
from .lattice import all_decreasing_family

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _load_model(args):
    name = args.model
    if name in models.BUILTIN_DEFAULTS:
        return models.builtin(name, getattr(args, "sites", None))
    try:
        with open(name, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read model file {name!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"model file {name!r} is not valid JSON: {exc}") from exc
    try:
        return models.build_model(doc)
    except (models.ModelError, KeyError, IndexError, TypeError, ValueError) as exc:
        raise UsageError(f"bad model description: {exc}") from exc


def _emit_json(doc, path=None):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _classify_doc(model):
    from .maps import is_additive, is_monotone, MapError

    rows = []
    for m, rate in model.rep.entries:
        mono = is_monotone(m)
        try:
            addi = is_additive(m)
            additive = addi.ok
            a_witness = addi.witness
        except MapError:
            additive = False
            a_witness = ("no-join-structure",)
        rows.append(
            {
                "name": m.name,
                "rate": float(rate),
                "monotone": mono.ok,
                "monotone_witness": list(mono.witness) if mono.witness else None,
                "additive": additive,
                "additive_witness": list(a_witness) if a_witness else None,
            }
        )
    return {
        "model": model.name,
        "maps": rows,
        "all_monotone": all(r["monotone"] for r in rows),
        "all_additive": all(r["additive"] for r in rows),
    }


def cmd_classify(args):
    model = _load_model(args)
    doc = _classify_doc(model)
    _emit_json(doc, args.out)
    return EXIT_OK


def _closure_seeds(model):
    return [frozenset({y}) for y in range(model.rep.space.n)]


def cmd_dualize(args):
    model = _load_model(args)
    variant = args.variant
    if variant == "prime":
        try:
            dual = markov.dual_rep_additive(model.pairing, model.rep)
        except du.NotAdditiveError as exc:
            sys.stderr.write(
                f"model is not additive (witness y={exc.witness}); "
                "use a set-valued variant\n"
            )
            return EXIT_FAIL
        psi = model.pairing.psi_table()
        reports = [
            du.verify_map_duality(psi, m, dm).to_json()
            for (m, _), (dm, _) in zip(model.rep.entries, dual.entries)
        ]
        prime_inv = [int(v) for v in model.pairing.view.prime_inv]
        doc = models.model_to_custom_json(
            f"{model.name}-dual", dual, prime=prime_inv
        )
        doc["report"] = reports
        doc["ok"] = all(r["ok"] for r in reports)
    else:
        closure = markov.dual_rep_monotone(
            model.pairing, model.rep, seeds=_closure_seeds(model),
            variant=variant,
        )
        tilde = variant in ("circ", "bullet")
        phi = du.phi_table(model.pairing, list(closure.states), tilde=tilde)
        reports = []
        for k, (m, _) in enumerate(model.rep.entries):
            reports.append(
                du.verify_map_duality(phi, m, closure.imgs[k]).to_json()
            )
        doc = {
            "model": "setdual",
            "variant": variant,
            "base": model.params,
            "states": [sorted(b) for b in closure.states],
            "maps": [
                {"name": closure.names[k], "img": list(closure.imgs[k])}
                for k in range(len(closure.imgs))
            ],
            "rates": [float(r) for r in closure.rates],
            "report": reports,
            "ok": all(r["ok"] for r in reports),
        }
    _emit_json(doc, args.out)
    return EXIT_OK if doc["ok"] else EXIT_FAIL


def _load_claimed_dual(path, model):
    """A dualize output (custom model JSON) to referee against the base
    model; map k must be dual to the base's map k and rates must agree."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read dual file {path!r}: {exc}") from exc
    dual = models.build_model(doc)
    if len(dual.rep) != len(model.rep):
        raise UsageError("dual file must list one map per base map")
    return dual.rep


def _verify_additive(model, args, checks):
    psi = model.pairing.psi_table()
    if args.dual:
        dual = _load_claimed_dual(args.dual, model)
    else:
        dual = markov.dual_rep_additive(model.pairing, model.rep)
    rates_match = all(
        abs(float(r) - float(dr)) == 0
        for (_, r), (_, dr) in zip(model.rep.entries, dual.entries)
    )
    checks.append({"name": "rates-match", "ok": rates_match})
    reports = [
        du.verify_map_duality(psi, m, dm)
        for (m, _), (dm, _) in zip(model.rep.entries, dual.entries)
    ]
    bad = next((r for r in reports if not r.ok), None)
    checks.append(
        {
            "name": "map-duality",
            "ok": bad is None,
            "pairs_checked": sum(r.pairs_checked for r in reports),
            "counterexample": bad.counterexample if bad else None,
        }
    )

    q = markov.build_generator(model.rep)
    qd = markov.build_generator(dual)
    inter = markov.check_intertwining(q, qd, psi, tol=args.tol)
    detail = inter.to_json()
    if args.exact:
        qe = markov.build_generator(model.rep, exact=True)
        qde = markov.build_generator(dual, exact=True)
        detail["exact"] = markov.check_intertwining(qe, qde, psi).to_json()
        inter_ok = inter.ok and detail["exact"]["ok"]
    else:
        inter_ok = inter.ok
    checks.append({"name": "intertwining", "ok": inter_ok, **detail})

    semi = markov.semigroup_duality_check(q, qd, psi, args.t, tol=args.tol)
    checks.append({"name": "semigroup", "ok": semi.ok, **semi.to_json()})

    da, pv = flow.additive_pathwise(model.pairing, model.rep, dual)
    n = model.rep.space.n
    violations = []
    for i in range(args.logs):
        log = flow.sample_event_log(model.rep, 0.0, args.t or 1.0, args.seed + i)
        for x in range(n):
            for y in range(n):
                r = flow.check_pathwise_constancy(log, model.rep, da, pv, x, y)
                if not r.ok:
                    violations.append(
                        {"log": i, "x": x, "y": y, "t": r.violating_t}
                    )
    checks.append(
        {
            "name": "pathwise-constancy",
            "ok": not violations,
            "logs": args.logs,
            "counterexample": violations[0] if violations else None,
        }
    )


def _verify_monotone(model, args, checks):
    closure = markov.dual_rep_monotone(
        model.pairing, model.rep, seeds=_closure_seeds(model), variant="star"
    )
    phi = du.phi_table(model.pairing, list(closure.states))
    reports = [
        du.verify_map_duality(phi, m, closure.imgs[k])
        for k, (m, _) in enumerate(model.rep.entries)
    ]
    bad = next((r for r in reports if not r.ok), None)
    checks.append(
        {
            "name": "map-duality-star",
            "ok": bad is None,
            "pairs_checked": sum(r.pairs_checked for r in reports),
            "counterexample": bad.counterexample if bad else None,
        }
    )

    q = markov.build_generator(model.rep)
    inter = markov.check_intertwining(q, closure.generator, phi, tol=args.tol)
    checks.append({"name": "intertwining-star", "ok": inter.ok, **inter.to_json()})

    semi = markov.semigroup_duality_check(
        q, closure.generator, phi, args.t, tol=args.tol
    )
    checks.append({"name": "semigroup-star", "ok": semi.ok, **semi.to_json()})

    da, pv = flow.monotone_pathwise(model.pairing, model.rep, "star")
    violations = []
    for i in range(args.logs):
        log = flow.sample_event_log(model.rep, 0.0, args.t or 1.0, args.seed + i)
        for x in range(model.rep.space.n):
            for y in range(model.rep.space.n):
                r = flow.check_pathwise_constancy(
                    log, model.rep, da, pv, x, frozenset({y})
                )
                if not r.ok:
                    violations.append(
                        {"log": i, "x": x, "B": [y], "t": r.violating_t}
                    )
    checks.append(
        {
            "name": "pathwise-constancy-star",
            "ok": not violations,
            "logs": args.logs,
            "counterexample": violations[0] if violations else None,
        }
    )


def cmd_verify(args):
    model = _load_model(args)
    checks = []
    if model.rep.all_additive:
        _verify_additive(model, args, checks)
    elif args.dual:
        raise UsageError("--dual refereeing is for additive models")
    elif model.rep.all_monotone:
        _verify_monotone(model, args, checks)
    else:
        sys.stderr.write("model is neither additive nor monotone\n")
        return EXIT_FAIL
    ok = all(c["ok"] for c in checks)
    _emit_json({"model": model.name, "ok": ok, "checks": checks}, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def _dual_dynamics(model):
    """(dual image rows, dual state labels, psi table, default y0)."""
    if model.rep.all_additive:
        dual = markov.dual_rep_additive(model.pairing, model.rep)
        labels = [dual.space.label(y) for y in range(dual.space.n)]
        return (
            [m.img for m in dual.maps()],
            labels,
            model.pairing.psi_table(),
            dual.space.n - 1,
        )
    closure = markov.dual_rep_monotone(
        model.pairing, model.rep, seeds=_closure_seeds(model), variant="star"
    )
    sview = model.pairing.s_prime
    labels = [
        "{" + "|".join(sview.label(y) for y in sorted(b)) + "}"
        for b in closure.states
    ]
    phi = du.phi_table(model.pairing, list(closure.states))
    return list(closure.imgs), labels, phi, len(closure.states) - 1


def cmd_simulate(args):
    model = _load_model(args)
    rep = model.rep
    dual_imgs, dual_labels, psi, default_y0 = _dual_dynamics(model)
    x0 = args.x0 if args.x0 is not None else rep.space.n - 1
    y0 = args.y0 if args.y0 is not None else default_y0
    if not 0 <= x0 < rep.space.n:
        raise UsageError(f"x0 must be in 0..{rep.space.n - 1}")
    if not 0 <= y0 < len(dual_labels):
        raise UsageError(f"y0 must be in 0..{len(dual_labels) - 1}")

    rows = ["replica,t,state_x,state_y,psi"]
    event_counts = []
    for i in range(args.n):
        log = flow.sample_event_log(rep, 0.0, args.t, args.seed + i)
        event_counts.append(len(log))
        checkpoints = [0.0] + list(log.times) + [args.t]
        for t in checkpoints:
            xs = x0
            for k, tau in zip(log.map_ids, log.times):
                if tau < t:
                    xs = rep.entries[k][0].img[xs]
            yd = y0
            for k, tau in reversed(list(zip(log.map_ids, log.times))):
                if tau >= t:
                    yd = dual_imgs[k][yd]
            rows.append(
                f"{i},{t!r},{rep.space.label(xs)},{dual_labels[yd]},"
                f"{int(psi[xs][yd])}"
            )
    trace = "\n".join(rows) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(trace)
    else:
        sys.stdout.write(trace)

    mc = flow.monte_carlo_duality(
        rep, dual_imgs, psi, x0, y0, args.t, args.n, args.seed, jobs=args.jobs
    )
    summary = {
        "model": model.name,
        "n": args.n,
        "t": args.t,
        "seed": args.seed,
        "x0": x0,
        "y0": y0,
        "event_count_mean": sum(event_counts) / len(event_counts),
        "event_count_expected": float(rep.total_rate) * args.t,
        "duality": mc.to_json(),
        "backend": flow.BACKEND,
    }
    if args.summary:
        _emit_json(summary, args.summary)
    return EXIT_OK


def _model_diagram(model, args):
    sites = model.params.get("sites")
    if model.name == "krone":
        ground, fam_msets = models.krone_msets(sites)
        mset_list = []
        for m, _ in model.rep.entries:
            fam, idx = m.name.split("_")
            key = (int(idx[0]), int(idx[1])) if fam == "b" else int(idx)
            mset_list.append(fam_msets[fam][key])
    elif model.rep.all_additive and sites and model.rep.space.n == 2**sites:
        ground = ps.antichain(
            sites, labels=tuple(str(i) for i in range(sites))
        )
        fam = all_decreasing_family(ground)

        def to_set(x):
            return frozenset(i for i in range(sites) if x >> i & 1)

        def to_mask(s):
            return sum(1 << i for i in s)

        mset_list = []
        for m, _ in model.rep.entries:
            img = [fam.index[to_set(m.img[to_mask(s)])] for s in fam.sets]
            mset_list.append(pc.map_to_mset(fam, img))
    else:
        raise UsageError(
            "rendering needs an additive model on a set lattice "
            "(voter, contact, krone) or an explicit --diagram file"
        )
    log = flow.sample_event_log(model.rep, 0.0, args.t, args.seed)
    return pc.diagram_of_log(log, mset_list, ground)


def cmd_render(args):
    if args.diagram:
        try:
            with open(args.diagram, encoding="utf-8") as fh:
                diagram = pc.Diagram.from_json(fh.read())
        except (OSError, json.JSONDecodeError, pc.PercolationError) as exc:
            raise UsageError(f"bad diagram file: {exc}") from exc
    else:
        model = _load_model(args)
        diagram = _model_diagram(model, args)
    svg = pc.render_svg(diagram)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_models_list(args):
    doc = {}
    for name in sorted(models.BUILTIN_DEFAULTS):
        m = models.builtin(name)
        doc[name] = {
            "states": m.rep.space.n,
            "maps": len(m.rep),
            "additive": m.additive,
            "monotone": m.monotone,
            "defaults": m.params,
        }
    _emit_json(doc, getattr(args, "out", None))
    return EXIT_OK


def _parser():
    top = argparse.ArgumentParser(
        prog="orderdual",
        description="Construct, simulate and exhaustively verify pathwise "
        "dualities of monotone and additive Markov dynamics on finite "
        "partially ordered state spaces.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("--model", required=True,
                           help="builtin name or path to a model JSON file")
            p.add_argument("--sites", type=int, default=None,
                           help="site count for builtin models")
        p.add_argument("--out", default=None, help="output file (default stdout)")

    p = sub.add_parser("classify", help="per-map monotone/additive table")
    common(p)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("dualize", help="emit the dual model with a report")
    common(p)
    p.add_argument("--variant", choices=du.DUAL_VARIANTS, default="prime")
    p.set_defaults(fn=cmd_dualize)

    p = sub.add_parser("verify", help="exhaustive duality verification suite")
    common(p)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--logs", type=int, default=20,
                   help="sampled event logs for the pathwise check")
    p.add_argument("--exact", action="store_true",
                   help="also run the intertwining check in exact arithmetic")
    p.add_argument("--dual", default=None,
                   help="referee a claimed dual model file instead of the "
                        "constructed one (additive models)")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("simulate", help="trace CSV + Monte Carlo summary")
    common(p)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--x0", type=int, default=None)
    p.add_argument("--y0", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--summary", default=None, help="summary JSON path")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("render", help="SVG percolation diagram")
    p.add_argument("--model", default=None)
    p.add_argument("--sites", type=int, default=None)
    p.add_argument("--diagram", default=None, help="diagram JSON file")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_render)

    p = sub.add_parser("models-list", help="builtin models and defaults")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_models_list)
    return top


def main(argv=None):
    top = _parser()
    args = top.parse_args(argv)
    if args.command == "render" and not (args.model or args.diagram):
        top.error("render needs --model or --diagram")
    try:
        return args.fn(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (
        models.ModelError,
        markov.MarkovError,
        flow.FlowError,
        pc.PercolationError,
        ps.PosetError,
    ) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
