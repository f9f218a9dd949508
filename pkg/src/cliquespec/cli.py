"""Command-line entry point.

Exit status: 0 on success, 1 when a checked statement fails, 2 on usage or
input errors.  Every flag also reads a ``CLIQUESPEC_<FLAG>`` environment
variable as its default.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import checks
from .config import RunConfig, dumps, env_default, save_report, summary_rows, write_summary_csv
from .enumeration import (
    EnumerationCapError,
    ExtremalReport,
    class_G,
    enumerate_clique_trees,
    remark_range_summary,
    verify_main_theorem,
    verify_remark_range,
)
from .graph import (
    Graph,
    GraphError,
    blocks_and_cut_vertices,
    canonical_form,
    is_clique_tree,
    load_graph,
    save_graph,
)
from .spectral import (
    bounds_report,
    char_poly_extremal,
    f_poly,
    quotient_matrix,
    spectral_radius,
)
from .transforms import (
    PreconditionError,
    apply_plan,
    merge_candidates,
    move_candidate,
    plan_merge,
    relocation_candidate,
)
from .zero_forcing import (
    CapExceededError,
    forcing_closure,
    zero_forcing_number_exhaustive,
    zero_forcing_number_formula,
)

log = logging.getLogger("cliquespec")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _common(with_seed: bool = True) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=env_default("tol", 1e-12), help="eigensolver residual tolerance")
    p.add_argument("--cap", type=int, default=env_default("cap", 16), help="exhaustive zero forcing vertex cap")
    p.add_argument("--enum-cap", type=int, default=env_default("enum_cap", 14), help="enumeration vertex cap")
    p.add_argument("--out", type=Path, default=env_default("out", Path("results")), help="results directory")
    p.add_argument("--format", choices=["json", "csv"], default=env_default("format", "json"))
    p.add_argument("--jobs", type=int, default=env_default("jobs", 1), help="worker processes for sweeps")
    if with_seed:
        p.add_argument("--seed", type=int, default=env_default("seed", 0), help="RNG seed for randomized suites")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _emit(obj) -> None:
    print(dumps(obj))


def _vertex_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated vertices, got {text!r}") from None


def _partition(text: str) -> list[list[int]]:
    return [_vertex_list(part) for part in text.split("|")]


# --- zf --------------------------------------------------------------------


def cmd_zf_exact(args, cfg: RunConfig) -> int:
    g = load_graph(args.graph)
    z, witness = zero_forcing_number_exhaustive(g, cfg.exhaustive_cap)
    _emit({"Z": z, "n": g.n, "witness": list(witness)})
    return EXIT_OK


def cmd_zf_formula(args, cfg: RunConfig) -> int:
    g = load_graph(args.graph)
    if not is_clique_tree(g, 3):
        raise GraphError("input is not a clique tree with blocks of size >= 3")
    ct = blocks_and_cut_vertices(g)
    _emit({"Z": zero_forcing_number_formula(ct), "b": ct.b, "n": g.n})
    return EXIT_OK


def cmd_zf_closure(args, cfg: RunConfig) -> int:
    g = load_graph(args.graph)
    st = forcing_closure(g, args.seed)
    _emit({
        "blue": sorted(st.blue),
        "complete": st.is_complete(g.n),
        "trace": [list(f) for f in st.trace],
    })
    return EXIT_OK


# --- spec ------------------------------------------------------------------


def cmd_spec_rho(args, cfg: RunConfig) -> int:
    g = load_graph(args.graph)
    res = spectral_radius(g, tol=cfg.tolerance)
    _emit({
        "rho": res.rho,
        "perron": [float(v) for v in res.perron],
        "residual": res.residual,
        "iterations": res.iterations,
        "method": res.method,
    })
    return EXIT_OK


def cmd_spec_quotient(args, cfg: RunConfig) -> int:
    g = load_graph(args.graph)
    qm = quotient_matrix(g, args.partition)
    _emit({
        "partition": [list(p) for p in qm.partition],
        "q": qm.q.tolist(),
        "equitable": qm.equitable,
        "rho_q": qm.rho,
        "rho_a": spectral_radius(g, tol=cfg.tolerance).rho,
    })
    return EXIT_OK


def cmd_spec_fpoly(args, cfg: RunConfig) -> int:
    _emit({"coeffs": list(f_poly(args.n, args.k))})
    return EXIT_OK


def cmd_spec_gpoly(args, cfg: RunConfig) -> int:
    cp = char_poly_extremal(args.n, args.k)
    _emit({
        "n": cp.n,
        "k": cp.k,
        "ones": cp.ones,
        "minus_ones": cp.minus_ones,
        "cubic": list(cp.cubic),
        "coeffs": cp.coefficients(),
    })
    return EXIT_OK


def cmd_spec_bounds(args, cfg: RunConfig) -> int:
    rep = bounds_report(args.n, args.k)
    _emit(rep)
    # k = n-1 meets the lower bound with equality; not a failure
    lower_ok = rep["lower_ok"] or args.k == args.n - 1
    return EXIT_OK if lower_ok and (rep["upper_ok"] or not rep["applicable"]) else EXIT_FAIL


# --- transform -------------------------------------------------------------


def _describe(g: Graph) -> dict:
    ct = blocks_and_cut_vertices(g)
    return {
        "n": g.n,
        "rho": spectral_radius(g).rho,
        "Z": zero_forcing_number_formula(ct),
        "blocks": ct.block_sizes,
        "canonical": canonical_form(ct),
    }


def _plan_from_args(args, g: Graph, x: np.ndarray) -> dict:
    ct = blocks_and_cut_vertices(g)
    rule = args.rule
    if rule in ("merge1", "merge2"):
        explicit = [args.v, args.p, args.q, args.r, args.s]
        if all(a is not None for a in explicit):
            plan = {"rule": rule, "v": args.v, "p": args.p, "q": args.q, "r": args.r, "s": args.s}
            if rule == "merge1":
                if args.l_block is None or args.m_block is None:
                    raise PreconditionError("merge1 needs --l-block and --m-block with explicit vertices")
                plan["l_block"], plan["m_block"] = args.l_block, args.m_block
            return plan
        cands = merge_candidates(ct)
        if args.v is not None:
            cands = [c for c in cands if c[0] == args.v]
        if not cands:
            raise PreconditionError("no two blocks of size >= 4 share a cut vertex")
        if rule == "merge2":
            for v, kl, km in cands:
                for a, c in ((kl, km), (km, kl)):
                    options = checks.case2_options(x, v, a, c)
                    if options:
                        p, q, r, s = options[0]
                        return {"rule": rule, "v": v, "p": p, "q": q, "r": r, "s": s}
            raise PreconditionError("no block pair meets the merge2 Perron ordering; try merge1")
        v, kl, km = cands[0]
        plan = plan_merge(g, v, kl, km, x)
        if plan["rule"] != rule:
            raise PreconditionError(f"Perron ordering selects {plan['rule']}, not {rule}")
        return plan
    if rule == "relocate":
        if args.km_block is not None:
            return {"rule": rule, "km_block": args.km_block}
        i = relocation_candidate(ct)
        if i is None:
            raise PreconditionError("no K_m with pendant triangles on two or more of its vertices")
        return {"rule": rule, "km_block": ct.blocks[i]}
    if rule == "move":
        if args.block is not None:
            if args.from_v is None or args.to_u is None:
                raise PreconditionError("move needs --from and --to with --block")
            return {"rule": rule, "block": args.block, "from_v": args.from_v, "to_u": args.to_u}
        plan = move_candidate(ct, x)
        if plan is None:
            raise PreconditionError("no pendant move applies: fewer than two cut vertices")
        return plan
    raise PreconditionError(f"unknown rule {rule}")


def cmd_transform_apply(args, cfg: RunConfig) -> int:
    g = load_graph(args.input)
    if not is_clique_tree(g, 3):
        raise GraphError("input is not a clique tree with blocks of size >= 3")
    x = spectral_radius(g, tol=cfg.tolerance).perron
    plan = _plan_from_args(args, g, x)
    after = apply_plan(g, plan, x)
    before_d, after_d = _describe(g), _describe(after)
    strict = args.rule != "move"
    rho_ok = after_d["rho"] > before_d["rho"] + checks.RHO_MARGIN if strict else after_d["rho"] >= before_d["rho"] - checks.RHO_MARGIN
    z_ok = after_d["Z"] == before_d["Z"]
    if args.output:
        save_graph(after, args.output)
    _emit({
        "rule": args.rule,
        "plan": {k: (list(v) if isinstance(v, tuple) else v) for k, v in plan.items()},
        "before": before_d,
        "after": after_d,
        "rho_increased": rho_ok,
        "z_preserved": z_ok,
    })
    return EXIT_OK if rho_ok and z_ok else EXIT_FAIL


# --- enumerate -------------------------------------------------------------


def cmd_enumerate(args, cfg: RunConfig) -> int:
    if args.k is not None:
        graphs = list(class_G(args.n, args.k, cfg.enum_cap))
    else:
        graphs = list(enumerate_clique_trees(args.n, args.min_block, cfg.enum_cap))
    rows = []
    for g in graphs:
        ct = blocks_and_cut_vertices(g)
        rows.append({
            "canonical": canonical_form(ct),
            "blocks": ct.block_sizes,
            "Z": zero_forcing_number_formula(ct),
            "rho": spectral_radius(g, tol=cfg.tolerance).rho,
        })
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["canonical", "blocks", "Z", "rho"])
        for r in rows:
            w.writerow([r["canonical"], " ".join(map(str, r["blocks"])), r["Z"], f"{r['rho']:.12f}"])
        sys.stdout.write(buf.getvalue())
    else:
        _emit({"n": args.n, "k": args.k, "count": len(rows), "classes": rows})
    return EXIT_OK


# --- verify ----------------------------------------------------------------


def _report_job(job: tuple[int, int, int]) -> ExtremalReport:
    n, k, cap = job
    return verify_main_theorem(n, k, cap)


def cmd_verify_main(args, cfg: RunConfig) -> int:
    rep = verify_main_theorem(args.n, args.k, cfg.enum_cap)
    path = save_report(rep, cfg.output_dir / f"{args.n}_{args.k}.json")
    log.info("wrote %s", path)
    _emit(rep.to_dict())
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_verify_sweep(args, cfg: RunConfig) -> int:
    if args.nmax > cfg.enum_cap:
        raise EnumerationCapError(f"--nmax {args.nmax} exceeds the enumeration cap {cfg.enum_cap}")
    jobs = [(n, k, cfg.enum_cap) for n, k in checks.valid_pairs(args.nmin, args.nmax)]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            reports = list(pool.map(_report_job, jobs))
    else:
        reports = [_report_job(j) for j in jobs]
    for rep in reports:
        save_report(rep, cfg.output_dir / f"{rep.n}_{rep.k}.json")
    write_summary_csv(reports, cfg.output_dir / "summary.csv")
    ok = all(r.ok for r in reports)
    if cfg.format == "csv":
        sys.stdout.write((cfg.output_dir / "summary.csv").read_text())
    else:
        _emit({"pairs": len(reports), "ok": ok, "summary": summary_rows(reports)})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_remark(args, cfg: RunConfig) -> int:
    summary = remark_range_summary(args.n, cfg.enum_cap)
    ok = verify_remark_range(args.n, cfg.enum_cap)
    _emit({**summary, "ok": ok})
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify_lemmas(args, cfg: RunConfig) -> int:
    out = {
        "edge_monotonicity": checks.edge_monotonicity_suite(args.trials, cfg.seed),
        "perron_pendant": checks.perron_pendant_suite(min(12, cfg.enum_cap)),
    }
    for rule in ("relocate", "merge1", "merge2", "move"):
        out[rule] = checks.transform_suite(rule, args.trials, cfg.seed, min(14, cfg.enum_cap))
    ok = all(v["ok"] for v in out.values())
    _emit({"ok": ok, "suites": out})
    return EXIT_OK if ok else EXIT_FAIL


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    common_noseed = _common(with_seed=False)
    parser = argparse.ArgumentParser(
        prog="cliquespec",
        description="Zero forcing and spectral radius of clique trees.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    zf = sub.add_parser("zf", help="zero forcing number").add_subparsers(dest="zf_cmd", required=True)
    p = zf.add_parser("exact", parents=[common], help="exhaustive minimum zero forcing set")
    p.add_argument("graph", type=Path)
    p.set_defaults(func=cmd_zf_exact)
    p = zf.add_parser("formula", parents=[common], help="block formula for clique trees")
    p.add_argument("graph", type=Path)
    p.set_defaults(func=cmd_zf_formula)
    p = zf.add_parser("closure", parents=[common_noseed], help="apply the color-change rule")
    p.add_argument("graph", type=Path)
    p.add_argument("--seed", type=_vertex_list, required=True, help="initial blue vertices, e.g. 0,3,5")
    p.set_defaults(func=cmd_zf_closure)

    sp = sub.add_parser("spec", help="spectral quantities").add_subparsers(dest="spec_cmd", required=True)
    p = sp.add_parser("rho", parents=[common], help="spectral radius and Perron vector")
    p.add_argument("graph", type=Path)
    p.set_defaults(func=cmd_spec_rho)
    p = sp.add_parser("quotient", parents=[common], help="quotient matrix of a partition")
    p.add_argument("graph", type=Path)
    p.add_argument("--partition", type=_partition, required=True, help="parts separated by '|', e.g. 1,2|0|3,4")
    p.set_defaults(func=cmd_spec_quotient)
    for name, func, text in (
        ("fpoly", cmd_spec_fpoly, "cubic factor of the extremal characteristic polynomial"),
        ("gpoly", cmd_spec_gpoly, "factored characteristic polynomial of the extremal graph"),
        ("bounds", cmd_spec_bounds, "lower and upper bounds on the extremal spectral radius"),
    ):
        p = sp.add_parser(name, parents=[common], help=text)
        p.add_argument("n", type=int)
        p.add_argument("k", type=int)
        p.set_defaults(func=func)

    tr = sub.add_parser("transform", help="spectral-radius-raising rewrites").add_subparsers(dest="tr_cmd", required=True)
    p = tr.add_parser("apply", parents=[common], help="apply one rewrite")
    p.add_argument("--rule", choices=["merge1", "merge2", "relocate", "move"], required=True)
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--output", type=Path)
    for flag in ("v", "p", "q", "r", "s"):
        p.add_argument(f"--{flag}", type=int)
    p.add_argument("--l-block", type=_vertex_list)
    p.add_argument("--m-block", type=_vertex_list)
    p.add_argument("--km-block", type=_vertex_list)
    p.add_argument("--block", type=_vertex_list)
    p.add_argument("--from", dest="from_v", type=int)
    p.add_argument("--to", dest="to_u", type=int)
    p.set_defaults(func=cmd_transform_apply)

    p = sub.add_parser("enumerate", parents=[common], help="clique trees up to isomorphism")
    p.add_argument("n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--min-block", type=int, default=3)
    p.set_defaults(func=cmd_enumerate)

    vf = sub.add_parser("verify", help="desk-scale theorem checks").add_subparsers(dest="verify_cmd", required=True)
    p = vf.add_parser("main-theorem", parents=[common], help="unique maximizer of rho over G(n,k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_verify_main)
    p = vf.add_parser("sweep", parents=[common], help="main theorem for every valid (n,k)")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--nmin", type=int, default=3)
    p.set_defaults(func=cmd_verify_sweep)
    p = vf.add_parser("remark", parents=[common], help="range of Z over clique trees on n vertices")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_verify_remark)
    p = vf.add_parser("lemmas", parents=[common], help="randomized lemma suites")
    p.add_argument("--trials", type=int, default=200)
    p.set_defaults(func=cmd_verify_lemmas)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig(
            tolerance=args.tol,
            exhaustive_cap=args.cap,
            enum_cap=args.enum_cap,
            output_dir=args.out,
            format=args.format,
            seed=args.seed if isinstance(args.seed, int) else 0,
            jobs=args.jobs,
        )
        return args.func(args, cfg)
    except (GraphError, PreconditionError, CapExceededError, EnumerationCapError, ValueError, OSError) as exc:
        print(f"cliquespec: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
