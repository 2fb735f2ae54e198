"""Command-line front end.

Exit codes: 0 ran to completion, 1 at least one check failed, 2 operational error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .bilform import construct, grand_cliques, verify_construction
from .errors import AxiomViolation, DrgForgeError
from .field import ENUMERATION_CAP
from .geometry import (
    TRIANGULABILITY_CAP,
    ball2_isomorphism,
    block_system,
    extract_spg,
    mu_hexagon_census,
    sigma_subgraph,
    triangulability_conditions,
)
from .graph import (
    FailureWitness,
    check_distance_regular,
    local_graph,
    read_edge_list,
    spectrum_small,
    write_edge_list,
)
from .isomorphism import is_isomorphic
from .local import WALK_L_MAX, feasibility_verdict, grid_recognize, solve_local_multiplicities
from .params import (
    IntersectionArray,
    detect_classical_parameters,
    family_array,
    terwilliger_constraint,
)

SCHEMA = 1

# check id -> anchor naming the statement it verifies
ANCHORS = {
    "construction.vertex_count": "bilform.vertex-count",
    "construction.translations_are_automorphisms": "bilform.translations",
    "construction.distance_regular": "bilform.distance-regular",
    "construction.array_matches_closed_form": "bilform.intersection-array",
    "construction.diameter": "bilform.diameter",
    "construction.level_sizes": "bilform.level-sizes",
    "construction.classical_parameters": "bilform.classical-parameters",
    "construction.grand_cliques": "bilform.grand-cliques",
    "local.grid": "local.grid-structure",
    "local.spectrum": "local.grid-spectrum",
    "local.spectrum_unique_solution": "local.moment-solution",
    "local.eigenvalue_intervals": "local.terwilliger-intervals",
    "mu.hexagon": "mu.hexagon",
    "blocks.mu_hexagons": "blocks.hexagon-images",
    "blocks.distinct_mu": "blocks.distinct-mu",
    "blocks.six_per_subgrid": "blocks.six-hexagons",
    "blocks.subgrids_complete": "blocks.subgrid-product",
    "blocks.adjacency_rule": "blocks.adjacency-criterion",
    "blocks.gamma2_count": "blocks.gamma2-split",
    "blocks.gamma3_count": "blocks.b2-split",
    "sigma.srg": "sigma.strongly-regular",
    "sigma.isomorphic_to_bilinear": "sigma.bilinear-dxd2",
    "sigma.top_srg": "sigma-top.strongly-regular",
    "sigma.top_isomorphic_to_bilinear": "sigma-top.bilinear-exe2",
    "spg.parameters": "spg.parameters",
    "spg.diagonal_axiom": "spg.diagonal-axiom",
    "triangulability.condition_i": "triangulable.condition-i",
    "triangulability.condition_ii": "triangulable.condition-ii",
    "triangulability.lambda_count": "triangulable.lambda-count",
    "ball2.isomorphism": "ball2.isomorphism",
}


class Reporter:
    def __init__(self, command: str, config: dict, timings: bool):
        self.command = command
        self.config = config
        self.want_timings = timings
        self.checks: list[dict] = []
        self.timings: dict[str, float] = {}
        self.data: dict = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        yield
        self.timings[name] = round(time.perf_counter() - t0, 3)

    def check(self, cid: str, passed: bool, details="") -> None:
        self.checks.append({"id": cid, "anchor": ANCHORS.get(cid, cid),
                            "status": "pass" if passed else "fail", "details": details})

    def skip(self, cid: str, why: str) -> None:
        self.checks.append({"id": cid, "anchor": ANCHORS.get(cid, cid), "status": "skipped", "details": why})

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks)

    def document(self) -> dict:
        doc = {"schema": SCHEMA, "tool": "drgforge", "version": __version__,
               "command": self.command, "config": self.config}
        doc.update(self.data)
        if self.checks:
            doc["checks"] = self.checks
            doc["status"] = "fail" if self.failed else "pass"
        if self.want_timings:
            doc["timings"] = self.timings
        return doc


def _jsonable(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, IntersectionArray):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, default=_jsonable, sort_keys=False) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# Commands -----------------------------------------------------------------------------

def cmd_construct(args) -> int:
    rep = Reporter("construct", {"q": args.q, "e": args.e, "d": args.d, "out": args.out}, args.timings)
    with rep.phase("construct"):
        B = construct(args.q, args.e, args.d, cap=args.cap)
    sidecar = {
        "schema": SCHEMA, "q": B.q, "e": B.e, "d": B.d,
        "vertices": B.graph.n, "edges": B.graph.num_edges,
        "vertex_order": "row-major base-q index, entry (0,0) most significant",
        "expected_array": str(B.expected_array),
        "classical_parameters": _cp_list(detect_classical_parameters(B.expected_array)),
    }
    if B.d == 2:
        sidecar["srg_parameters"] = list(B.expected_array.srg_parameters())
    if args.out:
        with rep.phase("write"):
            write_edge_list(B.graph, args.out)
            Path(str(args.out) + ".json").write_text(json.dumps(sidecar, indent=2) + "\n", encoding="utf-8")
    rep.data["graph"] = sidecar
    _emit(rep.document(), None)
    return 0


def _cp_list(cp):
    return None if cp is None else [cp.D, cp.b, str(cp.alpha), str(cp.beta)]


def cmd_check_drg(args) -> int:
    g = read_edge_list(args.graph)
    rep = Reporter("check-drg", {"graph": str(args.graph), "depth": args.depth}, args.timings)
    with rep.phase("scan"):
        res = check_distance_regular(g, depth=args.depth)
    if isinstance(res, FailureWitness):
        rep.data["result"] = {"distance_regular": False, "witness": res.describe()}
    elif isinstance(res, IntersectionArray):
        rep.data["result"] = {"distance_regular": True, "array": str(res), "sizes": list(res.sizes)}
    else:
        rep.data["result"] = {"depth": res.depth, "b": list(res.b), "c": list(res.c), "a": list(res.a)}
    if args.expect:
        want = IntersectionArray.parse(args.expect)
        rep.check("construction.distance_regular", isinstance(res, IntersectionArray) and res == want,
                  f"expected {want}")
    _emit(rep.document(), args.out)
    return 1 if rep.failed else 0


def _load_target(args):
    if getattr(args, "graph", None):
        return read_edge_list(args.graph), None
    B = construct(args.q, args.e, args.d, cap=args.cap)
    return B.graph, B


def _interval_union(q: int, e: int, d: int):
    """Closed-form admissible set for local eigenvalues of ``Bil_q(e x d)``."""
    return [(-q - 1, -1), (q**d - q - 1, q**e - q - 1)]


def _local_checks(rep: Reporter, g, B, vertices) -> None:
    if B is not None and B.q != 2:
        rep.skip("local.grid", "local graphs are grids only over F_2")
        dims = None
    else:
        dims = set()
    with rep.phase("local.grid"):
        for v in vertices if dims is not None else ():
            dims.add(grid_recognize(local_graph(g, v)))
    if dims is not None:
        want = None if B is None else (2**B.e - 1, 2**B.d - 1)
        ok = len(dims) == 1 and None not in dims and (want is None or dims == {want})
        rep.check("local.grid", ok, f"{sorted(map(str, dims))} over {len(vertices)} vertices")
    x = int(vertices[0])
    with rep.phase("local.spectrum"):
        spec = spectrum_small(local_graph(g, x))
    rep.data["local_spectrum"] = spec.as_dict()
    if B is not None and B.q == 2:
        n, m = 2**B.e - 1, 2**B.d - 1
        want_spec: dict[int, int] = {}
        for t, f in ((n + m - 2, 1), (n - 2, m - 1), (m - 2, n - 1), (-2, (n - 1) * (m - 1))):
            want_spec[t] = want_spec.get(t, 0) + f
        got = {int(t): f for t, f in spec.pairs}
        rep.check("local.spectrum", got == want_spec, spec.as_dict()["pairs"])
        if B.e == B.d:
            arr = B.expected_array
            cands = [2**B.d - 3, -1, -2, -3]
            sols = solve_local_multiplicities(arr.k, arr.a[1], cands)
            ok = len(sols) == 1 and {int(t): f for t, f in sols[0].support} == got
            rep.check("local.spectrum_unique_solution", ok,
                      f"{[s.multiplicities for s in sols]} for candidates {cands}")
    if B is not None:
        ivs = _interval_union(B.q, B.e, B.d)
        nonprinc = [t for t, _ in spec.pairs if t != max(t2 for t2, _ in spec.pairs)]
        inside = all(any(lo - 1e-9 <= float(t) <= hi + 1e-9 for lo, hi in ivs) for t in nonprinc)
        detail = f"eigenvalues {[str(t) for t in nonprinc]} in {ivs}"
        if B.d >= 3:
            tc = terwilliger_constraint(detect_classical_parameters(B.expected_array))
            inside = inside and all(tc.contains_float(float(t)) for t in nonprinc)
        rep.check("local.eigenvalue_intervals", inside, detail)


def cmd_local_analyze(args) -> int:
    g, B = _load_target(args)
    cfg = {"graph": args.graph, "q": args.q, "e": args.e, "d": args.d, "vertex": args.vertex, "all": args.all}
    rep = Reporter("local-analyze", cfg, args.timings)
    verts = list(range(g.n)) if args.all else [args.vertex]
    _local_checks(rep, g, B, verts)
    _emit(rep.document(), args.out)
    return 1 if rep.failed else 0


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(text)]


def cmd_feasibility(args) -> int:
    arrays = []
    if args.array:
        arrays.append(IntersectionArray.parse(args.array))
    if args.family_M:
        arrays.extend(family_array(M) for M in _parse_range(args.family_M))
    if not arrays:
        raise DrgForgeError("give --array or --family-M")
    rep = Reporter("feasibility", {"array": args.array, "family_M": args.family_M, "l_max": args.l_max},
                   args.timings)
    verdicts = []
    with rep.phase("verdicts"):
        for A in arrays:
            verdicts.append(feasibility_verdict(A, l_max=args.l_max).as_dict())
    rep.data["verdicts"] = verdicts
    _emit(rep.document(), args.out)
    return 0


def cmd_spg_extract(args) -> int:
    cfg = {"graph": args.graph, "q": args.q, "e": args.e, "d": args.d, "line_size": args.line_size,
           "sigma": args.sigma}
    rep = Reporter("spg-extract", cfg, args.timings)
    g, B = _load_target(args)
    if args.sigma:
        bs = block_system(g, 0, verify=False)
        g = sigma_subgraph(g, 0, bs.blocks[0], bs=bs).graph
    spg = extract_spg(g, args.line_size)
    rep.data["spg"] = {"points": spg.points, "lines": len(spg.lines), "s": spg.s, "t": spg.t,
                       "alpha": spg.alpha, "mu": spg.mu, "partial": spg.partial,
                       "diagonal_axiom": spg.diagonal_axiom}
    rep.check("spg.diagonal_axiom", spg.diagonal_axiom)
    _emit(rep.document(), args.out)
    return 1 if rep.failed else 0


def cmd_verify_suite(args) -> int:
    cfg = {"target": args.target, "q": args.q, "e": args.e, "d": args.d, "seed": args.seed,
           "samples": args.samples}
    rep = Reporter("verify-paper", cfg, args.timings)
    rng = np.random.default_rng(args.seed)
    with rep.phase("construct"):
        B = construct(args.q, args.e, args.d, cap=args.cap)
    g = B.graph
    with rep.phase("construction"):
        for c in verify_construction(B):
            rep.check("construction." + c.id, c.passed, c.detail)
        gc = grand_cliques(B)
        rep.check("construction.grand_cliques", gc.sizes() == (B.q**B.e, B.q**B.d),
                  f"sizes {gc.sizes()}, counts {len(gc.family_R)}/{len(gc.family_C)}")
    sample = sorted({0, *rng.choice(g.n, size=min(args.samples, g.n), replace=False).tolist()})
    local_verts = list(range(g.n)) if g.n <= 512 else sample
    _local_checks(rep, g, B, local_verts)
    if B.q != 2:
        for cid in ("mu.hexagon", "blocks.mu_hexagons", "sigma.srg", "spg.parameters",
                    "triangulability.condition_i", "ball2.isomorphism"):
            rep.skip(cid, "hexagon machinery applies to q = 2")
        _emit(rep.document(), args.out)
        return 1 if rep.failed else 0
    with rep.phase("mu"):
        bases = range(g.n) if g.n <= 512 else sample
        census = mu_hexagon_census(g, bases)
    rep.check("mu.hexagon", census.ok, f"{census.pairs} pairs, {len(census.violations)} violations")
    with rep.phase("blocks"):
        bs = block_system(g, 0)
    for k, v in bs.checks.items():
        rep.check("blocks." + k, v, bs.counts if k.endswith("count") else "")
    n, m = bs.frame.n, bs.frame.m
    rep.data["frame"] = {"n": n, "m": m, "blocks": len(bs.blocks), "top_blocks": len(bs.top_blocks)}
    with rep.phase("sigma"):
        sg = sigma_subgraph(g, 0, bs.blocks[0], bs=bs)
        arr = check_distance_regular(sg.graph)
        ok = isinstance(arr, IntersectionArray) and arr.D == 2 and \
            (arr.k, arr.a[1], arr.c[1]) == (3 * m, m + 1, 6)
        rep.check("sigma.srg", ok, f"{arr}")
        ref = construct(2, B.d, 2).graph
        rep.check("sigma.isomorphic_to_bilinear", is_isomorphic(sg.graph, ref) is not None,
                  f"against Bil_2({B.d}x2)")
        top = sigma_subgraph(g, 0, bs.top_blocks[0], top=True, bs=bs)
        arr_t = check_distance_regular(top.graph)
        ok = isinstance(arr_t, IntersectionArray) and arr_t.D == 2 and \
            (arr_t.k, arr_t.a[1], arr_t.c[1]) == (3 * n, n + 1, 6)
        rep.check("sigma.top_srg", ok, f"{arr_t}")
        ref = construct(2, B.e, 2).graph
        rep.check("sigma.top_isomorphic_to_bilinear", is_isomorphic(top.graph, ref) is not None,
                  f"against Bil_2({B.e}x2)")
    if m == 3:
        # the 4-cliques of Bil_2(2x2) are the row cliques themselves, in both families
        rep.skip("spg.parameters", "line size 4 coincides with the grand clique size when m = 3")
    else:
        with rep.phase("spg"):
            try:
                spg = extract_spg(sg.graph, 4)
            except AxiomViolation as exc:
                rep.check("spg.parameters", False, str(exc))
            else:
                rep.check("spg.parameters", spg.parameters == (3, m - 1, 2, 6) and not spg.partial,
                          {"parameters": list(spg.parameters), "partial": spg.partial})
                rep.check("spg.diagonal_axiom", spg.diagonal_axiom)
    if g.n <= TRIANGULABILITY_CAP:
        with rep.phase("triangulability"):
            tr = triangulability_conditions(g, automorphisms=B.translation_generators())
        rep.check("triangulability.condition_i", tr.condition_i, tr.witnesses[:3])
        rep.check("triangulability.condition_ii", tr.condition_ii, tr.witnesses[:3])
        want = {j: [B.expected_array.c_(j)] for j in range(2, B.d + 1)}
        rep.check("triangulability.lambda_count", tr.lambda_counts == want,
                  {str(j): v for j, v in tr.lambda_counts.items()})
    else:
        rep.skip("triangulability.condition_i", f"graph above {TRIANGULABILITY_CAP} vertices")
    with rep.phase("ball2"):
        a, b = (int(v) for v in rng.choice(g.n, size=2, replace=False))
        res = ball2_isomorphism(g, a, g, b)
    rep.check("ball2.isomorphism", res.ok, {"bases": [a, b], **res.certificate})
    _emit(rep.document(), args.out)
    return 1 if rep.failed else 0


# Parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="drgforge", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"drgforge {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, qed=True, graph=False):
        if qed:
            sp.add_argument("--q", type=int, default=2)
            sp.add_argument("--e", type=int, default=3)
            sp.add_argument("--d", type=int, default=3)
            sp.add_argument("--cap", type=int, default=ENUMERATION_CAP, help="vertex enumeration cap")
        if graph:
            sp.add_argument("--graph", help="edge-list file instead of a construction")
        sp.add_argument("--timings", action="store_true", help="include per-phase timings")

    sp = sub.add_parser("construct", help="build Bil_q(e x d)")
    common(sp)
    sp.add_argument("--out", help="edge-list path; a JSON sidecar is written next to it")
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("check-drg", help="distance-regularity of an edge-list graph")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--depth", type=int)
    sp.add_argument("--expect", help="expected intersection array")
    sp.add_argument("--out")
    common(sp, qed=False)
    sp.set_defaults(func=cmd_check_drg)

    sp = sub.add_parser("local-analyze", help="local graph structure and spectrum")
    common(sp, graph=True)
    sp.add_argument("--vertex", type=int, default=0)
    sp.add_argument("--all", action="store_true", help="recognize the local graph at every vertex")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_local_analyze)

    sp = sub.add_parser("feasibility", help="spectral feasibility verdicts")
    sp.add_argument("--array")
    sp.add_argument("--family-M", dest="family_M", help="M or a range like 6..133")
    sp.add_argument("--l-max", dest="l_max", type=int, default=WALK_L_MAX)
    sp.add_argument("--out")
    common(sp, qed=False)
    sp.set_defaults(func=cmd_feasibility)

    sp = sub.add_parser("spg-extract", help="semi-partial geometry from maximal cliques")
    common(sp, graph=True)
    sp.add_argument("--line-size", dest="line_size", type=int, default=4)
    sp.add_argument("--sigma", action="store_true", help="use the Sigma-subgraph of the first block at vertex 0")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_spg_extract)

    sp = sub.add_parser("verify-paper", help="run the full structural check suite on Bil_q(e x d)")
    common(sp)
    sp.add_argument("--target", choices=["bil"], default="bil", help="fixture family (bilinear forms)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=8, help="sampled base vertices on large graphs")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_verify_suite)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DrgForgeError as exc:
        sys.stderr.write(json.dumps({"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2
    except (OSError, ValueError) as exc:
        sys.stderr.write(json.dumps({"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
