"""Command-line front end.

Exit codes: 0 success, 1 a verification ran and the claim came out false,
2 bad input.  Output goes to stdout or, atomically, to ``--out``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

import numpy as np

from . import divides, floer, lattice, pipelines, quiver, stabilize
from .critpath import families, poly, solve

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


# -- rendering ----------------------------------------------------------------

def render_dynkin(lat: lattice.IntersectionLattice, name: str = "dynkin") -> str:
    """DOT text: nodes in label order, +1 solid, -2 dashed, other values labelled."""
    out = [f"graph {name} {{", "  node [shape=circle];"]
    for i, x in enumerate(lat.labels):
        out.append(f'  n{i} [label="{x}"];')
    g = lat.gram
    for i in range(lat.mu):
        for j in range(i + 1, lat.mu):
            v = int(g[i, j])
            if v == 0:
                continue
            if v == 1:
                out.append(f"  n{i} -- n{j};")
            elif v == -2:
                out.append(f'  n{i} -- n{j} [style=dashed, label="-2"];')
            else:
                out.append(f'  n{i} -- n{j} [label="{v}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_atomic(path: str, text: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_json(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None


def _read_text(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _lattice_out(lat: lattice.IntersectionLattice, fmt: str, extra: dict | None = None) -> str:
    if fmt == "dot":
        return render_dynkin(lat)
    if fmt == "csv":
        raise InputError("csv output is only available for track")
    d = {"lattice": lat.to_dict(), "invariants": lattice.invariants(lat).to_dict()}
    d.update(extra or {})
    return _dump(d)


def _load_lattice(path: str) -> lattice.IntersectionLattice:
    d = _read_json(path)
    if isinstance(d, dict) and "lattice" in d:
        d = d["lattice"]  # accept our own output
    if not isinstance(d, dict):
        raise InputError("lattice JSON must be an object with labels and gram")
    return lattice.IntersectionLattice.from_dict(d)


# -- subcommands ----------------------------------------------------------------

def _builtin_divide(args) -> divides.Divide:
    if args.input:
        return divides.Divide.from_dict(_read_json(args.input))
    if args.builtin == "hpq":
        if args.p is None or args.q is None:
            raise InputError("--builtin hpq needs --p and --q")
        return divides.hpq_divide(args.p, args.q)
    return {"kernel": divides.kernel_divide, "four_lines": divides.four_lines_divide,
            "smooth_arc": divides.smooth_arc}[args.builtin]()


def cmd_divide(args) -> tuple[int, str]:
    d = _builtin_divide(args)
    basis = divides.acampo_form(d)
    extra = {"mu": basis.mu}
    if d.half_edges is not None:
        s = divides.divide_to_surface(d)
        extra["surface"] = {"euler": s.euler, "genus": s.genus,
                            "boundary_components": s.boundary_components}
    return EXIT_OK, _lattice_out(basis.lattice, args.format, extra)


def cmd_stabilize(args) -> tuple[int, str]:
    if args.lattice:
        lat = _load_lattice(args.lattice)
    elif args.a_chain:
        lat = stabilize.a_chain(args.a_chain)
    else:
        raise InputError("give --lattice FILE or --a-chain N")
    b = stabilize.gabrielov_stabilize(lat, args.d)
    return EXIT_OK, _lattice_out(b.lattice, args.format, {"d": args.d})


def cmd_mutate(args) -> tuple[int, str]:
    lat = _load_lattice(args.lattice)
    steps = lattice.parse_script(_read_text(args.script))
    b0 = lattice.DistinguishedBasis.from_lattice(lat)
    log: list[lattice.Step] = []
    b = lattice.run_script(b0, steps, cyclic=args.cyclic, log=log)
    before, after = lattice.invariants(lat), lattice.invariants(b.lattice)
    same = before == after and b.consistent()
    code = EXIT_OK if same else EXIT_FAIL
    if args.format == "dot":
        return code, render_dynkin(b.lattice)
    return code, _lattice_out(b.lattice, args.format,
                              {"invariants_unchanged": same, "steps": [s.text() for s in log],
                               "coords": b.coords.tolist()})


def cmd_lattice(args) -> tuple[int, str]:
    lat = _load_lattice(args.lattice)
    extra = {"mu": lat.mu}
    if "A" in lat.labels and "B" in lat.labels:
        extra["torus_class"] = lattice.torus_class_report(lat)
    return EXIT_OK, _lattice_out(lat, args.format, extra)


def cmd_tpqr(args) -> tuple[int, str]:
    p, q, r = args.p, args.q, args.r
    if args.pipeline:
        if r != 2:
            raise InputError("--pipeline builds T_p,q,2 only (r must be 2)")
        log: list[lattice.Step] = []
        b = pipelines.tpq2_pipeline(p, q, log)
        ref = lattice.gabrielov_tpqr_form(p, q, 2, strict=False)
        ok = lattice.sign_equivalent(ref, b.lattice)
        lat = b.lattice.permuted(ref.labels)
        if args.format == "dot":
            return (EXIT_OK if ok else EXIT_FAIL), render_dynkin(lat)
        return (EXIT_OK if ok else EXIT_FAIL), _lattice_out(
            lat, args.format, {"matches_reference": ok, "steps": len(log)})
    lat = lattice.gabrielov_tpqr_form(p, q, r)
    rep = lattice.torus_class_report(lat)
    ok = rep["in_nullspace"] and rep["primitive"]
    return (EXIT_OK if ok else EXIT_FAIL), _lattice_out(lat, args.format, {"torus_class": rep})


def cmd_quiver(args) -> tuple[int, str]:
    p, q, r = args.p, args.q, args.r
    if args.format != "json":
        raise InputError("quiver output is JSON only")
    if args.quiver:
        d = _read_json(args.quiver)
        ck = quiver.Quiver.from_dict(d["quiver"] if isinstance(d, dict) and "quiver" in d else d)
    else:
        ck = quiver.chen_krause_quiver(p, q, r, perturb=args.perturb)
    if args.arm_table:
        tab = quiver.arm_hom_table({"P": p, "Q": q, "R": r}[args.arm_table], args.arm_table,
                                   *(x for a, x in zip("PQR", (p, q, r)) if a != args.arm_table))
        return EXIT_OK, _dump({f"{i},{j}": {str(k): v for k, v in h.items()}
                               for (i, j), h in sorted(tab.items())})
    if not args.verify:
        return EXIT_OK, _dump({"quiver": ck.to_dict(),
                               "fukaya": quiver.fukaya_quiver(p, q, r).to_dict()})
    rep = quiver.verify_mirror(p, q, r, quiver.path_algebra(ck))
    return (EXIT_OK if rep["pass"] else EXIT_FAIL), _dump(rep)


def _holonomy(text: str):
    import sympy
    try:
        return sympy.nsimplify(sympy.sympify(text.replace("i", "I")), rational=True)
    except (sympy.SympifyError, SyntaxError, TypeError):
        raise InputError(f"cannot parse holonomy {text!r}") from None


def cmd_floer(args) -> tuple[int, str]:
    p, q, r = args.p, args.q, args.r
    if args.format != "json":
        raise InputError("floer output is JSON only")
    if args.surgery:
        d = _read_json(args.surgery)
        try:
            sd = floer.SurgeryData(tuple(map(float, d["disc_areas"])),
                                   tuple(map(float, d["surgery_params"])), int(d["index_diff"]))
        except (KeyError, TypeError, ValueError) as e:
            raise InputError(f"malformed surgery data: {e}") from None
        pred = floer.surgery_predicates(sd, args.tol_area)
        return (EXIT_OK if all(pred.values()) else EXIT_FAIL), _dump(pred)
    if args.alpha is not None or args.beta is not None:
        a = _holonomy(args.alpha or "2")
        b = _holonomy(args.beta or "5")
        table = {}
        for v in lattice.tpqr_labels(p, q, r):
            c = floer.tpqr_floer_complex(p, q, r, v)
            table[v] = {str(k): n for k, n in floer.cohomology_at(c, a, b).items()}
        return EXIT_OK, _dump({"alpha": str(a), "beta": str(b), "cohomology": table})
    rep = floer.generation_obstruction_report(p, q, r, samples=args.samples, seed=args.seed)
    return (EXIT_OK if rep["obstructed"] else EXIT_FAIL), _dump(rep)


def _family(args) -> poly.MultiPoly:
    if args.poly:
        return poly.MultiPoly.from_json_dict(_read_json(args.poly))
    params = {}
    for kv in args.param or []:
        if "=" not in kv:
            raise InputError(f"--param expects key=value, got {kv!r}")
        k, v = kv.split("=", 1)
        params[k] = v
    for k in ("p", "q", "r"):
        if k in params:
            params[k] = int(params[k])
    return families.builtin_family(args.family, **params)


def cmd_track(args) -> tuple[int, str]:
    f = _family(args)
    sopt = solve.SolveOptions(residual_tol=args.tol_residual, dedupe_tol=args.tol_dedupe,
                              seed=args.seed, workers=args.workers)
    if args.solve_only or "t" not in f.variables:
        if args.solve_only and "t" in f.variables:
            f = f.at_t(args.t)
        res = solve.grad_solve(f, sopt)
        if args.format == "csv":
            lines = ["point_id,re,im"] + [f"{i},{p.value.real!r},{p.value.imag!r}"
                                          for i, p in enumerate(res.points)]
            return EXIT_OK, "\n".join(lines) + "\n"
        d = res.to_dict()
        d["distinct_values"] = [[v.real, v.imag] for v in res.distinct_values(args.tol_dedupe)]
        return EXIT_OK, _dump(d)
    if args.grid < 2:
        raise InputError("--grid needs at least 2 points")
    topt = solve.TrackOptions(escape_radius=args.tol_escape, residual_tol=args.tol_residual,
                              dedupe_tol=args.tol_dedupe, workers=args.workers, solve=sopt)
    tr = solve.track_family(f, np.linspace(0.0, 1.0, args.grid), topt)
    code = EXIT_FAIL if tr.lost else EXIT_OK
    if args.format == "csv":
        return code, tr.to_csv()
    return code, json.dumps(tr.to_dict(), indent=2, sort_keys=True) + "\n"


# -- parser ---------------------------------------------------------------------

def _positive(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "dot"), default="json")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write here (atomically) instead of stdout")
    common.add_argument("--tol-area", type=_positive, default=1e-9)
    common.add_argument("--tol-residual", type=_positive, default=1e-9)
    common.add_argument("--tol-escape", type=_positive, default=1e3, help="escape radius")
    common.add_argument("--tol-dedupe", type=_positive, default=1e-6)

    ap = argparse.ArgumentParser(prog="tpqrkit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    s = sub.add_parser("divide", parents=[common], help="A'Campo form and surface of a divide")
    s.add_argument("--input", help="divide JSON")
    s.add_argument("--builtin", choices=("kernel", "four_lines", "smooth_arc", "hpq"),
                   default="kernel")
    s.add_argument("--p", type=int)
    s.add_argument("--q", type=int)
    s.set_defaults(fn=cmd_divide)

    s = sub.add_parser("stabilize", parents=[common], help="Gabrielov stabilisation")
    s.add_argument("--lattice")
    s.add_argument("--a-chain", type=int, help="start from the A_n chain")
    s.add_argument("--d", type=int, required=True)
    s.set_defaults(fn=cmd_stabilize)

    s = sub.add_parser("mutate", parents=[common], help="run a mutation script")
    s.add_argument("--lattice", required=True)
    s.add_argument("--script", required=True)
    s.add_argument("--cyclic", action="store_true", help="allow rotations in named twists")
    s.set_defaults(fn=cmd_mutate)

    s = sub.add_parser("lattice", parents=[common], help="invariants of a lattice")
    s.add_argument("--lattice", required=True)
    s.set_defaults(fn=cmd_lattice)

    for name, fn, hlp in (("tpqr", cmd_tpqr, "reference T_p,q,r form"),
                          ("quiver", cmd_quiver, "quivers and mirror check"),
                          ("floer", cmd_floer, "Floer cohomology table")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("p", type=int)
        s.add_argument("q", type=int)
        s.add_argument("r", type=int)
        s.set_defaults(fn=fn)
        if name == "tpqr":
            s.add_argument("--pipeline", action="store_true",
                           help="build T_p,q,2 from the h_p,q divide and compare")
        elif name == "quiver":
            s.add_argument("--verify", action="store_true")
            s.add_argument("--perturb", action="store_true", help="negative control")
            s.add_argument("--arm-table", choices=("P", "Q", "R"))
            s.add_argument("--quiver", help="quiver JSON to check instead of the built-in one")
        else:
            s.add_argument("--alpha")
            s.add_argument("--beta")
            s.add_argument("--samples", type=int, default=20)
            s.add_argument("--surgery", help="JSON with disc_areas, surgery_params, index_diff")

    s = sub.add_parser("track", parents=[common], help="critical points and their tracks")
    s.add_argument("--family", choices=families.NAMES, default="M")
    s.add_argument("--param", action="append", help="family parameter key=value")
    s.add_argument("--poly", help="polynomial JSON instead of a built-in family")
    s.add_argument("--grid", type=int, default=51)
    s.add_argument("--solve-only", action="store_true")
    s.add_argument("--t", type=float, default=0.0, help="t for --solve-only")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(fn=cmd_track)
    return ap


_INPUT_ERRORS = (InputError, lattice.LatticeError, divides.DivideError, quiver.QuiverError,
                 floer.FloerError, poly.PolyError, ValueError, KeyError)


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    try:
        code, text = args.fn(args)
    except _INPUT_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (solve.SolveError, solve.TrackError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAIL
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
