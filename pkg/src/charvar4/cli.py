"""Command-line entry point.

Exit codes: 0 success / true, 1 verified false, 2 domain error, 3 input error.
Every randomized command takes an explicit ``--seed``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import coordinates as co
from . import serialize as ser
from . import suites
from .classify import Case, classify_pair, random_reducible_pair
from .errors import DomainError, InputError
from .matrices import Flavor, GroupElement, as_matrix, random_loxodromic, random_sl4, random_su31
from .reconstruct import FitConfig, conjugacy_test, find_conjugator, fit_pair, reduced_conjugacy_test

EXIT_OK, EXIT_FALSE, EXIT_DOMAIN, EXIT_INPUT = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would collide with the domain-error code
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _emit(obj, output):
    text = obj if isinstance(obj, str) else ser.dumps(obj)
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _need_seed(args, what):
    if args.seed is None:
        raise InputError(f"{what} needs an explicit --seed")


def _tolerances(items) -> dict[str, float]:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        try:
            out[name] = float(value)
        except ValueError:
            sep = ""
        if not sep or out[name] <= 0:
            raise InputError(f"bad tolerance override {item!r}; expected name=positive-number")
    return out


def _load_pair(path):
    A, B = ser.pair_from_json(ser.read_json(path))
    return A, B


def _seeds(seed, n):
    return [int(s) for s in np.random.default_rng(seed).integers(2**63, size=n)]


# -- commands -----------------------------------------------------------------


def cmd_sample(args):
    _need_seed(args, "sample")
    if args.count < 0:
        raise InputError("count must be non-negative")
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    seeds = _seeds(args.seed, args.count * 2)
    make = {"sl4": random_sl4, "su31": random_su31, "loxodromic": random_loxodromic}
    written = []
    for i in range(args.count):
        s1, s2 = seeds[2 * i], seeds[2 * i + 1]
        if args.group in ("line", "plane"):
            A, B, _ = random_reducible_pair(s1, Case(args.group.capitalize()))
            flavor = Flavor.SU31
            obj = ser.pair_to_json(GroupElement(A, flavor, 1e-8), GroupElement(B, flavor, 1e-8), seed=s1)
        elif args.pairs:
            obj = ser.pair_to_json(make[args.group](s1), make[args.group](s2), seed=[s1, s2])
        else:
            obj = ser.element_to_json(make[args.group](s1))
            obj["seed"] = s1
        path = out / f"{args.group}_{i:04d}.json"
        ser.write_json(path, obj)
        written.append(str(path))
    _emit({"group": args.group, "seed": args.seed, "files": written}, None)
    return EXIT_OK


def cmd_coords(args):
    A, B = _load_pair(args.pairfile)
    catalog = args.catalog or ("SU31_22" if A.flavor is Flavor.SU31 else "SL4_DJOKOVIC_30")
    vec = co.compute(catalog, A, B)
    if args.format == "csv":
        if co.get_catalog(catalog).flavor is not Flavor.SU31:
            raise InputError("CSV output is only available for the 39-slot real vector (SU31_22)")
        _emit(ser.real_vector_to_csv(co.real_coords_from_traces(vec)), args.output)
        return EXIT_OK
    out = {"trace_vector": ser.trace_vector_to_json(vec)}
    if co.get_catalog(catalog).flavor is Flavor.SU31:
        out["real_vector"] = ser.real_vector_to_json(co.real_coords_from_traces(vec))
    _emit(out, args.output)
    return EXIT_OK


def cmd_verify(args):
    names = list(suites.VERIFY_SUITES) if args.suite == "all" else [args.suite]
    tols = _tolerances(args.tol)
    if args.random is not None:
        _need_seed(args, "verify --random")
        if args.random < 1:
            raise InputError("--random needs a positive count")
    elif args.pairfile is None:
        raise InputError("verify needs a pair file or --random N")
    if "sublemma" in names:
        _need_seed(args, "the sublemma suite")
    rng = np.random.default_rng(args.seed)
    results = []
    for name in names:
        fn, flavor = suites.VERIFY_SUITES[name]
        if args.random is not None:
            maker = suites.su31_pairs if flavor == "su31" else suites.sl4_pairs
            pairs = maker(args.random, args.seed)
        else:
            A, B = _load_pair(args.pairfile)
            pairs = [(as_matrix(A), as_matrix(B))]
        kwargs = {"tol": tols[name]} if name in tols else {}
        results.append(fn(pairs, rng, **kwargs))
    ok = all(r.passed for r in results)
    _emit({"seed": args.seed, "passed": ok, "suites": [r.to_json() for r in results]}, args.output)
    return EXIT_OK if ok else EXIT_FALSE


def cmd_classify(args):
    A, B = _load_pair(args.pairfile)
    _emit(classify_pair(A, B).to_json(), args.output)
    return EXIT_OK


def cmd_conjugacy(args):
    A, B = _load_pair(args.pair1)
    A2, B2 = _load_pair(args.pair2)
    if args.reduced:
        _need_seed(args, "conjugacy --reduced")
        cert = reduced_conjugacy_test(A, B, A2, B2, seed=args.seed)
    elif args.find_conjugator:
        cert = find_conjugator(A, B, A2, B2)
    else:
        su31 = A.flavor is Flavor.SU31 and A2.flavor is Flavor.SU31
        catalog = args.catalog or ("SU31_22" if su31 else "SL4_DJOKOVIC_30")
        cert = conjugacy_test(A, B, A2, B2, catalog=catalog)
    out = cert.to_json()
    out["seed"] = args.seed
    _emit(out, args.output)
    return EXIT_OK if cert.conjugate else EXIT_FALSE


def cmd_fit(args):
    _need_seed(args, "fit")
    obj = ser.read_json(args.coordsfile)
    target = ser.trace_vector_from_json(obj.get("trace_vector", obj) if isinstance(obj, dict) else obj)
    cfg = FitConfig(restarts=args.restarts, seed=args.seed, tol=args.tol, max_iter=args.max_iter)
    result = fit_pair(target, cfg)
    _emit(result.to_json(), args.output)
    return EXIT_OK if result.converged else EXIT_FALSE


def cmd_jacobian(args):
    catalog = "SL4_PARAMETERS_15" if args.params_only else (args.catalog or "SL4_DJOKOVIC_30")
    flavor = co.get_catalog(catalog).flavor
    if args.random:
        _need_seed(args, "jacobian --random")
        s1, s2 = _seeds(args.seed, 2)
        make = random_su31 if flavor is Flavor.SU31 else random_sl4
        A, B = make(s1), make(s2)
    elif args.pairfile:
        A, B = _load_pair(args.pairfile)
    else:
        raise InputError("jacobian needs a pair file or --random")
    rep = co.jacobian_report(A, B, catalog)
    _emit({
        "catalog": rep.catalog,
        "rank": rep.rank,
        "directions": rep.directions,
        "step": rep.step,
        "threshold": rep.threshold,
        "singular_values": [float(s) for s in rep.singular_values],
        "seed": args.seed,
    }, args.output)
    return EXIT_OK


def cmd_fuzz(args):
    _need_seed(args, "fuzz")
    if args.trials < 0:
        raise InputError("--trials must be non-negative")
    co.inject_fault("xy2-sign", args.inject_fault)
    try:
        results = suites.run_fuzz(args.trials, args.seed)
    finally:
        co.inject_fault("xy2-sign", False)
    failed = [r.name for r in results if not r.passed]
    _emit({
        "seed": args.seed,
        "trials": args.trials,
        "passed": len(results) - len(failed),
        "failed": len(failed),
        "failures": failed,
        "suites": [r.to_json() for r in results],
    }, args.output)
    return EXIT_FALSE if failed else EXIT_OK


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="charvar4", description="Trace coordinates for pairs of 4x4 matrices.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    catalogs = sorted(co.CATALOGS)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=fn)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("-o", "--output", default=None, help="write the report here instead of stdout")
        return sp

    sp = add("sample", cmd_sample, "write random group elements or pairs as JSON")
    sp.add_argument("group", choices=["sl4", "su31", "loxodromic", "line", "plane"])
    sp.add_argument("count", type=int)
    sp.add_argument("--outdir", default=".")
    sp.add_argument("--pairs", action="store_true", help="write pair files instead of single elements")

    sp = add("coords", cmd_coords, "trace coordinates of a pair")
    sp.add_argument("pairfile")
    sp.add_argument("--catalog", choices=catalogs)
    sp.add_argument("--format", choices=["json", "csv"], default="json")

    sp = add("verify", cmd_verify, "check trace identities against direct evaluation")
    sp.add_argument("pairfile", nargs="?")
    sp.add_argument("--random", type=int, metavar="N")
    sp.add_argument("--suite", choices=[*suites.VERIFY_SUITES, "all"], default="all")
    sp.add_argument("--tol", action="append", metavar="SUITE=VALUE")

    sp = add("classify", cmd_classify, "isometry types and reducibility of a pair")
    sp.add_argument("pairfile")

    sp = add("conjugacy", cmd_conjugacy, "decide whether two pairs are conjugate")
    sp.add_argument("pair1")
    sp.add_argument("pair2")
    sp.add_argument("--catalog", choices=catalogs)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--find-conjugator", action="store_true")
    group.add_argument("--reduced", action="store_true")

    sp = add("fit", cmd_fit, "find a pair with the given trace coordinates")
    sp.add_argument("coordsfile")
    sp.add_argument("--restarts", type=int, default=32)
    sp.add_argument("--max-iter", type=int, default=200)
    sp.add_argument("--tol", type=float, default=1e-6)

    sp = add("jacobian", cmd_jacobian, "numerical rank of the trace map")
    sp.add_argument("pairfile", nargs="?")
    sp.add_argument("--random", action="store_true")
    sp.add_argument("--catalog", choices=catalogs)
    sp.add_argument("--params-only", action="store_true")

    sp = add("fuzz", cmd_fuzz, "run every invariant suite on seeded random inputs")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
