"""Command-line front end.

Exit codes: 0 on success, 2 on invalid input, 3 when a resolution hits its
length bound.  Errors are printed to stdout as a JSON object.
"""

from __future__ import annotations

import argparse
import sys

from . import io, linalg as la
from .functors import (
    SupportOutsideQPlus,
    check_extended_class,
    contract,
    extend,
    restrict,
    upset_precover_probe,
)
from .poset import GridPoset, NotASpread, NotInUpperSet, PosetError
from .rep import ModuleError, hom_dim_spreads
from .rha import (
    FamilyError,
    ResolutionTruncated,
    barcode_1d,
    dim_hom_vector,
    dim_vector,
    minimal_resolution,
    minimal_signed_decomposition,
    rank_invariant,
)
from .spreadcalc import FAMILY_KINDS, TooLarge, end_quiver, koszul_complex, make_family

EXIT_OK, EXIT_INVALID, EXIT_TRUNCATED = 0, 2, 3


class _Truncated(Exception):
    def __init__(self, body: dict):
        super().__init__("resolution reached its length bound")
        self.body = body


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise io.FormatError(message)


def _grid(path: str) -> GridPoset:
    P = io.poset_from_json(io.load_json(path))
    if not isinstance(P, GridPoset):
        raise io.FormatError(f"{path} does not describe a grid")
    return P


def _module(args):
    P = io.poset_from_json(io.load_json(args.poset)) if getattr(args, "poset", None) else None
    return io.module_from_json(io.load_json(args.module), P, args.prime)


def _key(x):
    return io.point_key(x)


def cmd_hom(args):
    P = io.poset_from_json(io.load_json(args.poset))
    s = io.spread_from_json(io.load_json(args.spread1), P)
    t = io.spread_from_json(io.load_json(args.spread2), P)
    k, comps = hom_dim_spreads(P, s, t)
    return {"dim": k, "witnesses": [[list(x) if isinstance(x, tuple) else x for x in P.sort_points(U)] for U in comps]}


def cmd_resolve(args):
    M = _module(args)
    fam = make_family(M.poset, args.family, p=M.p)
    res = minimal_resolution(M, fam, args.max_len)
    out = {"family": args.family, "complete": res.complete, "length": res.length, "terms": res.describe()}
    if not res.complete:
        raise _Truncated(out)
    out["signed_decomposition"] = minimal_signed_decomposition(M, fam, resolution=res).describe()
    return out


def cmd_invariant(args):
    M = _module(args)
    if args.which == "dim":
        return {"dims": {_key(x): d for x, d in dim_vector(M).items()}}
    if args.which == "rank":
        return {"rank": {f"{_key(x)}->{_key(y)}": r for (x, y), r in rank_invariant(M).items()}}
    if args.which == "barcode":
        return {"bars": [{"bar": s.describe(), "multiplicity": m} for s, m in barcode_1d(M)]}
    if not args.family:
        raise io.FormatError("--which dimhom needs --family")
    fam = make_family(M.poset, args.family, p=M.p)
    return {"family": args.family, "members": [s.describe() for s in fam.members], "dims": dim_hom_vector(M, fam)}


def cmd_quiver(args):
    P = io.poset_from_json(io.load_json(args.poset))
    q = end_quiver(P, make_family(P, args.family, p=args.prime))
    return q.to_dict() if args.json else q.to_dot()


def cmd_koszul(args):
    if args.n < 1:
        raise io.FormatError("n must be positive")
    K = koszul_complex(args.n, p=args.prime)
    return {
        "poset": io.poset_to_json(K.poset),
        "terms": [[s.describe() for s in terms] for terms in K.summands],
        "labels": [[list(lab) for lab in labs] for labs in K.labels] if K.labels else [],
        "differentials": [K.block_signs(k).tolist() for k in range(len(K.diffs))],
        "exact": K.is_exact(),
    }


def cmd_functor(args):
    Q = _grid(args.grid)
    M = io.module_from_json(io.load_json(args.module), None, args.prime)
    if args.op == "restrict":
        return io.module_to_json(restrict(M, Q))
    if args.op == "contract":
        return io.module_to_json(contract(M, Q))
    if not args.target:
        raise io.FormatError("--op extend needs --target")
    if M.poset != Q:
        raise io.FormatError("--op extend needs a module defined on the subgrid")
    return io.module_to_json(extend(M, _grid(args.target)))


def cmd_check_family(args):
    d = io.load_json(args.grids)
    if not isinstance(d, dict) or "bound" not in d or "grids" not in d:
        raise io.FormatError("grids file needs 'bound' and 'grids'")
    bound = io.poset_from_json(d["bound"])
    grids = [io.poset_from_json(g) for g in d["grids"]]
    if not isinstance(bound, GridPoset) or not all(isinstance(g, GridPoset) for g in grids):
        raise io.FormatError("bound and grids must be grids")
    mods = [io.module_from_json(io.load_json(f), bound, args.prime) for f in args.modules]
    return check_extended_class(bound, grids, args.family, mods, p=args.prime).to_dict()


def cmd_probe(args):
    bound = _grid(args.poset)
    return upset_precover_probe(bound, args.r, args.s, args.t, args.ambient_has_min, p=args.prime).to_dict()


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="spreadhom", description="Relative homological invariants of persistence modules over grids.")
    ap.add_argument("--prime", type=int, default=None, help="field characteristic (default $SPREADHOM_PRIME or 32003)")
    ap.add_argument("--json-errors", action="store_true", help="accepted for compatibility; errors are always JSON")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("hom", help="dim Hom between two spread modules")
    s.add_argument("--poset", required=True)
    s.add_argument("--spread1", required=True)
    s.add_argument("--spread2", required=True)
    s.set_defaults(func=cmd_hom)

    s = sub.add_parser("resolve", help="minimal relative resolution and signed decomposition")
    s.add_argument("--family", required=True, choices=FAMILY_KINDS)
    s.add_argument("--module", required=True)
    s.add_argument("--poset")
    s.add_argument("--max-len", type=int, default=None)
    s.set_defaults(func=cmd_resolve)

    s = sub.add_parser("invariant", help="dimension vector, rank invariant, barcode or Hom-dimension vector")
    s.add_argument("--which", required=True, choices=("dim", "rank", "barcode", "dimhom"))
    s.add_argument("--module", required=True)
    s.add_argument("--poset")
    s.add_argument("--family", choices=FAMILY_KINDS)
    s.set_defaults(func=cmd_invariant)

    s = sub.add_parser("quiver", help="quiver of irreducible morphisms as DOT")
    s.add_argument("--family", required=True, choices=FAMILY_KINDS)
    s.add_argument("--poset", required=True)
    s.add_argument("--json", action="store_true", help="emit JSON instead of DOT")
    s.set_defaults(func=cmd_quiver)

    s = sub.add_parser("koszul", help="the Koszul-type complex of spread modules on the n x n grid")
    s.add_argument("--n", type=int, default=3)
    s.set_defaults(func=cmd_koszul)

    s = sub.add_parser("functor", help="restrict, extend or contract a module")
    s.add_argument("--op", required=True, choices=("restrict", "extend", "contract"))
    s.add_argument("--grid", required=True)
    s.add_argument("--module", required=True)
    s.add_argument("--target", help="grid to extend onto")
    s.set_defaults(func=cmd_functor)

    s = sub.add_parser("check-family", help="check the extended projective class conditions")
    s.add_argument("--grids", required=True)
    s.add_argument("--family", required=True, choices=FAMILY_KINDS)
    s.add_argument("--modules", nargs="*", default=[])
    s.set_defaults(func=cmd_check_family)

    s = sub.add_parser("probe-precover", help="factorization chain of fp-upset maps onto a hook")
    s.add_argument("--poset", required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--s", type=int, required=True)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--ambient-has-min", action="store_true")
    s.set_defaults(func=cmd_probe)
    return ap


def _emit(obj) -> None:
    if isinstance(obj, str):
        sys.stdout.write(obj)
    else:
        sys.stdout.write(io.dumps(obj) + "\n")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.prime is not None:
            args.prime = la.validate_prime(args.prime)
        out = args.func(args)
    except _Truncated as e:
        _emit({"error": "truncated", "message": str(e), "partial": e.body})
        return EXIT_TRUNCATED
    except ResolutionTruncated as e:
        _emit({"error": "truncated", "message": str(e)})
        return EXIT_TRUNCATED
    except (io.FormatError, PosetError, NotASpread, NotInUpperSet, ModuleError, FamilyError, TooLarge,
            SupportOutsideQPlus, la.FieldError, ValueError) as e:
        _emit({"error": type(e).__name__, "message": str(e)})
        return EXIT_INVALID
    _emit(out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
