"""Command-line interface.

All subcommands emit JSON on stdout or to --out. Exit codes: 0 success,
2 a compare subcommand found a distinguishing invariant, 1 any error.
Output is byte-identical across repeated runs and worker counts
(INVFORGE_WORKERS).
"""

from __future__ import annotations

import argparse
import json
import sys

from .equivalence import (
    basis_from_dict,
    channel_compare,
    compare_lu,
    fingerprint,
    numeric_invariance_check,
    sl_projective_compare,
)
from .errors import InvforgeError
from .lu import lu_degree_bound, luip_space
from .poly import SystemShape
from .sl import sl_degree_bound, slip_space, sluip_space
from .states import channel_from_dict, state_from_dict


def _parse_shape(text: str) -> SystemShape:
    try:
        dims = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InvforgeError(f"cannot parse shape {text!r}") from None
    return SystemShape(dims)


def _emit(payload: dict, out_path: str | None) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="invforge",
        description="Exact polynomial invariants of multipartite states and "
        "degree-bounded equivalence checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lu-basis", help="canonical local-unitary invariant basis")
    p.add_argument("--shape", required=True)
    p.add_argument("--half-degree", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("slip-basis", help="special-linear invariant basis")
    p.add_argument("--shape", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("sluip-basis", help="mixed SL x unitary invariant basis")
    p.add_argument("--shape", required=True, help="special-linear parties")
    p.add_argument("--ancilla", type=int, required=True, help="unitary party dimension")
    p.add_argument("--half-degree", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("fingerprint", help="invariant fingerprint of a state")
    p.add_argument("--state", required=True)
    p.add_argument("--max-half-degree", type=int, required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--out")

    p = sub.add_parser("compare", help="degree-bounded state comparison")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--max-half-degree", type=int, required=True)
    p.add_argument("--group", choices=["lu", "sl"], default="lu")
    p.add_argument("--out")

    p = sub.add_parser("bound", help="generation degree bound")
    p.add_argument("--group", choices=["lu", "sl"], required=True)
    p.add_argument("--shape", required=True)
    p.add_argument("--out")

    p = sub.add_parser("check-invariance", help="numeric invariance of a basis file")
    p.add_argument("--basis", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tol", type=float, required=True)
    p.add_argument("--out")

    p = sub.add_parser("channel-compare", help="compare channels via Choi states")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--max-half-degree", type=int, required=True)
    p.add_argument("--out")

    return parser


def _run(args) -> int:
    if args.command == "lu-basis":
        basis = luip_space(_parse_shape(args.shape), args.half_degree)
        _emit(basis.to_dict(), args.out)
        return 0

    if args.command == "slip-basis":
        basis = slip_space(_parse_shape(args.shape), args.degree)
        _emit(basis.to_dict(), args.out)
        return 0

    if args.command == "sluip-basis":
        sl_shape = _parse_shape(args.shape)
        extended = SystemShape(sl_shape.dims + (args.ancilla,))
        basis = sluip_space(extended, args.half_degree)
        _emit(basis.to_dict(), args.out)
        return 0

    if args.command == "fingerprint":
        state = state_from_dict(_load_json(args.state))
        fp = fingerprint(state, args.max_half_degree, "exact" if args.exact else "auto")
        _emit(fp.to_dict(), args.out)
        return 0

    if args.command == "compare":
        a = state_from_dict(_load_json(args.a))
        b = state_from_dict(_load_json(args.b))
        if args.group == "lu":
            verdict = compare_lu(a, b, args.max_half_degree)
        else:
            # special-linear invariants have plain degrees; cover every
            # degree up to twice the requested half degree
            degrees = range(1, 2 * args.max_half_degree + 1)
            verdict = sl_projective_compare(a, b, degrees)
        _emit(verdict.to_dict(), args.out)
        return 2 if verdict.distinguished else 0

    if args.command == "bound":
        shape = _parse_shape(args.shape)
        bound = lu_degree_bound(shape) if args.group == "lu" else sl_degree_bound(shape)
        _emit(bound.to_dict(), args.out)
        return 0

    if args.command == "check-invariance":
        basis = basis_from_dict(_load_json(args.basis))
        report = numeric_invariance_check(basis, args.trials, args.seed, args.tol)
        _emit(report.to_dict(), args.out)
        return 0

    if args.command == "channel-compare":
        a = channel_from_dict(_load_json(args.a))
        b = channel_from_dict(_load_json(args.b))
        verdict = channel_compare(a, b, args.max_half_degree)
        _emit(verdict.to_dict(), args.out)
        return 2 if verdict.distinguished else 0

    raise InvforgeError(f"unknown command {args.command!r}")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except InvforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
