"""Command-line interface.

One executable, ``sicq``, exposing frame construction and verification,
the state <-> probability dictionary, Born-rule evaluation against the
direct oracle, geometry reports and the cross-module self-check.  All
numeric output is JSON (CSV via --format csv where the payload is tabular);
every document carries a meta header with tool version, dimension, seeds
and tolerances, and identical configuration yields byte-identical output.

Exit codes: 0 success, 1 validation/verification failure (failed frame
verification, invalid state, urungleichung violation, failed self-check),
2 usage errors (bad flags, missing or malformed input files).

The default tolerance is 1e-9, overridable via the SICQ_DEFAULT_TOL
environment variable; randomized commands default to seed 0.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__, geometry, io, sampling, sicrep, urgleichung
from .selfcheck import run_selfcheck
from .sicframe import (
    SicSearchError,
    build_mub,
    known_sic,
    real_sic_feasibility,
    search_sic,
    verify_sic,
)
from .operators import born_direct
from .urgleichung import UrungleichungError
from .validation import default_tol


def _meta(args, **extra) -> dict:
    command = args.command
    if getattr(args, "subcommand", None):
        command = f"{command} {args.subcommand}"
    meta = {"tool": "sicq", "version": __version__, "command": command}
    tol = getattr(args, "tol", None)
    meta["tolerances"] = {"default": default_tol(), **({"tol": tol} if tol is not None else {})}
    meta.update({k: v for k, v in extra.items() if v is not None})
    return meta


def _emit(args, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_doc(args, doc: dict) -> None:
    fmt = getattr(args, "format", "json")
    if fmt == "csv":
        _emit(args, _doc_to_csv(doc))
    else:
        _emit(args, io.dump_json(doc))


def _fmt_cell(val) -> str:
    return repr(val) if isinstance(val, float) else str(val)


def _doc_to_csv(doc: dict) -> str:
    """Tabular CSV with the meta header as comment lines.

    Equal-length numeric list fields become columns indexed by row; scalar
    fields become key,value rows (or comments when columns are present).
    Nested documents (matrices, frames) have no tabular form and must use
    JSON.
    """
    lines = []
    for key, val in doc.get("meta", {}).items():
        lines.append(f"# {key}={val}")
    columns, scalars = {}, {}
    for key, val in doc.items():
        if key == "meta":
            continue
        if isinstance(val, list) and all(isinstance(x, (int, float)) for x in val):
            columns[key] = val
        elif isinstance(val, (list, dict)):
            raise SicqUsageError(f"field {key!r} is not tabular; use JSON output")
        else:
            scalars[key] = val
    if columns:
        lengths = {len(v) for v in columns.values()}
        if len(lengths) != 1:
            raise SicqUsageError("list fields of unequal length; use JSON output")
        for key, val in scalars.items():
            lines.append(f"# {key}={_fmt_cell(val)}")
        names = list(columns)
        lines.append(",".join(["index"] + names))
        for i in range(lengths.pop()):
            lines.append(",".join([str(i)] + [_fmt_cell(columns[k][i]) for k in names]))
    else:
        lines.append("key,value")
        for key, val in scalars.items():
            lines.append(f"{key},{_fmt_cell(val)}")
    return "\n".join(lines) + "\n"


class SicqUsageError(Exception):
    pass


def _parse_int_list(text: str) -> list:
    try:
        return [int(x) for x in str(text).split(",") if x != ""]
    except ValueError as exc:
        raise SicqUsageError(f"expected a comma-separated integer list, got {text!r}") from exc


def _parse_doc(path, parser, what: str):
    """Load and parse one input file; structural problems become usage errors."""
    doc = io.load_json(path)
    try:
        return parser(doc)
    except (KeyError, ValueError, TypeError) as exc:
        raise io.DocumentError(path, f"not a valid {what} document: {exc}") from exc


def _load_frame(path):
    return _parse_doc(path, io.parse_frame, "SIC frame")


def _load_operator(path, what="operator"):
    return _parse_doc(path, lambda d: io.parse_operator(d, name=what), what)


def _load_povm(path):
    return _parse_doc(path, io.parse_povm, "POVM")


def _load_prob(path):
    return _parse_doc(path, io.parse_prob, "probability vector")


# -- subcommand handlers ------------------------------------------------------


def _cmd_sic_build(args) -> int:
    seeds = _parse_int_list(args.seeds)
    try:
        frame = search_sic(args.dim, seeds, max_iters=args.max_iters,
                           target_residual=args.residual, mode=args.mode)
    except SicSearchError as exc:
        sys.stderr.write(f"sicq: {exc}\n")
        return 1
    except ValueError as exc:  # unsupported dimension/mode: a usage problem
        raise SicqUsageError(str(exc)) from exc
    doc = io.frame_doc(frame, meta=_meta(args, dim=args.dim, seeds=seeds,
                                         max_iters=args.max_iters,
                                         target_residual=args.residual, mode=args.mode))
    if args.out:
        io.save_json(doc, args.out)
    else:
        sys.stdout.write(io.dump_json(doc))
    return 0


def _cmd_sic_verify(args) -> int:
    frame = _load_frame(args.path)
    tol = args.tol if args.tol is not None else default_tol()
    report = verify_sic(frame, tol=tol)
    doc = report.to_dict()
    doc["meta"] = _meta(args, dim=frame.dim)
    _emit_doc(args, doc)
    return 0 if report.passed else 1


def _cmd_mub_build(args) -> int:
    try:
        mub = build_mub(args.dim)
    except ValueError as exc:
        raise SicqUsageError(str(exc)) from exc
    doc = io.mub_doc(mub, meta=_meta(args, dim=args.dim))
    if args.out:
        io.save_json(doc, args.out)
    else:
        sys.stdout.write(io.dump_json(doc))
    return 0


def _cmd_real_feasibility(args) -> int:
    try:
        doc = real_sic_feasibility(args.dim).to_dict()
    except ValueError as exc:
        raise SicqUsageError(str(exc)) from exc
    doc["meta"] = _meta(args, dim=args.dim)
    _emit_doc(args, doc)
    return 0


def _cmd_state_to_prob(args) -> int:
    frame = _load_frame(args.sic)
    rho = _load_operator(args.state, "state")
    p = sicrep.rho_to_prob(frame, rho, tol=args.tol)
    _emit_doc(args, io.prob_doc(p, meta=_meta(args, dim=frame.dim)))
    return 0


def _cmd_state_to_rho(args) -> int:
    frame = _load_frame(args.sic)
    p = _load_prob(args.prob)
    rho = sicrep.prob_to_rho(frame, p)
    _emit_doc(args, io.operator_doc(rho, meta=_meta(args, dim=frame.dim)))
    return 0


def _cmd_state_validate(args) -> int:
    frame = _load_frame(args.sic)
    p = _load_prob(args.prob)
    report = sicrep.validity_test(frame, p, tol=args.tol)
    doc = report.to_dict()
    doc["meta"] = _meta(args, dim=frame.dim)
    _emit_doc(args, doc)
    return 0 if report.valid else 1


def _cmd_state_purity(args) -> int:
    frame = _load_frame(args.sic)
    p = _load_prob(args.prob)
    structure = sicrep.build_structure(frame)
    report = sicrep.purity_check(structure, p, tol=args.tol)
    doc = report.to_dict()
    doc["meta"] = _meta(args, dim=frame.dim)
    _emit_doc(args, doc)
    return 0


def _cmd_born(args) -> int:
    frame = _load_frame(args.sic)
    rho = _load_operator(args.state, "state")
    povm = _load_povm(args.povm)
    p = sicrep.rho_to_prob(frame, rho, tol=args.tol)
    r = urgleichung.conditional_from_frame(frame, povm)
    q = urgleichung.urgleichung_general(p, r, frame.dim)
    doc = {"n": len(q), "q": [float(x) for x in q]}
    if args.compare:
        oracle = born_direct(rho, povm, tol=args.tol)
        doc["oracle"] = [float(x) for x in oracle]
        doc["max_deviation"] = float(np.max(np.abs(q - oracle)))
    doc["meta"] = _meta(args, dim=frame.dim)
    _emit_doc(args, doc)
    return 0


def _cmd_evolve(args) -> int:
    frame = _load_frame(args.sic)
    u = _load_operator(args.unitary, "unitary")
    p = _load_prob(args.prob)
    r = urgleichung.unitary_to_stochastic(frame, u, tol=args.tol)
    q = urgleichung.evolve_prob(p, r, frame.dim)
    _emit_doc(args, io.prob_doc(q, meta=_meta(args, dim=frame.dim)))
    return 0


def _cmd_geometry_report(args) -> int:
    try:
        doc = geometry.bloch_geometry(args.dim).to_dict()
    except ValueError as exc:
        raise SicqUsageError(str(exc)) from exc
    doc["meta"] = _meta(args, dim=args.dim)
    if getattr(args, "format", "json") == "csv":
        doc.pop("center")  # tabular output keeps scalar fields only
    _emit_doc(args, doc)
    return 0


def _cmd_geometry_sweep(args) -> int:
    d = args.dim
    if args.sic:
        frame = _load_frame(args.sic)
    elif d in (2, 3):
        frame = known_sic(d)
    else:
        try:
            frame = search_sic(d, _parse_int_list(args.search_seeds), max_iters=1500)
        except SicSearchError as exc:
            sys.stderr.write(f"sicq: {exc}\n")
            return 1
        except ValueError as exc:  # dimension outside the supported search range
            raise SicqUsageError(str(exc)) from exc
    rng = sampling.get_rng(args.seed)
    vecs = rng.standard_normal((args.samples, d)) + 1j * rng.standard_normal((args.samples, d))
    vecs /= np.linalg.norm(vecs, axis=1, keepdims=True)
    probs = np.abs(vecs.conj() @ frame.frame_vectors().T) ** 2 / d
    r2 = float(geometry.bloch_geometry(d).sphere_radius_sq)
    sphere_res = np.abs(((probs - 1.0 / (d * d)) ** 2).sum(axis=1) - r2)
    zero_counts = (probs < 1e-12).sum(axis=1)
    max_comp = probs.max(axis=1)
    lines = [
        f"# tool=sicq version={__version__} command=geometry-sweep",
        f"# dim={d} samples={args.samples} seed={args.seed} tol={default_tol()!r}",
        "index,sphere_residual,zero_count,max_component",
    ]
    for i in range(args.samples):
        lines.append(f"{i},{float(sphere_res[i])!r},{int(zero_counts[i])},{float(max_comp[i])!r}")
    _emit(args, "\n".join(lines) + "\n")
    return 0


def _cmd_solve_general(args) -> int:
    try:
        params = urgleichung.solve_generalized(args.m)
    except ValueError as exc:
        raise SicqUsageError(str(exc)) from exc
    lam0, lam_rest = urgleichung.certainty_gram(params.m, params.n, params.alpha, params.beta)
    doc = params.to_dict()
    doc["certainty_lambda0"] = io.fraction_str(lam0)
    doc["certainty_lambda_rest"] = io.fraction_str(lam_rest)
    doc["meta"] = _meta(args, m=args.m)
    _emit_doc(args, doc)
    return 0


def _cmd_selfcheck(args) -> int:
    dims = _parse_int_list(args.dims)
    frames = {}
    if args.frames:
        for path in str(args.frames).split(","):
            frame = _load_frame(path)
            frames[frame.dim] = frame
    report = run_selfcheck(
        dims, seed=args.seed, frames=frames or None,
        search_seeds=_parse_int_list(args.search_seeds),
        search_max_iters=args.search_max_iters,
    )
    doc = report.to_dict()
    doc["meta"] = _meta(args, dims=dims, seed=args.seed)
    if getattr(args, "format", "json") == "csv":
        import csv
        import io as _io

        buf = _io.StringIO()
        for k, v in doc["meta"].items():
            buf.write(f"# {k}={v}\n")
        fields = ("suite", "name", "dim", "residual", "threshold",
                  "direction", "status", "note")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for row in report.rows:
            r = row.to_dict()
            writer.writerow(["" if r[k] is None else
                             (repr(r[k]) if isinstance(r[k], float) else r[k])
                             for k in fields])
        _emit(args, buf.getvalue())
    else:
        _emit(args, io.dump_json(doc))
    return 0 if report.passed else 1


# -- parser -------------------------------------------------------------------


def _add_common(p, tol=True, out=True, fmt=True):
    if tol:
        p.add_argument("--tol", type=float, default=None,
                       help="override the default tolerance (default: 1e-9 or SICQ_DEFAULT_TOL)")
    if out:
        p.add_argument("--out", default=None, help="write the document here instead of stdout")
    if fmt:
        p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sicq",
        description="SIC-POVM probabilistic representation toolkit")
    parser.add_argument("--version", action="version", version=f"sicq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sic = sub.add_parser("sic", help="build or verify SIC frames")
    sic_sub = sic.add_subparsers(dest="subcommand", required=True)
    b = sic_sub.add_parser("build", help="search for a SIC frame")
    b.add_argument("--dim", type=int, required=True)
    b.add_argument("--seeds", default="0", help="comma-separated seed list (default: 0)")
    b.add_argument("--max-iters", type=int, default=1500)
    b.add_argument("--residual", type=float, default=1e-8, help="target max overlap deviation")
    b.add_argument("--mode", choices=("exact", "wh"), default="exact",
                   help="exact: optimize all d^2 vectors; wh: Weyl-Heisenberg fiducial orbit")
    b.add_argument("--out", default=None)
    b.set_defaults(func=_cmd_sic_build)
    v = sic_sub.add_parser("verify", help="verify a frame file")
    v.add_argument("path")
    _add_common(v)
    v.set_defaults(func=_cmd_sic_verify)

    mub = sub.add_parser("mub", help="mutually unbiased bases")
    mub_sub = mub.add_subparsers(dest="subcommand", required=True)
    mb = mub_sub.add_parser("build", help="build the complete MUB set for prime d")
    mb.add_argument("--dim", type=int, required=True)
    mb.add_argument("--out", default=None)
    mb.set_defaults(func=_cmd_mub_build)

    rf = sub.add_parser("real-feasibility",
                        help="minimal-IC feasibility over real Hilbert space")
    rf.add_argument("--dim", type=int, required=True)
    _add_common(rf, tol=False)
    rf.set_defaults(func=_cmd_real_feasibility)

    st = sub.add_parser("state", help="state <-> probability dictionary")
    st_sub = st.add_subparsers(dest="subcommand", required=True)
    for name, fn, needs in (
        ("to-prob", _cmd_state_to_prob, "state"),
        ("to-rho", _cmd_state_to_rho, "prob"),
        ("validate", _cmd_state_validate, "prob"),
        ("purity", _cmd_state_purity, "prob"),
    ):
        sp = st_sub.add_parser(name)
        sp.add_argument("--sic", required=True, help="SIC frame JSON file")
        sp.add_argument(f"--{needs}", required=True)
        _add_common(sp)
        sp.set_defaults(func=fn)

    born = sub.add_parser("born", help="ground probabilities via the quantum law "
                                       "of total probability")
    born.add_argument("--sic", required=True)
    born.add_argument("--state", required=True)
    born.add_argument("--povm", required=True)
    born.add_argument("--compare", action="store_true",
                      help="also emit the direct trace-rule oracle and max deviation")
    _add_common(born)
    born.set_defaults(func=_cmd_born)

    ev = sub.add_parser("evolve", help="evolve SIC probabilities under a unitary")
    ev.add_argument("--sic", required=True)
    ev.add_argument("--unitary", required=True)
    ev.add_argument("--prob", required=True)
    _add_common(ev)
    ev.set_defaults(func=_cmd_evolve)

    geo = sub.add_parser("geometry", help="state-space geometry")
    geo_sub = geo.add_subparsers(dest="subcommand", required=True)
    gr = geo_sub.add_parser("report", help="exact Bloch-sphere constants")
    gr.add_argument("--dim", type=int, required=True)
    _add_common(gr, tol=False)
    gr.set_defaults(func=_cmd_geometry_report)
    gs = geo_sub.add_parser("sweep", help="CSV statistics of random pure states")
    gs.add_argument("--dim", type=int, required=True)
    gs.add_argument("--samples", type=int, default=1000)
    gs.add_argument("--seed", type=int, default=0)
    gs.add_argument("--sic", default=None, help="frame file (default: analytic or searched)")
    gs.add_argument("--search-seeds", default="0,1,2,3", dest="search_seeds")
    gs.add_argument("--out", default=None)
    gs.set_defaults(func=_cmd_geometry_sweep)

    sg = sub.add_parser("solve-general",
                        help="exact coefficients of the generalized quantum law")
    sg.add_argument("--m", type=int, required=True)
    _add_common(sg, tol=False)
    sg.set_defaults(func=_cmd_solve_general)

    sc = sub.add_parser("selfcheck", help="run every cross-module invariant suite")
    sc.add_argument("--dims", default="2,3", help="comma-separated dimensions (default: 2,3)")
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--frames", default=None,
                    help="comma-separated frame files to use for their dimensions")
    sc.add_argument("--search-seeds", default="0,1,2,3,4,5,6,7", dest="search_seeds")
    sc.add_argument("--search-max-iters", type=int, default=1500)
    _add_common(sc, tol=False)
    sc.set_defaults(func=_cmd_selfcheck)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except io.DocumentError as exc:
        sys.stderr.write(f"sicq: {exc}\n")
        return 2
    except SicqUsageError as exc:
        sys.stderr.write(f"sicq: {exc}\n")
        return 2
    except UrungleichungError as exc:
        sys.stderr.write(f"sicq: {exc}\n")
        return 1
    except ValueError as exc:
        sys.stderr.write(f"sicq: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
