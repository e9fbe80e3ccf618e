"""Command-line entry point: ``python3 -m dkh`` or ``dkh``.

Every command builds a list of test records; the JSON report written by
``--out`` has the schema ``{"tests": [{"name", "status", "witness"}]}``.
Exit status is 0 when every record passes, 1 on a failed check and 2 on
bad input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .cube import ChainMap, build_cube
from .derived import FX2, TRIVIAL, hkh, homotopy_solver, induced_map, table_records
from .diagram import DiagramError, PointedDiagram, load
from .f2core import ComplexError, homology
from .movie import MovieError, bundled_diagram, bundled_movie, compile_plain, load_script, run
from .pointed import pointed_cobordism_map, pointed_complex
from .resolution import resolved_run, xi_multiplication
from .suites import Result, run_suite, suite_names

__all__ = ["RunConfig", "InputError", "main", "run_command", "emit_report"]


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    inputs: list
    depth: int = 4
    out: str | None = None
    suite: str | None = None
    quiet: bool = False

    def validate(self):
        if self.depth < 0:
            raise InputError("depth must be >= 0")
        if self.command == "check":
            if not (self.suite or self.inputs):
                raise InputError("check needs a suite name")
        elif len(self.inputs) != 1:
            raise InputError(f"{self.command} takes exactly one input")


def emit_report(results) -> str:
    doc = {"tests": [r.record() for r in results]}
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _diagram(ref) -> PointedDiagram:
    if os.path.exists(ref):
        return load(ref)
    try:
        return bundled_diagram(os.path.basename(ref))
    except MovieError:
        raise InputError(f"no such diagram: {ref}") from None


def _script(ref):
    if os.path.exists(ref):
        return load_script(ref)
    try:
        return bundled_movie(ref[:-4] if ref.endswith(".mov") else ref)
    except MovieError:
        raise InputError(f"no such movie script: {ref}") from None


def _table(tab):
    return [{"bidegree": [h, q], "dim": n} for (h, q), n in sorted(tab.items())]


def _cmd_kh(cfg, out):
    d = _diagram(cfg.inputs[0])
    tab = homology(build_cube(d).base)
    out.append(Result("kh", True, {"input": cfg.inputs[0], "total": sum(tab.values()), "table": _table(tab)}))
    return [f"h={h:>3} q={q:>3}  {n}" for (h, q), n in sorted(tab.items())] + [f"total {sum(tab.values())}"]


def _cmd_hkh(cfg, out):
    d = _diagram(cfg.inputs[0])
    if d.basepoints:
        d = PointedDiagram.build(d.crossings, d.edges, [], [], check_planar=False)
    tab = hkh(d, cfg.depth)
    out.append(Result("hkh", True, {"input": cfg.inputs[0], "depth": cfg.depth, "table": table_records(tab)}))
    return [f"h={h:>3} q={q:>3} xi^{w}  {n}" for (h, q, w), n in tab.items()]


def _cmd_pointed(cfg, out):
    d = _diagram(cfg.inputs[0])
    pc = pointed_complex(d)
    tab = pc.homology()
    out.append(Result("pointed", True, {"input": cfg.inputs[0], "colors": list(pc.colors),
                                        "total": sum(tab.values()), "table": _table(tab)}))
    return [f"h={h:>3} q={q:>3}  {n}" for (h, q), n in sorted(tab.items())] + [f"total {sum(tab.values())}"]


def _cmd_movie(cfg, out):
    s = _script(cfg.inputs[0])
    r = run(s)
    plain = compile_plain(s)
    lines = []
    w = {"input": cfg.inputs[0], "events": len(s.events), "depth": cfg.depth,
         "plain": {"bidegree": list(plain.bidegree), "zero": plain.matrix.is_zero()}}
    src, tgt = homology(r.cubes[0].base), homology(r.cubes[-1].base)
    lines.append(f"plain map bidegree {plain.bidegree}, nonzero entries {plain.matrix.nnz()}")
    colors = r.diagrams[0].colors
    if colors and tuple(r.diagrams[-1].colors) == tuple(colors):
        total = resolved_run(s, cfg.depth, plain_run=r).total
        w["resolved"] = {"bidegree": list(total.bidegree), "zero": total.matrix.is_zero()}
        lines.append(f"resolved map bidegree {total.bidegree}, nonzero entries {total.matrix.nnz()}")
        for m in (TRIVIAL, FX2):
            im = induced_map(total, m)
            w["resolved"][f"collapsed_rank_{m.kind}"] = im.total_rank
            lines.append(f"collapsed against {m}: rank {im.total_rank}")
        same_ends = r.cubes[0].dim == r.cubes[-1].dim and total.source.dim == total.target.dim
        for x in colors:
            if not same_ends:
                break
            xi = xi_multiplication(total.source, x)
            if xi.bidegree != total.bidegree:
                continue
            cert = homotopy_solver(total, ChainMap(total.source, total.target, xi.bidegree, xi.matrix), "rx")
            if cert is not None:
                w["resolved"]["homotopic_to_xi"] = {"color": x, "certificate": cert.summary()}
                lines.append(f"resolved map ≃ ξ_{x}·Id (certificate found)")
                break
        if not w["resolved"]["zero"] and "homotopic_to_xi" not in w["resolved"] and same_ends:
            lines.append("resolved map is not homotopic to a single ξ-multiplication")
        if r.diagrams[0].basepoints and len(colors) <= cfg.depth:
            pm = pointed_cobordism_map(s, cfg.depth, r)
            w["pointed_rank"] = pm.total_rank
            lines.append(f"pointed map rank {pm.total_rank}")
    w["source_rank"], w["target_rank"] = sum(src.values()), sum(tgt.values())
    out.append(Result("movie", True, w))
    return lines


def _cmd_check(cfg, out):
    name = cfg.suite or cfg.inputs[0]
    if name not in suite_names():
        raise InputError(f"unknown suite {name!r}; choose from {', '.join(suite_names())}")
    results = run_suite(name)
    out.extend(results)
    return [f"{r.status.upper():4} {r.name:5} {r.witness.get('title', '')}" for r in results]


COMMANDS = {"kh": _cmd_kh, "hkh": _cmd_hkh, "pointed": _cmd_pointed, "movie": _cmd_movie, "check": _cmd_check}


def run_command(cfg: RunConfig):
    """Run one command; returns (exit status, results, text lines)."""
    cfg.validate()
    results = []
    try:
        lines = COMMANDS[cfg.command](cfg, results)
    except (DiagramError, MovieError, ComplexError, OSError, ValueError) as exc:
        raise InputError(str(exc)) from None
    status = 0 if all(r.passed for r in results) else 1
    return status, results, lines


def _parser():
    p = argparse.ArgumentParser(prog="dkh", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("inputs", nargs="*", help="diagram JSON, movie script, or suite name")
    p.add_argument("--depth", type=int, default=4, help="xi-weight truncation depth (default 4)")
    p.add_argument("--out", help="write the JSON report here ('-' for stdout)")
    p.add_argument("--suite", help=f"suite for 'check': {', '.join(suite_names())}")
    p.add_argument("--quiet", action="store_true", help="suppress the text summary")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    cfg = RunConfig(args.command, args.inputs, args.depth, args.out, args.suite, args.quiet)
    try:
        status, results, lines = run_command(cfg)
    except InputError as exc:
        print(f"dkh: error: {exc}", file=sys.stderr)
        return 2
    if not cfg.quiet and cfg.out != "-":
        print("\n".join(lines))
    if cfg.out:
        report = emit_report(results)
        if cfg.out == "-":
            sys.stdout.write(report)
        else:
            with open(cfg.out, "w") as fh:
                fh.write(report)
    return status


if __name__ == "__main__":
    sys.exit(main())
