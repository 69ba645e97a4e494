"""Command-line front end: ``toricforms <group> <action> [flags]``.

Exit status is 0 when every verdict passes, 1 when a check fails and 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

from . import lattice as lt
from .cech import blowup_les_check, cech_complex, hyper_complex, mapping_cone_complex, parse_sheaf
from .cones import Cone, classify, dual_cone, faces
from .dilation import DEFAULT_SEQUENCE, NotStabilized, colimit_trace, hh_colimit_check
from .fans import Fan, FanError, blowup_square, resolve, star_subdivision, validate
from .forms import omega_image_weight, tilde_omega_weight
from .monoids import AffineMonoid
from .paperlab import (
    k0_affine_identity,
    run_huge,
    run_hugeK1,
    structural_identities,
    weight_box,
)

FIXTURES = ("tau", "huge", "p1", "a1", "orthant")
EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    pass


class ParseError(InputError):
    pass


class ValidationError(InputError):
    pass


class UnknownCommand(InputError):
    pass


# ---------------------------------------------------------------------------
# fan documents


def parse_fan_document(doc: dict) -> Fan:
    """Build a face-closed fan from ``{lattice_rank, rays, cones, name?}``."""
    if not isinstance(doc, dict):
        raise ParseError("fan document must be an object")
    for key in ("lattice_rank", "rays", "cones"):
        if key not in doc:
            raise ParseError(f"missing key {key!r}")
    n = doc["lattice_rank"]
    if not isinstance(n, int) or n < 0:
        raise ParseError("lattice_rank must be a nonnegative integer")
    rays = doc["rays"]
    for i, r in enumerate(rays):
        if not isinstance(r, list) or len(r) != n or not all(isinstance(x, int) for x in r):
            raise ParseError(f"ray {i} is not an integer vector of length {n}")
    cones = []
    for j, idx in enumerate(doc["cones"]):
        if not isinstance(idx, list) or not all(isinstance(i, int) for i in idx):
            raise ParseError(f"cone {j} is not a list of ray indices")
        bad = [i for i in idx if not 0 <= i < len(rays)]
        if bad:
            raise ParseError(f"cone {j} refers to missing rays {bad}")
        cones.append(Cone.from_generators([rays[i] for i in idx], n))
    name = doc.get("name", "")
    fan = Fan.from_cones(cones, n, str(name))
    rep = validate(fan)
    if not rep:
        raise ValidationError(f"{rep.violation}: " + "; ".join(str(c) for c in rep.cones))
    return fan


def fan_document(f: Fan) -> dict:
    rays = list(f.rays)
    index = {r: i for i, r in enumerate(rays)}
    return {
        "name": f.name,
        "lattice_rank": f.ambient_rank,
        "rays": [list(r) for r in rays],
        "cones": [sorted(index[r] for r in c.rays) for c in f.maximal],
    }


def _read_text(path: str | None, fixture: str | None) -> str:
    if fixture:
        if fixture not in FIXTURES:
            raise ParseError(f"unknown fixture {fixture!r}; choose from {', '.join(FIXTURES)}")
        return resources.files("toricforms").joinpath("data", f"{fixture}.json").read_text()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _parse_json(text: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not a valid document: {exc.msg} at line {exc.lineno}") from None


def load_fan(path: str | None = None, fixture: str | None = None) -> Fan:
    return parse_fan_document(_parse_json(_read_text(path, fixture)))


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    command: str
    digest: str
    window: str = ""
    tables: list = field(default_factory=list)  # (name, header, rows)
    verdicts: list = field(default_factory=list)  # (name, bool)
    notes: list = field(default_factory=list)
    fmt: str = "tsv"

    @property
    def ok(self) -> bool:
        return all(v for _, v in self.verdicts)

    def table(self, name: str, header: Sequence[str], rows) -> None:
        self.tables.append((name, tuple(header), [tuple(_cell(x) for x in r) for r in rows]))

    def render(self, fmt: str | None = None) -> str:
        if (fmt or self.fmt) == "structured":
            return json.dumps({
                "command": self.command,
                "input_digest": self.digest,
                "window": self.window,
                "tables": [
                    {"name": n, "columns": list(h), "rows": [list(r) for r in rows]}
                    for n, h, rows in self.tables
                ],
                "verdicts": [{"check": n, "pass": v} for n, v in self.verdicts],
                "notes": list(self.notes),
                "verdict": "pass" if self.ok else "fail",
            }, indent=2, sort_keys=True) + "\n"
        lines = [f"# command\t{self.command}", f"# input\tsha256:{self.digest}"]
        if self.window:
            lines.append(f"# window\t{self.window}")
        for name, header, rows in self.tables:
            lines.append(f"## table\t{name}")
            lines.append("\t".join(header))
            lines.extend("\t".join(r) for r in rows)
        for name, v in self.verdicts:
            lines.append(f"## check\t{name}\t{'pass' if v else 'fail'}")
        for note in self.notes:
            lines.append(f"## note\t{note}")
        lines.append(f"## verdict\t{'pass' if self.ok else 'fail'}")
        return "\n".join(lines) + "\n"


def _cell(x) -> str:
    if isinstance(x, bool):
        return "yes" if x else "no"
    if isinstance(x, tuple) and all(isinstance(a, int) for a in x):
        return ",".join(str(a) for a in x)
    if isinstance(x, (tuple, list)):
        return " ".join(_cell(a) for a in x) if x else "-"
    if x is None:
        return "-"
    return str(x)


def _vector(text: str) -> tuple:
    try:
        return tuple(int(a) for a in text.replace("(", "").replace(")", "").split(",") if a.strip())
    except ValueError:
        raise ParseError(f"cannot read integer vector {text!r}") from None


def _vectors(text: str) -> list:
    return [_vector(part) for part in text.split(";") if part.strip()]


# ---------------------------------------------------------------------------
# weight sweeps


def _sweep(fn, args_list, parallel: bool):
    """Evaluate ``fn`` over argument tuples; results come back in input order."""
    if parallel and len(args_list) > 1:
        with ProcessPoolExecutor() as ex:
            return list(ex.map(fn, *zip(*args_list)))
    return [fn(*a) for a in args_list]


def _weights(args, n: int) -> list:
    if args.weight is not None:
        m = _vector(args.weight)
        if len(m) != n:
            raise ParseError(f"weight {args.weight} does not have rank {n}")
        return [m]
    return list(weight_box(n, args.window))


def _window_label(args, n: int) -> str:
    if args.weight is not None:
        return f"weight {args.weight}"
    return f"[-{args.window},{args.window}]^{n}"


def _forms_row(sigma, m, p):
    t = tilde_omega_weight(sigma, m, p).dim
    i = omega_image_weight(sigma, m, p).dim
    return (m, t, i, t - i)


def _cech_row(f, sheaf, m):
    C = cech_complex(f, sheaf, m)
    return (m, C.cohomology(), C.d_squared_zero())


def _hyper_row(f, t, m):
    H = hyper_complex(f, t, m)
    return (m, H.cohomology(), H.d_squared_zero())


def _cone_row(f, m):
    H = mapping_cone_complex(f, m)
    return (m, H.cohomology(), H.d_squared_zero())


def _les_row(sq, p, m):
    r = blowup_les_check(sq, p, m)
    return (m, r.h_X, r.h_Xp, r.h_V, r.h_Vp, r.alpha, r.beta, r.gamma, r.alternating_sum, r.exact)


def _degree_header(prefix: str, rows) -> list:
    width = max((len(r[1]) for r in rows), default=0)
    return [f"{prefix}{q}" for q in range(width)]


# ---------------------------------------------------------------------------
# command handlers


def _cone_from(args) -> Cone:
    if args.rays:
        rays = _vectors(args.rays)
        if not rays:
            raise ParseError("no rays given")
        if len({len(r) for r in rays}) != 1:
            raise ParseError("rays have different lengths")
        return Cone.from_generators(rays)
    f = _fan_from(args)
    if len(f.maximal) != 1:
        raise ParseError("this command needs a single cone: pass --rays or an affine fan")
    return f.maximal[0]


def _fan_from(args) -> Fan:
    if not (args.fan or args.fixture):
        raise ParseError("pass --fan PATH or --fixture NAME")
    return load_fan(args.fan, args.fixture)


def cmd_cone(args, rep: Report) -> None:
    c = _cone_from(args)
    if args.action == "dual":
        d = dual_cone(c)
        rep.table("dual rays", ["ray"], [(r,) for r in d.rays])
        rep.table("dual lineality", ["vector"], [(v,) for v in d.lineality])
    elif args.action == "faces":
        rep.table("faces", ["dim", "rays"], [(fc.dim, fc.rays) for fc in faces(c)])
    else:
        info = classify(c)
        rep.table("classification", ["property", "value"], sorted(info.items()))


def cmd_monoid(args, rep: Report) -> None:
    A = AffineMonoid.of_cone(_cone_from(args))
    if args.action == "hilbert":
        rep.table("hilbert basis", ["element"], [(h,) for h in A.hilbert_basis()])
    else:
        sp = A.split
        rep.table("units", ["vector"], [(u,) for u in sp.unit_basis])
        rep.table("projection", ["row"], [(r,) for r in sp.projection])
        rep.table("pointed hilbert basis", ["element"], [(h,) for h in sp.pointed.hilbert_basis()])


def cmd_fan(args, rep: Report) -> None:
    if args.action == "validate":
        doc = _parse_json(_read_text(args.fan, args.fixture))
        try:
            f = parse_fan_document(doc)
        except ValidationError as exc:
            rep.verdicts.append(("fan axioms", False))
            rep.notes.append(str(exc))
            return
        rep.table("maximal cones", ["rays"], [(c.rays,) for c in f.maximal])
        rep.table("summary", ["property", "value"], [
            ("cones", len(f.cones)), ("smooth", f.is_smooth()), ("complete", f.is_complete())])
        rep.verdicts.append(("fan axioms", True))
        return
    f = _fan_from(args)
    if args.action == "resolve":
        g, trail = resolve(f)
        rep.table("trail", ["ray"], [(v,) for v in trail])
        rep.table("maximal cones", ["rays"], [(c.rays,) for c in g.maximal])
        rep.verdicts.append(("resolved fan is smooth", g.is_smooth()))
        return
    if not args.ray:
        raise ParseError(f"fan {args.action} needs --ray")
    v = _vector(args.ray)
    if args.action == "subdivide":
        g = star_subdivision(f, v)
        rep.table("maximal cones", ["rays"], [(c.rays,) for c in g.maximal])
        rep.verdicts.append(("subdivided fan is valid", bool(validate(g))))
        return
    sq = blowup_square(f, v)
    rep.table("square", ["property", "value"], [
        ("center", sq.sigma.rays), ("orbit rank", sq.V.quotient_rank),
        ("exceptional orbit rank", sq.V_prime.quotient_rank), ("degenerate", sq.degenerate)])
    rep.verdicts.append(("open complements agree", sq.complement_condition()))
    rep.window = _window_label(args, f.ambient_rank)
    rows = _sweep(_les_row, [(sq, args.p, m) for m in _weights(args, f.ambient_rank)], args.parallel)
    rep.table(f"long exact sequence, p={args.p}",
              ["weight", "H(X)", "H(X')", "H(V)", "H(V')", "rank a", "rank b", "rank c", "euler", "exact"], rows)
    rep.verdicts.append(("long sequence exact", all(r[-1] for r in rows)))


def cmd_forms(args, rep: Report) -> None:
    c = _cone_from(args)
    rep.window = _window_label(args, c.ambient_rank)
    rows = _sweep(_forms_row, [(c, m, args.p) for m in _weights(args, c.ambient_rank)], args.parallel)
    rep.table(f"forms, p={args.p}", ["weight", "tilde", "image", "coker"], rows)
    rep.verdicts.append(("image inside tilde", all(r[3] >= 0 for r in rows)))


def cmd_cech(args, rep: Report) -> None:
    f = _fan_from(args)
    ws = _weights(args, f.ambient_rank)
    rep.window = _window_label(args, f.ambient_rank)
    if args.action == "cohomology":
        sheaf = args.sheaf
        try:
            parse_sheaf(sheaf)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
        rows = _sweep(_cech_row, [(f, sheaf, m) for m in ws], args.parallel)
        name = f"cohomology of {sheaf}"
    elif args.action == "hyper":
        rows = _sweep(_hyper_row, [(f, args.t, m) for m in ws], args.parallel)
        name = f"truncated complex, t={args.t}"
    else:
        rows = _sweep(_cone_row, [(f, m) for m in ws], args.parallel)
        name = "mapping cone [image -> tilde] in degree 1"
    rep.table(name, ["weight"] + _degree_header("H", rows),
              [(r[0],) + tuple(r[1]) for r in rows])
    rep.verdicts.append(("d^2 = 0", all(r[2] for r in rows)))


def cmd_dilate(args, rep: Report) -> None:
    c = _cone_from(args)
    seq = _vector(args.seq) if args.seq else DEFAULT_SEQUENCE
    if any(x < 2 for x in seq):
        raise ParseError("dilation factors must be at least 2")
    ws = [m for m in _weights(args, c.ambient_rank) if c.in_dual(m)]
    rep.window = _window_label(args, c.ambient_rank) + " (dual-cone weights only)"
    rows, ok = [], True
    for m in ws:
        if args.action == "trace":
            tr = colimit_trace(c, m, args.p, seq, strict=False)
            target = tr.target.dim
            good = tr.stabilized_at is not None and tr.colimit_dim == target and tr.is_increasing()
            rows.append((m, tr.dims, tr.stabilized_at, target, good))
        else:
            r = hh_colimit_check(c, m, args.p, seq, strict=False)
            good = r.ok
            rows.append((m, r.hh_dims, r.image_dims, r.stabilized_at, r.target_dim, good))
        ok &= good
    if args.action == "trace":
        rep.table(f"dilation chain, p={args.p}", ["weight", "dims", "stable at", "tilde", "ok"], rows)
    else:
        rep.table(f"HH_{args.p} along dilations", ["weight", "HH", "image", "stable at", "tilde", "ok"], rows)
    rep.verdicts.append(("stabilizes to the Danilov piece", ok))


def cmd_paper(args, rep: Report) -> None:
    a = args.action
    if a == "hugeK1":
        r = run_hugeK1(args.window)
    elif a == "huge":
        r = run_huge(args.window)
    elif a == "k0":
        sigma = _cone_from(args) if (args.rays or args.fan or args.fixture) else None
        if sigma is None:
            from .paperlab import tau_cone
            sigma = tau_cone()
        r = k0_affine_identity(sigma, args.window)
    else:
        if args.fan or args.fixture:
            f = _fan_from(args)
        else:
            from .paperlab import huge_fan
            f = huge_fan()
        r = structural_identities(f, args.window, _vector(args.seq) if args.seq else DEFAULT_SEQUENCE)
    rank = len(r.table[0][0]) if r.table else 0
    rep.window = f"[-{args.window},{args.window}]^{rank}" if rank else f"radius {args.window}"
    names = sorted({k for _, row in r.table for k in row})
    rep.table(r.example, ["weight"] + names, [(m,) + tuple(row[k] for k in names) for m, row in r.table])
    rep.table("expectations", ["check", "expected", "actual", "provenance", "ok"],
              [(e.what, e.expected, e.actual, e.provenance, e.ok) for e in r.expectations if not e.ok]
              or [("all", "-", "-", "-", True)])
    rep.verdicts.append((f"{r.example} reproduction", r.verdict))
    rep.notes.extend(r.notes)


HANDLERS = {
    "cone": (cmd_cone, ("dual", "faces", "classify")),
    "monoid": (cmd_monoid, ("hilbert", "split")),
    "fan": (cmd_fan, ("validate", "subdivide", "resolve", "square")),
    "forms": (cmd_forms, ("table",)),
    "cech": (cmd_cech, ("cohomology", "hyper", "cone")),
    "dilate": (cmd_dilate, ("trace", "hh")),
    "paper": (cmd_paper, ("hugeK1", "huge", "k0", "identities")),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="toricforms", description="Exact per-weight invariants of toric varieties.")
    p.add_argument("group", help="one of: " + ", ".join(HANDLERS))
    p.add_argument("action")
    p.add_argument("--fan", help="path to a fan document")
    p.add_argument("--fixture", help="bundled fan: " + ", ".join(FIXTURES))
    p.add_argument("--rays", help="cone generators, e.g. '1,0,0;1,2,0'")
    p.add_argument("--ray", help="subdivision ray, e.g. '1,1,0'")
    p.add_argument("--window", type=int, default=3, help="weight box radius (default 3)")
    p.add_argument("--weight", help="single weight instead of a box")
    p.add_argument("--p", type=int, default=1, help="form degree")
    p.add_argument("--t", type=int, default=1, help="truncation degree")
    p.add_argument("--seq", help="dilation factors, e.g. '2,2,2'")
    p.add_argument("--sheaf", default="structure", help="tilde:p | image:p | structure")
    p.add_argument("--format", choices=("tsv", "structured"), default="tsv")
    p.add_argument("--parallel", action="store_true", help="sweep weights in worker processes")
    return p


def _digest(args, argv: Sequence[str]) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(list(argv)).encode())
    if args.fan or args.fixture:
        try:
            h.update(_read_text(args.fan, args.fixture).encode())
        except ParseError:
            pass
    return h.hexdigest()


def dispatch(argv: Sequence[str]) -> Report:
    args = build_parser().parse_args(list(argv))
    entry = HANDLERS.get(args.group)
    if entry is None or args.action not in entry[1]:
        raise UnknownCommand(f"unknown command {args.group} {args.action}")
    if args.window < 0 or args.p < 0 or args.t < 0:
        raise ParseError("--window, --p and --t must be nonnegative")
    shown = [a for a in argv if a not in ("--parallel",)]
    rep = Report(" ".join(shown), _digest(args, shown), fmt=args.format)
    entry[0](args, rep)
    return rep


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        rep = dispatch(argv)
    except NotStabilized as exc:
        print(f"fail: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (InputError, FanError, lt.LatticeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(rep.render())
    return EXIT_PASS if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
