"""Command-line interface.

Every command prints one JSON document (or a CSV table with --format csv) to
stdout or to --out.  The exit status is 0 exactly when every requested check
or certificate succeeded; errors are reported as JSON with a nonzero status.

    vnkernel paths --max-vertices 17 --contains-bridge 1:3
    vnkernel spectra --range 5..23 --case 11
    vnkernel dim --I '' --L 10
    vnkernel compare --I '' --J 1 --L 23
    vnkernel chain --sets '' 2 1 1,2 --L 29 --profile desk
    vnkernel classify config.json --check-isomorphism --profile desk
    vnkernel oracle membership --max-length 10
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

from . import quotient, rules, series, subgroups
from .cylinders import constraint_comparisons
from .errors import InvalidParameters, VnKernelError
from .params import DEFAULT_LENGTHS, PROFILES, RuleParams
from .subgroups import SubgroupSpec
from .words import (
    LETTERS,
    TreePath,
    canonical_steps,
    enumerate_dogleg_free_classes,
    is_reduced,
    mirror_canonical_steps,
)

PARAM_KEYS = {
    "rho": ("rho", int),
    "dogleg_bound": ("dogleg_bound", int),
    "window": ("window_halfwidth", int),
    "min_central_vertices": ("min_central_vertices", int),
    "bad_weight": ("bad_weight", Fraction),
}
RUN_KEYS = ("profile", "lengths", "format", "precision", "workers", "seed", "mode")


@dataclass(frozen=True)
class RunConfig:
    params: RuleParams
    lengths: tuple[int, ...]
    fmt: str = "json"
    precision: int = 60
    workers: int = 1
    seed: int = 0
    mode: str = series.STRICT

    def spec(self, indices: Sequence[int]) -> SubgroupSpec:
        return SubgroupSpec.make(indices, self.lengths)

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "lengths": list(self.lengths),
            "mode": self.mode,
            "seed": self.seed,
        }


# ---------------------------------------------------------------- parsing


def parse_subset(text: str) -> tuple[int, ...]:
    """'' -> (), '2,1' -> (1, 2).  Braces are allowed: '{1,2}'."""
    t = text.strip().strip("{}").strip()
    if not t:
        return ()
    try:
        out = sorted({int(x) for x in t.split(",") if x.strip()})
    except ValueError:
        raise InvalidParameters(f"bad index set {text!r}") from None
    if any(n < 1 for n in out):
        raise InvalidParameters("indices start at 1")
    return tuple(out)


def parse_lengths(text: str) -> tuple[int, ...]:
    try:
        out = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise InvalidParameters(f"bad length list {text!r}") from None
    if not out or any(x < 1 for x in out):
        raise InvalidParameters("lengths must be positive integers")
    return out


def parse_range(text: str) -> list[int]:
    """'5..23' (inclusive) or a comma list."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidParameters(f"bad range {text!r}") from None


def read_config_file(path: str) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidParameters(f"{path}:{n}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in PARAM_KEYS and key not in RUN_KEYS:
                raise InvalidParameters(f"{path}:{n}: unknown key {key!r}")
            out[key] = value
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    """Profile defaults, then the config file, then explicit flags."""
    settings: dict[str, str] = {}
    if args.config:
        settings.update(read_config_file(args.config))
    for key in PARAM_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = str(val)
    for key in RUN_KEYS:
        val = getattr(args, key if key != "format" else "fmt", None)
        if val is not None:
            settings[key] = str(val)

    profile = settings.get("profile", "paper")
    if profile not in PROFILES:
        raise InvalidParameters(f"profile must be one of {sorted(PROFILES)}")
    base = PROFILES[profile]
    overrides = {}
    for key, (field, conv) in PARAM_KEYS.items():
        if key in settings:
            try:
                overrides[field] = conv(settings[key])
            except (ValueError, ZeroDivisionError):
                raise InvalidParameters(f"bad value for {key}: {settings[key]!r}") from None
    if "rho" in overrides:
        # derived defaults follow rho unless given explicitly
        overrides.setdefault("dogleg_bound", None)
        overrides.setdefault("window_halfwidth", None)
    params = replace(base, **overrides) if overrides else base

    default_lengths = DEFAULT_LENGTHS[profile]
    lengths = parse_lengths(settings.get("lengths", ",".join(str(default_lengths[k]) for k in sorted(default_lengths))))
    fmt = settings.get("format", "json")
    if fmt not in ("json", "csv"):
        raise InvalidParameters("format must be json or csv")
    mode = settings.get("mode", series.STRICT)
    if mode not in series.MODES:
        raise InvalidParameters(f"mode must be one of {series.MODES}")
    try:
        precision = int(settings.get("precision", 60))
        workers = int(settings.get("workers", 1))
        seed = int(settings.get("seed", 0))
    except ValueError as exc:
        raise InvalidParameters(str(exc)) from None
    if precision < 1 or workers < 1:
        raise InvalidParameters("precision and workers must be positive")
    return RunConfig(params, lengths, fmt, precision, workers, seed, mode)


# ---------------------------------------------------------------- output


def dump_json(data: object) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def dump_csv(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands
# each command returns (rendered text, success flag)


def bridge_steps(length: int, d: int) -> str:
    """Steps of the path from e to t_n^(d+1) with l(n) = length."""
    return "b" * length + "a" * (d + 1) + "B" * length


def cmd_paths(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, bool]:
    if args.max_vertices < 1:
        raise InvalidParameters("max-vertices must be at least 1")
    d = cfg.params.d if args.d is None else args.d
    classes = enumerate_dogleg_free_classes(args.max_vertices, d, exact=args.exact)
    ok = True
    data = {
        "command": "paths",
        "max_vertices": args.max_vertices,
        "d": d,
        "exact": args.exact,
        "count": len(classes),
        "classes": [p.steps for p in classes],
    }
    if args.contains_bridge:
        try:
            n, length = (int(x) for x in args.contains_bridge.split(":"))
        except ValueError:
            raise InvalidParameters("--contains-bridge expects INDEX:LENGTH") from None
        steps = canonical_steps(bridge_steps(length, d))
        present = steps in set(data["classes"])
        data["bridge"] = {"index": n, "length": length, "steps": steps, "present": present}
        ok = present
    if cfg.fmt == "csv":
        return dump_csv(["steps", "vertex_count"], [[p.steps, p.vertex_count] for p in classes]), ok
    return dump_json(data), ok


def cmd_spectra(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, bool]:
    ells = parse_range(args.range)
    if not ells or min(ells) < 2:
        raise InvalidParameters("chain lengths start at 2")
    cases = list(quotient.CASES) if args.case == "all" else [args.case]
    table = quotient.nullity_table(ells, cases, cfg.params, cfg.workers)
    rows = []
    ok = True
    for ell in ells:
        for case in cases:
            k = table[(ell, case)]
            pred = quotient.predicted_nullity(ell, case, cfg.params)
            ok &= k == pred
            rows.append({"ell": ell, "case": case, "nullity": k, "predicted": pred})
    if cfg.fmt == "csv":
        return dump_csv(["ell", "case", "nullity", "predicted"], [list(r.values()) for r in rows]), ok
    data = {"command": "spectra", "params": cfg.params.to_json(), "rows": rows, "consistent": ok}
    return dump_json(data), ok


def cmd_dim(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, bool]:
    spec = cfg.spec(parse_subset(args.I))
    report = series.partial_dimension(spec, args.L, cfg.params, cfg.mode, args.order_seed)
    if cfg.fmt == "csv":
        rows = [[c.path.steps, c.vertex_count, c.cells, c.exponent] for c in report.classes]
        return dump_csv(["steps", "vertex_count", "cells", "exponent"], rows), True
    data = {"command": "dim", **report.to_json(cfg.precision, include_terms=not args.no_terms)}
    return dump_json(data), True


def cmd_compare(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, bool]:
    i_spec = cfg.spec(parse_subset(args.I))
    j_spec = cfg.spec(parse_subset(args.J))
    cert = series.compare(i_spec, j_spec, args.L, cfg.params, cfg.mode, args.order_seed)
    ok = cert.verdict == series.CERTIFIED
    if cfg.fmt == "csv":
        return series.chain_csv([cert]), ok
    return dump_json({"command": "compare", "certificate": cert.to_json()}), ok


def cmd_chain(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, bool]:
    specs = [cfg.spec(parse_subset(s)) for s in args.sets]
    if len(specs) < 2:
        raise InvalidParameters("a chain needs at least two sets")
    certs = series.certify_chain(specs, args.L, cfg.params, cfg.mode, args.order_seed)
    ok = all(c.verdict == series.CERTIFIED for c in certs)
    if cfg.fmt == "csv":
        return series.chain_csv(certs), ok
    data = {"command": "chain", "certificates": [c.to_json() for c in certs], "all_certified": ok}
    return dump_json(data), ok


def cmd_classify(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, bool]:
    with open(args.file, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParameters(f"{args.file}: {exc}") from None
    conf = rules.Configuration.from_json(raw)
    result = rules.classify(conf, cfg.params)
    data = {"command": "classify", "params": cfg.params.to_json(), "result": result.to_json()}
    ok = True
    if args.check_isomorphism and result.case is not None:
        mapping = rules.check_rule_isomorphism(result, conf, cfg.params)
        data["isomorphism"] = {
            "ok": True,
            "mapping": {_vertex_name(k): v or "e" for k, v in sorted(mapping.items(), key=lambda kv: str(kv[0]))},
        }
    return dump_json(data), ok


def _vertex_name(v: object) -> str:
    return ":".join(str(x) for x in v) if isinstance(v, tuple) else str(v)


def oracle_membership(args: argparse.Namespace, cfg: RunConfig) -> dict:
    results = []
    ok = True
    for indices in _all_subsets(len(cfg.lengths)):
        spec = cfg.spec(indices)
        members = subgroups.enumerate_members(spec, args.max_length)
        checked = mismatches = 0
        bad_first = 0
        for n in range(args.max_length + 1):
            for letters in product(LETTERS, repeat=n):
                w = "".join(letters)
                if not is_reduced(w):
                    continue
                checked += 1
                a = subgroups.is_member(w, spec)
                if a != (w in members):
                    mismatches += 1
                if a and w and w[0] not in "bB":
                    bad_first += 1
        good = mismatches == 0 and bad_first == 0
        ok &= good
        results.append(
            {"I": spec.label(), "words": checked, "members": len(members), "mismatches": mismatches,
             "bad_first_letter": bad_first, "ok": good}
        )
    return {"oracle": "membership", "max_length": args.max_length, "results": results, "ok": ok}


def _all_subsets(n: int) -> list[tuple[int, ...]]:
    return [tuple(i + 1 for i in range(n) if mask >> i & 1) for mask in range(1 << n)]


def oracle_criterion(args: argparse.Namespace, cfg: RunConfig) -> dict:
    """Window-sum criterion against the GF(2) constraint space, all subgroups at once."""
    specs = [cfg.spec(ix) for ix in _all_subsets(len(cfg.lengths))]
    reps = {mirror_canonical_steps(p.steps) for p in enumerate_dogleg_free_classes(args.max_vertices, cfg.params.d)}
    failures = []
    for steps in sorted(reps, key=lambda w: (len(w), w)):
        path = TreePath("", steps)
        for spec, cmp in zip(specs, constraint_comparisons(path, specs, cfg.params)):
            if not cmp.equivalent:
                failures.append({"steps": steps, "I": spec.label()})
    return {
        "oracle": "criterion",
        "max_vertices": args.max_vertices,
        "classes": len(reps),
        "subgroups": [s.label() for s in specs],
        "failures": failures,
        "ok": not failures,
    }


def oracle_certificate(args: argparse.Namespace, cfg: RunConfig) -> dict:
    with open(args.file, encoding="utf-8") as fh:
        data = json.load(fh)
    certs = data.get("certificates") or [data.get("certificate", data)]
    verdicts = [series.verify_certificate_json(c) for c in certs]
    return {"oracle": "certificate", "checked": len(verdicts), "ok": all(verdicts)}


ORACLES: dict[str, Callable[[argparse.Namespace, RunConfig], dict]] = {
    "membership": oracle_membership,
    "criterion": oracle_criterion,
    "certificate": oracle_certificate,
}


def cmd_oracle(args: argparse.Namespace, cfg: RunConfig) -> tuple[str, bool]:
    data = ORACLES[args.oracle](args, cfg)
    data["command"] = "oracle"
    return dump_json(data), bool(data["ok"])


COMMANDS = {
    "paths": cmd_paths,
    "spectra": cmd_spectra,
    "dim": cmd_dim,
    "compare": cmd_compare,
    "chain": cmd_chain,
    "classify": cmd_classify,
    "oracle": cmd_oracle,
}


# ---------------------------------------------------------------- parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--profile", choices=sorted(PROFILES), default=None, help="constant set (default paper)")
    g.add_argument("--config", metavar="FILE", help="flat key = value file")
    g.add_argument("--rho", type=int, default=None)
    g.add_argument("--dogleg-bound", dest="dogleg_bound", type=int, default=None)
    g.add_argument("--window", type=int, default=None, help="window half width")
    g.add_argument("--min-central-vertices", dest="min_central_vertices", type=int, default=None)
    g.add_argument("--bad-weight", dest="bad_weight", default=None, help="e.g. 1/100")
    g.add_argument("--lengths", default=None, help="l(1),l(2),... (default 3,6)")
    g.add_argument("--mode", choices=series.MODES, default=None, help="admissible vertex counts (default strict)")
    g.add_argument("--format", dest="fmt", choices=["json", "csv"], default=None)
    g.add_argument("--precision", type=int, default=None, help="decimal digits in reports")
    g.add_argument("--workers", type=int, default=None)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out", metavar="FILE", default=None)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(
        prog="vnkernel", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("paths", parents=[common], help="list dogleg-free path classes")
    p.add_argument("--max-vertices", type=int, required=True)
    p.add_argument("--d", type=int, default=None, help="dogleg bound (default from params)")
    p.add_argument("--exact", action="store_true", help="only paths with exactly max-vertices vertices")
    p.add_argument("--contains-bridge", metavar="N:L", default=None, help="check the path e -> t_N^(d+1) with l(N)=L")

    p = sub.add_parser("spectra", parents=[common], help="nullity table of the quotient graphs at 4")
    p.add_argument("--range", required=True, help="e.g. 5..23")
    p.add_argument("--case", choices=list(quotient.CASES) + ["all"], default="all")

    for name, helptext in (("dim", "partial dimension series"), ("compare", "monotonicity certificate")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--I", required=True, help="index set, e.g. '' or 1,2")
        if name == "compare":
            p.add_argument("--J", required=True)
        p.add_argument("--L", type=int, required=True, help="largest vertex count summed exactly")
        p.add_argument("--order-seed", type=int, default=None, help="shuffle the summation order")
        if name == "dim":
            p.add_argument("--no-terms", action="store_true")

    p = sub.add_parser("chain", parents=[common], help="certificates along an increasing chain")
    p.add_argument("--sets", nargs="+", required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--order-seed", type=int, default=None)

    p = sub.add_parser("classify", parents=[common], help="classify a configuration given as JSON")
    p.add_argument("file", help='{"zeros": [...]} or {"values": {...}, "fill": 1}')
    p.add_argument("--check-isomorphism", action="store_true")

    p = sub.add_parser("oracle", help="independent cross-checks")
    osub = p.add_subparsers(dest="oracle", required=True)
    q = osub.add_parser("membership", parents=[common], help="automaton against syllable search")
    q.add_argument("--max-length", type=int, default=8)
    q = osub.add_parser("criterion", parents=[common], help="window criterion against GF(2) elimination")
    q.add_argument("--max-vertices", type=int, default=9)
    q = osub.add_parser("certificate", parents=[common], help="re-verify certificate JSON")
    q.add_argument("file")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = build_config(args)
        text, ok = COMMANDS[args.command](args, cfg)
    except (VnKernelError, OSError) as exc:
        code = getattr(exc, "code", "io_error")
        sys.stdout.write(dump_json({"error": {"code": code, "message": str(exc)}}))
        return 2
    emit(text, args.out)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
