"""Command-line entry point.

Commands:
  algebra   construct the algebra and print dimensions, grading, generators
  bracket   print one generator-pair lambda-bracket
  verify    replay a scripted weak-generation derivation (big or small flavor)
  closure   run the bounded closure search from a chosen seed set
  axioms    sweep skew-symmetry, Jacobi, and the conformal-action checks

Exit codes: 0 success; 2 bad input (malformed flags, invalid partition,
unknown generator); 3 verification failure (derivation or closure left
generators missing); 4 axiom violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import serialize as ser
from .errors import WAlgebraError
from .liestruct import AlgebraCtx, PartitionSpec, build_algebra
from .pvacore import check_jacobi, check_skew
from .wbracket import bracket_table, conformal_check
from .weakgen import (ClosureCaps, closure_search, default_caps,
                      reduced_rectangular_seeds, scripted_verify, weak_set)

F = Fraction


@dataclass
class RunConfig:
    """Everything one invocation needs, after flag/config-file merging."""

    command: str
    kind: str = "sl"
    partition: tuple = ()
    partition2: tuple = ()
    flavor: str = "big"
    seed: str = "big"
    ktilde: str = "one"            # "one" | "symbolic"
    format: str = "text"           # "text" | "json"
    output: Optional[str] = None
    max_weight: Optional[Fraction] = None
    max_n: Optional[int] = None
    max_elements: Optional[int] = None
    gens: tuple = ()               # bracket command: the two generator specs

    def __post_init__(self):
        for cap in (self.max_n, self.max_elements):
            if cap is not None and cap <= 0:
                raise WAlgebraError("caps must be positive")
        if self.max_weight is not None and self.max_weight <= 0:
            raise WAlgebraError("caps must be positive")


def _parse_partition(text) -> tuple:
    if isinstance(text, (list, tuple)):
        return tuple(int(x) for x in text)
    try:
        return tuple(int(p) for p in str(text).split(",") if p.strip())
    except ValueError:
        raise WAlgebraError(f"partition must be comma-separated integers: {text!r}")


def _parse_gen_spec(text: str) -> tuple:
    """'t,i,j' with t an integer or fraction like 5/2."""
    parts = text.split(",")
    if len(parts) != 3:
        raise WAlgebraError(f"generator must be weight,row,col: {text!r}")
    try:
        return (F(parts[0]), int(parts[1]), int(parts[2]))
    except (ValueError, ZeroDivisionError):
        raise WAlgebraError(f"generator must be weight,row,col: {text!r}")


def _load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".toml"):
        try:
            import tomllib
        except ImportError:
            raise WAlgebraError(
                "TOML config files need Python 3.11+ (tomllib); "
                "use a JSON config on this interpreter")
        return tomllib.loads(text)
    return json.loads(text)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="walgebra",
        description="Exact workbench for classical affine W-algebras: "
                    "lambda-brackets, weak-generation replays, closure searches.")
    sub = top.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kind", choices=["sl", "sl-super"], default=None,
                        help="algebra family (default sl)")
    common.add_argument("--partition", default=None,
                        help="comma-separated non-increasing row sizes, e.g. 3,2")
    common.add_argument("--partition2", default=None,
                        help="second partition (sl-super only)")
    common.add_argument("--ktilde", choices=["one", "symbolic"], default=None,
                        help="level mode: fixed at 1 (default) or symbolic "
                             "for level-dependence/genericity reporting")
    common.add_argument("--format", choices=["text", "json"], default=None,
                        help="report format (default text)")
    common.add_argument("--output", default=None, metavar="PATH",
                        help="write the report to PATH instead of stdout")
    common.add_argument("--config", default=None, metavar="FILE",
                        help="JSON (or TOML, Python 3.11+) file whose keys "
                             "mirror the long flags; flags win on conflict")

    sub.add_parser("algebra", parents=[common],
                   help="dimensions, grading histogram, generator table")

    pb = sub.add_parser("bracket", parents=[common],
                        help="one generator-pair lambda-bracket")
    pb.add_argument("left", help="generator as weight,row,col (e.g. 2,1,1 or 3/2,1,2)")
    pb.add_argument("right", help="generator as weight,row,col")

    pv = sub.add_parser("verify", parents=[common],
                        help="replay the scripted weak-generation derivation")
    pv.add_argument("--flavor", choices=["big", "small"], default=None,
                    help="which weak set to derive from (default big)")

    pc = sub.add_parser("closure", parents=[common],
                        help="bounded closure search from a seed set")
    pc.add_argument("--seed", default=None,
                    choices=["big", "small", "none", "rect-big", "rect-small"],
                    help="seed set: a weak set, nothing, or the rectangular "
                         "reduced presets (default big)")
    pc.add_argument("--max-weight", default=None,
                    help="weight cap (default: tallest block + 2)")
    pc.add_argument("--max-n", type=int, default=None,
                    help="n-th-product cap (default: twice the weight cap)")
    pc.add_argument("--max-elements", type=int, default=None,
                    help="pool size cap (default: 4x generator count + 16)")

    sub.add_parser("axioms", parents=[common],
                   help="skew + Jacobi sweep and conformal-action check")
    return top


def config_from_args(args: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    if getattr(args, "config", None):
        merged.update(_load_config_file(args.config))

    def pick(flag: str, default):
        val = getattr(args, flag, None)
        if val is None:
            val = merged.get(flag, default)
        return val

    kind = pick("kind", "sl").replace("-", "_")
    cfg = RunConfig(
        command=args.command,
        kind=kind,
        partition=_parse_partition(pick("partition", "")),
        partition2=_parse_partition(pick("partition2", "")),
        flavor=pick("flavor", "big"),
        seed=pick("seed", "big"),
        ktilde=pick("ktilde", "one"),
        format=pick("format", "text"),
        output=pick("output", None),
        max_n=pick("max_n", None),
        max_elements=pick("max_elements", None),
    )
    raw_w = pick("max_weight", None)
    if raw_w is not None:
        cfg.max_weight = F(str(raw_w))
        if cfg.max_weight <= 0:
            raise WAlgebraError("caps must be positive")
    if args.command == "bracket":
        cfg.gens = (_parse_gen_spec(args.left), _parse_gen_spec(args.right))
    return cfg


def _context(cfg: RunConfig) -> AlgebraCtx:
    return build_algebra(PartitionSpec(cfg.kind, cfg.partition, cfg.partition2))


def _table(ctx: AlgebraCtx, cfg: RunConfig):
    return bracket_table(ctx, ktilde="symbolic" if cfg.ktilde == "symbolic" else 1)


def _emit(cfg: RunConfig, text: str, payload: dict) -> None:
    body = json.dumps(payload, indent=2) if cfg.format == "json" else text
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(body + "\n")
        first = text.splitlines()[0] if text else ""
        print(f"{first}  [report written to {cfg.output}]")
    else:
        print(body)


# ---------------------------------------------------------------------------
# commands


def cmd_algebra(cfg: RunConfig) -> int:
    ctx = _context(cfg)
    summ = ser.algebra_summary(ctx)
    lines = [
        f"{cfg.kind.replace('_', '-')} partition {summ['partition']}"
        + (f" | {summ['partition2']}" if summ["partition2"] else ""),
        f"matrix size {summ['matrix_size']}, dimension {summ['dimension']}",
        f"generators: {summ['num_generators']}",
        "grading histogram (ad-x degree: count):",
    ]
    for h in summ["grading"]:
        deg = F(int(h["degree"]["num"]), int(h["degree"]["den"]))
        lines.append(f"  {deg}: {h['count']}")
    lines.append("generator table (weight, row block, col block, parity):")
    for g in summ["generators"]:
        w = F(int(g["weight"]["num"]), int(g["weight"]["den"]))
        i, j = g["gen"][2], g["gen"][3]
        par = "odd" if g["parity"] else "even"
        lines.append(f"  q[{w}]({i},{j})  weight {w}  {par}")
    _emit(cfg, "\n".join(lines), summ)
    return 0


def cmd_bracket(cfg: RunConfig) -> int:
    ctx = _context(cfg)
    table = _table(ctx, cfg)
    (ta, ia, ja), (tb, ib, jb) = cfg.gens
    a = ser.gen_from_json(ctx, [ta.numerator, ta.denominator, ia, ja])
    b = ser.gen_from_json(ctx, [tb.numerator, tb.denominator, ib, jb])
    lp = table.lookup(a, b)
    lines = [f"{{{a} lambda {b}}} =", repr(lp)]
    payload = {
        "left": ser.gen_to_json(a),
        "right": ser.gen_to_json(b),
        "bracket": ser.lambda_poly_to_json(lp),
    }
    _emit(cfg, "\n".join(lines), payload)
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    ctx = _context(cfg)
    rep = scripted_verify(ctx, ctx.centralizer(), _table(ctx, cfg), cfg.flavor)
    _emit(cfg, rep.summary(), ser.derivation_report_to_json(rep))
    return 0 if rep.ok else 3


def _seeds_for(ctx: AlgebraCtx, cfg: RunConfig) -> list:
    if cfg.seed == "none":
        return []
    if cfg.seed in ("big", "small"):
        return weak_set(ctx, cfg.seed)
    return reduced_rectangular_seeds(ctx, cfg.seed.split("-", 1)[1])


def cmd_closure(cfg: RunConfig) -> int:
    ctx = _context(cfg)
    base = default_caps(ctx)
    caps = ClosureCaps(
        cfg.max_weight if cfg.max_weight is not None else base.max_weight,
        cfg.max_n if cfg.max_n is not None else base.max_n,
        cfg.max_elements if cfg.max_elements is not None else base.max_elements,
    )
    rep = closure_search(ctx, ctx.centralizer(), _table(ctx, cfg),
                         _seeds_for(ctx, cfg), caps)
    _emit(cfg, rep.summary(), ser.closure_report_to_json(rep))
    return 0 if rep.complete else 3


def cmd_axioms(cfg: RunConfig) -> int:
    ctx = _context(cfg)
    table = _table(ctx, cfg)
    gens = ctx.centralizer().gens
    skew = check_skew(table)
    triples = [(a, b, c) for a in gens for b in gens for c in gens]
    jac = check_jacobi(table, triples)
    conf = conformal_check(ctx, bracket_table(ctx, ktilde=1))
    rep = {
        "skew_violations": len(skew),
        "jacobi_violations": len(jac),
        "pairs_checked": len(table.entries),
        "triples_checked": len(triples),
        "conformal_ok": conf["ok"],
        "central_coeff": conf["central"],
    }
    text = (f"skew: {len(skew)} violations over {rep['pairs_checked']} pairs\n"
            f"jacobi: {len(jac)} violations over {len(triples)} triples\n"
            f"conformal action: {'ok' if conf['ok'] else 'FAILED'} "
            f"(central lambda^3 coefficient {conf['central']})")
    _emit(cfg, text, ser.axiom_report_to_json(rep))
    return 0 if not skew and not jac and conf["ok"] else 4


_COMMANDS = {
    "algebra": cmd_algebra,
    "bracket": cmd_bracket,
    "verify": cmd_verify,
    "closure": cmd_closure,
    "axioms": cmd_axioms,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return _COMMANDS[cfg.command](cfg)
    except WAlgebraError as exc:
        print(f"error {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
