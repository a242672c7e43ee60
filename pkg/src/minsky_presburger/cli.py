"""Command line front end: ``simulate``, ``encode``, ``model`` and ``check``.

Exit status is 0 on success, 1 for domain errors (invalid program, capacity,
malformed model, ...) and 2 for usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import checker, encoder, machine, model
from .logic import Exists, LogicError, has_quantifier


class UsageError(Exception):
    pass


def _pair(text: str) -> tuple[int, int]:
    try:
        m, n = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected M,N with natural numbers, got {text!r}") from None
    if m < 0 or n < 0:
        raise argparse.ArgumentTypeError("inputs must be natural numbers")
    return m, n


def _bits(text: str) -> list[int]:
    if set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError("choices are a string of 0s and 1s")
    return [int(c) for c in text]


def _natural(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be a natural number")
    return v


def _positive(text: str) -> int:
    v = _natural(text)
    if v == 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="minsky-presburger", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def program_args(p, variant: bool = False):
        p.add_argument("--program", required=True, type=Path, help="program file in the 2cm DSL")
        p.add_argument("--input", type=_pair, default=(0, 0), metavar="M,N")
        if variant:
            p.add_argument("--variant", default="standard", choices=[v.value for v in encoder.Variant])
        p.add_argument("--output", "-o", type=Path, help="write here instead of stdout")

    p = sub.add_parser("simulate", help="print the run of a program")
    program_args(p)
    p.add_argument("--max-steps", type=_natural, default=100)
    p.add_argument("--choices", type=_bits, default=None, help="branch choice bits, e.g. 0110")

    p = sub.add_parser("encode", help="emit the sentence set of an encoding")
    program_args(p, variant=True)
    p.add_argument("--format", choices=["text", "smt2", "cnf"], default="text")

    p = sub.add_parser("model", help="dump the canonical bit model of a run")
    program_args(p)
    p.add_argument("--chunks", type=_positive, default=3)
    p.add_argument("--layout", choices=["growing", "fixed"], default="growing")
    p.add_argument("--finite", action="store_true", help="growing layout with finite support")
    p.add_argument("--d", type=_positive, help="subchunk length (default: minimal admissible)")
    p.add_argument("--choices", type=_bits, default=None)

    p = sub.add_parser("check", help="check an encoding against a bit model by bounded instantiation")
    program_args(p, variant=True)
    p.add_argument("--chunks", type=_positive, default=3, help="horizon in chunks")
    p.add_argument("--bound", type=_natural, help="bound B for universal variables")
    p.add_argument("--exists-bound", type=_natural, help="bound for existential variables")
    p.add_argument("--model", type=Path, help="load a model dump instead of building one")
    p.add_argument("--d", type=_positive, help="fixed-width subchunk length")
    p.add_argument("--choices", type=_bits, default=None)
    p.add_argument("--jobs", type=_positive, default=1, help="check sentences in parallel")
    return ap


# ---------------------------------------------------------------------------
# helpers


def _read(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _load_program(path: Path) -> machine.Program:
    p = machine.parse_program(_read(path))
    problems = machine.validate_program(p)
    if problems:
        raise machine.MachineError("invalid program: " + "; ".join(problems))
    return p


def _halting_or_prefix(r: machine.Run, K: int, chunks: int):
    """Configurations up to line ``K`` if the run gets there, else the first ``chunks``."""
    try:
        return model.halting_prefix(r.configs, K)
    except machine.MachineError:
        return r.configs[:chunks]


def growing_model(p, m, n, n_configs: int, choices=None, finite: bool = False) -> model.BitModel:
    d = encoder.compute_d(p, m, n)
    r = machine.run(p, m, n, max(n_configs - 1, 0), choices)
    configs = machine.extend_halting(r, n_configs)
    return model.build_canonical(configs, d, finite=finite)


def fixed_model(p, m, n, chunks: int, d_val=None, choices=None) -> model.BitModel:
    r = machine.run(p, m, n, max(chunks - 1, 0), choices)
    configs = _halting_or_prefix(r, p.K, chunks)
    k = encoder.compute_d(p, m, n)
    if d_val is None:
        d_val = model.fixed_width_d(configs, k)
    return model.build_fixed_width(configs, d_val)


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> str:
    p = _load_program(args.program)
    m, n = args.input
    r = machine.run(p, m, n, args.max_steps, args.choices)
    lines = [f"{i}: {c}" for i, c in enumerate(r.configs)]
    lines[-1] += f"  {r.status}"
    return "\n".join(lines) + "\n"


def cmd_encode(args) -> str:
    p = _load_program(args.program)
    m, n = args.input
    enc = encoder.encode(p, m, n, args.variant)
    if args.format == "smt2":
        return encoder.to_smtlib(enc)
    head = [f"# variant: {enc.variant.value}", f"# machine: sha256:{enc.machine_hash}"]
    if enc.d is not None:
        head.append(f"# d = {enc.d}")
    if enc.k is not None:
        head.append(f"# k = {enc.k}")
    if args.format == "text":
        return "\n".join(head) + "\n" + enc.render()
    skipped = [name for name, s in enc.sentences if has_quantifier(s, Exists)]
    if skipped:
        head.append(f"# not clausal (existential), omitted: {', '.join(skipped)}")
    return "\n".join(head) + "\n" + encoder.clauses(enc).render()


def cmd_model(args) -> str:
    p = _load_program(args.program)
    m, n = args.input
    if args.layout == "fixed":
        bm = fixed_model(p, m, n, args.chunks, args.d, args.choices)
    else:
        if args.d is not None and args.d < encoder.compute_d(p, m, n):
            raise model.ModelError(f"d={args.d} is below max(K+6, m+4, n+4)")
        d = args.d or encoder.compute_d(p, m, n)
        r = machine.run(p, m, n, max(args.chunks - 1, 0), args.choices)
        bm = model.build_canonical(machine.extend_halting(r, args.chunks), d, finite=args.finite)
    return model.dump(bm)


def _verdict_json(name: str, v) -> dict:
    out = {"name": name, "verdict": v.verdict}
    if isinstance(v, checker.Violated):
        out["witness"] = dict(v.witness)
        out["failing_literal"] = v.failing_literal
    elif isinstance(v, checker.BoundedSatisfied):
        out["witnesses"] = [{**a, **b} for a, b in v.witnesses]
    return out


def plan_check(p, m, n, variant: encoder.Variant, chunks: int, bound=None, exists_bound=None, d_val=None, choices=None, loaded=None):
    """Pick the model and bounds for ``check``; returns ``(model, config)``."""
    V = encoder.Variant
    if variant is V.FIXED_WIDTH:
        bm = loaded or fixed_model(p, m, n, chunks, d_val, choices)
        lay = bm.layout
        if not isinstance(lay, model.FixedWidth):
            raise model.ModelError("fixed-width variant needs a fixed-layout model")
        b = 3 * lay.d * (lay.n_chunks + 1) if bound is None else bound
        return bm, checker.CheckerConfig(b, exists_bound)
    d = encoder.compute_d(p, m, n)
    if loaded is not None:
        lay = loaded.layout
        if not isinstance(lay, model.Growing):
            raise model.ModelError(f"{variant.value} needs a growing-layout model")
        if lay.d != d:
            raise model.ModelError(f"model has d={lay.d}, encoding has d={d}")
        chunks = lay.n_chunks
    if variant is V.FINITE_EXISTS:
        if loaded is None:
            r = machine.run(p, m, n, max(chunks - 1, 0), choices)
            configs = _halting_or_prefix(r, p.K, chunks)
            loaded = model.build_canonical(configs, d, finite=True)
            chunks = len(configs)
        top = model.chunk_start(max(chunks - 1, 0), d)
        return loaded, checker.CheckerConfig(top if bound is None else bound, top if exists_bound is None else exists_bound)
    if variant is V.NONDET_RECURRENCE:
        b = model.chunk_start(max(chunks - 2, 0), d) if bound is None else bound
        be = model.chunk_start(max(chunks - 1, 0), d) if exists_bound is None else exists_bound
    else:
        b = model.chunk_start(max(chunks - 1, 0), d) if bound is None else bound
        be = exists_bound
    if loaded is None:
        need = model.chunks_to_cover(max(b, be or 0), d)
        loaded = growing_model(p, m, n, need, choices)
    return loaded, checker.CheckerConfig(b, be)


def cmd_check(args) -> str:
    p = _load_program(args.program)
    m, n = args.input
    variant = encoder.Variant.parse(args.variant)
    enc = encoder.encode(p, m, n, variant)
    loaded = model.load(_read(args.model)) if args.model else None
    bm, cfg = plan_check(p, m, n, variant, args.chunks, args.bound, args.exists_bound, args.d, args.choices, loaded)
    rep = checker.check_report(enc, bm, cfg, jobs=args.jobs)
    doc = {
        "variant": variant.value,
        "results": [_verdict_json(name, v) for name, v in rep.results],
        "summary": rep.summary,
        "bound": rep.bound,
        "exists_bound": rep.exists_bound,
        "model_length": rep.model_length,
    }
    if rep.constants:
        doc["constants"] = rep.constants
    return json.dumps(doc, indent=2) + "\n"


COMMANDS = {"simulate": cmd_simulate, "encode": cmd_encode, "model": cmd_model, "check": cmd_check}


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = COMMANDS[args.command](args)
        _emit(text, args.output)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (machine.MachineError, model.ModelError, LogicError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
