#!/usr/bin/python3
# toro: toroidalize 2D log morphism germs, verify the corpus, factor smooth fan pairs
# 2025 toro
import argparse
import asyncio
import difflib
import json
import os
import sys
import time

from modules.log import logger, getPrettyDuration
import modules.settings as my_settings
from modules.algebra import AlgebraError, ParseError
from modules.inputspec import corpus_files, load_fan, load_spec
from modules.model import (InvariantError, IrrationalCenter, NonTermination, ToroError, ValidationError,
                           validate_germ)
from modules.ramification import classify_subcase
from modules.report import analyze_text, run_summary, to_dot, to_json, trace_document
from modules.toric2 import SupportMismatch, ToricError, apply_script, strong_factorize
from modules.toroidalize import run

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVALID = 2
EXIT_IRRATIONAL = 3
EXIT_NONTERMINATION = 4
EXIT_INTERNAL = 5


def exit_code_for(e):
    if isinstance(e, (ValidationError, SupportMismatch)):
        return EXIT_INVALID
    if isinstance(e, (ParseError, ToricError)):
        return EXIT_PARSE
    if isinstance(e, IrrationalCenter):
        return EXIT_IRRATIONAL
    if isinstance(e, NonTermination):
        return EXIT_NONTERMINATION
    if isinstance(e, AlgebraError):
        # a valid-looking germ that breaks a kernel precondition
        return EXIT_INVALID
    return EXIT_INTERNAL


def write_text(path, text):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.debug(f"System: wrote {path}")


def execute(spec, max_steps=None):
    steps = max_steps or spec.options.get("max_steps")
    return run(spec.to_state(), max_steps=steps)


def cmd_analyze(args):
    spec = load_spec(args.file)
    s = spec.to_state(validate=False)
    g = s.x_germs[min(s.x_germs)]
    validation = validate_germ(g, s.target_of(g))
    print(analyze_text(s, validation), end="")
    if not validation[0]:
        logger.error(f"System: {spec.name} violates clause ({validation[1]}): {validation[2]}")
        return EXIT_INVALID
    return EXIT_OK


def cmd_run(args):
    spec = load_spec(args.file)
    trace = args.trace or spec.options.get("trace")
    dot_x = args.dot_x or spec.options.get("dot_x")
    dot_y = args.dot_y or spec.options.get("dot_y")
    try:
        result = execute(spec, args.max_steps)
    except NonTermination as e:
        if trace and e.state is not None:
            write_text(trace, to_json({"events": [ev.as_dict() for ev in e.state.events], "error": str(e)}))
        raise
    if trace:
        write_text(trace, to_json(trace_document(result)))
    if dot_x:
        write_text(dot_x, to_dot(result.state, "X"))
    if dot_y:
        write_text(dot_y, to_dot(result.state, "Y"))
    print(run_summary(spec.name, result), end="")
    for violation in result.violations:
        logger.error(f"Toroidalize: {violation}")
    return EXIT_OK if result.ok else EXIT_INTERNAL


def verify_one(path, golden_dir, update=False):
    """(name, ok, messages) for one corpus file."""
    messages = []
    try:
        spec = load_spec(path)
    except ParseError as e:
        return os.path.basename(path), False, [f"unreadable: {e}"]
    name = spec.name
    expected_exit = spec.expect.get("exit", EXIT_OK)
    result, text = None, None
    try:
        if "subcase" in spec.expect:
            s = spec.to_state()
            g = s.x_germs[min(s.x_germs)]
            initial = classify_subcase(g, s.target_of(g)).subcase
            if initial != spec.expect["subcase"]:
                messages.append(f"initial subcase {initial}, expected {spec.expect['subcase']}")
        result = execute(spec)
        code = EXIT_OK if result.ok else EXIT_INTERNAL
        messages.extend(result.violations)
    except (ToroError, AlgebraError) as e:
        code = exit_code_for(e)
        if code != expected_exit:
            messages.append(f"{type(e).__name__}: {e}")
    if code != expected_exit:
        messages.append(f"exit {code}, expected {expected_exit}")
    if result is not None:
        text = to_json(trace_document(result))
        if "steps" in spec.expect and result.steps != spec.expect["steps"]:
            messages.append(f"{result.steps} steps, expected {spec.expect['steps']}")
        if "x_blowups" in spec.expect and result.state.stats["x_blowups"] != spec.expect["x_blowups"]:
            messages.append(f"{result.state.stats['x_blowups']} X blowups, expected {spec.expect['x_blowups']}")
        if spec.expect.get("toroidal") is False:
            messages.append("reached a toroidal atlas, expected failure")
        again = to_json(trace_document(execute(spec)))
        if again != text:
            messages.append("trace differs between two runs")
    golden = os.path.join(golden_dir, f"{name}.json")
    if text is not None and update:
        write_text(golden, text)
    elif text is not None and os.path.exists(golden):
        with open(golden, encoding="utf-8") as f:
            stored = f.read()
        if stored != text:
            diff = difflib.unified_diff(stored.splitlines(), text.splitlines(), f"golden/{name}.json", "current", lineterm="")
            messages.append("golden trace differs:\n" + "\n".join(list(diff)[:80]))
    return name, not messages, messages


async def verify_all(files, golden_dir, update=False, threads=None):
    limit = asyncio.Semaphore(max(1, threads or my_settings.verify_threads))

    async def one(path):
        async with limit:
            return await asyncio.to_thread(verify_one, path, golden_dir, update)

    return await asyncio.gather(*(one(p) for p in files))


def cmd_verify(args):
    target = args.path or my_settings.corpus_dir
    if not os.path.exists(target):
        logger.error(f"Verify: {target} does not exist")
        return EXIT_PARSE
    files = corpus_files(target)
    if not files:
        logger.warning(f"Verify: no input files under {target}, nothing to check")
        return EXIT_OK
    start = time.monotonic()
    results = asyncio.run(verify_all(files, args.golden or my_settings.golden_dir, args.update_golden, args.threads))
    failed = 0
    for name, ok, messages in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        for message in messages:
            print(f"     {message}")
        failed += not ok
    logger.info(f"Verify: {len(results) - failed} passed, {failed} failed in {getPrettyDuration(time.monotonic() - start)}")
    return EXIT_OK if not failed else EXIT_INVALID


def cmd_factor(args):
    fa, fb = load_fan(args.fan_a), load_fan(args.fan_b)
    ups, downs = strong_factorize(fa, fb)
    common = apply_script(fa, ups)
    if common.rays != apply_script(fb, downs).rays:
        raise InvariantError("factorization scripts do not reach the same fan")
    document = {"ups": ups, "downs": downs, "common": common.as_dict()}
    text = json.dumps(document, sort_keys=True, indent=1) + "\n"
    if args.out:
        write_text(args.out, text)
    else:
        print(text, end="")
    logger.info(f"Toric: {len(ups)} blowups then {len(downs)} blowdowns through {len(common.rays)} rays")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="toro", description="Toroidalize 2D log morphism germs by point blowups")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="validate a germ and report r_log, R_log and its subcase")
    p.add_argument("file")

    p = sub.add_parser("run", help="toroidalize a germ and write the trace")
    p.add_argument("file")
    p.add_argument("--max-steps", type=int, default=None, help="step limit (default from config.ini or TORO_MAX_STEPS)")
    p.add_argument("--trace", help="JSON trace output path")
    p.add_argument("--dot-x", help="DOT file for the source blowup forest")
    p.add_argument("--dot-y", help="DOT file for the target blowup forest")

    p = sub.add_parser("verify", help="run every corpus file and compare against golden traces")
    p.add_argument("path", nargs="?", help="input file or directory (default corpus_dir)")
    p.add_argument("--golden", help="golden trace directory (default golden_dir)")
    p.add_argument("--update-golden", action="store_true", help="rewrite golden traces from this engine")
    p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("factor", help="strong factorization of two smooth 2D fans")
    p.add_argument("fan_a")
    p.add_argument("fan_b")
    p.add_argument("--out", help="script output path (default stdout)")
    return parser


commands = {
    "analyze": cmd_analyze,
    "run": cmd_run,
    "verify": cmd_verify,
    "factor": cmd_factor,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return commands[args.command](args)
    except (ToroError, AlgebraError) as e:
        code = exit_code_for(e)
        logger.error(f"System: {args.command} failed ({type(e).__name__}, exit {code}): {e}")
        return code


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info("System: interrupted")
        sys.exit(130)
# EOF
