"""Command line front end.

Exit codes: 0 success or verified, 2 verification failure, 3 invalid input,
4 violated precondition.  Reports go to stdout as JSON, logs to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from pathlib import Path

from .certificate import check_mode, verify
from .errors import CommFactError, InvalidInput
from .instances import random_band, random_sl, random_vk
from .jsonio import canonical_digest, certificate_from_json, certificate_to_json, dumps, infer_domain, matrix_from_json, matrix_to_json
from .matrixcore import Matrix
from .pipeline import factorize, target_matrix
from .unitriangular import lift

log = logging.getLogger("commfact")

MODE_NAMES = {
    "inv": "involution",
    "skewinv": "skew_involution",
    "order-k": "order_k",
    "skew-2k": "skew_order_2k",
}

EXIT_OK, EXIT_UNVERIFIED, EXIT_INVALID, EXIT_PRECONDITION = 0, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    # usage errors are invalid input, not verification failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="commfact", description="Commutator factorizations with verifiable certificates.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("factorize", help="factor a matrix and write a certificate")
    f.add_argument("--mode", required=True, choices=sorted(MODE_NAMES))
    f.add_argument("--k", type=int, default=3)
    f.add_argument("--input", required=True, type=Path)
    f.add_argument("--output", required=True, type=Path)
    num = f.add_mutually_exclusive_group()
    num.add_argument("--exact", action="store_true", help="exact cyclotomic arithmetic (default for exact input)")
    num.add_argument("--float", action="store_true", help="complex floating point")
    f.add_argument("--eps", type=float, default=1e-9, help="float tolerance")
    f.add_argument("--seed", type=int, default=0)

    v = sub.add_parser("verify", help="check a certificate against its input")
    v.add_argument("--input", required=True, type=Path)
    v.add_argument("--cert", required=True, type=Path)
    v.add_argument("--eps", type=float, default=None, help="override the certificate's tolerance")

    g = sub.add_parser("generate", help="write a seeded random instance")
    g.add_argument("--kind", required=True, choices=["band", "sl", "vk"])
    g.add_argument("--n", required=True, type=int)
    g.add_argument("--m", type=int, default=1)
    g.add_argument("--N", type=int, default=8, help="window size of the VK triangular block")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--density", type=float, default=1.0)
    g.add_argument("--output", required=True, type=Path)

    s = sub.add_parser("selftest", help="run the invariant suites")
    s.add_argument("--quick", action="store_true")
    return p


def _seed(args) -> int:
    env = os.environ.get("COMMFACT_SEED")
    if env is None:
        return args.seed
    try:
        return int(env)
    except ValueError as exc:
        raise InvalidInput(f"COMMFACT_SEED must be an integer, got {env!r}") from exc


def _read_json(path: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from exc
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from exc


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1) + "\n", encoding="utf-8")


def _report(obj) -> None:
    print(dumps(obj))


def _cmd_factorize(args) -> int:
    if args.eps <= 0:
        raise InvalidInput("--eps must be positive")
    mode = MODE_NAMES[args.mode]
    check_mode(mode, args.k)
    raw = _read_json(args.input)
    exact = True if args.exact else (False if args.float else None)
    dom = infer_domain(raw, args.eps, exact)
    target = matrix_from_json(raw, dom)
    # the digest names the input document, whatever arithmetic is chosen
    digest = canonical_digest(target if exact is None else matrix_from_json(raw))
    t0 = time.perf_counter()
    cert = factorize(target, mode, args.k, seed=_seed(args))
    cert.target_digest = digest
    log.info("factorized %s in %.2fs: %d pairs", args.input, time.perf_counter() - t0, len(cert))
    report = verify(_lifted_target(target_matrix(target), cert), cert, digest)
    _write_json(args.output, certificate_to_json(cert))
    _report(
        {
            "command": "factorize",
            "mode": mode,
            "k": args.k,
            "scope": cert.scope,
            "pairs": len(cert),
            "bound": cert.bound,
            "target_digest": digest,
            "output": str(args.output),
            **report.to_json(),
        }
    )
    return EXIT_OK if report.ok else EXIT_UNVERIFIED


def _lifted_target(a: Matrix, cert) -> Matrix:
    """The target in the certificate's scalar domain."""
    if not cert.pairs:
        return a
    dom = cert.pairs[0].P.domain
    if a.domain == dom:
        return a
    if not dom.exact:
        return a.to_domain(dom)
    if not a.domain.exact:
        raise InvalidInput("exact certificate for a floating input")
    return lift(a, dom)


def _cmd_verify(args) -> int:
    raw = _read_json(args.input)
    target = matrix_from_json(raw)
    digest = canonical_digest(target)
    try:
        cert = certificate_from_json(_read_json(args.cert), args.eps)
        report = verify(_lifted_target(target_matrix(target), cert), cert, digest)
        out = report.to_json()
        ok = report.ok and cert.target_digest is not None
        if cert.target_digest is None:
            out["checks"].append({"check": "digest", "passed": False, "detail": "certificate has no target digest"})
            out["verified"] = False
    except CommFactError as exc:
        # a certificate that does not even parse is a failed certificate
        ok = False
        out = {"verified": False, "checks": [{"check": "parse", "passed": False, "detail": str(exc)}]}
    _report({"command": "verify", "input": str(args.input), "cert": str(args.cert), **out})
    return EXIT_OK if ok else EXIT_UNVERIFIED


def _cmd_generate(args) -> int:
    rng = random.Random(_seed(args))
    if args.n < 1 or args.m < 1 or args.N < 1:
        raise InvalidInput("--n, --m and --N must be positive")
    if args.kind == "band":
        obj = random_band(args.n, args.m, rng, args.density)
    elif args.kind == "sl":
        obj = random_sl(args.n, rng, args.density)
    else:
        obj = random_vk(args.n, args.N, args.m, rng, args.density)
    doc = matrix_to_json(obj)
    _write_json(args.output, doc)
    _report({"command": "generate", "kind": args.kind, "output": str(args.output), "digest": canonical_digest(obj)})
    return EXIT_OK


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    summary = run_selftest(quick=args.quick)
    _report({"command": "selftest", **summary})
    return EXIT_OK if summary["passed"] else EXIT_UNVERIFIED


COMMANDS = {
    "factorize": _cmd_factorize,
    "verify": _cmd_verify,
    "generate": _cmd_generate,
    "selftest": _cmd_selftest,
}


def run(argv=None) -> int:
    """Run one command; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except CommFactError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        _report({"command": args.command, "error": type(exc).__name__, "detail": str(exc)})
        return exc.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
