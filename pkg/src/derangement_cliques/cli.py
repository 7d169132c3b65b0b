"""Command-line entry point: ``derangement-cliques <command> [options]``.

Exit codes: 0 success, 1 a verification failed, 2 usage or input error,
3 refusal to start a long computation without ``--allow-long``.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .cache import Cache
from .clique import (
    DisconnectedFamily,
    enumerate_maximal_cliques,
    find_disconnected_families,
    partner_search,
    write_cliques,
    write_families,
)
from .errors import DerangementError, ResourceLimit
from .exactla import is_prime
from .latin import (
    OrderedCliquePair,
    are_orthogonal,
    count_latin_squares,
    format_pair,
    gamma,
    omega,
    parse_pair,
    parse_square,
)
from .obstruction import SearchOptions, search_rsets
from .perm import (
    MAX_DEGREE,
    count_derangements,
    cycle_type,
    enumerate_group,
    parse_permutation,
)
from .spectral import (
    dependency_basis,
    family_span_dim,
    min_non_clique_dependencies,
    obstruction_bound,
    predicted_image_dim,
    projection_image_dim,
    spectrum,
)
from .verify import verify_all

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3

FORMATS = ("tsv", "json", "text")

log = logging.getLogger("derangement_cliques")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    prime: int | None = None
    r: int = 2
    scope: str = "exhaustive"
    allow_long: bool = False
    threads: int = 1
    seed: int = 0
    cache_dir: str | None = None
    no_cache: bool = False
    out: str | None = None
    fmt: str = "tsv"

    def __post_init__(self) -> None:
        if self.prime is not None and not is_prime(self.prime):
            raise UsageError(f"--prime {self.prime} is not prime")
        if self.n is not None and not 1 <= self.n <= MAX_DEGREE:
            raise UsageError(f"--n must lie in 1..{MAX_DEGREE}, got {self.n}")
        if self.fmt not in FORMATS:
            raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
        if self.threads < 1:
            raise UsageError("--threads must be at least 1")
        if self.r < 2:
            raise UsageError("--r must be at least 2")

    def cache(self) -> Cache | None:
        return None if self.no_cache else Cache(self.cache_dir)


def _render(rows: list[dict[str, Any]], fmt: str) -> str:
    def cell(v: Any) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, list):
            return "|".join(map(str, v))
        return "" if v is None else str(v)

    if fmt == "json":
        return json.dumps(rows, indent=2, sort_keys=False, default=str) + "\n"
    if not rows:
        return ""
    if fmt == "text":
        return "".join(" ".join(f"{k}={cell(v)}" for k, v in row.items()) + "\n" for row in rows)
    cols = list(rows[0])
    lines = ["\t".join(cols)] + ["\t".join(cell(row.get(c)) for c in cols) for row in rows]
    return "\n".join(lines) + "\n"


def _write(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit(cfg: RunConfig, rows: list[dict[str, Any]]) -> None:
    _write(cfg, _render(rows, cfg.fmt))


def _need_n(cfg: RunConfig, lo: int, hi: int) -> int:
    if cfg.n is None:
        raise UsageError("--n is required")
    if not lo <= cfg.n <= hi:
        raise UsageError(f"{cfg.command} supports {lo} <= n <= {hi}, got {cfg.n}")
    return cfg.n


def cmd_perm(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.images:
        perms = [parse_permutation(" ".join(args.images), cfg.n)]
    else:
        perms = list(enumerate_group(_need_n(cfg, 1, 6)))
    rows = [
        {
            "images": str(p),
            "cycles": p.cycle_notation(),
            "cycle_type": str(cycle_type(p)),
            "fixed_points": p.num_fixed(),
            "sign": p.sign(),
        }
        for p in perms
    ]
    if args.derangements:
        rows = [r for r in rows if r["fixed_points"] == 0]
    _emit(cfg, rows)
    return EXIT_OK


def cmd_latin(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.file is None:
        n = _need_n(cfg, 1, 5)
        _emit(cfg, [{"n": n, "latin_squares": count_latin_squares(n)}])
        return EXIT_OK
    text = Path(args.file).read_text()
    if args.pair:
        a, b = parse_pair(text)
        ok = are_orthogonal(a, b)
        rows: list[dict[str, Any]] = [{"n": a.n, "latin": True, "orthogonal": ok}]
        if ok:
            pair = gamma(a, b)
            rows[0]["round_trip"] = omega(pair) == (a, b)
            rows[0]["row_clique"] = "|".join(map(str, pair.row_cliques))
            rows[0]["col_clique"] = "|".join(map(str, pair.col_cliques))
        _emit(cfg, rows)
        return EXIT_OK if ok and rows[0]["round_trip"] else EXIT_FAILED
    sq = parse_square(text)
    _emit(cfg, [{"n": sq.n, "latin": True}])
    return EXIT_OK


def cmd_cliques(cfg: RunConfig, args: argparse.Namespace) -> int:
    n = _need_n(cfg, 2, 6)
    cliques = list(
        enumerate_maximal_cliques(
            n, containing_identity=args.identity, allow_long=cfg.allow_long, threads=cfg.threads
        )
    )
    if cfg.fmt == "tsv":
        _write(cfg, write_cliques(cliques))
    else:
        _emit(cfg, [{"index": i, "clique": [str(s) for s in c]} for i, c in enumerate(cliques, 1)])
    if cfg.out:
        print(f"{len(cliques)} cliques written to {cfg.out}", file=sys.stderr)
    return EXIT_OK


def cmd_mols(cfg: RunConfig, args: argparse.Namespace) -> int:
    n = _need_n(cfg, 3, 6)
    families = find_disconnected_families(
        n, cfg.r, scope=cfg.scope, allow_long=cfg.allow_long, threads=cfg.threads
    )
    if args.squares:
        if cfg.r != 2:
            raise UsageError("--squares needs --r 2")
        text = "\n".join(
            f"# pair {k}\n" + format_pair(*omega(_ordered(f)))
            for k, f in enumerate(families, start=1)
        )
    else:
        text = write_families(families)
    _write(cfg, text)
    print(f"{len(families)} families of size {cfg.r} at n={n}", file=sys.stderr)
    return EXIT_OK


def _ordered(family: DisconnectedFamily) -> OrderedCliquePair:
    """Any ordering of a disconnected pair is a valid ordered pair; use canonical order."""
    c, ct = family.cliques
    return OrderedCliquePair(tuple(c.members), tuple(ct.members))


def cmd_rank(cfg: RunConfig, args: argparse.Namespace) -> int:
    n = _need_n(cfg, 1, 6)
    if cfg.prime is not None:
        fields: list[Any] = [cfg.prime]
    elif args.field is not None:
        fields = ["Q"] if args.field.upper() == "Q" else [_parse_prime(args.field)]
    else:
        fields = ["Q"] + [p for p in range(2, n + 1) if n % p == 0 and is_prime(p)]
    cache = cfg.cache()
    rows = []
    failed = False
    for field in fields:
        rank = projection_image_dim(n, field, cache)
        predicted = predicted_image_dim(n, field)
        match = None if predicted is None else rank == predicted
        failed |= match is False
        rows.append(
            {
                "n": n,
                "field": "Q" if field == "Q" else f"GF({field})",
                "rank": rank,
                "predicted": predicted,
                "match": match,
            }
        )
    _emit(cfg, rows)
    return EXIT_FAILED if failed else EXIT_OK


def _parse_prime(text: str) -> int:
    try:
        p = int(text)
    except ValueError:
        raise UsageError(f"field must be Q or a prime, got {text!r}") from None
    if not is_prime(p):
        raise UsageError(f"{p} is not prime")
    return p


def cmd_spectrum(cfg: RunConfig, args: argparse.Namespace) -> int:
    n = _need_n(cfg, 2, MAX_DEGREE)
    rows = [
        {
            "label": rec.label,
            "dimension": rec.dimension,
            "lambda_numerator": rec.value.numerator,
            "lambda_denominator": rec.value.denominator,
        }
        for rec in spectrum(n)
    ]
    log.info("D_%d = %d", n, count_derangements(n))
    _emit(cfg, rows)
    return EXIT_OK


def cmd_deps(cfg: RunConfig, args: argparse.Namespace) -> int:
    n = _need_n(cfg, 3, 5)
    p = cfg.prime
    if p is None:
        p = next(q for q in range(2, n + 1) if n % q == 0 and is_prime(q))
    families = find_disconnected_families(n, cfg.r, threads=cfg.threads)
    bound = obstruction_bound(n, cfg.r)
    need = min_non_clique_dependencies(n) if cfg.r == 2 else None
    rows = []
    failed = False
    for k, fam in enumerate(families, start=1):
        dim = family_span_dim(fam, p)
        basis = dependency_basis(fam, p)
        extra = len(basis.non_clique_vectors)
        ok = dim <= bound and (need is None or extra >= need)
        failed |= not ok
        rows.append(
            {
                "family": k,
                "n": n,
                "r": cfg.r,
                "p": p,
                "span_dim": dim,
                "bound": bound,
                "nullity": basis.nullity,
                "non_clique": extra,
                "min_non_clique": need,
                "ok": ok,
            }
        )
    _emit(cfg, rows)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_euler36(cfg: RunConfig, args: argparse.Namespace) -> int:
    if args.mode == "exhaustive":
        if not cfg.allow_long:
            raise ResourceLimit("exhaustive clique-level search over X_6 is long-running")
        report = partner_search(6, allow_long=True, threads=cfg.threads, cache=cfg.cache())
        payload = report.to_json()
        verdict = report.verdict
    else:
        opts = SearchOptions(
            conjugation_reduced=args.conjugation_reduced,
            remark_normalization=args.remark_normalization,
        )
        cert = search_rsets(6, opts, threads=cfg.threads)
        payload = cert.to_json()
        verdict = cert.verdict
        log.info("stage totals %s", cert.totals())
    if args.certificate:
        Path(args.certificate).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    summary = {"mode": args.mode, "verdict": verdict}
    if args.mode == "obstruction":
        summary.update(cert.totals())
    else:
        summary["cliques_examined"] = payload["cliques_examined"]
    _emit(cfg, [summary])
    return EXIT_OK if verdict == "NONE" else EXIT_FAILED


def cmd_verify(cfg: RunConfig, args: argparse.Namespace) -> int:
    degrees = [cfg.n] if cfg.n is not None else [3, 4, 5, 6]
    for n in degrees:
        if n not in (3, 4, 5, 6):
            raise UsageError(f"verify supports n in 3..6, got {n}")
    rows = []
    for n in degrees:
        for check in verify_all(
            n, seed=cfg.seed, cache=cfg.cache(), allow_long=cfg.allow_long, threads=cfg.threads
        ):
            log.info("n=%d %s took %.2fs", n, check.name, check.seconds)
            rows.append(
                {"n": n, "check": check.name, "result": "PASS" if check.passed else "FAIL", "detail": check.detail}
            )
    _emit(cfg, rows)
    return EXIT_OK if all(r["result"] == "PASS" for r in rows) else EXIT_FAILED


COMMANDS = {
    "perm": cmd_perm,
    "latin": cmd_latin,
    "cliques": cmd_cliques,
    "mols": cmd_mols,
    "rank": cmd_rank,
    "spectrum": cmd_spectrum,
    "deps": cmd_deps,
    "euler36": cmd_euler36,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="degree of the symmetric group")
    common.add_argument("--prime", type=int, help="prime characteristic")
    common.add_argument("--r", type=int, default=2, help="family size (default 2)")
    common.add_argument("--scope", choices=("exhaustive", "first"), default="exhaustive")
    common.add_argument("--allow-long", action="store_true", help="permit long-running n=6 searches")
    common.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks (default 0)")
    common.add_argument("--cache-dir", help="cache directory (default from $DERANGEMENT_CLIQUES_CACHE)")
    common.add_argument("--no-cache", action="store_true", help="bypass the on-disk cache")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default="tsv")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(
        prog="derangement-cliques",
        description="Derangement graphs, orthogonal Latin squares and Euler's 36 officers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("perm", parents=[common], help="describe a permutation or list S_n")
    p.add_argument("images", nargs="*", help="one-line notation, e.g. 2 3 1")
    p.add_argument("--derangements", action="store_true", help="only list derangements")

    p = sub.add_parser("latin", parents=[common], help="count, validate or map Latin squares")
    p.add_argument("file", nargs="?", help="square file, or pair file with --pair")
    p.add_argument("--pair", action="store_true", help="file holds two squares; test orthogonality")

    p = sub.add_parser("cliques", parents=[common], help="enumerate maximal cliques of X_n")
    p.add_argument("--identity", action="store_true", help="only cliques containing e")

    p = sub.add_parser("mols", parents=[common], help="find pairwise disconnected clique families")
    p.add_argument("--squares", action="store_true", help="emit orthogonal square pairs instead")

    p = sub.add_parser("rank", parents=[common], help="rank of the fixed-point matrix")
    p.add_argument("--field", help="Q or a prime (alternative to --prime)")

    sub.add_parser("spectrum", parents=[common], help="Laplacian eigenvalues for built-in characters")
    sub.add_parser("deps", parents=[common], help="modular span bound and dependency counts")

    p = sub.add_parser("euler36", parents=[common], help="search for two disconnected cliques in X_6")
    p.add_argument("--mode", choices=("obstruction", "exhaustive"), default="obstruction")
    p.add_argument("--certificate", help="write the JSON certificate here")
    p.add_argument(
        "--conjugation-reduced", action="store_true", help="fast non-certified mode (one delta per class)"
    )
    p.add_argument(
        "--remark-normalization", action="store_true", help="also prune with the b_2 = delta(a_1) normalization"
    )

    sub.add_parser("verify", parents=[common], help="run the verification suites for n (default 3..6)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = RunConfig(
            command=args.command,
            n=args.n,
            prime=args.prime,
            r=args.r,
            scope=args.scope,
            allow_long=args.allow_long,
            threads=args.threads,
            seed=args.seed,
            cache_dir=args.cache_dir,
            no_cache=args.no_cache,
            out=args.out,
            fmt=args.fmt,
        )
        return COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        parser.error(str(exc))
    except ResourceLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DerangementError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
