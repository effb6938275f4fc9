"""Command line front end.

Exit status: 0 success or verified, 1 a claim failed or stayed
indeterminate, 2 usage or resource errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .diagrams import enum_basis
from .formulas import CLAIMS, verify
from .gram import (
    KINDS,
    SIZE_LIMITS,
    GramMatrix,
    ResourceLimitError,
    bareiss_det,
    build_gram,
    cofactor_det,
    load_matrix,
    symmetric_det,
)
from .polyring import Polynomial
from .wenzl import (
    ResourceRefusal,
    check_idempotent,
    check_theta,
    check_traces,
    dbasis_checks,
    identity_diagram,
    jones_wenzl,
)

log = logging.getLogger("skeingram")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
WENZL_CHECKS = ("idempotent", "traces", "theta", "dbasis")
_SURFACES = ("disc", "annulus", "mobius")


@dataclass
class RunConfig:
    command: str
    kind: str | None = None
    n: int | None = None
    output: Path | None = None
    input: Path | None = None
    format: str = "text"
    workers: int = 1
    allow_large: bool = False
    k_max: int = 8
    cache_dir: Path | None = None
    claim: str | None = None
    check: str | None = None
    method: str = "auto"
    show: bool = False
    timing: bool = True


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "skeingram"


class DiskCache:
    """Matrices and determinants keyed by (kind, n, code version)."""

    def __init__(self, root: Path | None):
        self.root = Path(root) / __version__ if root else None

    def _path(self, kind: str, n: int, what: str) -> Path | None:
        return self.root / f"{kind}-{n}.{what}.json" if self.root else None

    def _read(self, path: Path | None) -> dict | None:
        if path is None or not path.exists():
            return None
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return None
        return data if data.get("version") == __version__ else None

    def _write(self, path: Path | None, data: dict):
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        with open(tmp, "w") as fh:
            json.dump(data, fh, separators=(",", ":"))
        tmp.replace(path)

    def matrix(self, kind: str, n: int, *, workers: int = 1, allow_large: bool = False) -> GramMatrix:
        data = self._read(self._path(kind, n, "gram"))
        if data is not None:
            log.info("loaded %s n=%d from cache", kind, n)
            return GramMatrix.from_json(data)
        M = build_gram(kind, n, workers=workers, allow_large=allow_large)
        self._write(self._path(kind, n, "gram"), M.to_json())
        return M

    def det(self, kind: str, n: int, *, workers: int = 1, allow_large: bool = False) -> Polynomial:
        data = self._read(self._path(kind, n, "det"))
        if data is not None:
            return Polynomial.from_json(data["det"])
        M = self.matrix(kind, n, workers=workers, allow_large=allow_large)
        det = symmetric_det(M)
        self._write(self._path(kind, n, "det"), _det_json(kind, n, det))
        return det


def _det_json(kind: str, n: int, det: Polynomial) -> dict:
    return {"kind": kind, "n": n, "version": __version__, "det": det.to_json()}


def _emit(text: str, output: Path | None):
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _dumps(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"


# -- subcommands -----------------------------------------------------------------


def cmd_enum(cfg: RunConfig) -> int:
    if cfg.kind not in _SURFACES:
        raise ValueError(f"enum needs --kind in {_SURFACES}")
    basis = enum_basis(cfg.kind, cfg.n)
    if cfg.format == "json":
        enc = [list(b.match) if cfg.kind == "disc" else sorted(b.openers) for b in basis]
        _emit(_dumps({"kind": cfg.kind, "n": cfg.n, "basis": enc}), cfg.output)
    else:
        _emit("".join(b.label() + "\n" for b in basis), cfg.output)
    return EXIT_OK


def cmd_gram(cfg: RunConfig, cache: DiskCache) -> int:
    M = cache.matrix(cfg.kind, cfg.n, workers=cfg.workers, allow_large=cfg.allow_large)
    if cfg.format == "json":
        _emit(_dumps(M.to_json()), cfg.output)
    elif cfg.format == "csv":
        _emit(M.to_csv(), cfg.output)
    else:
        _emit(M.to_text(), cfg.output)
    return EXIT_OK


def cmd_det(cfg: RunConfig, cache: DiskCache) -> int:
    if cfg.input is not None:
        M = load_matrix(cfg.input)
        kind, n = M.kind, M.n
        det = _det_by_method(M, cfg.method)
    else:
        kind, n = cfg.kind, cfg.n
        if cfg.method == "auto":
            det = cache.det(kind, n, workers=cfg.workers, allow_large=cfg.allow_large)
        else:
            det = _det_by_method(cache.matrix(kind, n, workers=cfg.workers, allow_large=cfg.allow_large), cfg.method)
    if cfg.format == "json":
        _emit(_dumps(_det_json(kind, n, det)), cfg.output)
    else:
        _emit(str(det) + "\n", cfg.output)
    return EXIT_OK


def _det_by_method(M: GramMatrix, method: str) -> Polynomial:
    if method == "bareiss":
        return bareiss_det(M)
    if method == "cofactor":
        return cofactor_det(M)
    return symmetric_det(M)


def cmd_verify(cfg: RunConfig, cache: DiskCache) -> int:
    def source(kind: str, n: int) -> Polynomial:
        return cache.det(kind, n, workers=cfg.workers, allow_large=cfg.allow_large)

    use_cache = cache.root is not None and cfg.claim != "chen"
    report = verify(cfg.claim, cfg.n, k_max=cfg.k_max, allow_large=cfg.allow_large, workers=cfg.workers,
                    det_source=source if use_cache else None)
    if not cfg.timing:
        report.timing_ms = 0.0
    if cfg.format == "json" or cfg.output is not None:
        _emit(_dumps(report.to_json()), cfg.output)
    # keep stdout parseable when the report itself goes there
    print(report.summary(), file=sys.stderr if cfg.format == "json" and cfg.output is None else sys.stdout)
    return EXIT_OK if report.verified else EXIT_FAILED


def cmd_wenzl(cfg: RunConfig) -> int:
    if cfg.show:
        f = jones_wenzl(cfg.n)
        ident = identity_diagram(cfg.n)
        rows = sorted(f.terms.items(), key=lambda kv: (kv[0] != ident, kv[0].match))
        for dg, c in rows:
            print(f"{' '.join(map(str, dg.match))}\t{c}")
    runner = {"idempotent": check_idempotent, "traces": check_traces,
              "theta": check_theta, "dbasis": dbasis_checks}[cfg.check]
    report = runner(cfg.n)
    if not cfg.timing:
        report.timing_ms = 0.0
    if cfg.output is not None:
        _emit(_dumps(report.to_json()), cfg.output)
    print(report.summary())
    return EXIT_OK if report.verified else EXIT_FAILED


# -- argument parsing ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skeingram", description="Gram determinants of crossingless connections.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, kinds, fmts=("text", "json")):
        if kinds:
            p.add_argument("--kind", choices=kinds, required=True)
        p.add_argument("-n", type=int, required=True)
        p.add_argument("-o", "--output", type=Path, help="write here instead of stdout")
        p.add_argument("--format", choices=fmts, default=fmts[0])

    def compute(p):
        p.add_argument("--workers", type=int, default=1, help="processes for Gram entry assembly")
        p.add_argument("--allow-large", action="store_true",
                       help=f"lift the size bounds {SIZE_LIMITS} (may run for a long time)")
        p.add_argument("--cache-dir", type=Path, default=None,
                       help="matrix/determinant cache (default: $XDG_CACHE_HOME/skeingram)")
        p.add_argument("--no-cache", action="store_true")

    p = sub.add_parser("enum", help="list a diagram basis")
    common(p, _SURFACES)

    p = sub.add_parser("gram", help="build a Gram matrix")
    common(p, KINDS, ("json", "csv", "text"))
    compute(p)

    p = sub.add_parser("det", help="determinant of a stored or freshly built Gram matrix")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("-n", type=int)
    p.add_argument("--input", type=Path, help="matrix JSON written by 'gram'")
    p.add_argument("-o", "--output", type=Path)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--method", choices=("auto", "bareiss", "cofactor"), default="auto",
                   help="auto splits rotation-invariant matrices into character blocks")
    compute(p)

    p = sub.add_parser("verify", help="check a closed formula or divisibility claim")
    p.add_argument("--claim", choices=CLAIMS, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-o", "--output", type=Path, help="write the JSON report here")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--k-max", type=int, default=8, help="largest power tried in localized division")
    p.add_argument("--no-timing", action="store_true", help="write timing_ms as 0 for reproducible files")
    compute(p)

    p = sub.add_parser("wenzl", help="Jones-Wenzl and D-basis property checks")
    p.add_argument("--check", choices=WENZL_CHECKS, required=True)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-o", "--output", type=Path, help="write the JSON report here")
    p.add_argument("--show", action="store_true", help="print the coefficients of f_n first")
    p.add_argument("--no-timing", action="store_true")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command, n=args.n)
    for name in ("kind", "output", "input", "format", "workers", "allow_large", "k_max",
                 "claim", "check", "method", "show"):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    cfg.timing = not getattr(args, "no_timing", False)
    if getattr(args, "no_cache", False):
        cfg.cache_dir = None
    elif hasattr(args, "cache_dir"):
        cfg.cache_dir = args.cache_dir or default_cache_dir()
    return cfg


def run(cfg: RunConfig) -> int:
    if cfg.n is not None and cfg.n < 1:
        raise ValueError("n must be positive")
    if cfg.workers < 1:
        raise ValueError("--workers must be at least 1")
    cache = DiskCache(cfg.cache_dir)
    if cfg.command == "enum":
        return cmd_enum(cfg)
    if cfg.command == "gram":
        return cmd_gram(cfg, cache)
    if cfg.command == "det":
        if cfg.input is None and (cfg.kind is None or cfg.n is None):
            raise ValueError("det needs --input or both --kind and -n")
        return cmd_det(cfg, cache)
    if cfg.command == "verify":
        return cmd_verify(cfg, cache)
    return cmd_wenzl(cfg)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return run(config_from_args(args))
    except (ResourceLimitError, ResourceRefusal) as exc:
        print(f"skeingram: refused: {exc}", file=sys.stderr)
    except (ValueError, OSError, KeyError) as exc:
        print(f"skeingram: error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
