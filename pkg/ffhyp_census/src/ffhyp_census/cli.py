"""Command-line interface for the hypersurface census.

Usage:
    uv run ffhyp bounds --n 2 --d 4 --q 3
    uv run ffhyp census --n 2 --d 3 --q 2 --mode exhaustive --format csv
    uv run ffhyp census --n 2 --d 6 --q 2 --mode sample --samples 100000 --seed 7
    uv run ffhyp stabilizer --q 2 --poly "x1^3 + x2^3 + x3^3"
    uv run ffhyp orbits --n 2 --d 3 --q 2
    uv run ffhyp verify --n 2 --d 3 --q 2
    uv run ffhyp smooth --q 3 --poly "x1^2 + x2^2 + x3^2" --k-max 2
    uv run ffhyp fixed-dim --q 3 --d 4 --matrix "0,1,0;1,0,0;0,0,1" --lambda 1
    uv run ffhyp trend --n 2 --q 2 --d 3 4 5

Exit codes: 0 success, 1 budget/validation/operational error, 2 a verification check failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ffhyp_core.config import BudgetExceededError, FfhypConfig, load_config
from ffhyp_core.gf import field_for_order, parse_prime_power
from ffhyp_core.group import GroupElem
from ffhyp_core.polyspace import monomial_basis
from ffhyp_core.textio import parse_element, parse_matrix, parse_poly
from ffhyp_census import __version__
from ffhyp_census.bounds import bound_report
from ffhyp_census.census import CensusEngine, stabilizer, trend
from ffhyp_census.fixedspace import fixed_space
from ffhyp_census.report import (
    key_value_table,
    records_csv,
    to_csv,
    to_json,
    to_table,
    write_text,
)
from ffhyp_census.smooth import is_smooth, is_smooth_points_oracle
from ffhyp_census.verify import verify_bounds

logger = logging.getLogger(__name__)

COMMANDS = ("bounds", "census", "stabilizer", "orbits", "verify", "smooth", "fixed-dim", "trend")
MODES = {"exhaustive": "exhaustive", "group": "group_side", "group_side": "group_side", "sample": "sample"}
FORMATS = ("json", "csv", "table")


def get_config_dir() -> Path:
    """Get the config directory path."""
    candidates = [
        Path(__file__).parent.parent / "config",  # installed package
        Path(__file__).parent.parent.parent / "config",  # development
    ]
    for candidate in candidates:
        if candidate.exists():
            return candidate
    return candidates[1]


@dataclass
class RunConfig:
    """One CLI invocation: the subcommand, its arguments and the loaded settings."""

    command: str
    settings: FfhypConfig = field(default_factory=FfhypConfig)
    n: int | None = None
    d: int | None = None
    q: str | None = None
    mode: str = "exhaustive"
    samples: int | None = None
    seed: int | None = None
    with_stabilizers: bool | None = None
    shards: int = 1
    shard_index: int = 0
    threads: int | None = None
    checkpoint: str | None = None
    out: str | None = None
    format: str | None = None
    poly: str | None = None
    matrix: str | None = None
    lam: str = "1"
    degrees: list[int] = field(default_factory=list)
    k_max: int | None = None
    want_basis: bool = False
    orbit_table: bool = False

    @property
    def output_format(self) -> str:
        return self.format or self.settings.output.format

    def validate(self) -> None:
        """Check everything that can be checked before any table is built.

        Raises:
            ValueError: On the first invalid argument.
        """
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of exhaustive, group, sample; got {self.mode!r}")
        if self.output_format not in FORMATS:
            raise ValueError(f"format must be one of {', '.join(FORMATS)}; got {self.output_format!r}")
        if self.shards < 1 or not 0 <= self.shard_index < self.shards:
            raise ValueError(f"need 0 <= shard-index < shards, got {self.shard_index} and {self.shards}")
        if self.threads is not None and self.threads < 1:
            raise ValueError(f"threads must be >= 1, got {self.threads}")
        if self.q is None:
            raise ValueError("--q is required")
        parse_prime_power(self.q)
        needs_n = self.command in ("bounds", "census", "orbits", "verify", "trend")
        needs_d = self.command in ("bounds", "census", "orbits", "verify", "fixed-dim")
        if needs_n and (self.n is None or self.n < 1):
            raise ValueError(f"--n must be >= 1, got {self.n}")
        if needs_d and (self.d is None or self.d < 1):
            raise ValueError(f"--d must be >= 1, got {self.d}")
        if self.command in ("stabilizer", "smooth") and not self.poly:
            raise ValueError("--poly is required")
        if self.command == "fixed-dim" and not self.matrix:
            raise ValueError("--matrix is required")
        if self.command == "trend" and (not self.degrees or min(self.degrees) < 1):
            raise ValueError("--d needs one or more degrees >= 1")
        if self.samples is not None and self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.k_max is not None and self.k_max < 1:
            raise ValueError(f"k-max must be >= 1, got {self.k_max}")

    def resolve(self, value: str | None, directory: str) -> str | None:
        """Place bare file names in the configured directory."""
        if value is None:
            return None
        path = Path(value).expanduser()
        if path.parent == Path("."):
            return str(Path(directory).expanduser() / path)
        return str(path)

    def engine(self, run: str) -> CensusEngine:
        return CensusEngine(
            self.n,
            self.d,
            self.q,
            self.settings,
            threads=self.threads,
            checkpoint_path=self.resolve(self.checkpoint, self.settings.census.checkpoint_dir),
            shards=self.shards,
            shard_index=self.shard_index,
            run=run,
        )


def _render(document: dict[str, Any], rows: list[dict[str, Any]], fmt: str, census_rows: bool = False) -> str:
    if fmt == "json":
        return to_json(document)
    if fmt == "csv":
        return to_csv(rows) if census_rows else records_csv(rows)
    return to_table(rows)


def _run_bounds(cfg: RunConfig) -> tuple[str, int]:
    document = bound_report(cfg.n, cfg.d, parse_q(cfg.q)).to_dict()
    if cfg.output_format == "table":
        return key_value_table(document), 0
    rows = [{"quantity": key, "value": value} for key, value in document.items()]
    return _render(document, rows, cfg.output_format), 0


def _run_census(cfg: RunConfig) -> tuple[str, int]:
    engine = cfg.engine(f"census-{MODES[cfg.mode]}")
    mode = MODES[cfg.mode]
    if mode == "exhaustive":
        report = engine.exhaustive(orbit_table=cfg.orbit_table)
    elif mode == "group_side":
        report = engine.group_side()
    else:
        report = engine.sample(cfg.samples, cfg.seed, cfg.with_stabilizers)
    if not report.complete:
        print(
            f"⚠️  Partial result: {report.shards_completed}/{report.shards_total} shards complete",
            file=sys.stderr,
        )
    return _render(report.to_dict(), [report.csv_row()], cfg.output_format, census_rows=True), 0


def _run_stabilizer(cfg: RunConfig) -> tuple[str, int]:
    field_ = field_for_order(cfg.q, cfg.settings.budgets)
    f = parse_poly(cfg.poly, field_, cfg.n, cfg.d)
    result = stabilizer(f, budgets=cfg.settings.budgets)
    document = result.to_dict()
    document["smooth"] = is_smooth(f, cfg.settings.smooth, cfg.settings.budgets).to_dict()
    return _render(document, document["elements"], cfg.output_format), 0


def _run_orbits(cfg: RunConfig) -> tuple[str, int]:
    engine = cfg.engine("orbits")
    report = engine.exhaustive(orbit_table=True)
    rows = report.orbit_table or []
    document = {
        "n": engine.n,
        "d": engine.d,
        "q": engine.q,
        "complete": report.complete,
        "orbit_count": report.orbit_count,
        "smooth_orbit_count": report.smooth_orbit_count,
        "group_order": engine.pgl_order,
        "orbits": rows,
    }
    return _render(document, rows, cfg.output_format), 0


def _run_verify(cfg: RunConfig) -> tuple[str, int]:
    log = verify_bounds(cfg.engine("verify"))
    document = log.to_dict()
    text = _render(document, log.records, cfg.output_format)
    if not log.passed:
        failed = [r["check"] for r in log.records if r["status"] == "fail"]
        print(f"❌ Verification failed: {', '.join(failed)}", file=sys.stderr)
        return text, 2
    return text, 0


def _run_smooth(cfg: RunConfig) -> tuple[str, int]:
    field_ = field_for_order(cfg.q, cfg.settings.budgets)
    f = parse_poly(cfg.poly, field_, cfg.n, cfg.d)
    verdict = is_smooth(f, cfg.settings.smooth, cfg.settings.budgets)
    document: dict[str, Any] = {"poly": cfg.poly, "saturation": verdict.to_dict()}
    if cfg.k_max is not None:
        document["points"] = is_smooth_points_oracle(f, cfg.k_max, cfg.settings.budgets).to_dict()
    rows = [value for key, value in document.items() if key != "poly"]
    return _render(document, rows, cfg.output_format), 0


def _run_fixed_dim(cfg: RunConfig) -> tuple[str, int]:
    field_ = field_for_order(cfg.q, cfg.settings.budgets)
    A = GroupElem(field_, parse_matrix(cfg.matrix, field_))
    basis = monomial_basis(A.n, cfg.d, cfg.settings.budgets)
    record = fixed_space(A, parse_element(cfg.lam, field_), basis, want_basis=cfg.want_basis)
    document = record.to_dict()
    return _render(document, [document], cfg.output_format), 0


def _run_trend(cfg: RunConfig) -> tuple[str, int]:
    rows = trend(cfg.n, cfg.q, cfg.degrees, cfg.settings, threads=cfg.threads)
    return _render({"n": cfg.n, "q": parse_q(cfg.q), "rows": rows}, rows, cfg.output_format), 0


def parse_q(q: str | int) -> int:
    p, k = parse_prime_power(q)
    return p**k


HANDLERS = {
    "bounds": _run_bounds,
    "census": _run_census,
    "stabilizer": _run_stabilizer,
    "orbits": _run_orbits,
    "verify": _run_verify,
    "smooth": _run_smooth,
    "fixed-dim": _run_fixed_dim,
    "trend": _run_trend,
}


def run(cfg: RunConfig) -> int:
    """Dispatch one validated invocation and write its output.

    Returns:
        Exit code (0 success, 1 error, 2 verification failure).
    """
    try:
        cfg.validate()
        text, code = HANDLERS[cfg.command](cfg)
    except (BudgetExceededError, ValueError, RuntimeError, FileNotFoundError) as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return 1
    except Exception as e:
        logger.exception("Unexpected failure in %s", cfg.command)
        print(f"❌ Unexpected error: {e}", file=sys.stderr)
        return 1

    out = cfg.resolve(cfg.out, cfg.settings.output.output_dir)
    if out is None:
        sys.stdout.write(text)
        return code
    try:
        path = write_text(out, text)
    except OSError as e:
        print(f"❌ Error: cannot write {out}: {e}", file=sys.stderr)
        return 1
    print(f"✅ Wrote {path}", file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML configuration file (default: the packaged ffhyp_config.yaml)")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    common.add_argument("--threads", type=int, help="Worker processes (default: config, then all cores)")
    common.add_argument("--format", choices=FORMATS, help="Output format (default: config output.format)")
    common.add_argument("--out", help="Output file; bare names go to output.output_dir")
    common.add_argument("--q", help="Field order, e.g. 3, 9 or 3^2")
    common.add_argument("--n", type=int, help="Projective dimension")

    parser = argparse.ArgumentParser(
        prog="ffhyp",
        description="Exact census of smooth hypersurfaces over finite fields",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Usage:", 1)[1],
    )
    parser.add_argument("--version", action="version", version=f"ffhyp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="Closed-form bounds at (n, d, q)")
    p.add_argument("--d", type=int)

    p = sub.add_parser("census", parents=[common], help="Exhaustive, group-side or sampling census")
    p.add_argument("--d", type=int)
    p.add_argument("--mode", default="exhaustive", choices=sorted(MODES))
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--with-stabilizers", action="store_true", default=None)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--shard-index", type=int, default=0)
    p.add_argument("--checkpoint", help="Checkpoint file; bare names go to census.checkpoint_dir")
    p.add_argument("--orbit-table", action="store_true")

    p = sub.add_parser("stabilizer", parents=[common], help="Aut_{F_q} of one hypersurface")
    p.add_argument("--poly", required=True)
    p.add_argument("--d", type=int)

    p = sub.add_parser("orbits", parents=[common], help="Orbit table with stabilizer orders")
    p.add_argument("--d", type=int)
    p.add_argument("--checkpoint")

    p = sub.add_parser("verify", parents=[common], help="Check every bound against a full census")
    p.add_argument("--d", type=int)
    p.add_argument("--checkpoint")

    p = sub.add_parser("smooth", parents=[common], help="Smoothness verdict for one form")
    p.add_argument("--poly", required=True)
    p.add_argument("--d", type=int)
    p.add_argument("--k-max", type=int, help="Also search points over F_{q^r}, r <= k-max")

    p = sub.add_parser("fixed-dim", parents=[common], help="dim P^{A,lam} for one matrix")
    p.add_argument("--matrix", required=True, help='Rows separated by ";", entries by ","')
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--d", type=int)
    p.add_argument("--basis", dest="want_basis", action="store_true")

    p = sub.add_parser("trend", parents=[common], help="Density and average |Aut| over several degrees")
    p.add_argument("--d", dest="degrees", type=int, nargs="+", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    default_config = get_config_dir() / "ffhyp_config.yaml"
    try:
        settings = load_config(args.config or (default_config if default_config.exists() else None))
    except (FileNotFoundError, ValueError) as e:
        print(f"❌ Configuration error: {e}", file=sys.stderr)
        return 1

    options = {k: v for k, v in vars(args).items() if k not in ("config", "verbose")}
    return run(RunConfig(settings=settings, **options))


if __name__ == "__main__":
    sys.exit(main())
