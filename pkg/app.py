"""
Command-line entry point.

    python app.py [global flags] <run|analyze|regions|persist|design|oracle> [options]

Exit codes: 0 success, 1 configuration error, 2 property failure.
"""
import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import pandas as pd
from dotenv import load_dotenv
from pydantic import ValidationError

import config
from engine import analytics, map_renderer, oracle
from engine.coin import CoinState, format_home, parse_home
from engine.errors import ConfigError, DesignConstraintError, ParrondoError
from engine.models import RunConfig, parse_grid
from engine.observables import parse_observable
from engine.parrondo import (
    analyze_family,
    build_family,
    design_daisy_chain,
    label_vector,
    parrondo_cap,
    parrondo_caps,
    persistence_scan,
    region_map,
    zero_position_steps,
)
from engine.payoff import analyze
from engine.walks import ensemble_histogram, trace_flow
from utils import exporter, svg

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_PROPERTY = 2


@dataclass
class Settings:
    out_dir: Path
    seed: int
    tie_tol: float
    grid: tuple
    html: bool


# --- Configuration ---

def load_run_config(path):
    """Reads and validates a JSON run config; no path gives an empty config."""
    if path is None:
        return RunConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file '{path}' not found")
    with path.open(encoding="utf-8") as fh:
        data = json.load(fh)
    return RunConfig.model_validate(data)


def _env(name, parse):
    value = os.getenv(name)
    if value in (None, ""):
        return None
    try:
        return parse(value)
    except ValueError as exc:
        raise ConfigError(f"Environment variable {name}={value!r}: {exc}") from None


def resolve_settings(args, cfg):
    """Flag > config file > environment > built-in default."""
    grid = None
    if args.grid is not None:
        grid = parse_grid(args.grid)
    elif cfg.grid is not None:
        grid = parse_grid(cfg.grid)
    else:
        grid = _env(config.ENV_GRID, parse_grid) or config.DEFAULT_GRID

    seed = args.seed if args.seed is not None else _env(config.ENV_SEED, int)
    tie_tol = args.tie_tol if args.tie_tol is not None else _env(config.ENV_TIE_TOL, float)
    out_dir = args.out or os.getenv(config.ENV_OUT_DIR) or config.DEFAULT_OUT_DIR

    if tie_tol is not None and (tie_tol < 0 or not math.isfinite(tie_tol)):
        raise ConfigError(f"tie tolerance must be a non-negative number, got {tie_tol}")
    return Settings(
        out_dir=Path(out_dir),
        seed=config.DEFAULT_SEED if seed is None else seed,
        tie_tol=config.TIE_TOL if tie_tol is None else tie_tol,
        grid=grid,
        html=args.html,
    )


def parse_n_range(text):
    """'1..19', '1-19' or a single '5'."""
    for sep in ("..", "-"):
        if sep in text:
            first, last = text.split(sep, 1)
            first, last = int(first), int(last)
            break
    else:
        first = last = int(text)
    if first < 1 or last < first:
        raise ConfigError(f"n-range '{text}' must satisfy 1 <= first <= last")
    return first, last


def _pick(flag, configured, default=None):
    if flag is not None:
        return flag
    if configured is not None:
        return configured
    return default


def family_steps(cfg):
    """Base steps from the config: zero-position block, design, or explicit steps."""
    if cfg.zero_position is not None:
        z = cfg.zero_position
        return list(zero_position_steps(z.m, z.c1, z.s1, z.c2, z.s2))
    if cfg.design is not None:
        return design_daisy_chain(cfg.design)
    if cfg.steps:
        return list(cfg.steps)
    raise ConfigError("Config defines no steps: give 'steps', 'design' or 'zero_position'")


def _cycles(args, cfg):
    if cfg.zero_position is not None and args.cycles is None:
        return cfg.zero_position.n
    return _pick(args.cycles, cfg.cycles, 1)


def _home(args, cfg, required=True):
    text = _pick(args.home, cfg.home)
    if text is None:
        if required:
            raise ConfigError("A home state is required (--home or 'home' in the config)")
        return None
    return parse_home(text)


def _observable(args, cfg):
    return parse_observable(_pick(args.observable, cfg.observable, config.ObservableKind.MU.value))


def _omega(args, cfg):
    return _pick(args.omega, cfg.omega, 0.0)


def _n_values(args, cfg, fallback):
    if args.n_range is not None:
        first, last = parse_n_range(args.n_range)
    elif cfg.n_range is not None:
        first, last = cfg.n_range
    else:
        first, last = fallback
    return first, last


def _markers(args, cfg):
    texts = args.markers if args.markers else cfg.markers
    return [(t, parse_home(t)) for t in texts]


def _print_frame(frame, title=None):
    if title:
        print(title)
    print(frame.to_string(float_format=lambda x: f"{x:.{config.DISPLAY_DIGITS}f}"))


def _write_html(settings, fig, name):
    if settings.html:
        path = settings.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.write_html(str(path), include_plotlyjs="cdn")
        logger.info("Wrote %s", path)


# --- Commands ---

def _labelled_walks(args, cfg):
    """(label, walk) pairs: the configured walk, or every walk of the family at each n."""
    if cfg.walk is not None:
        return [("walk", cfg.walk)]
    steps = family_steps(cfg)
    if args.n_range is not None or cfg.n_range is not None:
        first, last = _n_values(args, cfg, None)
        cycles = range(first, last + 1)
    else:
        cycles = [_cycles(args, cfg)]
    walks = []
    for n in cycles:
        fam = build_family(steps, n)
        walks.extend((f"n{n}_w{i + 1}", w) for i, w in enumerate(fam.walks))
    return walks


def cmd_run(args, cfg, settings):
    home = _home(args, cfg)
    frames = []
    for label, walk in _labelled_walks(args, cfg):
        frame = analytics.histogram_frame(ensemble_histogram(walk, home), label)
        frames.append(frame)
        exporter.write_text(svg.histogram_svg(frame, title=label), settings.out_dir / f"histogram_{label}.svg")
        _write_html(settings, map_renderer.render_histogram(frame), f"histogram_{label}.html")
        _print_frame(frame.drop(columns="walk").set_index("position"), f"[{label}]")
        if isinstance(home, CoinState):
            flow = trace_flow(walk, home)
            if flow[-1][1] is not None:
                print("  flow: " + " -> ".join(f"|{format_home(s)};{m}>" for m, s in flow))
    exporter.write_csv(pd.concat(frames, ignore_index=True), settings.out_dir / "histograms.csv")
    return EXIT_OK


def cmd_analyze(args, cfg, settings):
    o = _observable(args, cfg)
    omega = _omega(args, cfg)
    home = _home(args, cfg, required=False)
    if cfg.walk is not None:
        analyses = [analyze(o, cfg.walk, omega)]
    else:
        analyses = analyze_family(build_family(family_steps(cfg), _cycles(args, cfg)), o, omega)

    frame = analytics.analysis_frame(analyses, home)
    exporter.write_csv(frame, settings.out_dir / "analysis.csv", index=True)
    report = exporter.generate_markdown_report(analyses, o.name, omega, home)
    exporter.write_text(report, settings.out_dir / "analysis.md")
    if args.pdf:
        pdf_path = settings.out_dir / "analysis.pdf"
        pdf_path.write_bytes(exporter.generate_pdf_report(analyses, o.name, omega, home))
        logger.info("Wrote %s", pdf_path)
    header, sections = exporter.analysis_lines(analyses, o.name, omega, home)
    print("\n".join(header))
    for section in sections:
        print("\n".join(section))
    markers = _markers(args, cfg)
    if markers:
        payoffs = analytics.payoff_frame(analyses, dict(markers))
        exporter.write_csv(payoffs, settings.out_dir / "payoffs.csv", index=True)
        _print_frame(payoffs, "Payoffs of marked states:")
    return EXIT_OK


def cmd_regions(args, cfg, settings):
    o = _observable(args, cfg)
    omega = _omega(args, cfg)
    fam = build_family(family_steps(cfg), _cycles(args, cfg))
    region = region_map(fam, o, omega, settings.grid, settings.tie_tol)
    markers = _markers(args, cfg)

    exporter.write_csv(region.to_frame(), settings.out_dir / "regions.csv")
    exporter.write_csv(analytics.cap_frame(parrondo_caps(fam, o, omega, settings.tie_tol)), settings.out_dir / "caps.csv")
    exporter.write_csv(analytics.node_states(region), settings.out_dir / "parrondo_nodes.csv")
    marker_states = [m for _, m in markers]
    exporter.write_text(svg.region_svg(region, marker_states), settings.out_dir / "regions.svg")
    _write_html(settings, map_renderer.render_region_map(region, marker_states), "regions.html")

    _print_frame(analytics.region_counts(region), "Label vectors:")
    print(f"Parrondo fraction of nodes: {region.parrondo_fraction:.{config.DISPLAY_DIGITS}f}")
    for text, home in markers:
        labels = "".join(x.value for x in label_vector(fam, o, omega, home, settings.tie_tol, region.analyses))
        print(f"  {text}: {labels}")
    return EXIT_OK


def cmd_persist(args, cfg, settings):
    o = _observable(args, cfg)
    omega = _omega(args, cfg)
    home = _home(args, cfg)
    first, last = _n_values(args, cfg, config.DEFAULT_N_RANGE)
    report = persistence_scan(family_steps(cfg), o, omega, home, (first, last), settings.tie_tol)

    exporter.write_csv(report.table, settings.out_dir / "persistence.csv")
    exporter.write_csv(report.commutators, settings.out_dir / "commutators.csv")
    exporter.write_text(svg.persistence_svg(report.table), settings.out_dir / "persistence.svg")
    _write_html(settings, map_renderer.render_persistence(report.table), "persistence.html")

    _print_frame(analytics.persistence_frame(report))
    _print_frame(analytics.summarize_payoffs(report.table), "Payoff signs:")
    print(f"Persistent over n={first}..{last}: {report.persistent} (first Parrondo n: {report.first_parrondo})")
    return EXIT_OK


def cmd_design(args, cfg, settings):
    if cfg.design is None:
        raise ConfigError("Config has no 'design' block")
    steps = design_daisy_chain(cfg.design)
    threshold, nu_max = parrondo_cap(steps)
    fam = build_family(steps, _cycles(args, cfg))
    caps = analytics.cap_frame(parrondo_caps(fam, parse_observable("mu"), 0.0, settings.tie_tol))

    serialized = [step.model_dump(by_alias=True, mode="json") for step in steps]
    exporter.write_text(json.dumps({"steps": serialized}, indent=2), settings.out_dir / "design.json")
    exporter.write_csv(analytics.steps_frame(steps), settings.out_dir / "design_steps.csv")
    exporter.write_csv(caps, settings.out_dir / "caps.csv")

    for i, step in enumerate(steps):
        print(f"T{i + 1} = {step}")
    print(f"Q = {threshold} ({float(threshold):.{config.DISPLAY_DIGITS}f})")
    print(f"nu_max = {nu_max:.4f} rad")
    return EXIT_OK


def cmd_oracle(args, cfg, settings):
    trials = _pick(args.trials, cfg.trials, config.DEFAULT_TRIALS)
    report, messages = oracle.run_oracle(settings.seed, trials)
    exporter.write_csv(report, settings.out_dir / "oracle.csv")
    print(report.to_string(index=False))
    for message in messages:
        print(f"FAIL {message}")
    return EXIT_OK if oracle.oracle_passed(report) else EXIT_PROPERTY


COMMANDS = {
    "run": cmd_run,
    "analyze": cmd_analyze,
    "regions": cmd_regions,
    "persist": cmd_persist,
    "design": cmd_design,
    "oracle": cmd_oracle,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="app.py", description="Quantum-walk Parrondo games")
    parser.add_argument("--config", help="JSON run config")
    parser.add_argument("--seed", type=int, help="Oracle RNG seed")
    parser.add_argument("--out", help="Output directory")
    parser.add_argument("--tie-tol", type=float, help="Win/lose tie band")
    parser.add_argument("--grid", help="Region map resolution NTxNP")
    parser.add_argument("--html", action="store_true", help="Also write interactive plotly HTML")
    parser.add_argument("-v", "--verbose", action="count", default=0)

    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--home", help="Home state, e.g. h, bloch:pi/2,13pi/16, mix:0.8,h")
        p.add_argument("--observable", help="mu, delta, zero or spectral:<file>")
        p.add_argument("--omega", type=float, help="Target payoff")
        p.add_argument("--cycles", type=int, help="Cycle count n")
        p.add_argument("--n-range", help="Cycle range, e.g. 1..19")
        p.add_argument("--trials", type=int, help="Oracle trials per suite")
        p.add_argument("--markers", nargs="+", help="States to mark on region maps")
        if name == "analyze":
            p.add_argument("--pdf", action="store_true", help="Also write analysis.pdf")
    return parser


def main(argv=None):
    load_dotenv()
    args = build_parser().parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")

    try:
        cfg = load_run_config(args.config)
        settings = resolve_settings(args, cfg)
        return COMMANDS[args.command](args, cfg, settings)
    except DesignConstraintError as exc:
        print("error: design constraints violated:", file=sys.stderr)
        for violation in exc.violations:
            print(f"  {violation}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParrondoError, ValidationError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
