"""exdyn command line: simulate | classify | resolve | regress | fetch"""

import argparse
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import ValidationError

from core.errors import DataInputError, EmptySeriesError, ExchangeDynamicsError, ScenarioError
from core.model import integrate, long_run_regime
from core.types import (
    BehaviorLabel,
    ElasticityClass,
    MacroSeries,
    QDirection,
    ScheduleType,
    Spectrum,
    Thresholds,
)
from cycles.classifier import classify_series, render_spectrum_table
from cycles.triangle import resolve_triangle
from exchange_dynamics import __version__
from exchange_dynamics.config import ScenarioConfig
from exchange_dynamics.manifest import RunManifest, write_json
from pipeline.fixtures import FIXTURES, load_fixture
from pipeline.loader import (
    load_panel,
    load_series,
    select_country,
    series_from_frame,
    validate_frame,
)
from pipeline.regression import run_balanced_path
from pipeline.synthetic import synthetic_panel
from pipeline.worldbank import (
    DEFAULT_BASE_URL,
    DEFAULT_INDICATORS,
    ROLES,
    WorldBankClient,
    cross_check,
    fetch_worldbank,
    merge_indicator_files,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _frame_to_csv(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format="%.12g", lineterminator="\n")
    return buffer.getvalue()


def _key_values(data: Dict[str, Any]) -> str:
    width = max(len(k) for k in data)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in data.items())


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

def cmd_simulate(args: argparse.Namespace) -> int:
    overrides = {
        "type": args.schedule,
        "M0": args.M0,
        "q": args.q,
        "V0": args.V0,
        "alpha": args.alpha,
        "times": args.times,
        "values": args.values,
        "k": args.k,
        "W0": args.W0,
        "Y0": args.Y0,
        "g": args.g,
        "t_end": args.t_end,
        "dt": args.dt,
        "max_step_fraction": args.max_step_fraction,
    }
    manifest = RunManifest("simulate")
    if args.config:
        config = ScenarioConfig.from_file(args.config, overrides)
        manifest.add_input(args.config)
    else:
        config = ScenarioConfig.from_dict({}, overrides)

    schedule, params = config.money_supply(), config.params()
    trajectory = integrate(schedule, params, config.t_end, config.dt, config.max_step_fraction)

    try:
        regime: Optional[Dict[str, Any]] = long_run_regime(schedule, params).to_dict()
    except ScenarioError as e:
        logger.warning(f"No long-run regime: {e}")
        regime = None

    out_dir = Path(args.out_dir)
    trajectory_path = trajectory.to_csv(out_dir / "trajectory.csv")
    summary = {
        "regime": regime,
        "c_inf": regime["c_inf"] if regime else None,
        "final": trajectory.final(),
        "samples": len(trajectory),
    }
    regime_path = write_json(out_dir / "regime.json", summary)

    manifest.params = config.model_dump(mode="json")
    manifest.add_output(trajectory_path, out_dir)
    manifest.add_output(regime_path, out_dir)
    manifest.write(out_dir)

    if args.format == "json":
        _emit(json.dumps(summary, indent=2))
    elif args.format == "csv":
        _emit(_frame_to_csv(trajectory.to_frame()))
    else:
        rows = {"schedule": schedule.type.value, "samples": len(trajectory)}
        rows.update({f"{k}(end)": f"{v:.6g}" for k, v in trajectory.final().items()})
        if regime:
            rows.update({"c_inf": f"{regime['c_inf']:.6g}", "branch": regime["branch"], "v_inf": regime["v_inf"], "sign": regime["sign"]})
        _emit(_key_values(rows))
    return EXIT_OK


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def thresholds_from_args(args: argparse.Namespace) -> Thresholds:
    return Thresholds.from_config({
        "evident_up": args.evident_up,
        "evident_down": args.evident_down,
        "sensitivity_ratio": args.sensitivity_ratio,
        "sensitive_trigger": args.sensitive_trigger,
        "tie_eps": args.tie_eps,
        "slope_delta": args.slope_delta,
        "max_buffer_steps": args.max_buffer_steps,
    })


def _series_for_classify(args: argparse.Namespace, manifest: RunManifest) -> MacroSeries:
    if args.fixture:
        return load_fixture(args.fixture)
    manifest.add_input(args.input)
    loaded = load_series(args.input)
    if isinstance(loaded, MacroSeries):
        return loaded
    if args.country:
        return select_country(loaded, args.country)
    if len(loaded) == 1:
        return next(iter(loaded.values()))
    raise DataInputError(f"input holds {len(loaded)} countries; choose one with --country")


def _steps_frame(spectrum: Spectrum) -> pd.DataFrame:
    return pd.DataFrame([step.to_dict() for step in spectrum.steps])


def cmd_classify(args: argparse.Namespace) -> int:
    manifest = RunManifest("classify")
    thresholds = thresholds_from_args(args)
    series = _series_for_classify(args, manifest)
    spectrum = classify_series(series, thresholds)

    out_dir = Path(args.out_dir)
    spectrum_path = write_json(out_dir / "spectrum.json", spectrum.to_dict())

    manifest.params = {
        "fixture": args.fixture,
        "input": args.input,
        "country": series.country,
        "thresholds": thresholds.to_dict(),
    }
    manifest.add_output(spectrum_path, out_dir)
    manifest.write(out_dir)

    if args.format == "table":
        _emit(render_spectrum_table(spectrum))
    elif args.format == "csv":
        _emit(_frame_to_csv(_steps_frame(spectrum)))
    else:
        _emit(json.dumps(spectrum.to_dict(), indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# resolve
# ---------------------------------------------------------------------------

def cmd_resolve(args: argparse.Namespace) -> int:
    elasticity: Any = args.slope if args.slope is not None else args.elasticity_class
    result = resolve_triangle(
        q_direction=args.q_dir,
        elasticity=elasticity,
        behavior=args.behavior,
        dg_direction=args.dg,
        slope_delta=args.slope_delta,
    )
    kind = {
        BehaviorLabel: "behavior",
        ElasticityClass: "elasticity_class",
        QDirection: "q_direction",
    }[type(result)]

    inputs = {
        "q_direction": args.q_dir,
        "slope": args.slope,
        "elasticity_class": args.elasticity_class,
        "behavior": args.behavior,
        "dg_direction": args.dg,
    }
    payload = {"inputs": inputs, "result": {"kind": kind, "value": result.value}}

    out_dir = Path(args.out_dir)
    resolve_path = write_json(out_dir / "resolve.json", payload)
    manifest = RunManifest("resolve", params={**inputs, "slope_delta": args.slope_delta})
    manifest.add_output(resolve_path, out_dir)
    manifest.write(out_dir)

    if args.format == "json":
        _emit(json.dumps(payload, indent=2))
    elif args.format == "csv":
        _emit(f"kind,value\n{kind},{result.value}")
    else:
        _emit(f"{kind}: {result.value}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# regress
# ---------------------------------------------------------------------------

def _year_range(args: argparse.Namespace) -> Optional[Tuple[int, int]]:
    if args.start_year is None and args.end_year is None:
        return None
    return (
        args.start_year if args.start_year is not None else -10**9,
        args.end_year if args.end_year is not None else 10**9,
    )


def cmd_regress(args: argparse.Namespace) -> int:
    manifest = RunManifest("regress")
    if args.synthetic:
        sigma = 0.0 if args.synthetic == "exact" else args.sigma
        panel = synthetic_panel(n=args.n, slope=1.0, sigma=sigma, seed=args.seed, years=args.years)
    else:
        manifest.add_input(args.input)
        panel = load_panel(args.input)

    year_range = _year_range(args)
    report = run_balanced_path(panel, year_range, args.min_coverage)

    out_dir = Path(args.out_dir)
    regression_path = write_json(out_dir / "regression.json", report.to_dict())
    scatter_path = report.write_scatter(out_dir / "scatter.csv")

    manifest.params = {
        "input": args.input,
        "synthetic": args.synthetic,
        "n": args.n if args.synthetic else None,
        "sigma": args.sigma if args.synthetic == "noisy" else None,
        "seed": args.seed if args.synthetic else None,
        "year_range": list(year_range) if year_range else None,
        "min_coverage": args.min_coverage,
    }
    manifest.add_output(regression_path, out_dir)
    manifest.add_output(scatter_path, out_dir)
    manifest.write(out_dir)

    if args.format == "json":
        _emit(json.dumps(report.to_dict(), indent=2))
    elif args.format == "csv":
        _emit(_frame_to_csv(report.scatter_frame()))
    else:
        r = report.regression
        _emit(_key_values({
            "slope": f"{r.slope:.4f}",
            "stderr": f"{r.stderr:.4f}",
            "correlation": f"{r.correlation:.4f}",
            "intercept": f"{r.intercept:.4f}",
            "n_used": r.n_points,
            "excluded (log domain)": len(report.excluded_positivity),
            "excluded (coverage)": len(report.excluded_coverage),
        }))
    return EXIT_OK


# ---------------------------------------------------------------------------
# fetch
# ---------------------------------------------------------------------------

def _parse_indicators(values: Optional[List[str]]) -> Dict[str, str]:
    indicators = dict(DEFAULT_INDICATORS)
    for item in values or []:
        role, sep, code = item.partition("=")
        if not sep or role not in ROLES or not code:
            raise DataInputError(f"--indicator expects role=CODE with role in q, g, c; got {item!r}")
        indicators[role] = code
    return indicators


def cmd_fetch(args: argparse.Namespace, client: Optional[WorldBankClient] = None) -> int:
    indicators = _parse_indicators(args.indicator)
    year_range = (args.start_year, args.end_year)
    out_dir = Path(args.out_dir)
    cache_dir = Path(args.cache_dir) if args.cache_dir else out_dir / "cache"

    client = client or WorldBankClient(base_url=args.base_url)
    result = fetch_worldbank(indicators, year_range, cache_dir, client=client)

    panel = merge_indicator_files(result.files)
    panel_path = out_dir / "panel.csv"
    panel_path.parent.mkdir(parents=True, exist_ok=True)
    panel.to_csv(panel_path, index=False, float_format="%.12g", lineterminator="\n")

    mismatches = None
    if args.cross_check:
        try:
            fetched = series_from_frame(validate_frame(panel, source=str(panel_path)))
        except EmptySeriesError:
            fetched = {}
        if isinstance(fetched, dict) and "CHN" in fetched:
            mismatches = len(cross_check(fetched["CHN"], load_fixture("china"), args.tolerance))
        else:
            logger.warning("Cross-check skipped: no complete CHN rows in the fetched panel")

    manifest = RunManifest("fetch", params={
        "indicators": indicators,
        "year_range": list(year_range),
        "base_url": args.base_url,
        "cross_check": args.cross_check,
    })
    for role in ROLES:
        manifest.add_output(result.files[role], out_dir)
    manifest.add_output(panel_path, out_dir)
    manifest.write(out_dir)

    summary = {
        "panel": str(panel_path),
        "rows": len(panel),
        "countries": int(panel["country"].nunique()),
        "fetched": result.fetched,
        "cached": result.cached,
        "cross_check_mismatches": mismatches,
    }
    if args.format == "json":
        _emit(json.dumps(summary, indent=2))
    elif args.format == "csv":
        _emit(_frame_to_csv(panel))
    else:
        _emit(_key_values(summary))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out-dir", default="out", help="directory for outputs and manifest.json")
    common.add_argument("--format", choices=("json", "csv", "table"), default="json", help="stdout rendering")
    common.add_argument("--seed", type=int, default=0, help="seed for synthetic-data generators")
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        help="log level for stderr",
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    formatter = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="exdyn",
        description="Dynamical quantity equation of exchange: simulate, classify, resolve, regress, fetch",
        formatter_class=formatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()

    # simulate
    sim = sub.add_parser("simulate", parents=[common], formatter_class=formatter,
                         help="integrate k dW/dt = M(t) - W and report the long-run regime")
    sim.add_argument("--config", help="JSON scenario file; flags override its values")
    sim.add_argument("--schedule", choices=[t.value for t in ScheduleType])
    sim.add_argument("--M0", type=float, help="initial money supply")
    sim.add_argument("--q", type=float, help="money growth rate (exponential)")
    sim.add_argument("--V0", type=float, help="money supply slope (linear)")
    sim.add_argument("--alpha", type=float, help="exponent 0 < alpha < 1 (output_power)")
    sim.add_argument("--times", type=_float_list, help="comma-separated knot times (tabulated)")
    sim.add_argument("--values", type=_float_list, help="comma-separated knot values (tabulated)")
    sim.add_argument("--k", type=float, help="relaxation time")
    sim.add_argument("--W0", type=float, help="initial sales value")
    sim.add_argument("--Y0", type=float, help="initial real output")
    sim.add_argument("--g", type=float, help="real output growth rate (default 0)")
    sim.add_argument("--t-end", type=float, help="integration horizon")
    sim.add_argument("--dt", type=float, help="sample spacing (default k/100)")
    sim.add_argument("--max-step-fraction", type=float, help="RK4 sub-step times fastest rate (default 0.01)")
    sim.set_defaults(handler=cmd_simulate)

    # classify
    defaults = Thresholds()
    cls = sub.add_parser("classify", parents=[common], formatter_class=formatter,
                         help="label state migrations and detect buffer periods")
    source = cls.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", help="CSV or JSON with columns country?,period,q,g,c")
    source.add_argument("--fixture", choices=FIXTURES, help="embedded data set")
    cls.add_argument("--country", help="country to classify when the input is a panel")
    cls.add_argument("--evident-up", type=float, default=defaults.evident_up,
                     help="pp rise in money growth that counts as evident")
    cls.add_argument("--evident-down", type=float, default=defaults.evident_down,
                     help="pp fall in money growth that counts as evident")
    cls.add_argument("--sensitivity-ratio", type=float, default=defaults.sensitivity_ratio,
                     help="q/g - 1 below this makes inflation sensitive")
    cls.add_argument("--sensitive-trigger", type=float, default=defaults.sensitive_trigger,
                     help="pp change that is evident in the sensitive zone")
    cls.add_argument("--tie-eps", type=float, default=defaults.tie_eps,
                     help="pp within which a delta counts as flat")
    cls.add_argument("--slope-delta", type=float, default=defaults.slope_delta,
                     help="tolerance around slope -1 for natural-cycle moves")
    cls.add_argument("--max-buffer-steps", type=int, default=defaults.max_buffer_steps,
                     help="longest buffer before a DD")
    cls.set_defaults(handler=cmd_classify)

    # resolve
    res = sub.add_parser("resolve", parents=[common], formatter_class=formatter,
                         help="complete the money growth / slope / behavior triangle")
    res.add_argument("--q-dir", choices=[d.value for d in QDirection])
    elasticity = res.add_mutually_exclusive_group()
    elasticity.add_argument("--slope", type=float, help="numeric migration slope dc/dg")
    elasticity.add_argument("--elasticity-class", choices=[e.value for e in ElasticityClass])
    res.add_argument("--behavior", choices=[b.value for b in BehaviorLabel])
    res.add_argument("--dg", choices=(QDirection.UP.value, QDirection.DOWN.value),
                     help="output-growth direction, separates golden growth from stagflation")
    res.add_argument("--slope-delta", type=float, default=defaults.slope_delta,
                     help="tolerance around slope -1 when money growth is flat")
    res.set_defaults(handler=cmd_resolve)

    # regress
    reg = sub.add_parser("regress", parents=[common], formatter_class=formatter,
                         help="fit log average inflation against log(money growth - output growth)")
    panel_source = reg.add_mutually_exclusive_group(required=True)
    panel_source.add_argument("--input", help="panel CSV or JSON with columns country,period,q,g,c")
    panel_source.add_argument("--synthetic", choices=("exact", "noisy"), help="generated balanced-path panel")
    reg.add_argument("--n", type=int, default=161, help="countries in a synthetic panel")
    reg.add_argument("--sigma", type=float, default=0.3, help="log-space noise of a noisy synthetic panel")
    reg.add_argument("--years", type=int, default=20, help="years per country in a synthetic panel")
    reg.add_argument("--start-year", type=int, help="first year averaged")
    reg.add_argument("--end-year", type=int, help="last year averaged")
    reg.add_argument("--min-coverage", type=int, default=10, help="minimum complete years per country")
    reg.set_defaults(handler=cmd_regress)

    # fetch
    fetch = sub.add_parser("fetch", parents=[common], formatter_class=formatter,
                           help="download World Bank indicators into a panel")
    fetch.add_argument("--indicator", action="append", metavar="ROLE=CODE",
                       help=f"override an indicator code; defaults {DEFAULT_INDICATORS}")
    fetch.add_argument("--start-year", type=int, default=1960)
    fetch.add_argument("--end-year", type=int, default=2015)
    fetch.add_argument("--cache-dir", help="per-indicator cache (default <out-dir>/cache)")
    fetch.add_argument("--base-url", default=DEFAULT_BASE_URL)
    fetch.add_argument("--cross-check", action="store_true",
                       help="compare fetched CHN rows with the embedded China data")
    fetch.add_argument("--tolerance", type=float, default=0.5, help="pp tolerance of the cross-check")
    fetch.set_defaults(handler=cmd_fetch)

    return parser


def _validation_lines(error: ValidationError) -> List[str]:
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        lines.append(f"{location}: {item['msg']}")
    return lines


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        return args.handler(args)
    except ValidationError as e:
        logger.error(f"Invalid {args.command} configuration")
        for line in _validation_lines(e):
            print(line, file=sys.stderr)
        return EXIT_INPUT
    except ExchangeDynamicsError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
