"""
Hyperbolic Lab CLI

Runs the lab's checks and experiments on group and complex definitions.
Exit codes: 0 pass, 1 property violated, 2 input or validation error,
3 domain not converged.
"""
import json
import logging
import os
import sys
from typing import Any, Callable, List, Optional

import click
import numpy as np
from dotenv import load_dotenv
from pydantic import ValidationError

# Add the project root to sys.path before importing app modules
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from app.complexify import parasitic_report, primary_parasitic, saturate, secondary_parasitic  # noqa: E402
from app.complexify.cache import IntersectionCache  # noqa: E402
from app.complexify.parasitic import face_spans  # noqa: E402
from app.domain.dirichlet import compute_domain  # noqa: E402
from app.domain.simplicity import simplicity_check  # noqa: E402
from app.errors import HyperLabError, NotConverged  # noqa: E402
from app.geometry.bisector import is_singular_tuple  # noqa: E402
from app.geometry.isometry import make_glide_reflection, make_loxodromic  # noqa: E402
from app.geometry.lorentz import random_points_on_H  # noqa: E402
from app.groups.diagnostics import classify_generators  # noqa: E402
from app.models.configuration import LabConfig, load_lab_config  # noqa: E402
from app.paperlab import (  # noqa: E402
    cyclic_simplicity_experiment,
    example1_scan,
    example2_verify,
    genericity_scan,
    glide_domain_verify,
)
from app.schema.types import FaceVerdict  # noqa: E402
from app.schema.validation import (  # noqa: E402
    build_complex,
    build_group,
    load_complex_definition,
    load_domain_report,
    load_group,
    load_group_definition,
)
from app.utils.serialization import to_serializable_dict  # noqa: E402
from app.utils.tracer import ScanTracer  # noqa: E402

# Load environment variables
load_dotenv()

# Configure logging
logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3


class LabContext:
    """Settings shared by every subcommand."""
    def __init__(self, config: LabConfig, tol: float, seed: int, json_out: Optional[str]):
        self.config = config
        self.tol = tol
        self.seed = seed
        self.json_out = json_out

    @property
    def tracer(self) -> Optional[ScanTracer]:
        tracing = self.config.tracing
        return ScanTracer(tracing.trace_log_path) if tracing.enable_tracing else None

    def domain_kwargs(self) -> dict:
        return self.config.domain_kwargs(self.tol)

    def emit(self, payload: Any) -> None:
        text = json.dumps(to_serializable_dict(payload), indent=2)
        if self.json_out:
            with open(self.json_out, 'w', encoding='utf-8') as f:
                f.write(text)
            logger.info(f"Wrote report to {self.json_out}")
        else:
            click.echo(text)


def run_guarded(ctx: click.Context, action: Callable[[], int]) -> None:
    """Run a subcommand body and translate its outcome into the exit-code contract."""
    try:
        code = action()
    except NotConverged as e:
        logger.error(f"Not converged: {str(e)}", exc_info=True)
        code = EXIT_NOT_CONVERGED
    except (HyperLabError, ValueError, FileNotFoundError) as e:
        logger.error(f"Invalid input: {str(e)}", exc_info=True)
        code = EXIT_INPUT
    ctx.exit(code)


def parse_vector(text: Optional[str], dim: int) -> Optional[np.ndarray]:
    """
    Read 'a,b,c,...' as a point: dim + 1 entries are taken as is, dim entries
    are spatial coordinates lifted to H.
    """
    if text is None:
        return None
    try:
        values = np.array([float(v) for v in text.split(',')])
    except ValueError:
        raise click.BadParameter(f"Expected comma-separated numbers, got {text!r}")
    if values.size == dim:
        return np.concatenate(([np.sqrt(1.0 + values @ values)], values))
    if values.size != dim + 1:
        raise click.BadParameter(f"Expected {dim} or {dim + 1} coordinates, got {values.size}")
    return values


def _base_point(text: Optional[str], group_base: Optional[List[float]], dim: int) -> np.ndarray:
    base = parse_vector(text, dim)
    if base is None and group_base is not None:
        base = np.asarray(group_base, dtype=float)
    if base is None:
        base = np.zeros(dim + 1)
        base[0] = 1.0
    return base


@click.group()
@click.option('--config', default=os.getenv('HYPERLAB_CONFIG'), help='Path to configuration file (JSON or YAML)')
@click.option('--tol', type=float, default=None, help='Linear tolerance (overrides the configuration)')
@click.option('--seed', type=int, default=None, help='Seed for randomized scans (overrides the configuration)')
@click.option('--json-out', type=click.Path(dir_okay=False), default=None, help='Write the JSON report to a file')
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.pass_context
def cli(ctx: click.Context, config: Optional[str], tol: Optional[float], seed: Optional[int],
        json_out: Optional[str], verbose: bool) -> None:
    """Dirichlet domains, simplicity and parasitic intersections in the hyperboloid model."""
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        lab_config = load_lab_config(config)
    except (ValueError, ValidationError) as e:
        logger.error(f"Error loading configuration: {e}", exc_info=True)
        ctx.exit(EXIT_INPUT)
    ctx.obj = LabContext(lab_config, tol if tol is not None else lab_config.tolerances.linear,
                         seed if seed is not None else lab_config.scans.seed, json_out)


@cli.command('classify')
@click.argument('group_file', type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def classify_command(ctx: click.Context, group_file: str) -> None:
    """Classify every generator of a group."""
    lab: LabContext = ctx.obj

    def action() -> int:
        G = load_group(group_file, lab.config.tolerances.validation)
        lab.emit(classify_generators(G, lab.tol))
        return EXIT_PASS

    run_guarded(ctx, action)


@cli.command('domain')
@click.argument('group_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--base', default=None, help='Base point, comma-separated')
@click.option('--len-max', type=int, default=None, help='Largest word length')
@click.pass_context
def domain_command(ctx: click.Context, group_file: str, base: Optional[str], len_max: Optional[int]) -> None:
    """Compute the Dirichlet domain of a group at a base point."""
    lab: LabContext = ctx.obj

    def action() -> int:
        definition = load_group_definition(group_file)
        G = build_group(definition, lab.config.tolerances.validation)
        definition_base = definition.base
        kwargs = lab.domain_kwargs()
        if len_max is not None:
            kwargs.update(len_max=len_max, len_start=min(kwargs['len_start'], len_max))
        D = compute_domain(G, _base_point(base, definition_base, G.n), **kwargs)
        lab.emit(D.to_report())
        return EXIT_PASS if D.converged else EXIT_NOT_CONVERGED

    run_guarded(ctx, action)


@cli.command('simplicity')
@click.argument('group_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--base', default=None, help='Base point, comma-separated')
@click.pass_context
def simplicity_command(ctx: click.Context, group_file: str, base: Optional[str]) -> None:
    """Count bisectors through every face of the Dirichlet domain."""
    lab: LabContext = ctx.obj

    def action() -> int:
        definition = load_group_definition(group_file)
        G = build_group(definition, lab.config.tolerances.validation)
        definition_base = definition.base
        D = compute_domain(G, _base_point(base, definition_base, G.n), **lab.domain_kwargs())
        report = simplicity_check(D, G, incidence_tol=lab.config.tolerances.incidence, tol=lab.tol)
        domain_report = D.to_report()
        domain_report.simplicity = report
        lab.emit(domain_report)
        for record in report.faces:
            if record.verdict not in (FaceVerdict.SIMPLE, FaceVerdict.IDEAL):
                logger.info(f"Face {record.face_index} (codim {record.codim}) on {record.count} bisectors "
                            f"{record.words}: {record.verdict.value}")
        return EXIT_PASS if report.simple else EXIT_VIOLATION

    run_guarded(ctx, action)


@cli.command('singular')
@click.argument('group_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--triple', required=True, help="Comma-separated words, e.g. 'a,b,a*b'")
@click.option('--trials', type=int, default=None, help='Numeric samples')
@click.option('--exact', is_flag=True, help='Rational evaluation at random integer points')
@click.pass_context
def singular_command(ctx: click.Context, group_file: str, triple: str, trials: Optional[int], exact: bool) -> None:
    """Decide whether a tuple of words gives a rank-deficient B(x) everywhere."""
    lab: LabContext = ctx.obj

    def action() -> int:
        G = load_group(group_file, lab.config.tolerances.validation)
        words = [w.strip() for w in triple.split(',') if w.strip()]
        try:
            mats = [G.word_matrix(w) for w in words]
        except ValueError as e:
            raise click.BadParameter(str(e))
        scans = lab.config.scans
        report = is_singular_tuple(mats, trials=trials or scans.singular_trials, seed=lab.seed,
                                   tol=lab.config.tolerances.rank, klein_radius=scans.klein_radius, exact=exact,
                                   exact_points=scans.exact_points, entry_bits=scans.exact_entry_bits)
        lab.emit(report)
        return EXIT_PASS

    run_guarded(ctx, action)


@cli.command('example1')
@click.option('--lambda', 'lam', type=float, default=2.0, help='Eigenvalue λ > 1')
@click.option('--budget', type=int, default=None, help='Samples per slice')
@click.pass_context
def example1_command(ctx: click.Context, lam: float, budget: Optional[int]) -> None:
    """Sample U_λ and certify the shared geodesic at each witness."""
    lab: LabContext = ctx.obj

    def action() -> int:
        if lam <= 1:
            raise click.BadParameter(f"lambda must be > 1, got {lam}")
        report = example1_scan(lam, budget or lab.config.scans.example1_budget, lab.seed,
                               klein_radius=lab.config.scans.klein_radius, tol=lab.config.tolerances.rank,
                               tracer=lab.tracer)
        lab.emit(report)
        certified = all(w.certificate.get('certified') for w in report.witnesses)
        return EXIT_PASS if report.hits and certified else EXIT_VIOLATION

    run_guarded(ctx, action)


@cli.command('example2')
@click.option('--t', 't', type=float, default=1.0, help='Boost length')
@click.option('--base', default=None, help='Base point, comma-separated')
@click.pass_context
def example2_command(ctx: click.Context, t: float, base: Optional[str]) -> None:
    """Verify the boundary geodesic of the ⟨A, R⟩ domain."""
    lab: LabContext = ctx.obj

    def action() -> int:
        report = example2_verify(t, parse_vector(base, 3), incidence_tol=lab.config.tolerances.incidence)
        lab.emit(report)
        return EXIT_PASS if report.passed else EXIT_VIOLATION

    run_guarded(ctx, action)


@cli.command('cyclic')
@click.option('--lambda', 'lam', type=float, default=2.0, help='Eigenvalue λ > 1, the translation length is log λ')
@click.option('--angle', type=float, default=0.0, help='Rotation angle around the axis')
@click.option('--glide', is_flag=True, help='Use the glide reflection of length log λ instead')
@click.option('--points', type=int, default=5, help='Random base points')
@click.pass_context
def cyclic_command(ctx: click.Context, lam: float, angle: float, glide: bool, points: int) -> None:
    """Simplicity of the Dirichlet tilings of ⟨A⟩ at random base points."""
    lab: LabContext = ctx.obj

    def action() -> int:
        if lam <= 1:
            raise click.BadParameter(f"lambda must be > 1, got {lam}")
        e_plus, e_minus = np.array([1.0, 1.0, 0.0, 0.0]), np.array([1.0, -1.0, 0.0, 0.0])
        if glide:
            A = make_glide_reflection(e_plus, e_minus, np.log(lam), label='A')
        else:
            A = make_loxodromic(e_plus, e_minus, np.log(lam), angle, label='A')
        rng = np.random.default_rng(lab.seed)
        reports, code = [], EXIT_PASS
        for x in random_points_on_H(rng, 3, points, lab.config.scans.klein_radius):
            try:
                if glide:
                    report = glide_domain_verify(A, x, incidence_tol=lab.config.tolerances.incidence,
                                                 len_max=lab.config.domain.len_max)
                    ok = report.passed
                else:
                    report = cyclic_simplicity_experiment(A, x, tol=lab.tol,
                                                          incidence_tol=lab.config.tolerances.incidence,
                                                          len_max=lab.config.domain.len_max)
                    ok = bool(report.simple)
            except NotConverged as e:
                logger.warning(f"Base point {x.tolist()}: {str(e)}")
                reports.append({'base': x.tolist(), 'converged': False})
                if code == EXIT_PASS:
                    code = EXIT_NOT_CONVERGED
                continue
            reports.append({'base': x.tolist(), 'report': report})
            if not ok:
                code = EXIT_VIOLATION
        lab.emit({'glide': glide, 'lambda': lam, 'angle': angle, 'runs': reports})
        return code

    run_guarded(ctx, action)


@cli.command('genericity')
@click.argument('group_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--triples', type=int, default=1000, help='Non-cyclic triples sampled')
@click.option('--points', type=int, default=1, help='Base points per triple')
@click.option('--max-len', type=int, default=3, help='Word length of the enumerated elements')
@click.pass_context
def genericity_command(ctx: click.Context, group_file: str, triples: int, points: int, max_len: int) -> None:
    """Sample triples of elements and count rank-deficient bisector maps."""
    lab: LabContext = ctx.obj

    def action() -> int:
        G = load_group(group_file, lab.config.tolerances.validation)
        report = genericity_scan(G, max_len=max_len, triples_budget=triples, x_budget=points, seed=lab.seed,
                                 tol=lab.config.tolerances.rank, klein_radius=lab.config.scans.klein_radius,
                                 tracer=lab.tracer)
        lab.emit(report)
        return EXIT_PASS if report.hits == 0 and report.details['cartan_passed'] else EXIT_VIOLATION

    run_guarded(ctx, action)


@cli.command('parasitic')
@click.argument('complex_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--tuple-cap', type=int, default=None, help='Largest tuple of sub-faces')
@click.option('--float', 'use_float', is_flag=True, help='Floating-point spans even for rational faces')
@click.pass_context
def parasitic_command(ctx: click.Context, complex_file: str, tuple_cap: Optional[int], use_float: bool) -> None:
    """Enumerate and saturate parasitic intersections of face spans."""
    lab: LabContext = ctx.obj

    def action() -> int:
        definition = load_complex_definition(complex_file)
        C = build_complex(definition)
        options = lab.config.complexify
        exact = options.exact and not use_float
        cache = IntersectionCache(options.cache_size)
        spans = face_spans(C, exact)
        primary = primary_parasitic(C, tuple_cap or options.tuple_cap, exact, spans=spans, cache=cache)
        cartan_data = [(d.face, d.fixed_point) for d in definition.cartan]
        secondary = secondary_parasitic(C, cartan_data, exact, spans=spans, cache=cache, tol=lab.tol)
        report = parasitic_report(saturate(primary, C, spans, exact, cache), saturate(secondary, C, spans, exact, cache))
        lab.emit(report)
        logger.info(f"Intersection cache: {cache.hits} hits, {cache.misses} misses")
        return EXIT_PASS if all(r.misses_hyperbolic for r in secondary) else EXIT_VIOLATION

    run_guarded(ctx, action)


@cli.command('plot')
@click.argument('report_file', type=click.Path(exists=True, dir_okay=False))
@click.option('--plane', default=None, help="Klein section for H^3, e.g. 'k3=0'")
@click.option('--output', '-o', required=True, type=click.Path(dir_okay=False), help='SVG output path')
@click.pass_context
def plot_command(ctx: click.Context, report_file: str, plane: Optional[str], output: str) -> None:
    """Draw a Klein-disk section of a saved domain report."""
    from app.paperlab.plotting import render_domain_svg

    def action() -> int:
        try:
            vertices = render_domain_svg(load_domain_report(report_file), plane, output)
        except ValueError as e:
            logger.error(f"Cannot draw the domain: {str(e)}", exc_info=True)
            return EXIT_INPUT
        click.echo(f"Saved {output} ({len(vertices)} vertices)")
        return EXIT_PASS

    run_guarded(ctx, action)


if __name__ == '__main__':
    cli()
