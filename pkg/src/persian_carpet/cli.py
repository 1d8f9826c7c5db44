"""
CLI for the Persian carpet toolkit.

Usage:
    persian-carpet tree check --kind HP --weights 1,2,2,1
    persian-carpet hurwitz check --degree 3 --simple 2,2,3
    persian-carpet family derive --lambda 1e-3
    persian-carpet family pcf --period 4
    persian-carpet moduli solve --weights 1,2,2,1 --c 1.0
    persian-carpet render dynamical --lambda 1e-3 --center 0.5,0 --width 5 --px 1024
    persian-carpet reproduce fig2a

Every command prints one JSON object on standard output. Errors exit with
status 2 and print {"error": ..., "message": ...} instead.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence

import numpy as np

from . import family, hurwitz, moduli, render, symbolic, trees
from .config import COMMANDS, JobConfig, command_outputs, command_params, load_config
from .errors import ConfigError, PersianCarpetError
from .numerics import SpherePoint, critical_points

logger = logging.getLogger(__name__)

FIGURES: Dict[str, Dict[str, Any]] = {
    "fig2a": {"command": "render dynamical", "lambda": 1e-3 + 0j, "center": 0.5 + 0j, "width": 5.0},
    "fig2b": {"command": "render dynamical", "lambda": 0j, "center": 0.5 + 0j, "width": 5.0},
    "fig8a": {"command": "render parameter", "center": 0j, "width": 0.02},
}


# =============================================================================
# JSON
# =============================================================================

def to_jsonable(value: Any) -> Any:
    """Complex numbers become [re, im], ∞ becomes "inf", Fractions become strings."""
    if isinstance(value, SpherePoint):
        if value.is_infinity:
            return "inf"
        z = value.to_complex()
        return [z.real, z.imag]
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def dumps(summary: Dict) -> str:
    return json.dumps(to_jsonable(summary), sort_keys=True)


# =============================================================================
# HANDLERS
# =============================================================================

def _load_tree(source: str) -> trees.WeightedDynamicalTree:
    """Inline JSON when the value starts with '{', else a path to a JSON file."""
    text = source.strip()
    if not text.startswith("{"):
        text = Path(text).read_text()
    return trees.tree_from_json(text)


def cmd_tree_check(job: JobConfig) -> Dict:
    source = job.get("tree")
    if source is not None:
        if job.get("weights") is not None:
            raise ConfigError("give either --tree or --weights, not both")
        tree = _load_tree(source)
        kind = tree.kind
    else:
        kind = job.get("kind").upper()
        tree = trees.builtin_trees(kind, job.require("weights"))
    weights = tree.weights
    report = trees.is_unobstructed(tree)
    out = {"kind": kind, "edges": tree.edge_count, "weights": list(weights)}
    out.update(report.to_dict())
    if kind is None:
        return out
    if kind == "HP":
        h1, dhat = trees.check_h1(*weights[:3])
        out["h1"] = h1
        out["dhat"] = dhat
        out["characteristic_root"] = trees.hp_characteristic_root(*weights)
        if h1:
            out["map_degree"] = trees.map_degree(*weights)
    elif kind == "HQ":
        out["closed_form_eigenvalue"] = 1.0 / weights[0] + 1.0 / weights[1]
    else:
        out["closed_form_eigenvalue"] = (1.0 / (weights[0] * weights[1] * weights[2])) ** (1.0 / 3.0)
    return out


def cmd_hurwitz_check(job: JobConfig) -> Dict:
    d = job.require("degree")
    simple = job.get("simple")
    rows = job.get("rows")
    if (simple is None) == (rows is None):
        raise ConfigError("give exactly one of --simple and --rows")
    out: Dict[str, Any] = {"degree": d}
    if simple is not None:
        if len(simple) not in (2, 3):
            raise ConfigError("--simple takes two or three local degrees")
        data = hurwitz.BranchData(d, tuple((di,) + (1,) * (d - di) for di in simple))
        if len(simple) == 3:
            out["h1prime"] = hurwitz.check_h1prime(d, *simple)
        try:
            out["construction"] = hurwitz.realize_simple(d, *simple).to_dict()
        except PersianCarpetError as exc:
            out["construction"] = None
            out["construction_error"] = str(exc)
    else:
        data = hurwitz.BranchData.parse(d, rows)
    out["rows"] = [list(r) for r in data.rows]
    out["euler_defect"] = data.euler_defect()
    witness = hurwitz.find_realization(data)
    out["realizable"] = witness is not None
    out["witness"] = None if witness is None else [p.cycle_notation() for p in witness]
    return out


def cmd_family_derive(job: JobConfig) -> Dict:
    lam = job.get("lambda")
    carpet = family.build_f_lambda(lam)
    a1, b1p = family.derive_coefficients(lam)
    a1_closed, b1p_closed = family.closed_form_coefficients(lam)
    return {
        "lambda": lam,
        "lambda_prime": carpet.free_critical,
        "a1": a1,
        "b1_prime": b1p,
        "a1_closed_form": a1_closed,
        "b1_prime_closed_form": b1p_closed,
        "numerator": list(carpet.map.numerator.coefficients),
        "denominator": list(carpet.map.denominator.coefficients),
        "degree": carpet.degree,
        "verified": carpet.verified,
        "cycle_residuals": carpet.cycle_residuals(),
        "critical_points": [{"point": p, "multiplicity": m} for p, m in critical_points(carpet.map)],
    }


def cmd_family_pcf(job: JobConfig) -> Dict:
    period = job.get("period")
    result = family.solve_pcf_parameter(period, job.get("selector"))
    return {
        "period": period,
        "c": result.c,
        "exact_period_roots": len(result.all_roots),
        "expected_count": family.exact_period_count(period),
        "return_times": result.return_times(),
        "roots": result.all_roots,
    }


def cmd_family_ladder(job: JobConfig) -> Dict:
    return family.magnitude_ladder_check(job.get("lambda"), job.get("k"), job.get("samples")).to_dict()


def cmd_family_orbit(job: JobConfig) -> Dict:
    carpet = family.build_f_lambda(job.get("lambda"))
    z0 = job.get("z0")
    if z0 is None:
        z0 = carpet.free_critical
    result = family.orbit(carpet.map, z0, job.get("steps"))
    out = {"lambda": carpet.lam, "z0": z0, "degenerate": result.degenerate, "points": result.points}
    if "csv" in job.outputs:
        result.write_csv(job.outputs["csv"])
        out["csv"] = job.outputs["csv"]
    return out


def cmd_family_mcmullen(job: JobConfig) -> Dict:
    lam = job.get("lambda")
    if job.get("modified"):
        f = family.build_modified_mcmullen(lam)
        out = {"lambda": lam, "modified": True, "degree": f.degree}
    else:
        g = family.build_mcmullen(job.get("d_inf"), job.get("d_0"), job.get("c"), lam)
        f = g.map
        out = g.to_dict()
    out["critical_points"] = [{"point": p, "multiplicity": m} for p, m in critical_points(f)]
    return out


def cmd_symbolic_words(job: JobConfig) -> Dict:
    n = job.get("depth")
    words = symbolic.admissible_words(n)
    out = {"depth": n, "count": len(words), "matrix_count": symbolic.admissible_count(n)}
    if job.get("list"):
        out["words"] = ["".join(map(str, w)) for w in words]
    return out


def cmd_symbolic_quotient(job: JobConfig) -> Dict:
    s = symbolic.Word.parse(job.require("s"))
    t = symbolic.Word.parse(job.require("sp"))
    bound = symbolic.word_distance(s, t, job.get("depth"))
    return {
        "s": str(s.normalized()),
        "sp": str(t.normalized()),
        "equivalent": symbolic.equivalent(s, t),
        "witness": symbolic.equivalence_witness(s, t),
        "distance": {"lo": bound.lo, "hi": bound.hi, "exact": symbolic.exact_distance(s, t)},
        "in_s_alpha": [symbolic.in_s_alpha(s), symbolic.in_s_alpha(t)],
    }


def cmd_symbolic_model(job: JobConfig) -> Dict:
    model = symbolic.build_interval_model()
    out: Dict[str, Any] = {
        "base": [list(b) for b in model.base],
        "pieces": {f"{i}{j}": list(iv) for (i, j), iv in sorted(model.pieces.items())},
    }
    word = job.get("word")
    if word is not None:
        out["word"] = word
        out["cylinder"] = list(symbolic.itinerary_cylinder(tuple(int(c) for c in word), model))
    x = job.get("x")
    if x is not None:
        itinerary = model.itinerary(x, job.get("length"))
        out["x"] = x
        out["itinerary"] = None if itinerary is None else "".join(map(str, itinerary))
        out["image"] = model.apply(x)
    return out


def cmd_moduli_solve(job: JobConfig) -> Dict:
    weights = job.get("weights")
    if len(weights) != 4:
        raise ConfigError(f"moduli solve needs four weights, got {len(weights)}")
    solution = moduli.solve_moduli(*weights, C=job.get("c"))
    levels = moduli.levels_from_moduli(solution, job.get("margin"))
    out = solution.to_dict()
    out["levels"] = levels.to_dict()
    return out


def cmd_moduli_bounds(job: JobConfig) -> Dict:
    n, n_prime = job.get("n"), job.get("n_prime")
    lam, bound = moduli.annulus_disk_bound(n, n_prime)
    check = moduli.mcmullen_annulus_check(n, n_prime, job.get("samples"))
    eps, c = job.get("eps"), job.get("c")
    return {
        "annulus": {"lambda": lam, "bound": bound},
        "check": check.to_dict(),
        "separating": {"eps": eps, "C": c, "bound": moduli.separating_circle_bound(eps, c)},
    }


def _finish_render(job: JobConfig, grid: render.BasinGrid, default_image: str) -> Dict:
    image = Path(job.outputs.get("image", default_image))
    _, components = render.connected_components(grid)
    render.write_image(grid, image)
    extra = {"command": job.command, "seed": job.seed, "undecided_components": components,
             "params": job.to_dict()}
    sidecar = render.write_sidecar(grid, image, to_jsonable(extra))
    summary = grid.to_dict()
    summary.update({"image": str(image), "sidecar": str(sidecar), "undecided_components": components})
    return summary


def cmd_render_dynamical(job: JobConfig) -> Dict:
    carpet = family.build_f_lambda(job.get("lambda"))
    px = job.get("px")
    viewport = render.Viewport.square(job.get("center"), job.get("width"), px, job.get("chart"))
    grid = render.render_dynamical(carpet.map, carpet.cycle, viewport, job.get("max_iter"),
                                   job.get("trap_radius"), job.get("tile_size"), job.get("workers"))
    grid.metadata["lambda"] = [carpet.lam.real, carpet.lam.imag]
    return _finish_render(job, grid, "dynamical.ppm")


def cmd_render_parameter(job: JobConfig) -> Dict:
    viewport = render.Viewport.square(job.get("center"), job.get("width"), job.get("px"))
    grid = render.render_parameter(viewport, job.get("max_iter"), job.get("trap_radius"),
                                   job.get("tile_size"), job.get("workers"))
    return _finish_render(job, grid, "parameter.ppm")


def reproduce_config(figure: str, px: Optional[int] = None, workers: Optional[int] = None,
                     image: Optional[str] = None) -> JobConfig:
    """Canned render config of a named figure."""
    if figure not in FIGURES:
        raise ConfigError(f"unknown figure {figure!r}; expected one of {sorted(FIGURES)}")
    recipe = dict(FIGURES[figure])
    command = recipe.pop("command")
    recipe["px"] = px if px is not None else command_params("reproduce")["px"].default
    if workers is not None:
        recipe["workers"] = workers
    return JobConfig(command, recipe, {"image": image or f"{figure}.ppm"})


def cmd_reproduce(job: JobConfig) -> Dict:
    figure = job.require("figure")
    inner = reproduce_config(figure, job.get("px"), job.get("workers"), job.outputs.get("image"))
    summary = HANDLERS[inner.command](inner)
    summary["figure"] = figure
    return summary


HANDLERS: Dict[str, Callable[[JobConfig], Dict]] = {
    "tree check": cmd_tree_check,
    "hurwitz check": cmd_hurwitz_check,
    "family derive": cmd_family_derive,
    "family pcf": cmd_family_pcf,
    "family ladder": cmd_family_ladder,
    "family orbit": cmd_family_orbit,
    "family mcmullen": cmd_family_mcmullen,
    "symbolic words": cmd_symbolic_words,
    "symbolic quotient": cmd_symbolic_quotient,
    "symbolic model": cmd_symbolic_model,
    "moduli solve": cmd_moduli_solve,
    "moduli bounds": cmd_moduli_bounds,
    "render dynamical": cmd_render_dynamical,
    "render parameter": cmd_render_parameter,
    "reproduce": cmd_reproduce,
}


def run(job: JobConfig) -> Dict:
    """Execute one job and return its JSON-ready summary."""
    logger.debug("running %r with %s", job.command, job.to_dict())
    summary = HANDLERS[job.command](job)
    summary = dict(summary)
    summary.setdefault("command", job.command)
    summary.setdefault("seed", job.seed)
    return to_jsonable(summary)


# =============================================================================
# ARGUMENTS
# =============================================================================

def _add_leaf(subparsers, name: str, command: str) -> None:
    leaf = subparsers.add_parser(name, help=command)
    if command == "reproduce":
        leaf.add_argument("figure", choices=sorted(FIGURES), help="figure to render")
    leaf.add_argument("--config", help="JSON job file; flags override its values")
    leaf.add_argument("--seed", type=int, default=None, help="seed recorded with the job")
    leaf.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    for param in COMMANDS[command]["params"]:
        if command == "reproduce" and param.name == "figure":
            continue
        leaf.add_argument(param.flag, dest="param_" + param.name, default=None, help=param.help)
    for output in command_outputs(command):
        leaf.add_argument("--" + output, dest="output_" + output, default=None, help=f"{output} output path")
    leaf.set_defaults(command=command)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="persian-carpet",
        description="Persian carpet rational maps: obstructions, realizations, explicit maps and renders",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  persian-carpet tree check --kind HP --weights 1,2,2,1
  persian-carpet family derive --lambda 1e-3
  persian-carpet render dynamical --lambda 1e-3 --px 512 --image carpet.png
  persian-carpet reproduce fig2b --px 256
        """,
    )
    groups = parser.add_subparsers(dest="group", metavar="command")
    groups.required = True
    nested: Dict[str, Any] = {}
    for command in COMMANDS:
        if command == "reproduce":
            _add_leaf(groups, "reproduce", command)
            continue
        group, action = command.split(" ", 1)
        if group not in nested:
            sub = groups.add_parser(group, help=f"{group} commands")
            nested[group] = sub.add_subparsers(dest="action", metavar="action")
            nested[group].required = True
        _add_leaf(nested[group], action, command)
    return parser


def job_from_args(args: argparse.Namespace) -> JobConfig:
    base = load_config(args.config, args.command)
    overrides = {k[len("param_"):]: v for k, v in vars(args).items() if k.startswith("param_")}
    if args.command == "reproduce":
        overrides["figure"] = args.figure
    job = base.merged(overrides)
    outputs = dict(job.outputs)
    outputs.update({k[len("output_"):]: v for k, v in vars(args).items()
                    if k.startswith("output_") and v is not None})
    seed = job.seed if args.seed is None else args.seed
    return JobConfig(job.command, job.params, outputs, seed)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        summary = run(job_from_args(args))
    except (PersianCarpetError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}, sort_keys=True))
        return 2
    print(dumps(summary))
    return 0


if __name__ == "__main__":
    sys.exit(main())
