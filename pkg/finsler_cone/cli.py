# cli.py - Command line frontend for finsler-cone experiments

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ValidationError

from finsler_cone.core.errors import ConfigError, FinslerConeError
from finsler_cone.models.catalog import catalog_entries, describe, load_model
from finsler_cone.models.slit_plane import make_product_slit_plane
from finsler_cone.schemas.boundary import Verdict
from finsler_cone.schemas.geodesics import InitialData
from finsler_cone.schemas.geometry import ToleranceConfig
from finsler_cone.schemas.lightspace import CandidateSpec, CauchySurface, FamilySpec, PairSpec
from finsler_cone.schemas.run import RunConfig
from finsler_cone.services.acceptance import verify_paper
from finsler_cone.services.boundary_analysis import classify_boundary_convexity
from finsler_cone.services.connection import christoffel, spray
from finsler_cone.services.exporters import convexity_frame, render_trajectory
from finsler_cone.services.fermat import fermat_boundary_convexity
from finsler_cone.services.geodesic_flow import batch_integrate, integrate_both_ways
from finsler_cone.services.geometry_core import fundamental_tensor
from finsler_cone.services.lightspace import (
    cone_surface_construction,
    convexity_probe_S,
    detect_nonhausdorff,
    glue_charts,
    sample_chart_boundary,
    sample_chart_interior,
    slit_plane_construction,
)
from finsler_cone.utils.device_utils import get_device_info

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONCAVE = 2
EXIT_INDETERMINATE = 3
EXIT_CHECKS_FAILED = 4

COMMON_KEYS = ("command", "model", "tol", "out", "seed", "jobs", "format", "func")


class FinslerConeCLI:
    """Command line interface for boundary, geodesic and lightspace experiments."""

    def run(self, args=None) -> int:
        """Run the CLI with the given arguments and return the exit code."""
        parser = self._create_parser()
        args = parser.parse_args(args)

        if not hasattr(args, "func"):
            parser.print_help()
            return EXIT_OK
        cfg = self._run_config(args)
        logger.debug(f"run config: {cfg.model_dump_json()}")
        try:
            return args.func(cfg)
        except (FinslerConeError, ValidationError, ValueError, OSError) as e:
            logger.error(f"{cfg.command} failed: {e}")
            self._report_error(e, cfg.command)
            return EXIT_ERROR

    def _create_parser(self) -> argparse.ArgumentParser:
        """Create the argument parser."""
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--model", help="Builtin model name or path to a JSON model definition")
        common.add_argument("--out", help="Output file (default: stdout)")
        common.add_argument("--tol", type=float, help="Override the classification and verdict tolerances")
        common.add_argument("--seed", type=int, default=0, help="Seed for sampled directions")
        common.add_argument("--jobs", type=int, default=1, help="Worker threads")
        common.add_argument("--format", choices=["json", "csv", "jsonl"], default=None, help="Output format")

        parser = argparse.ArgumentParser(
            prog="finsler-cone",
            description="Boundary convexity, geodesics and lightspaces of cone structures",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  finsler-cone catalog list
  finsler-cone classify-boundary --model ads_conformal --grid 16 --dirs 2
  finsler-cone shoot --model ads --point 0,2,0.3 --velocity 1,5,0 --t-max 10 --out escape.jsonl
  finsler-cone detect-nonhausdorff --model product_cone_surface --construction cone_surface
  finsler-cone verify-paper --only ads --out report.json
""",
        )
        subparsers = parser.add_subparsers(title="commands", dest="command")

        # Boundary convexity
        classify_parser = subparsers.add_parser("classify-boundary", parents=[common],
                                                help="Sample II over boundary points and tangent directions")
        classify_parser.add_argument("--kind", choices=["light", "time", "space"], default="light")
        classify_parser.add_argument("--grid", type=int, default=50, help="Number of boundary points")
        classify_parser.add_argument("--dirs", type=int, default=32, help="Tangent directions per point")
        classify_parser.add_argument("--fermat", action="store_true",
                                     help="Classify the spatial boundary for the Fermat metric instead")
        classify_parser.set_defaults(func=self._handle_classify_boundary)

        # Geodesic shooting
        shoot_parser = subparsers.add_parser("shoot", parents=[common], help="Integrate geodesics and export them")
        shoot_parser.add_argument("--point", help="Comma separated initial point")
        shoot_parser.add_argument("--velocity", help="Comma separated initial velocity")
        shoot_parser.add_argument("--initial", help="JSON file with a list of {point, velocity} records")
        shoot_parser.add_argument("--t-max", type=float, default=10.0, help="Affine parameter horizon")
        shoot_parser.add_argument("--both-ways", action="store_true", help="Also integrate into the past")
        shoot_parser.set_defaults(func=self._handle_shoot)

        # Lightspace charts
        lightspace_parser = subparsers.add_parser("sample-lightspace", parents=[common],
                                                  help="Sample and glue the charts of the lightspace")
        lightspace_parser.add_argument("--level", type=float, default=0.0, help="Cauchy surface t = level")
        lightspace_parser.add_argument("--grid", type=int, default=9, help="Surface grid points")
        lightspace_parser.add_argument("--dirs", type=int, default=8, help="Directions per point")
        lightspace_parser.add_argument("--boundary-grid", type=int, default=8, help="Boundary points")
        lightspace_parser.set_defaults(func=self._handle_sample_lightspace)

        # Non-Hausdorff detection
        detect_parser = subparsers.add_parser("detect-nonhausdorff", parents=[common],
                                              help="Look for a family converging to two distinct geodesics")
        detect_parser.add_argument("--construction", choices=["cone_surface", "slit_plane"],
                                   help="Builtin family and candidates")
        detect_parser.add_argument("--family", help="JSON FamilySpec file")
        detect_parser.add_argument("--candidates", help="JSON file with two CandidateSpec records")
        detect_parser.add_argument("--threshold", type=float, help="Certificate distance threshold")
        detect_parser.add_argument("--horizon", type=float, default=2.0, help="Integration horizon")
        detect_parser.set_defaults(func=self._handle_detect_nonhausdorff)

        # Fermat probes
        fermat_parser = subparsers.add_parser("fermat-probe", parents=[common],
                                              help="Check whether pairs of S are joined by minimizing F-geodesics")
        fermat_parser.add_argument("--pairs", required=True, help="JSON file with a list of PairSpec records")
        fermat_parser.add_argument("--budget", type=int, default=3, help="Refinement budget")
        fermat_parser.add_argument("--fan", type=int, default=64, help="Shooting directions")
        fermat_parser.set_defaults(func=self._handle_fermat_probe)

        # Acceptance suite
        verify_parser = subparsers.add_parser("verify-paper", parents=[common],
                                              help="Run the acceptance checks (exit 4 on failure)")
        verify_parser.add_argument("--only", action="append",
                                   help="Check name or tag; repeat or comma separate")
        verify_parser.set_defaults(func=self._handle_verify_paper)

        # Catalog
        catalog_parser = subparsers.add_parser("catalog", help="Builtin model catalog")
        catalog_subparsers = catalog_parser.add_subparsers(title="catalog commands")
        catalog_list_parser = catalog_subparsers.add_parser("list", parents=[common], help="List builtin models")
        catalog_list_parser.set_defaults(func=self._handle_catalog_list)
        catalog_describe_parser = catalog_subparsers.add_parser("describe", parents=[common],
                                                                help="Describe a builtin model")
        catalog_describe_parser.add_argument("name", help="Builtin model name")
        catalog_describe_parser.set_defaults(func=self._handle_catalog_describe)

        # Tangent inspection
        inspect_parser = subparsers.add_parser("inspect", parents=[common],
                                               help="Fundamental tensor, Christoffel symbols and spray at (p, v)")
        inspect_parser.add_argument("--point", required=True, help="Comma separated point")
        inspect_parser.add_argument("--velocity", required=True, help="Comma separated vector")
        inspect_parser.set_defaults(func=self._handle_inspect)

        return parser

    # Plumbing
    def _run_config(self, args: argparse.Namespace) -> RunConfig:
        values = vars(args)
        options = {k: v for k, v in values.items() if k not in COMMON_KEYS}
        return RunConfig(
            command=args.command,
            model=values.get("model"),
            tol=values.get("tol"),
            out=values.get("out"),
            seed=values.get("seed", 0),
            jobs=values.get("jobs", 1),
            format=values.get("format") or "json",
            options=options,
        )

    @staticmethod
    def _tolerances(cfg: RunConfig) -> ToleranceConfig:
        base = ToleranceConfig.from_settings()
        return base.overridden(cfg.tol) if cfg.tol is not None else base

    @staticmethod
    def _model(cfg: RunConfig):
        if not cfg.model:
            raise ConfigError(f"{cfg.command} needs --model")
        return load_model(cfg.model)

    @staticmethod
    def _vector(text: Optional[str], label: str) -> List[float]:
        if not text:
            raise ConfigError(f"--{label} is required")
        try:
            return [float(c) for c in text.split(",")]
        except ValueError as e:
            raise ConfigError(f"--{label} must be comma separated numbers: {e}") from e

    @staticmethod
    def _read_json(path: str) -> Any:
        return json.loads(Path(path).read_text())

    @staticmethod
    def _write(cfg: RunConfig, text: str) -> None:
        if cfg.out:
            path = Path(cfg.out)
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
            logger.info(f"{cfg.command}: wrote {path}")
        else:
            sys.stdout.write(text)

    def _emit(self, cfg: RunConfig, payload: Any) -> None:
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json")
        self._write(cfg, json.dumps(payload, sort_keys=True, indent=2) + "\n")

    @staticmethod
    def _report_error(error: Exception, command: Optional[str]) -> None:
        record = {"error": type(error).__name__, "message": str(error), "command": command}
        sys.stderr.write(json.dumps(record, sort_keys=True) + "\n")

    # Handlers
    def _handle_classify_boundary(self, cfg: RunConfig) -> int:
        """Handle classify-boundary: exit 0 convex, 2 concave entries, 3 indeterminate only."""
        model = self._model(cfg)
        opts = cfg.options
        tol = self._tolerances(cfg)
        if opts["fermat"]:
            report = fermat_boundary_convexity(model, opts["grid"], opts["dirs"], tol, cfg.seed, cfg.jobs)
        else:
            report = classify_boundary_convexity(model, opts["kind"], opts["grid"], opts["dirs"], None, tol,
                                                 cfg.seed, cfg.jobs)
        if cfg.format == "csv":
            self._write(cfg, convexity_frame(report).write_csv())
        else:
            self._emit(cfg, report)
        verdict = report.summary.verdict
        if verdict == Verdict.STRICTLY_CONCAVE:
            return EXIT_CONCAVE
        if verdict == Verdict.INDETERMINATE:
            return EXIT_INDETERMINATE
        return EXIT_OK

    def _handle_shoot(self, cfg: RunConfig) -> int:
        """Handle shoot: JSONL (default) or CSV trajectories."""
        model = self._model(cfg)
        opts = cfg.options
        tol = self._tolerances(cfg)
        if opts["initial"]:
            records = self._read_json(opts["initial"])
            data = [InitialData(**record) for record in records]
        else:
            data = [InitialData(point=self._vector(opts["point"], "point"),
                                velocity=self._vector(opts["velocity"], "velocity"))]
        if opts["both_ways"]:
            solutions = [integrate_both_ways(model, d.p, d.v, opts["t_max"], tol=tol) for d in data]
        else:
            solutions = batch_integrate(model, data, opts["t_max"], jobs=cfg.jobs, tol=tol)
        fmt = "csv" if cfg.format == "csv" else "jsonl"
        if cfg.out and len(solutions) > 1:
            base = Path(cfg.out)
            for k, solution in enumerate(solutions):
                path = base.with_name(f"{base.stem}_{k}{base.suffix}")
                path.parent.mkdir(parents=True, exist_ok=True)
                path.write_text(render_trajectory(solution, fmt))
            logger.info(f"shoot: wrote {len(solutions)} trajectories next to {base}")
        else:
            self._write(cfg, "".join(render_trajectory(s, fmt) for s in solutions))
        return EXIT_OK

    def _handle_sample_lightspace(self, cfg: RunConfig) -> int:
        """Handle sample-lightspace: both interior charts, both boundary charts and their gluing."""
        model = self._model(cfg)
        opts = cfg.options
        tol = self._tolerances(cfg)
        surface = CauchySurface(level=opts["level"])
        charts: Dict[int, list] = {}
        for sign in (1, -1):
            charts[sign] = (sample_chart_interior(model, surface, opts["grid"], opts["dirs"], sign, tol, cfg.seed)
                            + sample_chart_boundary(model, surface, sign, opts["boundary_grid"], tol=tol,
                                                    seed=cfg.seed))
        glued = glue_charts(charts[1], charts[-1])
        self._emit(cfg, {
            "model": model.name,
            "surface": surface.model_dump(),
            "plus": [q.model_dump(mode="json") for q in charts[1]],
            "minus": [q.model_dump(mode="json") for q in charts[-1]],
            "glued": glued.model_dump(mode="json"),
        })
        return EXIT_OK

    def _handle_detect_nonhausdorff(self, cfg: RunConfig) -> int:
        """Handle detect-nonhausdorff: certificate JSON, or "none"."""
        opts = cfg.options
        tol = self._tolerances(cfg)
        eps = None
        if opts["construction"] == "slit_plane":
            model = load_model(cfg.model) if cfg.model else make_product_slit_plane()
            family, eps, candidates = slit_plane_construction(model)
            threshold = opts["threshold"] or 0.25
        else:
            model = self._model(cfg)
            if opts["construction"] == "cone_surface":
                family, candidates = cone_surface_construction()
            elif opts["family"] and opts["candidates"]:
                family = FamilySpec(**self._read_json(opts["family"]))
                candidates = [CandidateSpec(**c) for c in self._read_json(opts["candidates"])]
            else:
                raise ConfigError("detect-nonhausdorff needs --construction or both --family and --candidates")
            threshold = opts["threshold"] or 1e-4
        cert = detect_nonhausdorff(model, family, candidates, opts["horizon"], threshold, eps, tol=tol, jobs=cfg.jobs)
        if cert is None:
            self._write(cfg, "none\n")
        else:
            self._emit(cfg, cert)
        return EXIT_OK

    def _handle_fermat_probe(self, cfg: RunConfig) -> int:
        """Handle fermat-probe."""
        model = self._model(cfg)
        opts = cfg.options
        pairs = [PairSpec(**p) for p in self._read_json(opts["pairs"])]
        results = convexity_probe_S(model, pairs, budget=opts["budget"], fan=opts["fan"],
                                    tol=self._tolerances(cfg), jobs=cfg.jobs)
        self._emit(cfg, [r.model_dump(mode="json") for r in results])
        return EXIT_OK

    def _handle_verify_paper(self, cfg: RunConfig) -> int:
        """Handle verify-paper: --tol replaces the acceptance tolerance of every check."""
        only = [token.strip() for group in cfg.options["only"] or [] for token in group.split(",") if token.strip()]
        report = verify_paper(only or None, tolerance_override=cfg.tol, seed=cfg.seed, jobs=cfg.jobs)
        self._emit(cfg, report)
        if not report.passed:
            self._report_error(ConfigError(f"failed checks: {', '.join(report.failed)}"), cfg.command)
            return EXIT_CHECKS_FAILED
        return EXIT_OK

    def _handle_catalog_list(self, cfg: RunConfig) -> int:
        """Handle catalog list."""
        self._emit(cfg, [entry.model_dump(mode="json") for entry in catalog_entries()])
        return EXIT_OK

    def _handle_catalog_describe(self, cfg: RunConfig) -> int:
        """Handle catalog describe."""
        self._emit(cfg, describe(cfg.options["name"]))
        return EXIT_OK

    def _handle_inspect(self, cfg: RunConfig) -> int:
        """Handle inspect."""
        model = self._model(cfg)
        tol = self._tolerances(cfg)
        p = self._vector(cfg.options["point"], "point")
        v = self._vector(cfg.options["velocity"], "velocity")
        tensor = fundamental_tensor(model, p, v, tol)
        self._emit(cfg, {
            "model": model.name,
            "sample": tensor.base.model_dump(mode="json"),
            "fundamental_tensor": tensor.matrix,
            "determinant": tensor.determinant,
            "christoffel": christoffel(model, p, v, tol).gamma,
            "spray": spray(model, p, v, tol).coeffs,
            "device": get_device_info(),
        })
        return EXIT_OK
