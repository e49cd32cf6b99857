import json
import logging
import sys
from typing import Any, Dict, Optional

import fire
from pydantic import ValidationError

from lrpossib import analysis, config
from lrpossib import likelihood as lk
from lrpossib import types, utils

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONVERGENCE = 3

FLAGS = (
    "model",
    "params",
    "sample",
    "region",
    "prior",
    "a_star",
    "b_star",
    "philosophy",
    "regime",
    "alpha",
    "resolution",
    "tol",
    "grid",
    "multistarts",
    "seed",
    "threads",
    "format",
)


def _as_list(value: Any) -> list:
    """Fire hands over ``4``, ``(2, 4, 2)`` or ``"2,4,2"`` depending on the shell text."""
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, str):
        return [v.strip() for v in value.split(",") if v.strip()]
    return [value]


def _as_json(value: Any, what: str) -> Any:
    if isinstance(value, str):
        try:
            return json.loads(value)
        except json.JSONDecodeError as error:
            raise lk.InputError(f"{what} is not valid JSON: {error}")
    return value


def _document(
    spec: Optional[str],
    model=None,
    params=None,
    sample=None,
    region=None,
    prior=None,
    a_star=None,
    b_star=None,
    philosophy=None,
    regime=None,
    alpha=None,
    resolution=None,
    tol=None,
    grid=None,
    multistarts=None,
    seed=None,
    threads=None,
    format=None,
) -> Dict[str, Any]:
    """Merge command-line flags into the analysis document read from ``spec``."""
    document: Dict[str, Any] = {}
    if spec is not None:
        with open(spec) as fin:
            document = json.load(fin)
    if model is not None:
        document["model"] = {"name": model, "params": _as_json(params or {}, "--params")}
    if sample is not None:
        document["sample"] = {"data": _as_list(sample)}
    if region is not None:
        regions = _as_json(region, "--region")
        document["regions"] = regions if isinstance(regions, list) else [regions]
    if prior is not None:
        document["prior"] = _as_json(prior, "--prior")
    thresholds = document.setdefault("thresholds", {})
    if a_star is not None:
        thresholds["a_star"] = a_star
    if b_star is not None:
        thresholds["b_star"] = b_star
    optimizer = document.setdefault("optimizer", {})
    for key, value in (
        ("rel_tol", tol),
        ("grid", grid),
        ("multistarts", multistarts),
        ("seed", seed),
        ("threads", threads),
    ):
        if value is not None:
            optimizer[key] = value
    for key, value in (
        ("philosophy", philosophy),
        ("regime", regime),
        ("alpha", alpha),
        ("format", format),
    ):
        if value is not None:
            document[key] = value
    if resolution is not None:
        document.setdefault("grid", {})["resolution"] = resolution
    return document


class CLI:
    """Likelihood-ratio possibility measures for statistical hypotheses.

    Every analysis reads a JSON document (``--spec FILE``); the flags below override or replace
    its fields. Reports go to standard output, diagnostics to standard error.
    """

    def __init__(self, log_level=config.LOG_LEVEL):
        utils.setup_logging(log_level)
        utils.init_sentry()

    def _load(self, spec: Optional[str], flags: Dict[str, Any]) -> analysis.Analysis:
        flags = {key.replace("-", "_"): value for key, value in flags.items()}
        unknown = sorted(set(flags) - set(FLAGS))
        if unknown:
            raise lk.InputError(f"Unknown flags: {unknown}; expected some of {list(FLAGS)}.")
        options = {key: flags.get(key) for key in FLAGS}
        return analysis.Analysis(types.AnalysisSpec.model_validate(_document(spec, **options)))

    @staticmethod
    def _emit(text: str, output: Optional[str]) -> None:
        if output is None:
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(output, "w") as fout:
                fout.write(text)
            logger.info("Report written to '%s'.", output)

    def evidence(self, spec=None, name=None, output=None, **flags):
        """ν of a region and of its complement."""
        run = self._load(spec, flags)
        self._emit(utils.to_json(analysis.evidence(run, name)), output)

    def phi(self, spec=None, name=None, output=None, **flags):
        """The pair ⟨ν(Θ₀), ν(Θ₀ᶜ)⟩ and the accept / reject / maintain decision."""
        run = self._load(spec, flags)
        self._emit(utils.to_json(analysis.phi(run, name)), output)

    def ratio(self, spec=None, first=None, second=None, output=None, **flags):
        """ν(first) / ν(second)."""
        run = self._load(spec, flags)
        self._emit(utils.to_json(analysis.ratio(run, first, second)), output)

    def contour(self, spec=None, name=None, output=None, **flags):
        """The level set of λ at α, or at ν of a region; CSV is one row per grid point."""
        run = self._load(spec, flags)
        report, result = analysis.contour(run, name)
        if run.spec.format == "csv":
            self._emit(utils.to_csv(*analysis.contour_rows(result)), output)
        else:
            self._emit(utils.to_json(report), output)

    def bayes_bound(self, spec=None, name=None, output=None, **flags):
        """Posterior probability of a region against its possibility."""
        run = self._load(spec, flags)
        self._emit(utils.to_json(analysis.bayes_bound(run, name)), output)

    def hwe(self, counts=None, grid=None, pairs=None, polylines=False, format=None, output=None):
        """Hardy-Weinberg evidence for one count triple (``--counts``) or every triple of size m
        (``--grid m``)."""
        if (counts is None) == (grid is None):
            raise lk.InputError("Pass exactly one of --counts y1,y2,y3 or --grid m.")
        if counts is not None:
            samples = [lk.parse_counts(",".join(str(v) for v in _as_list(counts)))]
        else:
            chosen = [tuple(int(v) for v in p) for p in _as_json(pairs, "--pairs")] if pairs else ()
            samples = lk.hwe_sample_grid(int(grid), chosen)
        fmt = format or ("json" if counts is not None else "csv")
        if polylines:
            rows = lk.hwe_figure_data(samples)
            reports = [row.report for row in rows]
            models = [analysis.hwe_report_model(r.report, r.polylines) for r in rows]
        else:
            reports = [lk.hwe_report(s) for s in samples]
            models = [analysis.hwe_report_model(r) for r in reports]
        if fmt == "csv":
            self._emit(utils.to_csv(*analysis.hwe_rows(reports)), output)
        elif counts is not None:
            self._emit(utils.to_json(models[0]), output)
        else:
            self._emit(utils.to_json(models), output)


def main(argv=None) -> int:
    try:
        fire.Fire(CLI, command=argv)
    except fire.core.FireExit as error:
        return EXIT_OK if not error.code else EXIT_INPUT
    except (lk.InputError, lk.RegimeError, lk.UnsupportedError, ValidationError) as error:
        logger.error("%s: %s", type(error).__name__, error)
        return EXIT_INPUT
    except (json.JSONDecodeError, OSError) as error:
        logger.error("Cannot read the analysis document: %s", error)
        return EXIT_INPUT
    except lk.ConvergenceError as error:
        logger.error("%s: %s", type(error).__name__, error)
        return EXIT_CONVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
