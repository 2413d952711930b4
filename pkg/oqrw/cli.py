"""
Command-line front end.

Every command builds its whole output in memory and writes it at the end,
so a failing command never leaves a partial file behind. Exit codes:

    0  success / criterion holds / accessible
    1  validation failure / criterion fails / not accessible / shape mismatch
    2  unreadable input or invalid parameter
    3  inconclusive verdict
    4  criterion undefined for the projection
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from oqrw.blocks import BlockProjection
from oqrw.evolution import find_invariant_state, position_distribution, trajectory, worker_pool
from oqrw.exceptions import InvalidParameterError, NormalizationError, OQRWError
from oqrw.qmc import MarkovPair, qmc_evaluate
from oqrw.recurrence import Verdict, communicates, diagnose, is_accessible
from oqrw.scenarios import ring_condition_a_scenario, ring_scenario, two_site_part2_scenario, two_site_scenario
from oqrw.utils.config import RunConfig, load_defaults
from oqrw.utils.exceptions import make_error_response
from oqrw.utils.io import (
    distribution_csv,
    format_number,
    load_observable,
    load_state,
    load_walk,
    observable_to_document,
    read_document,
    render_csv,
    render_document,
    save_document,
    series_csv,
    state_to_document,
    trajectory_csv,
    walk_from_document,
    walk_to_document,
    write_text_atomic,
)
from oqrw.utils.logging import configure_logging
from oqrw.utils.parser import OQRWArgParser
from oqrw.walk_model import ValidationMode, validate_kraus

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3
EXIT_PRECONDITION = 4

VERDICT_EXIT = {
    Verdict.HOLDS: EXIT_OK,
    Verdict.FAILS: EXIT_FAILED,
    Verdict.INCONCLUSIVE: EXIT_INCONCLUSIVE,
}


def _emit(config: RunConfig, text: str) -> None:
    if config.out:
        write_text_atomic(config.out, text)
        logger.info(f"wrote {config.out}")
    else:
        sys.stdout.write(text)


def _json(document) -> str:
    return render_document(document, "json")


def _walk(config: RunConfig):
    return load_walk(config.inputs["walk"], kraus_tol=config.kraus_tol)


def _pair(config: RunConfig):
    family = _walk(config)
    state = load_state(config.inputs["state"], family=family, trace_tol=config.trace_tol)
    return family, MarkovPair(family=family, state=state, kind=config.kind)


def cmd_validate(config: RunConfig) -> int:
    document = read_document(config.inputs["walk"])
    family = walk_from_document(document, kraus_tol=config.kraus_tol, validation=ValidationMode.RELAXED)
    report = validate_kraus(family, config.kraus_tol)
    if config.fmt == "json":
        _emit(config, _json(report.to_dict()))
    else:
        rows = [(report.label(j), r) for j, r in sorted(report.residuals.items())]
        _emit(config, render_csv(["site", "residual"], rows))
    if report.passed:
        logger.info(f"Kraus condition holds (max residual {report.max_residual:.3e})")
        return EXIT_OK
    worst = report.worst_site
    logger.error(f"Kraus condition violated at site {report.label(worst)}: residual {report.residuals[worst]:.6g}")
    return EXIT_FAILED


def cmd_evolve(config: RunConfig) -> int:
    family = _walk(config)
    state = load_state(config.inputs["state"], family=family, trace_tol=config.trace_tol)
    distributions = [position_distribution(s) for s in trajectory(family, state, config.n)]
    if config.fmt == "json":
        steps = [
            {"step": n, "distribution": {family.sites[i]: p for i, p in sorted(d.items())}}
            for n, d in enumerate(distributions)
        ]
        _emit(config, _json({"sites": list(family.sites), "steps": steps}))
    else:
        _emit(config, trajectory_csv(distributions, family.sites))
    return EXIT_OK


def cmd_dist(config: RunConfig) -> int:
    family = _walk(config)
    state = load_state(config.inputs["state"], family=family, trace_tol=config.trace_tol)
    distribution = position_distribution(trajectory(family, state, config.n)[-1])
    if config.fmt == "json":
        _emit(config, _json({"step": config.n, "distribution": {family.sites[i]: p for i, p in sorted(distribution.items())}}))
    else:
        _emit(config, distribution_csv(distribution, family.sites))
    return EXIT_OK


def cmd_invariant(config: RunConfig) -> int:
    family = _walk(config)
    search = find_invariant_state(
        family,
        method=config.params.get("method", "dense_eigen"),
        max_iters=config.params.get("max_iters", 100_000),
    )
    if config.fmt == "json":
        document = state_to_document(search.state, family.sites)
        document["search"] = search.to_dict()
        _emit(config, _json(document))
    else:
        _emit(config, distribution_csv(position_distribution(search.state), family.sites))
    return EXIT_OK


def cmd_qmc_eval(config: RunConfig) -> int:
    family, pair = _pair(config)
    xs = [load_observable(path, family=family) for path in config.inputs["observables"]]
    method = config.params.get("method", "product")
    value = qmc_evaluate(pair, xs, method=method)
    if config.fmt == "json":
        _emit(config, _json({"kind": pair.kind.value, "method": method, "length": len(xs), "value": value}))
    else:
        _emit(config, render_csv(["value"], [(value,)]))
    return EXIT_OK


def cmd_recurrence(config: RunConfig) -> int:
    family, pair = _pair(config)
    e = load_observable(config.inputs["proj"], family=family, projection=True)
    verdict = diagnose(
        pair,
        e,
        config.params["criterion"],
        n_max=config.n_max,
        decision_tol=config.decision_tol,
        access_tol=config.access_tol,
    )
    document = verdict.to_dict()
    document["kind"] = pair.kind.value
    document["site_ratios"] = {family.sites[int(i)]: r for i, r in document["site_ratios"].items()}

    series_out = config.params.get("series_out")
    if series_out:
        write_text_atomic(series_out, series_csv(verdict.series))
    if config.fmt == "json":
        document["series"] = list(verdict.series)
        _emit(config, _json(document))
    else:
        _emit(config, series_csv(verdict.series))
        sys.stderr.write(_json(document))

    level = logging.INFO if verdict.holds else logging.WARNING
    logger.log(level, f"{verdict.criterion.value} {verdict.verdict.value}: limit {format_number(verdict.limit)}")
    return VERDICT_EXIT[verdict.verdict]


def cmd_accessible(config: RunConfig) -> int:
    family, pair = _pair(config)
    e = load_observable(config.inputs["proj"], family=family, projection=True)
    f = load_observable(config.inputs["proj2"], family=family, projection=True)
    mode = config.params.get("mode", "phi")
    document = {"mode": mode, "kind": pair.kind.value, "n_max": config.n_max}
    if config.params.get("both"):
        accessible = communicates(pair, e, f, config.n_max, mode=mode, access_tol=config.access_tol)
        document["communicates"] = accessible
    else:
        result = is_accessible(pair, e, f, config.n_max, mode=mode, access_tol=config.access_tol)
        accessible = result.accessible
        document.update(accessible=result.accessible, witness=result.witness)
    if config.fmt == "json":
        _emit(config, _json(document))
    else:
        header = list(document)
        _emit(config, render_csv(header, [[document[k] for k in header]]))
    return EXIT_OK if accessible else EXIT_FAILED


def _example_scenario(name: str, params: dict):
    def pick(*keys):
        return {key: params[f"ex_{key}"] for key in keys if f"ex_{key}" in params}

    try:
        if name == "ring":
            kwargs = pick("pr", "site")
            if "ex_n" in params:
                kwargs["n_sites"] = params["ex_n"]
            if params.get("ex_condition_a"):
                return ring_condition_a_scenario(**kwargs)
            return ring_scenario(**kwargs)
        if name == "two-site":
            return two_site_scenario(**pick("a", "b", "c", "d", "p", "overlap"))
        return two_site_part2_scenario(**pick("a", "t", "p", "case"))
    except NormalizationError as e:
        raise InvalidParameterError(f"parameters do not define a walk: {e}")


def cmd_example(config: RunConfig) -> int:
    scenario = _example_scenario(config.params["name"], config.params)
    sites = scenario.family.sites
    out_dir = Path(config.params.get("out_dir", "."))
    documents = {
        "walk.json": walk_to_document(scenario.family),
        "state.json": state_to_document(scenario.state, sites),
        "projection.json": observable_to_document(scenario.projection, sites),
    }
    for name, document in documents.items():
        save_document(out_dir / name, document)
    logger.info(f"wrote {scenario.description} to {out_dir}")
    summary = {
        "example": scenario.name,
        "description": scenario.description,
        "kind": scenario.kind.value,
        "validation": scenario.family.validation_mode.value,
        "files": [str(out_dir / name) for name in documents],
    }
    _emit(config, _json(summary))
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "evolve": cmd_evolve,
    "dist": cmd_dist,
    "invariant": cmd_invariant,
    "qmc-eval": cmd_qmc_eval,
    "recurrence": cmd_recurrence,
    "accessible": cmd_accessible,
    "example": cmd_example,
}


def _fail(exception: Exception) -> int:
    response = make_error_response(exception)
    logger.error(response["message"])
    sys.stderr.write(json.dumps(response) + "\n")
    return response["exit_code"]


def main(argv: Sequence[str] | None = None) -> int:
    configure_logging()
    parser = OQRWArgParser(description="Open quantum random walks and their quantum Markov chains.")
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        defaults = load_defaults(args.config) if args.config else {}
        config = RunConfig.from_namespace(args, defaults)
    except (FileNotFoundError, ValueError, InvalidParameterError) as e:
        return _fail(e)

    logger.debug(f"run configuration: {config.to_dict()}")
    try:
        with worker_pool(config.threads):
            return COMMANDS[config.command](config)
    except OQRWError as e:
        return _fail(e)


if __name__ == "__main__":
    sys.exit(main())
