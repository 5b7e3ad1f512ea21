"""Entitativity questionnaire: decide which network (individual or household)
to study, how to weight its edges and what to do with intrahousehold ties.

The decision tree, in order of evaluation::

    proximity?            no  -> individual network, intrahousehold edges as reported
    internal diffusion?   no  -> individual network, intrahousehold edges as reported
                          yes -> household network (members treated as fully linked)
    similarity?           no  -> weight edges by the named similarity dimension
    common fate?          sets the level at which outcomes are measured; on the
                          individual branch, "no" together with similarity "yes"
                          narrows the node set to the named role subgroup

A household boundary that holds on proximity but fails any later criterion on
the path is flagged as an illusion of entitativity.

The consistent-metrics check is a side test for unclear cases: when a metric
disagrees qualitatively between the two networks, fall back to the
individual network.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np
from scipy import stats

from hhnet import diffusion, metrics
from hhnet.errors import DegeneracyError, ValidationError

CRITERIA = ("proximity", "internal_diffusion", "similarity", "common_fate")
EDGE_WEIGHTINGS = ("unweighted", "similarity-weighted", "reported-strength")
INTRA_POLICIES = ("full-clique", "reported-only", "excluded")

QUESTIONS = {
    "proximity": "Do household members live together and stay physically close over the "
                 "time span of the study?",
    "internal_diffusion": "Once one member of a household is exposed to the information "
                          "(behaviour, disease), does it reach every other member?",
    "similarity": "Are household members alike with respect to this intervention, so that "
                  "any one of them could stand in for the others?",
    "common_fate": "Do members of a household share the outcome being tracked (is the "
                   "decision or outcome made for the household as a whole)?",
}

SIMILARITY_PROBES = (
    "Do norms or stigma around gender affect who shares this kind of information?",
    "Is one member responsible for the household's financial decisions in this setting?",
    "Is the subject of the study mostly the domain of one household member?",
)


@dataclass(frozen=True)
class CriteriaAnswers:
    proximity: bool
    similarity: bool
    common_fate: bool
    internal_diffusion: bool
    similarity_dimension: str | None = None
    rationale: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        problems = []
        for c in CRITERIA:
            if not isinstance(getattr(self, c), bool):
                problems.append(f"{c}: expected true/false, got {getattr(self, c)!r}")
            if not str(self.rationale.get(c, "")).strip():
                problems.append(f"{c}: missing rationale")
        if problems:
            raise ValidationError("incomplete criteria answers", problems)

    @classmethod
    def from_dict(cls, data: Mapping) -> CriteriaAnswers:
        missing = [c for c in CRITERIA if c not in data]
        if missing:
            raise ValidationError("missing criteria", missing)
        rationale = data.get("rationale")
        if not isinstance(rationale, Mapping):
            raise ValidationError("rationale must be an object with one entry per criterion")
        dim = data.get("similarity_dimension")
        return cls(data["proximity"], data["similarity"], data["common_fate"],
                   data["internal_diffusion"], dim if dim else None, dict(rationale))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rationale"] = dict(self.rationale)
        return d


@dataclass(frozen=True)
class TraceStep:
    criterion: str
    answer: bool
    branch: str


@dataclass(frozen=True)
class Recommendation:
    level: str
    edge_weighting: str
    intrahousehold_policy: str
    node_scope: str
    outcome_level: str
    illusion_flag: bool
    trace: tuple
    weighting_dimension: str | None = None
    scope_label: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["trace"] = [asdict(s) for s in self.trace]
        return d


def _walk(answer: Callable[[str], bool], dimension: str | None) -> Recommendation:
    trace = []

    def ask(criterion, yes, no):
        a = answer(criterion)
        trace.append(TraceStep(criterion, a, yes if a else no))
        return a

    proximate = ask("proximity", "household boundary is physical: check the other criteria",
                    "household boundary is not physical: individual network")
    diffuses = proximate and ask("internal_diffusion",
                                 "exposure reaches all members: household network",
                                 "exposure stays with individuals: individual network, "
                                 "intrahousehold edges only where reported")
    level = "household" if diffuses else "individual"
    intra = "full-clique" if diffuses else "reported-only"

    similar = ask("similarity", "members interchangeable: unweighted edges",
                  f"members differ{f' by {dimension}' if dimension else ''}: "
                  "weight edges by similarity")
    weighting = "unweighted" if similar else "similarity-weighted"

    scope, label = "all", None
    if level == "individual":
        shared = ask("common_fate", "outcome shared: measure outcomes per household",
                     "outcome individual: study the relevant role subgroup" if similar
                     else "outcome individual: measure outcomes per person")
        if not shared and similar:
            scope, label = "role-subgroup", dimension or "role subgroup"
    else:
        shared = ask("common_fate", "outcome shared: measure outcomes per household",
                     "outcome individual: measure outcomes per person")
    outcome = "household" if shared else "individual"

    illusion = bool(proximate and not all(s.answer for s in trace[1:]))
    return Recommendation(level, weighting, intra, scope, outcome, illusion, tuple(trace),
                          dimension if not similar else None, label)


def recommend(answers: CriteriaAnswers) -> Recommendation:
    return _walk(lambda c: getattr(answers, c), answers.similarity_dimension)


def replay(trace, dimension: str | None = None) -> Recommendation:
    """Re-run the tree from a trace alone; raises if the trace is not a path
    the tree can take."""
    given = {s.criterion: s.answer for s in trace}

    def answer(c):
        if c not in given:
            raise ValidationError(f"trace does not answer {c!r}, which the tree consults")
        return given[c]

    rec = _walk(answer, dimension)
    if rec.trace != tuple(trace):
        raise ValidationError("trace does not match the path the tree takes")
    return rec


def load_answers(path) -> CriteriaAnswers:
    """Read an answers JSON file. Errors carry line numbers where possible."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ValidationError(f"{path}: line 1: expected a JSON object")

    def line_of(key):
        m = re.search(r'"%s"\s*:' % re.escape(key), text)
        return text.count("\n", 0, m.start()) + 1 if m else None

    problems = []
    for c in CRITERIA:
        if c not in data:
            problems.append(f"{c}: missing")
        elif not isinstance(data[c], bool):
            problems.append(f"line {line_of(c)}: {c} must be true or false")
    rationale = data.get("rationale")
    if not isinstance(rationale, dict):
        where = line_of("rationale")
        problems.append(f"line {where}: rationale must be an object" if where else "rationale: missing")
    else:
        for c in CRITERIA:
            if not str(rationale.get(c, "")).strip():
                where = line_of("rationale")
                problems.append(f"line {where}: rationale for {c} is missing or empty")
    if problems:
        raise ValidationError(f"{path}: invalid answers file", problems)
    return CriteriaAnswers.from_dict(data)


_YES = {"y", "yes", "true", "t", "1"}
_NO = {"n", "no", "false", "f", "0"}


def run_wizard(prompt: Callable[[str], None], respond: Callable[[], str],
               max_attempts: int = 3) -> CriteriaAnswers:
    """Ask each criterion question and collect answers plus a rationale.

    ``prompt`` receives text to show; ``respond`` returns the next line of
    input. Replaying the same responses gives the same answers.
    """
    answers, rationale = {}, {}
    dimension = None
    for c in CRITERIA:
        if c == "similarity":
            prompt("Questions to consider:")
            for probe in SIMILARITY_PROBES:
                prompt(f"  - {probe}")
        for _ in range(max_attempts):
            prompt(f"{QUESTIONS[c]} [yes/no]")
            reply = respond().strip().lower()
            if reply in _YES or reply in _NO:
                answers[c] = reply in _YES
                break
            prompt(f"Please answer yes or no (got {reply!r}).")
        else:
            raise ValidationError(f"no valid answer for {c} after {max_attempts} attempts")
        if c == "similarity":
            prompt("Which dimension separates or groups members here (e.g. gender, "
                   "financial decision role)? Leave blank for none.")
            dimension = respond().strip() or None
        prompt(f"Why? (rationale for {c})")
        rationale[c] = respond().strip()
    return CriteriaAnswers(answers["proximity"], answers["similarity"], answers["common_fate"],
                           answers["internal_diffusion"], dimension, rationale)


SIGN_METRICS = {
    "assortativity": metrics.degree_assortativity,
    "inversity": metrics.inversity,
    "clustering": metrics.average_clustering,
}


def _safe(fn, g):
    try:
        return fn(g)
    except DegeneracyError:
        return None


def consistent_metrics_check(individual, household, metric: str, *, partition=None,
                             mode: str | None = None, threshold: float | None = None,
                             config=None, k: int = 10, T: int | None = None) -> dict:
    """Does ``metric`` tell the same qualitative story on both networks?

    Sign mode (assortativity, inversity, clustering): consistent when both
    values have the same sign, or both are undefined. Ranking mode
    (diffusion-centrality-ranking): Spearman correlation between household
    centralities and the highest member centrality per household, at least
    ``threshold`` (default 0.7). Overlap mode (seed-set-overlap): the share of
    household seeds also hit by the households of individual seeds, at least
    ``threshold`` (default 0.5). Inconsistent results recommend the individual
    network.
    """
    if metric in SIGN_METRICS:
        mode = mode or "sign"
        fn = SIGN_METRICS[metric]
        vi, vh = _safe(fn, individual), _safe(fn, household)
        if vi is None and vh is None:
            consistent, detail = True, "metric undefined on both networks (vacuously consistent)"
        elif vi is None or vh is None:
            consistent, detail = False, "metric defined on only one network"
        else:
            consistent = bool(np.sign(vi) == np.sign(vh))
            detail = f"signs {np.sign(vi):+.0f} (individual) vs {np.sign(vh):+.0f} (household)"
        values = {"individual": vi, "household": vh}
    elif metric == "diffusion-centrality-ranking":
        if partition is None:
            raise ValidationError("ranking mode needs the household partition")
        mode = mode or "ranking"
        threshold = 0.7 if threshold is None else threshold
        T = diffusion.default_horizon(household) if T is None else T
        dc_i = diffusion.network_dc(individual, T)
        dc_h = diffusion.network_dc(household, T)
        hh = list(household.nodes)
        from_people = [max(dc_i[v] for v in partition.households[h]) for h in hh]
        of_households = [dc_h[h] for h in hh]
        if np.ptp(from_people) == 0 and np.ptp(of_households) == 0:
            rho, consistent = None, True
        elif np.ptp(from_people) == 0 or np.ptp(of_households) == 0:
            rho, consistent = None, False
        else:
            rho = float(stats.spearmanr(from_people, of_households).statistic)
            consistent = rho >= threshold
        values = {"spearman": rho, "T": T}
        detail = f"Spearman {rho} vs threshold {threshold}"
    elif metric == "seed-set-overlap":
        if partition is None:
            raise ValidationError("overlap mode needs the household partition")
        mode = mode or "overlap"
        threshold = 0.5 if threshold is None else threshold
        config = config or diffusion.CascadeConfig()
        k_h = min(k, household.n)
        s_i = diffusion.greedy_seed_selection(individual, min(k, individual.n), config, partition)
        s_h = diffusion.greedy_seed_selection(household, k_h, config)
        cmp = diffusion.compare_seed_sets(s_i, s_h, partition)
        consistent = cmp["proportion"] is not None and cmp["proportion"] >= threshold
        values = {"overlap": cmp["overlap"], "proportion": cmp["proportion"],
                  "S_i": list(s_i.nodes), "S_h": list(s_h.nodes)}
        detail = f"overlap proportion {cmp['proportion']} vs threshold {threshold}"
    else:
        raise ValidationError(f"unknown metric {metric!r}")
    return {"metric": metric, "mode": mode, "threshold": threshold, "consistent": bool(consistent),
            "values": values, "detail": detail,
            "fallback": None if consistent else "individual"}
