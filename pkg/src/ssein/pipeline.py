"""End-to-end prediction pipeline, benchmark harness and report emission.

`run_predict` chains structure ingestion, the evolutionary SSE-graph stage
and the two-stage ant colony, retrying the colony stage until a built
network passes the family topology gate.  `run_benchmark` scores the stages
on planted instances: the GA against the planted incidence, the colonies
(fed the planted incidence, mirroring how the stages are analysed
separately) against the planted shortcut edges across repeated simulations.

Reports serialize deterministically: with an identical config and seed the
emitted JSON and TSV bytes are identical run to run.  Stage timings are
logged, never written into the report files.
"""

from __future__ import annotations

import json
import logging
import statistics
import time
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .aco import (
    AcoParams,
    EdgeBudget,
    FamilyMatchError,
    HeuristicMatrix,
    TemplateProtein,
    allocate_pair_budgets,
    build_occurrence_matrix,
    estimate_edge_budget,
    global_aco,
    local_aco,
    validate_built_network,
)
from .contact import Edge, SseInGraph, build_contact_map, induce_sse_in
from .ingest import (
    FamilyIndex,
    compute_backbone_dihedrals,
    load_family_index,
    parse_pdb_detailed,
)
from .metrics import TopologicalProfile, matrix_error_rate, prediction_accuracy, topological_profile
from .moga import GaParams, SseContext, run_moga
from .synth import PlantedInstance, make_planted_instance

logger = logging.getLogger("ssein")


@dataclass(frozen=True)
class RunConfig:
    pdb_path: Optional[str] = None
    family_index_path: Optional[str] = None
    manifest_path: Optional[str] = None
    threshold: float = 7.0
    ga: GaParams = GaParams()
    aco: AcoParams = AcoParams()
    seed: int = 0
    simulations: int = 150
    output_dir: str = "."

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        if self.simulations < 1:
            raise ValueError("simulations must be >= 1")

    def echo(self) -> dict:
        """Full parameter echo with every default resolved."""
        return {
            "pdb_path": self.pdb_path,
            "family_index_path": self.family_index_path,
            "manifest_path": self.manifest_path,
            "threshold": self.threshold,
            "seed": self.seed,
            "simulations": self.simulations,
            "output_dir": self.output_dir,
            "ga": {**asdict(self.ga), "k": self.ga.effective_k()},
            "aco": asdict(self.aco),
        }


def mean_profile(profiles: Sequence[TopologicalProfile]) -> TopologicalProfile:
    if not profiles:
        raise ValueError("no profiles to average")
    n = len(profiles)
    return TopologicalProfile(
        sum(p.diameter for p in profiles) / n,
        sum(p.char_path_length for p in profiles) / n,
        sum(p.mean_degree for p in profiles) / n,
        sum(p.clustering_coeff for p in profiles) / n,
    )


def family_sse_profile(templates: Sequence[TemplateProtein]) -> TopologicalProfile:
    """Mean profile of the templates' SSE-level adjacency graphs."""
    profiles = []
    for t in templates:
        adjacency = t.sse_adjacency()
        m = adjacency.shape[0]
        edges = [
            (i + 1, j + 1) for i in range(m) for j in range(i + 1, m) if adjacency[i, j]
        ]
        profiles.append(topological_profile(range(1, m + 1), edges))
    return mean_profile(profiles)


def family_residue_profile(templates: Sequence[TemplateProtein]) -> TopologicalProfile:
    """Mean profile of the templates' residue-level SSE-IN graphs."""
    return mean_profile(
        [topological_profile(t.graph.vertices, t.graph.edges) for t in templates]
    )


def load_templates(
    index: FamilyIndex, base_dir: Path, threshold: float
) -> list[TemplateProtein]:
    """Parse every family entry; paths resolve relative to the index file."""
    templates = []
    for entry in index.entries:
        path = Path(entry.path)
        if not path.is_absolute():
            path = base_dir / path
        parsed = parse_pdb_detailed(path.read_text(), protein_id=entry.protein_id)
        template = TemplateProtein.from_structure(parsed.structure, threshold)
        if template.sse_count != entry.sse_count:
            logger.info(
                "template %s: index says %d SSEs, file has %d",
                entry.protein_id,
                entry.sse_count,
                template.sse_count,
            )
        templates.append(template)
    return templates


@dataclass(frozen=True)
class AttemptOutcome:
    """One colony-stage simulation: stage-one candidates and the final pick."""

    candidates: tuple[Edge, ...]
    selected: tuple[Edge, ...]
    normalized_tau: dict[Edge, float]
    shortfall: int


def pair_heuristics(
    pairs: Sequence[tuple[int, int]],
    sse_sizes: Sequence[int],
    templates: Sequence[TemplateProtein],
    e_total: int,
) -> list[HeuristicMatrix]:
    """Per-pair occurrence matrices with the edge budget split by Q mass."""
    qs = [
        build_occurrence_matrix(templates, (a, b), sse_sizes[a - 1], sse_sizes[b - 1])
        for a, b in pairs
    ]
    budgets = allocate_pair_budgets(e_total, [float(q.sum()) for q in qs])
    return [HeuristicMatrix.from_q(q, e) for q, e in zip(qs, budgets)]


def aco_attempt(
    pairs: Sequence[tuple[int, int]],
    heuristics: Sequence[HeuristicMatrix],
    sse_ranges: Sequence[tuple[int, int]],
    graph_vertices: Sequence[int],
    sse_of: dict,
    intra_edges: Sequence[Edge],
    e_p: int,
    params: AcoParams,
    seed_seq: np.random.SeedSequence,
) -> AttemptOutcome:
    """One full colony simulation: local stage per pair, then the global pick."""
    streams = seed_seq.spawn(len(pairs) + 1)
    candidates: dict[Edge, float] = {}
    for k, ((a, b), h) in enumerate(zip(pairs, heuristics)):
        n, m = h.s.shape
        rng = np.random.default_rng(streams[k])
        result = local_aco((n, m), h, params, rng)
        first_a, first_b = sse_ranges[a - 1][0], sse_ranges[b - 1][0]
        for i, j in result.cells:
            u, v = first_a + i - 1, first_b + j - 1
            edge = (u, v) if u < v else (v, u)
            candidates[edge] = float(h.s[i - 1, j - 1])
    if e_p <= 0 or not candidates:
        return AttemptOutcome(tuple(sorted(candidates)), (), {}, max(e_p, 0))
    rng_global = np.random.default_rng(streams[-1])
    result = global_aco(
        graph_vertices, sse_of, intra_edges, candidates, e_p, params, rng_global
    )
    return AttemptOutcome(
        tuple(sorted(candidates)), result.selected, result.normalized_tau, result.shortfall
    )


@dataclass
class RunReport:
    protein_id: str
    sse_count: int
    sse_sizes: tuple[int, ...]
    incidence: np.ndarray
    e_p: int
    e_candidates: int
    e_selected: int
    e_real: Optional[int]
    ac: Optional[float]
    shortcut_score: Optional[float]
    incidence_error_rate: Optional[float]
    built_profile: Optional[TopologicalProfile]
    family_profile: TopologicalProfile
    verdict: str
    attempts: int
    seed: int
    config: dict
    shortcut_rows: list[tuple[int, int, str, str, float]] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        """Deterministic report payload (timings deliberately excluded)."""
        return {
            "protein_id": self.protein_id,
            "sse_count": self.sse_count,
            "sse_sizes": list(self.sse_sizes),
            "incidence": self.incidence.astype(int).tolist(),
            "e_p": self.e_p,
            "e_candidates": self.e_candidates,
            "e_selected": self.e_selected,
            "e_real": self.e_real,
            "ac": self.ac,
            "shortcut_score": self.shortcut_score,
            "incidence_error_rate": self.incidence_error_rate,
            "built_profile": self.built_profile.as_dict() if self.built_profile else None,
            "family_profile": self.family_profile.as_dict(),
            "shortcut_edges": [[u, v] for u, v, *_ in self.shortcut_rows],
            "verdict": self.verdict,
            "attempts": self.attempts,
            "seed": self.seed,
            "config": self.config,
        }


def emit_report(report: RunReport, format: str = "json") -> str:
    """Serialize a report: stable-keyed JSON or flat key/value TSV."""
    payload = report.to_dict()
    if format == "json":
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if format == "tsv":
        lines = []
        for key in sorted(payload):
            value = payload[key]
            if isinstance(value, (str, int, float, type(None))):
                lines.append(f"{key}\t{value}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def incidence_to_tsv(incidence: np.ndarray) -> str:
    return "".join(
        "\t".join(str(int(x)) for x in row) + "\n" for row in np.asarray(incidence)
    )


def shortcut_edges_to_tsv(rows: Sequence[tuple[int, int, str, str, float]]) -> str:
    header = "res_i\tres_j\tsse_i\tsse_j\tpheromone_normalized\n"
    return header + "".join(
        f"{u}\t{v}\t{si}\t{sj}\t{tau:.9f}\n" for u, v, si, sj, tau in rows
    )


def _incidence_pairs(incidence: np.ndarray) -> list[tuple[int, int]]:
    m = incidence.shape[0]
    return [(i + 1, j + 1) for i in range(m) for j in range(i + 1, m) if incidence[i, j]]


def run_predict(config: RunConfig) -> RunReport:
    """Full pipeline on one query structure against its family index."""
    if not config.pdb_path or not config.family_index_path:
        raise ValueError("predict needs both a structure file and a family index")
    t_start = time.perf_counter()

    pdb_path = Path(config.pdb_path)
    parsed = parse_pdb_detailed(pdb_path.read_text(), protein_id=pdb_path.stem)
    protein = compute_backbone_dihedrals(parsed.structure, parsed.backbone)
    if parsed.dropped_residues:
        logger.info("%s: dropped %d residues without usable Cα",
                    protein.id, parsed.dropped_residues)
    if len(protein.sse_list) < 2:
        raise ValueError(f"{protein.id}: need at least 2 SSEs, found {len(protein.sse_list)}")

    cmap = build_contact_map(protein, config.threshold)
    truth_graph = induce_sse_in(cmap, protein)

    index_path = Path(config.family_index_path)
    index = load_family_index(index_path.read_text(), family_id=index_path.stem)
    templates = load_templates(index, index_path.parent, config.threshold)
    matching = [t for t in templates if t.sse_count == len(protein.sse_list)]
    if not matching:
        raise FamilyMatchError(
            f"family {index.family_id} has no template with {len(protein.sse_list)} SSEs"
        )
    profile_sse = family_sse_profile(matching)
    profile_residue = family_residue_profile(matching)
    t_ingest = time.perf_counter()

    master = np.random.SeedSequence(config.seed)
    moga_seq, *sim_seqs = master.spawn(1 + config.simulations)
    ctx = SseContext.from_structure(protein)
    moga = run_moga(ctx, config.ga, profile_sse, np.random.default_rng(moga_seq))
    t_moga = time.perf_counter()

    sse_sizes = protein.sse_sizes()
    sse_ranges = [(a.first_residue, a.last_residue) for a in protein.sse_list]
    pairs = _incidence_pairs(moga.incidence)
    e_p = estimate_edge_budget(sse_sizes, matching)
    heuristics = pair_heuristics(pairs, sse_sizes, matching, e_p)

    verdict = "rejected"
    attempts = 0
    outcome = AttemptOutcome((), (), {}, e_p)
    built_profile: Optional[TopologicalProfile] = None
    for attempt, seq in enumerate(sim_seqs, start=1):
        attempts = attempt
        outcome = aco_attempt(
            pairs,
            heuristics,
            sse_ranges,
            truth_graph.vertices,
            truth_graph.sse_of,
            truth_graph.intra_edges,
            e_p,
            config.aco,
            seq,
        )
        built = SseInGraph(
            truth_graph.vertices,
            truth_graph.intra_edges,
            outcome.selected,
            truth_graph.sse_of,
        )
        built_profile = topological_profile(built.vertices, built.edges)
        if validate_built_network(built, profile_residue, tol=0.2):
            verdict = "accepted"
            break
    t_aco = time.perf_counter()

    budget = EdgeBudget(
        e_p,
        {pair: int(h.e) for pair, h in zip(pairs, heuristics)},
        len(outcome.candidates),
    )
    logger.debug("edge budget: %s", budget)
    e_real = len(truth_graph.shortcut_edges)
    truth_incidence = truth_graph.sse_adjacency([a.sse_id for a in protein.sse_list])
    score = None
    if e_real:
        score = len(set(outcome.selected) & set(truth_graph.shortcut_edges)) / e_real
    rows = [
        (
            u,
            v,
            truth_graph.sse_of[u],
            truth_graph.sse_of[v],
            outcome.normalized_tau.get((u, v), 0.0),
        )
        for u, v in outcome.selected
    ]
    report = RunReport(
        protein_id=protein.id,
        sse_count=len(protein.sse_list),
        sse_sizes=sse_sizes,
        incidence=moga.incidence,
        e_p=e_p,
        e_candidates=budget.e_selected,
        e_selected=len(outcome.selected),
        e_real=e_real,
        ac=prediction_accuracy(e_real, e_p) if e_p > 0 else None,
        shortcut_score=score,
        incidence_error_rate=matrix_error_rate(moga.incidence, truth_incidence),
        built_profile=built_profile,
        family_profile=profile_residue,
        verdict=verdict,
        attempts=attempts,
        seed=config.seed,
        config=config.echo(),
        shortcut_rows=rows,
        timings={
            "ingest_s": t_ingest - t_start,
            "moga_s": t_moga - t_ingest,
            "aco_s": t_aco - t_moga,
        },
    )
    logger.info(
        "%s: verdict=%s attempts=%d timings=%s", protein.id, verdict, attempts, report.timings
    )
    return report


@dataclass(frozen=True)
class ManifestRow:
    instance_id: str
    gen_seed: int
    sse_sizes: tuple[int, ...]
    boost_fraction: float
    shortcuts_per_pair: int = 1


def parse_manifest(text: str) -> list[ManifestRow]:
    """Benchmark manifest: id, generator seed, SSE sizes csv, boost fraction,
    optional shortcuts per pair; tab-separated, # comments allowed."""
    rows = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (4, 5):
            raise ValueError(f"manifest line {line_no}: expected 4 or 5 fields")
        try:
            sizes = tuple(int(x) for x in parts[2].split(","))
            row = ManifestRow(
                parts[0],
                int(parts[1]),
                sizes,
                float(parts[3]),
                int(parts[4]) if len(parts) == 5 else 1,
            )
        except ValueError as exc:
            raise ValueError(f"manifest line {line_no}: {exc}") from None
        rows.append(row)
    if not rows:
        raise ValueError("manifest has no instances")
    return rows


@dataclass
class InstanceResult:
    instance_id: str
    n_templates: int
    residues: int
    sse_count: int
    e_real: int
    e_p: int
    simulations: int
    score_mean: float
    score_stddev: float
    score_median: float
    local_recovery_median: float
    ac: float
    incidence_error_rate: float
    accepted_fraction: float


@dataclass
class BenchmarkResult:
    rows: list[InstanceResult]
    curve: list[tuple[float, float]]  # (local recovery, global score) medians

    def table_tsv(self) -> str:
        header = (
            "instance\tproteins\tresidues\tsse_count\te_real\te_p\tsimulations\t"
            "score\taverage_deviation\tscore_median\tlocal_recovery_median\t"
            "ac\tincidence_error_rate\taccepted_fraction\n"
        )
        lines = [header]
        for r in self.rows:
            lines.append(
                f"{r.instance_id}\t{r.n_templates}\t{r.residues}\t{r.sse_count}\t"
                f"{r.e_real}\t{r.e_p}\t{r.simulations}\t{r.score_mean:.6f}\t"
                f"{r.score_stddev:.6f}\t{r.score_median:.6f}\t"
                f"{r.local_recovery_median:.6f}\t{r.ac:.6f}\t"
                f"{r.incidence_error_rate:.6f}\t{r.accepted_fraction:.6f}\n"
            )
        return "".join(lines)

    def curve_csv(self) -> str:
        lines = ["local_recovery,global_score\n"]
        for recovery, score in self.curve:
            lines.append(f"{recovery:.6f},{score:.6f}\n")
        return "".join(lines)


def benchmark_instance(
    instance: PlantedInstance,
    config: RunConfig,
    seed_seq: np.random.SeedSequence,
) -> InstanceResult:
    """Score one planted instance: GA once, colony stage per simulation.

    The colony stage is fed the planted incidence pairs so its scores
    isolate the edge-prediction stages, the way they are analysed.
    """
    moga_seq, *sim_seqs = seed_seq.spawn(1 + config.simulations)
    profile_sse = family_sse_profile(instance.templates)
    profile_residue = family_residue_profile(instance.templates)
    moga = run_moga(
        instance.ctx, config.ga, profile_sse, np.random.default_rng(moga_seq)
    )
    error_rate = matrix_error_rate(moga.incidence, instance.true_incidence)

    e_p = estimate_edge_budget(instance.sse_sizes, instance.templates)
    pairs = list(instance.incidence_pairs)
    heuristics = pair_heuristics(pairs, instance.sse_sizes, instance.templates, e_p)
    truth = set(instance.true_shortcuts)
    e_real = instance.e_real

    scores = []
    recoveries = []
    accepted = 0
    for seq in sim_seqs:
        outcome = aco_attempt(
            pairs,
            heuristics,
            instance.sse_ranges,
            instance.graph.vertices,
            instance.graph.sse_of,
            instance.graph.intra_edges,
            e_p,
            config.aco,
            seq,
        )
        recoveries.append(len(set(outcome.candidates) & truth) / e_real)
        scores.append(len(set(outcome.selected) & truth) / e_real)
        built = SseInGraph(
            instance.graph.vertices,
            instance.graph.intra_edges,
            outcome.selected,
            instance.graph.sse_of,
        )
        if validate_built_network(built, profile_residue, tol=0.2):
            accepted += 1

    stddev = statistics.stdev(scores) if len(scores) > 1 else 0.0
    return InstanceResult(
        instance_id=instance.instance_id,
        n_templates=len(instance.templates),
        residues=sum(instance.sse_sizes),
        sse_count=instance.sse_count,
        e_real=e_real,
        e_p=e_p,
        simulations=config.simulations,
        score_mean=statistics.fmean(scores),
        score_stddev=stddev,
        score_median=statistics.median(scores),
        local_recovery_median=statistics.median(recoveries),
        ac=prediction_accuracy(e_real, e_p) if e_p > 0 else float("nan"),
        incidence_error_rate=error_rate,
        accepted_fraction=accepted / len(sim_seqs),
    )


def run_benchmark(config: RunConfig) -> BenchmarkResult:
    """Run every manifest instance and assemble the table plus the
    local-recovery / global-score curve."""
    if not config.manifest_path:
        raise ValueError("benchmark needs a manifest file")
    manifest = parse_manifest(Path(config.manifest_path).read_text())
    master = np.random.SeedSequence(config.seed)
    streams = master.spawn(len(manifest))
    results = []
    for row, seq in zip(manifest, streams):
        instance = make_planted_instance(
            row.instance_id,
            row.sse_sizes,
            np.random.default_rng(row.gen_seed),
            shortcuts_per_pair=row.shortcuts_per_pair,
            boost_fraction=row.boost_fraction,
        )
        t0 = time.perf_counter()
        result = benchmark_instance(instance, config, seq)
        logger.info(
            "instance %s: score=%.3f in %.2fs",
            row.instance_id,
            result.score_mean,
            time.perf_counter() - t0,
        )
        results.append(result)
    curve = sorted(
        (r.local_recovery_median, r.score_median) for r in results
    )
    return BenchmarkResult(results, curve)
