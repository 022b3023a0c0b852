"""Evaluation harness: statement and proof campaigns, grading, and reports.

Statement evaluation runs each dataset item through the translation pipeline
``runs`` times per configuration; an item counts as elaborated in a run iff
at least one completion survives the elaboration filter, and the reported
cell is the median of the per-run counts.  Items hit by infrastructure
failures (provider or checker unavailable) are excluded from the denominator
and listed in the report rather than counted as negatives.

Recorded outcomes (JSON-Lines) can be replayed through the same aggregation
path, which is how the bundled reference results are reproduced:

    {"kind": "meta", "experiment": "statements", "runs": 3, ...}
    {"kind": "run_outcomes", "category": c, "config": k, "run": r,
     "elaborated": [item ids]}
    {"kind": "statement_grades", "category": c, "config": k, "item": id,
     "elaborated": b, "selected_grade": g, "best_grade": g}

Proof evaluation archives completions (append-only JSON-Lines with record
kinds ``completion`` and ``grade``); summaries are pure functions of the
archive.  Human grades are data entry: statement grades range 0..2, proof
grades 0..4, and regrading appends (full history kept, latest wins).
"""
from __future__ import annotations

import enum
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path

from .completion import CompletionProvider, SamplingConfig, request_completions
from .corpus import Corpus, NameDictionary
from .keywords import KeywordIndex
from .pipeline import retrieve_examples, translate_statement
from .prompting import (
    COMMENTED_PROOF_FORMATS,
    ProofFormat,
    build_proof_prompt,
    compose_nl_block,
    with_gold_statement,
)
from .retrieval import EmbeddingIndex, EmbeddingProvider, RetrievalConfig


class HarnessError(ValueError):
    pass


class Category(enum.Enum):
    THEOREMS = "theorems"
    SILLY = "silly"
    FALSE = "false"


CATEGORY_TITLES = {
    Category.THEOREMS: "Theorems",
    Category.SILLY: "Silly Statements",
    Category.FALSE: "False Statements",
}


@dataclass(frozen=True)
class DatasetItem:
    id: str
    nl_statement: str
    category: Category
    gold_statement: str | None = None
    synthetic: bool = False
    in_mathlib: bool = False

    def __post_init__(self) -> None:
        if not self.nl_statement:
            raise HarnessError(f"item {self.id}: empty statement")


@dataclass(frozen=True)
class ProofTask:
    id: str
    short_name: str
    nl_statement: str
    nl_proof: str
    gold_statement: str | None = None
    statement_in_prompt: bool = False   # graded only with the gold header fixed
    synthetic_proof: bool = False

    def __post_init__(self) -> None:
        if not self.nl_statement or not self.nl_proof:
            raise HarnessError(f"task {self.id}: empty natural-language text")


def load_dataset(path: str | Path) -> list[DatasetItem]:
    items: list[DatasetItem] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        obj = json.loads(line)
        try:
            items.append(
                DatasetItem(
                    id=str(obj["id"]),
                    nl_statement=str(obj["nl_statement"]),
                    category=Category(obj["category"]),
                    gold_statement=obj.get("gold_statement"),
                    synthetic=bool(obj.get("synthetic", False)),
                    in_mathlib=bool(obj.get("in_mathlib", False)),
                )
            )
        except (KeyError, ValueError) as exc:
            raise HarnessError(f"{path}:{lineno}: {exc}") from exc
    return items


def load_proof_tasks(path: str | Path) -> list[ProofTask]:
    tasks: list[ProofTask] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        obj = json.loads(line)
        try:
            tasks.append(
                ProofTask(
                    id=str(obj["id"]),
                    short_name=str(obj["short_name"]),
                    nl_statement=str(obj["nl_statement"]),
                    nl_proof=str(obj["nl_proof"]),
                    gold_statement=obj.get("gold_statement"),
                    statement_in_prompt=bool(obj.get("statement_in_prompt", False)),
                    synthetic_proof=bool(obj.get("synthetic_proof", False)),
                )
            )
        except (KeyError, ValueError) as exc:
            raise HarnessError(f"{path}:{lineno}: {exc}") from exc
    return tasks


class PromptMode(enum.Enum):
    FIXED = "fixed"
    INPUT_DEPENDENT = "input_dependent"


@dataclass(frozen=True)
class RunConfig:
    """One evaluation configuration; presets mirror the reference protocol."""

    name: str
    prompt_mode: PromptMode
    temperature: float
    n_completions: int
    k_sim: int = 0
    k_kw: int = 0
    runs: int = 3
    checker: str = "mock"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise HarnessError("runs must be >= 1")


PRESETS: dict[str, RunConfig] = {
    "greedy_fixed": RunConfig("greedy_fixed", PromptMode.FIXED, 0.0, 1),
    "greedy_t02_fixed": RunConfig("greedy_t02_fixed", PromptMode.FIXED, 0.2, 1),
    "greedy_input": RunConfig("greedy_input", PromptMode.INPUT_DEPENDENT, 0.0, 1, k_sim=4, k_kw=0),
    "filtered_fixed": RunConfig("filtered_fixed", PromptMode.FIXED, 0.8, 15),
    "filtered_input": RunConfig(
        "filtered_input", PromptMode.INPUT_DEPENDENT, 0.8, 15, k_sim=10, k_kw=4
    ),
    "filtered_input_wide": RunConfig(
        "filtered_input_wide", PromptMode.INPUT_DEPENDENT, 0.8, 20, k_sim=12, k_kw=8
    ),
}


def median_cell(values: list[int]) -> float | int:
    """Middle order statistic of the per-run values."""
    if not values:
        raise HarnessError("median of zero runs")
    return statistics.median(values)


@dataclass
class GradeRow:
    elaborated: int = 0
    correct: int = 0
    some_correct: int = 0
    all_wrong: int = 0


@dataclass
class RunReport:
    runs: int
    dataset_sizes: dict[str, int] = field(default_factory=dict)             # category -> size
    cells: dict[tuple[str, str], list[int]] = field(default_factory=dict)   # (category, config) -> per-run counts
    grade_rows: dict[str, GradeRow] = field(default_factory=dict)           # category -> grade counts
    provenance: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def median(self, category: str, config: str) -> float | int | None:
        values = self.cells.get((category, config))
        return median_cell(values) if values else None


@dataclass
class EvalEnvironment:
    """Everything a live statement run needs besides the dataset and config."""

    corpus: Corpus
    dictionary: NameDictionary
    provider: CompletionProvider
    checker: object
    embedding_index: EmbeddingIndex | None = None
    keyword_index: KeywordIndex | None = None
    embedder: EmbeddingProvider | None = None
    provider_tag: str = "mock"


def _sorted_categories(items: list[DatasetItem]) -> list[Category]:
    seen: list[Category] = []
    for item in items:
        if item.category not in seen:
            seen.append(item.category)
    return seen


def run_statement_eval(
    dataset: list[DatasetItem], cfg: RunConfig, env: EvalEnvironment
) -> RunReport:
    """Live evaluation of one configuration over a dataset."""
    report = RunReport(runs=cfg.runs)
    for category in _sorted_categories(dataset):
        report.dataset_sizes[category.value] = sum(1 for i in dataset if i.category is category)

    retrieval_cfg = (
        RetrievalConfig(k_sim=cfg.k_sim, k_kw=cfg.k_kw)
        if cfg.prompt_mode is PromptMode.INPUT_DEPENDENT
        else None
    )
    if cfg.prompt_mode is PromptMode.INPUT_DEPENDENT and (
        env.embedding_index is None or env.keyword_index is None or env.embedder is None
    ):
        raise HarnessError("input-dependent prompting requires built indexes")

    per_run: dict[str, list[int]] = {c.value: [] for c in _sorted_categories(dataset)}
    for run_idx in range(cfg.runs):
        elaborated_count: dict[str, int] = {c: 0 for c in per_run}
        for item in dataset:
            examples = retrieve_examples(
                item.nl_statement,
                env.corpus,
                env.embedding_index if retrieval_cfg else None,
                env.keyword_index if retrieval_cfg else None,
                retrieval_cfg,
                env.embedder if retrieval_cfg else None,
            )
            sampling = SamplingConfig(
                temperature=cfg.temperature,
                n=cfg.n_completions,
                seed=cfg.seed + run_idx,
            )
            outcome = translate_statement(
                item.nl_statement,
                env.corpus,
                env.dictionary,
                env.provider,
                env.checker,
                sampling,
                examples,
            )
            if outcome.infrastructure_failures and not outcome.survivors:
                report.warnings.append(
                    f"run {run_idx + 1}: item {item.id} excluded (checker unavailable)"
                )
                continue
            if outcome.elaborated:
                elaborated_count[item.category.value] += 1
        for cat, count in elaborated_count.items():
            per_run[cat].append(count)

    for cat, counts in per_run.items():
        report.cells[(cat, cfg.name)] = counts
    report.provenance = {
        "config": {
            "name": cfg.name,
            "prompt_mode": cfg.prompt_mode.value,
            "temperature": cfg.temperature,
            "n_completions": cfg.n_completions,
            "k_sim": cfg.k_sim,
            "k_kw": cfg.k_kw,
            "runs": cfg.runs,
            "seed": cfg.seed,
            "checker": cfg.checker,
        },
        "provider_tag": env.provider_tag,
    }
    return report


def merge_reports(reports: list[RunReport]) -> RunReport:
    if not reports:
        raise HarnessError("nothing to merge")
    merged = RunReport(runs=reports[0].runs)
    configs = []
    for rep in reports:
        merged.cells.update(rep.cells)
        merged.dataset_sizes.update(rep.dataset_sizes)
        merged.grade_rows.update(rep.grade_rows)
        merged.warnings.extend(rep.warnings)
        if rep.provenance:
            configs.append(rep.provenance)
    merged.provenance = {"merged": configs}
    return merged


def load_recorded_outcomes(path: str | Path) -> RunReport:
    """Replay a recorded-outcome fixture through the aggregation path."""
    runs = 3
    provenance: dict = {}
    run_lists: dict[tuple[str, str], dict[int, int]] = {}
    grades: dict[str, GradeRow] = {}
    sizes: dict[str, int] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        obj = json.loads(line)
        kind = obj.get("kind")
        if kind == "meta":
            runs = int(obj.get("runs", 3))
            provenance = {k: v for k, v in obj.items() if k != "kind"}
            sizes = {str(k): int(v) for k, v in obj.get("dataset_sizes", {}).items()}
        elif kind == "run_outcomes":
            key = (str(obj["category"]), str(obj["config"]))
            run_lists.setdefault(key, {})[int(obj["run"])] = len(obj["elaborated"])
        elif kind == "statement_grades":
            row = grades.setdefault(str(obj["category"]), GradeRow())
            if obj.get("elaborated"):
                row.elaborated += 1
                best = int(obj.get("best_grade", 0))
                selected = int(obj.get("selected_grade", 0))
                if selected >= 2:
                    row.correct += 1
                if best >= 2:
                    row.some_correct += 1
                else:
                    row.all_wrong += 1
        else:
            raise HarnessError(f"{path}:{lineno}: unknown record kind {kind!r}")

    report = RunReport(runs=runs, provenance=provenance, dataset_sizes=sizes, grade_rows=grades)
    for key, by_run in run_lists.items():
        if len(by_run) != runs:
            raise HarnessError(f"cell {key} has {len(by_run)} runs, expected {runs}")
        report.cells[key] = [by_run[r] for r in sorted(by_run)]
    return report


# ---------------------------------------------------------------------------
# Proof campaign and archive


DEFAULT_PROOF_TEMPERATURES = (0.4, 0.8)
DEFAULT_SAMPLES_PER_TEMP = 3
PROOF_GRADE_MAX = 4
STATEMENT_GRADE_MAX = 2


class CompletionArchive:
    """Append-only store of proof completions and their grade history."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self.completions: dict[str, dict] = {}
        self.grades: list[dict] = []
        if self.path is not None and self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self._apply(json.loads(line))

    def _apply(self, record: dict) -> None:
        kind = record.get("kind")
        if kind == "completion":
            cid = str(record["completion_id"])
            if cid in self.completions:
                raise HarnessError(f"duplicate completion id {cid}")
            self.completions[cid] = record
        elif kind == "grade":
            cid = str(record["completion_id"])
            if cid not in self.completions:
                raise HarnessError(f"grade for unknown completion {cid}")
            self.grades.append(record)
        else:
            raise HarnessError(f"unknown archive record kind {kind!r}")

    def _append(self, record: dict) -> None:
        self._apply(record)
        if self.path is not None:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    def add_completion(self, record: dict) -> None:
        record = dict(record)
        record["kind"] = "completion"
        self._append(record)

    def record_grade(self, completion_id: str, value: int, grader: str = "", note: str = "") -> None:
        if completion_id not in self.completions:
            raise HarnessError(f"unknown completion id {completion_id!r}")
        scale = int(self.completions[completion_id].get("scale", PROOF_GRADE_MAX))
        if not 0 <= value <= scale:
            raise HarnessError(f"grade {value} out of range 0..{scale}")
        self._append(
            {
                "kind": "grade",
                "completion_id": completion_id,
                "value": value,
                "grader": grader,
                "note": note,
                "seq": len(self.grades) + 1,
            }
        )

    def latest_grades(self) -> dict[str, int]:
        latest: dict[str, int] = {}
        for g in self.grades:   # appended in order; later entries win
            latest[str(g["completion_id"])] = int(g["value"])
        return latest

    def __len__(self) -> int:
        return len(self.completions)


def record_grade(archive: CompletionArchive, completion_id: str, grade: int, **kwargs) -> None:
    archive.record_grade(completion_id, grade, **kwargs)


def completion_id(task: ProofTask, fmt: ProofFormat, temperature: float, sample: int, gold: bool) -> str:
    suffix = ":gold" if gold else ""
    return f"{task.short_name}:{fmt.slug}:T{temperature}:O{sample}{suffix}"


def run_proof_eval(
    tasks: list[ProofTask],
    formats: tuple[ProofFormat, ...] = COMMENTED_PROOF_FORMATS,
    temperatures: tuple[float, ...] = DEFAULT_PROOF_TEMPERATURES,
    samples_per_temp: int = DEFAULT_SAMPLES_PER_TEMP,
    provider: CompletionProvider | None = None,
    archive: CompletionArchive | None = None,
    with_gold: bool = False,
    seed: int = 0,
) -> CompletionArchive:
    """Archive |tasks| * |formats| * |temperatures| * samples completions."""
    if not formats:
        raise HarnessError("at least one proof format required")
    if provider is None:
        raise HarnessError("completion provider required")
    if archive is None:
        archive = CompletionArchive()
    for task in tasks:
        block = compose_nl_block(task.nl_statement, task.nl_proof)
        for fmt in formats:
            prompt = build_proof_prompt(fmt, block)
            if with_gold:
                if not task.gold_statement:
                    raise HarnessError(f"task {task.id} has no gold statement")
                prompt = with_gold_statement(prompt, task.gold_statement)
            for temp in temperatures:
                sampling = SamplingConfig(temperature=temp, n=samples_per_temp, seed=seed)
                completions = request_completions(prompt.text, sampling, provider)
                for sample_idx, raw in enumerate(completions, start=1):
                    archive.add_completion(
                        {
                            "completion_id": completion_id(task, fmt, temp, sample_idx, with_gold),
                            "task_id": task.id,
                            "short_name": task.short_name,
                            "format": fmt.level.value,
                            "comments": fmt.comments,
                            "temperature": temp,
                            "sample": sample_idx,
                            "gold": with_gold,
                            "text": raw.text,
                            "scale": PROOF_GRADE_MAX,
                            "provenance": {"seed": seed, "prompt_sha": None},
                        }
                    )
    return archive


def run_default_proof_campaign(
    tasks: list[ProofTask], provider: CompletionProvider, archive: CompletionArchive, seed: int = 0
) -> CompletionArchive:
    """Plain runs for statement-translation tasks plus gold-header runs for the
    tasks carrying a fixed formal statement."""
    plain = [t for t in tasks if not t.statement_in_prompt]
    golds = [t for t in tasks if t.gold_statement]
    run_proof_eval(plain, provider=provider, archive=archive, seed=seed)
    run_proof_eval(golds, provider=provider, archive=archive, with_gold=True, seed=seed)
    return archive


def load_recorded_proof_grades(path: str | Path) -> CompletionArchive:
    """Materialize recorded grade tables as an archive of graded completions.

    Fixture lines: ``{"kind": "proof_grades", "short_name": s, "gold": b,
    "proof": {format: [six grades: T=0.4 O1..O3 then T=0.8 O1..O3]}}``.
    """
    archive = CompletionArchive()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        obj = json.loads(line)
        if obj.get("kind") != "proof_grades":
            raise HarnessError(f"{path}:{lineno}: unknown record kind {obj.get('kind')!r}")
        short_name = str(obj["short_name"])
        gold = bool(obj.get("gold", False))
        suffix = ":gold" if gold else ""
        for fmt, grades in obj["proof"].items():
            if len(grades) != 6:
                raise HarnessError(f"{path}:{lineno}: format {fmt} needs 6 grades")
            for slot, value in enumerate(grades):
                temp = DEFAULT_PROOF_TEMPERATURES[slot // 3]
                sample = slot % 3 + 1
                cid = f"{short_name}:{fmt}:T{temp}:O{sample}{suffix}"
                archive.add_completion(
                    {
                        "completion_id": cid,
                        "task_id": short_name,
                        "short_name": short_name,
                        "format": fmt,
                        "comments": True,
                        "temperature": temp,
                        "sample": sample,
                        "gold": gold,
                        "text": f"recorded:{cid}",
                        "scale": PROOF_GRADE_MAX,
                        "provenance": {"recorded": True},
                    }
                )
                archive.record_grade(cid, int(value), grader="recorded")
    return archive


# ---------------------------------------------------------------------------
# Proof summary


_FORMAT_ROWS = ("full", "outline", "premises")
_FORMAT_TITLES = {"full": "Full", "outline": "Outline", "premises": "Premises"}


@dataclass
class TaskSummary:
    short_name: str
    gold: bool
    # grades[(format, temperature)] -> list by sample order; None = ungraded
    grades: dict[tuple[str, float], list[int | None]] = field(default_factory=dict)

    def row_max(self, fmt: str) -> int | None:
        values = [
            v
            for (f, _), samples in self.grades.items()
            if f == fmt
            for v in samples
            if v is not None
        ]
        return max(values) if values else None

    def temp_max(self, temperature: float) -> int | None:
        values = [
            v
            for (_, t), samples in self.grades.items()
            if t == temperature
            for v in samples
            if v is not None
        ]
        return max(values) if values else None

    def overall_max(self) -> int | None:
        values = [v for samples in self.grades.values() for v in samples if v is not None]
        return max(values) if values else None


@dataclass
class ProofSummary:
    tasks: list[TaskSummary] = field(default_factory=list)
    total_graded: int = 0
    count_by_value: dict[int, int] = field(default_factory=dict)

    def count_scored(self, value: int) -> int:
        return self.count_by_value.get(value, 0)


def summarize(archive: CompletionArchive) -> ProofSummary:
    """Per-theorem grade tables plus the global tally of exact scores."""
    latest = archive.latest_grades()
    by_task: dict[tuple[str, bool], TaskSummary] = {}
    order: list[tuple[str, bool]] = []
    for cid, record in archive.completions.items():
        key = (str(record["short_name"]), bool(record.get("gold", False)))
        if key not in by_task:
            by_task[key] = TaskSummary(short_name=key[0], gold=key[1])
            order.append(key)
        grade = latest.get(cid)
        cell = (str(record["format"]), float(record["temperature"]))
        samples = by_task[key].grades.setdefault(cell, [])
        sample_idx = int(record.get("sample", len(samples) + 1))
        while len(samples) < sample_idx:
            samples.append(None)
        samples[sample_idx - 1] = grade

    summary = ProofSummary(tasks=[by_task[k] for k in order])
    counts: dict[int, int] = {}
    graded = 0
    for value in latest.values():
        counts[value] = counts.get(value, 0) + 1
        graded += 1
    summary.total_graded = graded
    summary.count_by_value = counts
    return summary


def render_proof_summary(summary: ProofSummary, temperatures: tuple[float, ...] = DEFAULT_PROOF_TEMPERATURES) -> str:
    """Markdown tables: rows Full/Outline/Premises, columns per temperature O1..O3, Max."""
    lines: list[str] = ["# Proof translation scores", ""]
    for task in summary.tasks:
        title = task.short_name + (" (gold statement in prompt)" if task.gold else "")
        lines.append(f"## {title}")
        lines.append("")
        header = ["Format"]
        for t in temperatures:
            header.extend([f"T={t} O1", f"T={t} O2", f"T={t} O3"])
        header.append("Max")
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        for fmt in _FORMAT_ROWS:
            row = [_FORMAT_TITLES[fmt]]
            for t in temperatures:
                samples = task.grades.get((fmt, t), [])
                for i in range(3):
                    v = samples[i] if i < len(samples) else None
                    row.append("" if v is None else str(v))
            row_max = task.row_max(fmt)
            row.append("" if row_max is None else str(row_max))
            lines.append("| " + " | ".join(row) + " |")
        max_row = ["Max"]
        for t in temperatures:
            tmax = task.temp_max(t)
            max_row.extend(["" if tmax is None else str(tmax), "", ""])
        overall = task.overall_max()
        max_row.append("" if overall is None else str(overall))
        lines.append("| " + " | ".join(max_row) + " |")
        lines.append("")
    lines.append(
        f"Graded completions: {summary.total_graded}; "
        f"scored 3: {summary.count_scored(3)}; scored 4: {summary.count_scored(4)}"
    )
    lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Report emission


class ReportFormat(enum.Enum):
    MARKDOWN = "md"
    CSV = "csv"


_TABLE_CATEGORY_ORDER = ("theorems", "silly", "false")
_GRADE_CATEGORY_ORDER = ("false", "silly", "theorems")
_GRADE_CATEGORY_TITLES = {
    "false": "false statements",
    "silly": "silly statements",
    "theorems": "theorem statements",
}


def _fmt_median(value: float | int | None) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def emit_report(report: RunReport, fmt: ReportFormat) -> str:
    if fmt is ReportFormat.CSV:
        return _emit_csv(report)
    return _emit_markdown(report)


def _emit_markdown(report: RunReport) -> str:
    lines = ["# Statement translation results", ""]
    categories = [c for c in _TABLE_CATEGORY_ORDER if any(k[0] == c for k in report.cells)]
    categories += sorted({k[0] for k in report.cells} - set(categories))

    if report.cells:
        lines.append(
            "Counts of dataset items with at least one elaborated completion "
            f"(median over {report.runs} runs); parenthesized: greedy at temperature 0.2."
        )
        lines.append("")
        header = [""] + [
            f"{CATEGORY_TITLES.get(Category(c), c)} {col}"
            for c in categories
            for col in ("Fixed", "Input-dependent")
        ]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))

        def cell_text(category: str, config: str, paren_config: str | None = None) -> str:
            value = _fmt_median(report.median(category, config))
            if paren_config is not None:
                paren = _fmt_median(report.median(category, paren_config))
                if paren:
                    value = f"{value} ({paren})" if value else f"({paren})"
            return value

        greedy_row = ["Greedy"]
        filtered_row = ["Filtered"]
        for c in categories:
            greedy_row.append(cell_text(c, "greedy_fixed", "greedy_t02_fixed"))
            greedy_row.append(cell_text(c, "greedy_input"))
            filtered_row.append(cell_text(c, "filtered_fixed"))
            filtered_row.append(cell_text(c, "filtered_input"))
        lines.append("| " + " | ".join(greedy_row) + " |")
        lines.append("| " + " | ".join(filtered_row) + " |")
        lines.append("")

        extra = sorted(
            {k[1] for k in report.cells}
            - {"greedy_fixed", "greedy_t02_fixed", "greedy_input", "filtered_fixed", "filtered_input"}
        )
        if extra:
            lines.append("Other configurations:")
            lines.append("")
            lines.append("| Config | Category | Runs | Median |")
            lines.append("|---|---|---|---|")
            for config in extra:
                for c in categories:
                    values = report.cells.get((c, config))
                    if values:
                        runs_text = ";".join(str(v) for v in values)
                        lines.append(
                            f"| {config} | {c} | {runs_text} | {_fmt_median(median_cell(values))} |"
                        )
            lines.append("")

    if report.grade_rows:
        lines.append("Correctness of elaborated statements (recorded grades):")
        lines.append("")
        grade_cats = [c for c in _GRADE_CATEGORY_ORDER if c in report.grade_rows]
        grade_cats += sorted(set(report.grade_rows) - set(grade_cats))
        header = [""] + [_GRADE_CATEGORY_TITLES.get(c, f"{c} statements") for c in grade_cats]
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "---|" * len(header))
        for label, attr in (
            ("Elaborated", "elaborated"),
            ("Correct", "correct"),
            ("Some correct", "some_correct"),
            ("All wrong", "all_wrong"),
        ):
            row = [label] + [str(getattr(report.grade_rows[c], attr)) for c in grade_cats]
            lines.append("| " + " | ".join(row) + " |")
        lines.append("")

    if report.warnings:
        lines.append("Warnings:")
        lines.extend(f"- {w}" for w in report.warnings)
        lines.append("")
    return "\n".join(lines)


def _emit_csv(report: RunReport) -> str:
    import csv
    import io

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["row_type", "category", "config", "data"])
    meta = {
        "runs": report.runs,
        "dataset_sizes": report.dataset_sizes,
        "provenance": report.provenance,
        "warnings": report.warnings,
    }
    writer.writerow(["meta", "", "", json.dumps(meta, ensure_ascii=False, sort_keys=True)])
    for (category, config), values in sorted(report.cells.items()):
        writer.writerow(["cell", category, config, json.dumps(values)])
    for category in sorted(report.grade_rows):
        row = report.grade_rows[category]
        writer.writerow(
            [
                "grades",
                category,
                "",
                json.dumps(
                    {
                        "elaborated": row.elaborated,
                        "correct": row.correct,
                        "some_correct": row.some_correct,
                        "all_wrong": row.all_wrong,
                    },
                    sort_keys=True,
                ),
            ]
        )
    return buf.getvalue()


def parse_report_csv(text: str) -> RunReport:
    import csv
    import io

    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["row_type", "category", "config", "data"]:
        raise HarnessError(f"unexpected CSV header {header!r}")
    report = RunReport(runs=1)
    for row in reader:
        if not row:
            continue
        row_type, category, config, data = row
        payload = json.loads(data)
        if row_type == "meta":
            report.runs = int(payload["runs"])
            report.dataset_sizes = {str(k): int(v) for k, v in payload["dataset_sizes"].items()}
            report.provenance = payload["provenance"]
            report.warnings = list(payload["warnings"])
        elif row_type == "cell":
            report.cells[(category, config)] = [int(v) for v in payload]
        elif row_type == "grades":
            report.grade_rows[category] = GradeRow(**payload)
        else:
            raise HarnessError(f"unknown CSV row type {row_type!r}")
    return report
