"""Candidate filtering through a pluggable statement checker.

Two checkers implement the same interface: a pure in-process mock used for
offline runs and tests, and a bridge to an external worker process speaking
a line-delimited JSON protocol on stdin/stdout:

    request:  {"id": n, "mode": "check"|"equal", "statement": s,
               "other": t?, "context": [...]}
    response: {"id": n, "status": "elaborated"|"parsed"|"failed",
               "normalized": s?, "equal": b?, "diagnostics": [...]}

The worker announces readiness with the single line ``{"ready": true}``.
A crashed or timed-out worker yields Failed results carrying the
"checker-unavailable" diagnostic; those are infrastructure failures, not
negative verdicts, and callers must report them separately.
"""
from __future__ import annotations

import enum
import json
import queue
import subprocess
import threading
from dataclasses import dataclass, field

from .postprocess import TokenKind, normalize_statement, parse_completion

CHECKER_UNAVAILABLE = "checker-unavailable"
DEFAULT_TIMEOUT = 30.0


class CheckMode(enum.Enum):
    CHECK = "check"
    EQUAL = "equal"


class CheckStatus(enum.Enum):
    ELABORATED = "elaborated"
    PARSED_ONLY = "parsed"
    FAILED = "failed"


@dataclass(frozen=True)
class CheckRequest:
    statement: str
    context: tuple[str, ...] = ()
    mode: CheckMode = CheckMode.CHECK
    other: str | None = None

    def __post_init__(self) -> None:
        if not self.statement:
            raise ValueError("statement must be nonempty")
        if (self.other is not None) != (self.mode is CheckMode.EQUAL):
            raise ValueError("`other` is required exactly in Equal mode")


@dataclass(frozen=True)
class CheckResult:
    status: CheckStatus
    normalized: str | None = None
    diagnostics: tuple[str, ...] = ()
    equal: bool | None = None

    def __post_init__(self) -> None:
        if (self.normalized is not None) != (self.status is CheckStatus.ELABORATED):
            raise ValueError("normalized present iff status is Elaborated")

    @property
    def unavailable(self) -> bool:
        return CHECKER_UNAVAILABLE in self.diagnostics


def _split_binders_goal(signature: str) -> tuple[str, str] | None:
    """Split at the first top-level colon; None when there is no goal."""
    depth = 0
    for i, ch in enumerate(signature):
        if ch in "([{⟨":
            depth += 1
        elif ch in ")]}⟩":
            depth = max(0, depth - 1)
        elif ch == ":" and depth == 0:
            if signature[i : i + 2] == ":=":
                return None
            return signature[:i], signature[i + 1 :]
    return None


def _render_forall(signature: str) -> str | None:
    """Universally-closed rendering with hypothesis binders as arrows."""
    split = _split_binders_goal(signature)
    if split is None:
        return None
    binders, goal = split
    goal = goal.strip()
    if not goal:
        return None

    quantified: list[str] = []
    arrows: list[str] = []
    depth = 0
    start = None
    for i, ch in enumerate(binders):
        if ch in "([{⟨":
            if depth == 0:
                start = i
            depth += 1
        elif ch in ")]}⟩":
            depth -= 1
            if depth == 0 and start is not None:
                group = binders[start : i + 1]
                inner = group[1:-1]
                if group[0] == "(" and _split_binders_goal(inner) is not None:
                    _, hyp_type = _split_binders_goal(inner)  # type: ignore[misc]
                    arrows.append(hyp_type.strip())
                else:
                    quantified.append(group)
                start = None
    chain = " → ".join(arrows + [goal])
    if quantified:
        return f"{' '.join(quantified)}, {chain}"
    return chain


@dataclass
class MockChecker:
    """Deterministic stand-in correlated with real elaboration failures.

    Elaborated iff delimiters balance, every Candidate identifier is in the
    target lexicon, and a top-level colon separates binders from a nonempty
    goal.  The normalized form prefixes ``theorem ∀ `` to the signature with
    hypothesis binders rendered as arrows.
    """

    lexicon4: frozenset[str] = frozenset()
    context: tuple[str, ...] = ()

    def check(self, request: CheckRequest) -> CheckResult:
        if request.mode is CheckMode.EQUAL:
            assert request.other is not None
            left = self.check(CheckRequest(statement=request.statement, context=request.context))
            right = self.check(CheckRequest(statement=request.other, context=request.context))
            ok = (
                left.status is CheckStatus.ELABORATED
                and right.status is CheckStatus.ELABORATED
            )
            equal = ok and left.normalized == right.normalized
            if not ok:
                return CheckResult(
                    status=CheckStatus.FAILED,
                    diagnostics=("equal-mode operand failed to elaborate",),
                    equal=False,
                )
            return CheckResult(
                status=left.status, normalized=left.normalized, equal=equal
            )

        try:
            parsed = parse_completion(request.statement)
        except ValueError as exc:
            return CheckResult(status=CheckStatus.FAILED, diagnostics=(str(exc),))
        diagnostics: list[str] = []
        if not parsed.balanced:
            diagnostics.append("unbalanced delimiters")
        unknown = sorted(
            {
                tok.text
                for tok in parsed.identifiers
                if tok.kind is TokenKind.CANDIDATE and tok.text not in self.lexicon4
            }
        )
        for name in unknown:
            diagnostics.append(f"unknown identifier {name}")
        rendered = _render_forall(parsed.signature)
        if not parsed.balanced or unknown:
            return CheckResult(status=CheckStatus.FAILED, diagnostics=tuple(diagnostics))
        if rendered is None:
            # parsed cleanly but there is nothing to elaborate into a statement
            return CheckResult(
                status=CheckStatus.PARSED_ONLY, diagnostics=("no top-level goal",)
            )
        return CheckResult(
            status=CheckStatus.ELABORATED,
            normalized="theorem ∀ " + normalize_statement(rendered),
        )


class ExternalChecker:
    """Bridge to a worker subprocess speaking the line-delimited protocol."""

    def __init__(self, cmd: list[str], context: tuple[str, ...] = (), timeout: float = DEFAULT_TIMEOUT):
        self.cmd = list(cmd)
        self.context = tuple(context)
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._responses: "queue.Queue[dict | None]" = queue.Queue()
        self._lock = threading.Lock()
        self._next_id = 0

    def _ensure_started(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            return
        self._proc = subprocess.Popen(
            self.cmd,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
            encoding="utf-8",
        )
        self._responses = queue.Queue()
        threading.Thread(target=self._pump, args=(self._proc,), daemon=True).start()
        ready = self._take(self.timeout)
        if not ready or not ready.get("ready"):
            raise RuntimeError(f"checker {self.cmd!r} did not signal readiness")

    def _pump(self, proc: subprocess.Popen) -> None:
        assert proc.stdout is not None
        for line in proc.stdout:
            line = line.strip()
            if not line:
                continue
            try:
                self._responses.put(json.loads(line))
            except json.JSONDecodeError:
                self._responses.put({"malformed": line})
        self._responses.put(None)

    def _take(self, timeout: float) -> dict | None:
        try:
            return self._responses.get(timeout=timeout)
        except queue.Empty:
            return None

    def check(self, request: CheckRequest) -> CheckResult:
        with self._lock:
            try:
                self._ensure_started()
            except (OSError, RuntimeError):
                return CheckResult(status=CheckStatus.FAILED, diagnostics=(CHECKER_UNAVAILABLE,))
            self._next_id += 1
            req_id = self._next_id
            payload: dict = {
                "id": req_id,
                "mode": request.mode.value,
                "statement": request.statement,
                "context": list(request.context or self.context),
            }
            if request.other is not None:
                payload["other"] = request.other
            assert self._proc is not None and self._proc.stdin is not None
            try:
                self._proc.stdin.write(json.dumps(payload, ensure_ascii=False) + "\n")
                self._proc.stdin.flush()
            except (BrokenPipeError, OSError):
                return CheckResult(status=CheckStatus.FAILED, diagnostics=(CHECKER_UNAVAILABLE,))
            while True:
                resp = self._take(self.timeout)
                if resp is None:
                    self._terminate()
                    return CheckResult(status=CheckStatus.FAILED, diagnostics=(CHECKER_UNAVAILABLE,))
                if resp.get("id") == req_id:
                    return self._to_result(resp)

    @staticmethod
    def _to_result(resp: dict) -> CheckResult:
        status_map = {
            "elaborated": CheckStatus.ELABORATED,
            "parsed": CheckStatus.PARSED_ONLY,
            "failed": CheckStatus.FAILED,
        }
        status = status_map.get(str(resp.get("status")), CheckStatus.FAILED)
        normalized = resp.get("normalized") if status is CheckStatus.ELABORATED else None
        if status is CheckStatus.ELABORATED and normalized is None:
            status = CheckStatus.FAILED
        diagnostics = tuple(str(d) for d in resp.get("diagnostics", []))
        equal = resp.get("equal") if isinstance(resp.get("equal"), bool) else None
        return CheckResult(status=status, normalized=normalized, diagnostics=diagnostics, equal=equal)

    def _terminate(self) -> None:
        if self._proc is not None and self._proc.poll() is None:
            self._proc.kill()
        self._proc = None

    def close(self) -> None:
        with self._lock:
            if self._proc is not None and self._proc.stdin is not None and self._proc.poll() is None:
                try:
                    self._proc.stdin.close()
                except OSError:
                    pass
            self._terminate()

    def __enter__(self) -> "ExternalChecker":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


class CheckerPool:
    """Round-robin pool of external workers; one in-flight request per worker."""

    def __init__(self, cmd: list[str], size: int = 1, **kwargs):
        if size < 1:
            raise ValueError("pool size must be >= 1")
        self._workers = [ExternalChecker(cmd, **kwargs) for _ in range(size)]
        self._cursor = 0
        self._lock = threading.Lock()

    def check(self, request: CheckRequest) -> CheckResult:
        with self._lock:
            worker = self._workers[self._cursor % len(self._workers)]
            self._cursor += 1
        return worker.check(request)

    def close(self) -> None:
        for w in self._workers:
            w.close()


def check(candidate_signature: str, checker) -> CheckResult:
    return checker.check(CheckRequest(statement=candidate_signature))


@dataclass
class FilterOutcome:
    """Survivors plus the infrastructure failures that must not count as negatives."""

    survivors: list[tuple[int, CheckResult]] = field(default_factory=list)
    unavailable: int = 0

    @property
    def indices(self) -> list[int]:
        return [i for i, _ in self.survivors]


def check_all(signatures: list[str], checker, max_workers: int = 1) -> list[CheckResult]:
    """Check every signature, preserving input order in the result list."""
    if max_workers <= 1 or len(signatures) <= 1:
        return [check(s, checker) for s in signatures]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(lambda s: check(s, checker), signatures))


def filter_elaborated(signatures: list[str], checker, max_workers: int = 1) -> FilterOutcome:
    """Order-preserving subsequence of inputs whose status is Elaborated."""
    outcome = FilterOutcome()
    for idx, result in enumerate(check_all(signatures, checker, max_workers=max_workers)):
        if result.unavailable:
            outcome.unavailable += 1
        elif result.status is CheckStatus.ELABORATED:
            outcome.survivors.append((idx, result))
    return outcome
