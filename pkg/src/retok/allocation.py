"""Discrete concave slot allocation across scripts.

Each script carries a saturation curve: cumulative token savings as a
function of slots granted, built by ranking that script's candidate merges
by descending fire count and summing. Curves are therefore non-decreasing
and concave by construction, which makes the greedy marginal solver exact:
repeatedly grant the next slot to the script with the largest current
marginal until the budget is spent.

Three ablation policies ship alongside the solver. worst-script-first fills
scripts in ascending coverage order to their ceilings; frequency-only
splits the budget proportionally to per-script corpus share; equal splits
it uniformly. The latter two clamp at per-script ceilings without
redistributing, so they may use fewer slots than the budget.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

POLICIES = ("greedy", "worst-script-first", "frequency-only", "equal")


class InfeasibleBudgetError(ValueError):
    """The budget exceeds the combined per-script ceilings."""


@dataclass
class SaturationCurve:
    script: str
    cumulative_savings: list[int]

    def __post_init__(self):
        prev = 0
        prev_delta = None
        for value in self.cumulative_savings:
            delta = value - prev
            if delta < 0:
                raise ValueError(f"{self.script}: curve not non-decreasing")
            if prev_delta is not None and delta > prev_delta:
                raise ValueError(f"{self.script}: curve not concave")
            prev, prev_delta = value, delta

    @property
    def ceiling(self) -> int:
        return len(self.cumulative_savings)

    def value(self, slots: int) -> int:
        if slots <= 0 or not self.cumulative_savings:
            return 0
        return self.cumulative_savings[min(slots, self.ceiling) - 1]

    def marginal(self, slots: int) -> int:
        """Gain of granting slot number slots+1."""
        if slots >= self.ceiling:
            return 0
        return self.value(slots + 1) - self.value(slots)


def build_curve(script: str, candidates: list[tuple[object, int]]) -> SaturationCurve:
    """Cumulative savings from the top-k candidates, ranked by fire count."""
    fires = sorted((int(f) for _m, f in candidates), reverse=True)
    if any(f < 0 for f in fires):
        raise ValueError("negative fire count")
    out: list[int] = []
    running = 0
    for f in fires:
        running += f
        out.append(running)
    return SaturationCurve(script=script, cumulative_savings=out)


@dataclass
class AllocationProblem:
    curves: dict[str, SaturationCurve]
    budget: int
    # Ablation-policy inputs: lower coverage = worse-covered script (filled
    # first by worst-script-first); share = corpus frequency weight used by
    # frequency-only. Both optional; defaults derived from the curves.
    coverage: dict[str, float] = field(default_factory=dict)
    corpus_share: dict[str, float] = field(default_factory=dict)

    @property
    def total_ceiling(self) -> int:
        return sum(c.ceiling for c in self.curves.values())

    def save(self, path: str | Path) -> None:
        payload = {
            "budget": self.budget,
            "curves": {s: c.cumulative_savings for s, c in self.curves.items()},
            "coverage": self.coverage,
            "corpus_share": self.corpus_share,
        }
        Path(path).write_text(json.dumps(payload, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "AllocationProblem":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls(
            curves={
                s: SaturationCurve(script=s, cumulative_savings=list(v))
                for s, v in raw["curves"].items()
            },
            budget=int(raw["budget"]),
            coverage={k: float(v) for k, v in raw.get("coverage", {}).items()},
            corpus_share={k: float(v) for k, v in raw.get("corpus_share", {}).items()},
        )


@dataclass
class AllocationResult:
    x: dict[str, int]
    total_savings: int
    policy: str
    slots_used: int

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.__dict__, indent=1), encoding="utf-8")


def _result(problem: AllocationProblem, x: dict[str, int], policy: str) -> AllocationResult:
    total = sum(problem.curves[s].value(n) for s, n in x.items())
    return AllocationResult(
        x=dict(sorted(x.items())),
        total_savings=total,
        policy=policy,
        slots_used=sum(x.values()),
    )


def _greedy(problem: AllocationProblem) -> AllocationResult:
    if problem.budget > problem.total_ceiling:
        raise InfeasibleBudgetError(
            f"budget {problem.budget} exceeds total ceiling {problem.total_ceiling}"
        )
    x = {s: 0 for s in problem.curves}
    for _step in range(problem.budget):
        # Largest marginal wins; ties break to the lowest current count,
        # then script-name order. The optimum is flat across tie-breaks.
        best = min(
            problem.curves,
            key=lambda s: (-problem.curves[s].marginal(x[s]), x[s], s),
        )
        if problem.curves[best].marginal(x[best]) == 0:
            # All remaining marginals are zero; spend the slot anywhere legal.
            legal = [s for s in problem.curves if x[s] < problem.curves[s].ceiling]
            best = min(legal, key=lambda s: (x[s], s))
        x[best] += 1
    return _result(problem, x, "greedy")


def _worst_script_first(problem: AllocationProblem) -> AllocationResult:
    coverage = problem.coverage or {
        # Without an explicit coverage proxy, treat scripts with richer
        # candidate pools as better covered (denser existing support).
        s: float(c.ceiling) for s, c in problem.curves.items()
    }
    order = sorted(problem.curves, key=lambda s: (coverage.get(s, 0.0), s))
    x = {s: 0 for s in problem.curves}
    remaining = problem.budget
    for s in order:
        take = min(problem.curves[s].ceiling, remaining)
        x[s] = take
        remaining -= take
        if remaining == 0:
            break
    return _result(problem, x, "worst-script-first")


def _frequency_only(problem: AllocationProblem) -> AllocationResult:
    share = problem.corpus_share or {
        s: float(c.value(c.ceiling)) for s, c in problem.curves.items()
    }
    total_share = sum(share.get(s, 0.0) for s in problem.curves) or 1.0
    x = {}
    for s, curve in problem.curves.items():
        want = int(problem.budget * share.get(s, 0.0) / total_share)
        x[s] = min(want, curve.ceiling)
    return _result(problem, x, "frequency-only")


def _equal(problem: AllocationProblem) -> AllocationResult:
    per_script = problem.budget // len(problem.curves)
    x = {s: min(per_script, c.ceiling) for s, c in problem.curves.items()}
    return _result(problem, x, "equal")


def allocate(problem: AllocationProblem, policy: str = "greedy") -> AllocationResult:
    """Solve the slot allocation under the named policy.

    greedy is exact for concave curves. The ablation policies are
    deliberately weaker: frequency-only and equal clamp at ceilings without
    redistribution and so may use fewer slots than the budget.
    """
    if policy == "greedy":
        return _greedy(problem)
    if policy == "worst-script-first":
        return _worst_script_first(problem)
    if policy == "frequency-only":
        return _frequency_only(problem)
    if policy == "equal":
        return _equal(problem)
    raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")


def compare_policies(problem: AllocationProblem) -> list[dict]:
    """Run all policies and report savings relative to greedy."""
    rows = []
    baseline = allocate(problem, "greedy").total_savings
    for policy in POLICIES:
        result = allocate(problem, policy)
        delta = (
            100.0 * (result.total_savings - baseline) / baseline if baseline else 0.0
        )
        rows.append(
            {
                "policy": policy,
                "slots_used": result.slots_used,
                "total_savings": result.total_savings,
                "delta_vs_greedy_pct": round(delta, 2),
            }
        )
    return rows


def policies_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(
        buf, fieldnames=["policy", "slots_used", "total_savings", "delta_vs_greedy_pct"]
    )
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
