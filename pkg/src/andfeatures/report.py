"""Run reports and their JSON form."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .andfeature import AndFeature
from .engine import STAT_KEYS
from .objectives import CandidateSolution, ObjectiveVector, lex_key

REPORT_FORMAT = "andfeatures-run/1"


@dataclass
class FinalSolution:
    features: list[AndFeature]
    count: int
    disproportion: float

    @property
    def objectives(self) -> ObjectiveVector:
        return ObjectiveVector(-self.count, self.disproportion)

    @classmethod
    def from_solution(cls, s: CandidateSolution) -> "FinalSolution":
        return cls(sorted(s.features), s.evaluated.connected_count, s.evaluated.disproportion)

    def to_dict(self) -> dict[str, Any]:
        return {
            "count": self.count,
            "disproportion": self.disproportion,
            "and_features": [" ".join(map(str, af)) for af in self.features],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "FinalSolution":
        feats = [AndFeature(int(v) for v in line.split()) for line in d["and_features"]]
        return cls(sorted(feats), int(d["count"]), float(d["disproportion"]))


@dataclass
class RunReport:
    """Outcome of one optimization run.

    ``history`` maps each statistic name (see ``STAT_KEYS``, plus
    ``archive_nondominated_count`` for SPEA2) to one value per generation,
    taken over the elite set (LGA) or the nondominated archive (SPEA2).
    """

    strategy: str
    config: dict[str, Any]
    seed: int
    history: dict[str, list] = field(default_factory=lambda: {k: [] for k in STAT_KEYS})
    final: list[FinalSolution] = field(default_factory=list)
    wall_time: float | None = None
    conventions: dict[str, str] = field(
        default_factory=lambda: {"disproportion_sd": "sample (N-1 denominator)"}
    )

    @property
    def generations(self) -> int:
        return len(self.history["count_max"])

    def record(self, stats: dict[str, float]) -> None:
        for k, v in stats.items():
            self.history.setdefault(k, []).append(v)

    def best(self) -> FinalSolution:
        """Lexicographic best of the final set (largest count, then lowest Δ)."""
        return min(self.final, key=lambda f: tuple(f.objectives))

    def lowest_disproportion(self) -> FinalSolution:
        return min(self.final, key=lambda f: (f.disproportion, -f.count))

    def to_dict(self, include_timing: bool = False) -> dict[str, Any]:
        d = {
            "format": REPORT_FORMAT,
            "strategy": self.strategy,
            "seed": self.seed,
            "config": self.config,
            "conventions": self.conventions,
            "generations": self.generations,
            "history": self.history,
            "final": [f.to_dict() for f in self.final],
        }
        if include_timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        d = json.loads(text)
        if d.get("format") != REPORT_FORMAT:
            raise ValueError(f"not a run report: format={d.get('format')!r}")
        return cls(
            strategy=d["strategy"],
            config=d["config"],
            seed=d["seed"],
            history=d["history"],
            final=[FinalSolution.from_dict(f) for f in d["final"]],
            wall_time=d.get("wall_time"),
            conventions=d.get("conventions", {}),
        )


def final_set(solutions: list[CandidateSolution]) -> list[FinalSolution]:
    return [FinalSolution.from_solution(s) for s in sorted(solutions, key=lex_key)]
