from dataclasses import dataclass


@dataclass(frozen=True)
class DegreeStats:
    max_degree: int
    avg_degree: float
    rsd: float


@dataclass(frozen=True)
class TraceRecord:
    phase: int
    iteration: int
    stage: str  # 'coloring', 'clustering', 'rebuild', 'vf'
    modularity: float
    moves: int
    millis: float

    def as_row(self) -> list:
        return [self.phase, self.iteration, self.stage, repr(self.modularity), self.moves, f"{self.millis:.3f}"]


@dataclass(frozen=True)
class PartitionComparison:
    tp: int
    fp: int
    fn: int
    tn: int
    sp: float
    se: float
    oq: float
    rand: float

    @property
    def pairs(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def as_csv(self) -> str:
        return (
            f"{self.tp},{self.fp},{self.fn},{self.tn},"
            f"{_fmt_score(self.sp)},{_fmt_score(self.se)},{_fmt_score(self.oq)},{_fmt_score(self.rand)}"
        )


def _fmt_score(x: float) -> str:
    # 1.0 / 0.0 print as is, everything else to six places
    if x in (0.0, 1.0):
        return repr(float(x))
    return f"{x:.6f}"
