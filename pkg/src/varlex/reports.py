"""Shared result containers.

Verdicts are three-valued strings ("true" / "false" / "inconclusive"):
finite horizons cannot certify limits, so inconclusive is a first-class
outcome, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

TRUE, FALSE, INCONCLUSIVE = "true", "false", "inconclusive"
VERDICTS = (TRUE, FALSE, INCONCLUSIVE)


@dataclass
class TestReport:
    """A structured verdict: the headline value, the evidence series, and the
    tolerances the verdict was judged against."""

    kind: str
    verdict: str
    value: float | None = None
    series: list = field(default_factory=list)
    tolerance: float | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")

    @property
    def passed(self) -> bool:
        return self.verdict == TRUE

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "verdict": self.verdict,
            "value": self.value,
            "series": list(self.series),
            "tolerance": self.tolerance,
            "details": self.details,
        }


def fit_loglog_slope(xs, ys) -> float:
    """Least-squares slope of log(y) against log(x), ignoring nonpositive
    entries; nan when fewer than two usable points."""
    import numpy as np

    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    ok = (xs > 0) & (ys > 0) & np.isfinite(ys)
    if ok.sum() < 2:
        return float("nan")
    lx, ly = np.log(xs[ok]), np.log(ys[ok])
    return float(np.polyfit(lx, ly, 1)[0])
