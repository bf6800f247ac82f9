"""Structured verification records.

Every check carries the label of the operator identity it exercises,
drawn from a fixed registry so batch reports stay machine-greppable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

# registry of identity labels a check may reference
IDENTITY_LABELS = frozenset(
    {
        "green-symmetry",
        "green-periodicity",
        "green-harmonicity",
        "boundary-correspondence",
        "kernel-local-form",
        "kernel-symmetry",
        "kernel-hermitian",
        "kernel-chart-covariance",
        "bergman-reproducing",
        "schiffer-vanishing",
        "regularized-kernel-continuity",
        "adjoint-pairing",
        "adjoint-conjugate-swap",
        "restriction-adjoint",
        "complete-identity",
        "grunsky-bound",
        "cross-block-singular-values",
        "cross-block-exactness",
        "left-inverse",
        "transmission-derivative-formula",
        "reflection-formula",
        "jump-derivative-cross",
        "jump-derivative-self",
        "jump-derivative-antiholomorphic",
        "jump-holomorphic-input",
        "plemelj-decomposition",
        "jump-isomorphism",
        "side-independence",
        "contour-side-independence",
        "admissibility-transport",
        "truncation-convergence",
        "exactness-of-self-block-image",
    }
)


@dataclass(frozen=True)
class CheckRecord:
    """One verified inequality: residual against its tolerance."""

    name: str
    identity: str
    residual: float
    tolerance: float

    def __post_init__(self):
        if self.identity not in IDENTITY_LABELS:
            raise ValueError(f"unregistered identity label {self.identity!r}")

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "identity": self.identity,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
        }


@dataclass
class Report:
    """Outcome of a verification run: records plus run metadata."""

    title: str
    records: list[CheckRecord] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    @staticmethod
    def from_records(title: str, records) -> "Report":
        return Report(title=title, records=list(records))

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def worst(self) -> float:
        if not self.records:
            return 0.0
        return max(r.residual / r.tolerance for r in self.records)

    def extend(self, other: "Report") -> None:
        self.records.extend(other.records)

    def canonical_json(self) -> str:
        """Deterministic serialization of the records (no timings/metadata)."""
        return json.dumps(
            {
                "title": self.title,
                "pass": self.passed,
                "records": [r.as_dict() for r in self.records],
            },
            sort_keys=True,
            indent=1,
        )

    def summary_lines(self) -> list[str]:
        out = []
        for r in self.records:
            flag = "PASS" if r.passed else "FAIL"
            out.append(
                f"[{flag}] {self.title}/{r.name}: residual={r.residual:.3e} "
                f"tol={r.tolerance:.1e} ({r.identity})"
            )
        return out
