"""Structured pass/fail reports and three-valued verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"


def _is_zero(residual) -> bool:
    if residual is None:
        return True
    if hasattr(residual, "is_zero"):
        return residual.is_zero()
    if isinstance(residual, (list, tuple)):
        return all(_is_zero(r) for r in residual)
    return residual == 0


def _render(residual) -> str:
    if isinstance(residual, (list, tuple)):
        return "(" + ", ".join(_render(r) for r in residual) + ")"
    return str(residual)


@dataclass
class Check:
    name: str
    inputs: str
    status: str
    residual: str = ""

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def line(self) -> str:
        head = f"{self.name} {self.inputs}".rstrip()
        if self.status == PASS:
            return f"{head} PASS"
        if self.status == FAIL:
            return f"{head} FAIL residual={self.residual}"
        return f"{head} INCONCLUSIVE {self.residual}".rstrip()


@dataclass
class Report:
    title: str = ""
    checks: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def record(self, name: str, inputs: str, residual) -> Check:
        """Record a check that passes iff ``residual`` is identically zero."""
        if _is_zero(residual):
            c = Check(name, inputs, PASS)
        else:
            c = Check(name, inputs, FAIL, _render(residual))
        self.checks.append(c)
        return c

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, other: "Report"):
        self.checks.extend(other.checks)
        self.notes.extend(other.notes)

    @property
    def passed(self) -> bool:
        return all(c.status == PASS for c in self.checks)

    @property
    def failures(self) -> list:
        return [c for c in self.checks if c.status == FAIL]

    @property
    def inconclusive(self) -> list:
        return [c for c in self.checks if c.status == INCONCLUSIVE]

    def by_name(self, name: str) -> list:
        return [c for c in self.checks if c.name == name]

    def status(self) -> str:
        if self.failures:
            return FAIL
        if self.inconclusive:
            return INCONCLUSIVE
        return PASS

    def __bool__(self):
        return self.passed

    def lines(self) -> list[str]:
        out = [c.line() for c in self.checks]
        out.extend(f"NOTE {n}" for n in self.notes)
        return out

    def render(self) -> str:
        return "\n".join(self.lines())


YES = "yes"
NO = "no"
UNKNOWN = "inconclusive"


@dataclass
class Verdict:
    """Three-valued answer with a witness explaining a negative or unknown result."""

    status: str
    witness: str = ""
    cap: int | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.status == YES

    @property
    def is_inconclusive(self) -> bool:
        return self.status == UNKNOWN

    def label(self) -> str:
        if self.status == UNKNOWN:
            return f"inconclusive(cap={self.cap})"
        return self.status

    def render(self, name: str = "DIRAC") -> str:
        line = f"{name}: {self.label()}"
        if self.witness:
            line += f" witness={self.witness}"
        return line

    @classmethod
    def yes(cls, **kw):
        return cls(YES, **kw)

    @classmethod
    def no(cls, witness="", **kw):
        return cls(NO, witness, **kw)

    @classmethod
    def unknown(cls, witness="", cap=None, **kw):
        return cls(UNKNOWN, witness, cap, **kw)


def conjunction(verdicts) -> Verdict:
    """First NO wins, then first INCONCLUSIVE, else YES."""
    verdicts = list(verdicts)
    for v in verdicts:
        if v.status == NO:
            return v
    for v in verdicts:
        if v.status == UNKNOWN:
            return v
    return Verdict.yes()
