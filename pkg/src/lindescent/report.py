"""Audit report container shared by the numerical self-checks."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class AuditItem:
    name: str
    passed: bool
    worst: float
    detail: str = ""


@dataclass
class AuditReport:
    title: str
    items: list[AuditItem] = field(default_factory=list)
    extras: dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(item.passed for item in self.items)

    def add(self, name: str, passed: bool, worst: float, detail: str = "") -> None:
        self.items.append(AuditItem(name, bool(passed), float(worst), detail))

    def item(self, name: str) -> AuditItem:
        for it in self.items:
            if it.name == name:
                return it
        raise KeyError(name)

    def to_text(self) -> str:
        lines = [f"report: {self.title}", f"overall: {'pass' if self.passed else 'FAIL'}"]
        for key, value in self.extras.items():
            lines.append(f"{key}: {value}")
        for it in self.items:
            status = "pass" if it.passed else "FAIL"
            line = f"{it.name}: {status} (worst {it.worst:.6g})"
            if it.detail:
                line += f" {it.detail}"
            lines.append(line)
        return "\n".join(lines) + "\n"
