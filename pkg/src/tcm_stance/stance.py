"""Binary stance labels shared across the pipeline."""

from __future__ import annotations

import enum


class Stance(enum.Enum):
    SUPPORTING = "support"
    OPPOSING = "oppose"

    @classmethod
    def from_wire(cls, word: str) -> "Stance":
        """Parse the on-disk spelling ("support" / "oppose")."""
        for stance in cls:
            if stance.value == word:
                return stance
        raise ValueError(f"unknown stance word: {word!r}")

    @property
    def wire(self) -> str:
        return self.value

    def other(self) -> "Stance":
        return Stance.OPPOSING if self is Stance.SUPPORTING else Stance.SUPPORTING
