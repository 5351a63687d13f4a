"""Trainer-agnostic fine-tuning schedule: LR decay, early stop, epoch cap.

The controller consumes one validation loss per epoch and emits a decision:
keep going, decay the learning rate (factor 0.3 after 5 non-improving
epochs), or stop (10 non-improving epochs, the 100-epoch cap, or a NaN
loss). The non-improvement counter is reset only by an actual improvement,
so a single streak of 10 yields one decay at 5 and the stop at 10.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

CONTINUE = "continue"
DECAY_LR = "decay_lr"
STOP = "stop"

STOP_EARLY = "early"
STOP_CAP = "cap"
STOP_DIVERGED = "diverged"


@dataclass(frozen=True)
class Decision:
    kind: str
    lr_factor: float
    reason: str | None = None

    @property
    def is_stop(self) -> bool:
        return self.kind == STOP


@dataclass(frozen=True)
class ScheduleConfig:
    decay_factor: float = 0.3
    decay_patience: int = 5
    stop_patience: int = 10
    max_epochs: int = 100
    improvement_epsilon: float = 0.0  # strict decrease counts as improvement


class ScheduleController:
    """Sequential state machine; one owner per training run."""

    def __init__(self, config: ScheduleConfig | None = None):
        self.config = config or ScheduleConfig()
        self.best_loss = math.inf
        self.epochs_since_improvement = 0
        self.num_decays = 0
        self.epoch = 0
        self.history: list[dict] = []

    @property
    def lr_factor(self) -> float:
        return self.config.decay_factor ** self.num_decays

    def observe(self, val_loss: float) -> Decision:
        """Advance one epoch with a new validation loss."""
        cfg = self.config
        self.epoch += 1

        if math.isnan(val_loss):
            return self._record(val_loss, Decision(STOP, self.lr_factor, STOP_DIVERGED))

        if val_loss < self.best_loss - cfg.improvement_epsilon:
            self.best_loss = val_loss
            self.epochs_since_improvement = 0
        else:
            self.epochs_since_improvement += 1

        if self.epochs_since_improvement >= cfg.stop_patience:
            decision = Decision(STOP, self.lr_factor, STOP_EARLY)
        elif self.epoch >= cfg.max_epochs:
            decision = Decision(STOP, self.lr_factor, STOP_CAP)
        elif self.epochs_since_improvement == cfg.decay_patience:
            self.num_decays += 1
            decision = Decision(DECAY_LR, self.lr_factor)
        else:
            decision = Decision(CONTINUE, self.lr_factor)
        return self._record(val_loss, decision)

    def _record(self, loss: float, decision: Decision) -> Decision:
        self.history.append(
            {
                "epoch": self.epoch,
                "loss": loss,
                "decision": decision.kind,
                "lr_factor": decision.lr_factor,
                "reason": decision.reason,
            }
        )
        return decision

    def write_log(self, path: str | Path) -> None:
        """Decision log as JSON lines, one object per observed epoch."""
        with open(path, "w") as f:
            for entry in self.history:
                f.write(json.dumps(entry, sort_keys=True) + "\n")


def run_schedule(losses, config: ScheduleConfig | None = None) -> list[Decision]:
    """Replay a whole loss sequence; stops after the first stop decision."""
    controller = ScheduleController(config)
    decisions = []
    for loss in losses:
        decision = controller.observe(loss)
        decisions.append(decision)
        if decision.is_stop:
            break
    return decisions
