"""Checkpointed sweeps that can be interrupted and resumed exactly."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Callable

from .config import RunConfig
from .estimator import Accumulator, ConfigMismatchError, FTable, accumulate_parallel

CHECKPOINT_VERSION = 1
CHECKPOINT_NAME = "checkpoint.json"
TABLE_NAME = "ftable.csv"


class CheckpointError(ValueError):
    """Checkpoint is unreadable, from another version or from another config."""


def save_checkpoint(path: Path, acc: Accumulator, config: RunConfig) -> None:
    state = {
        "version": CHECKPOINT_VERSION,
        "digest": config.digest(),
        "config": config.to_dict(),
        "cursor": config.skip + acc.total_points,
        "accumulator": acc.to_dict(),
    }
    tmp = path.with_suffix(".tmp")
    tmp.write_text(json.dumps(state))
    os.replace(tmp, path)


def load_checkpoint(path: Path, config: RunConfig) -> Accumulator:
    try:
        state = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read checkpoint {path}: {exc}") from exc
    if state.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(f"{path}: unsupported checkpoint version {state.get('version')!r}")
    if state.get("digest") != config.digest():
        raise CheckpointError(
            f"{path}: checkpoint digest {state.get('digest')} does not match config digest {config.digest()}"
        )
    acc = Accumulator.from_dict(state["accumulator"])
    if acc.ranges and acc.ranges != [(config.skip, acc.total_points)]:
        raise CheckpointError(f"{path}: checkpoint ranges are not a prefix of the sequence")
    if state["cursor"] != config.skip + acc.total_points:
        raise CheckpointError(f"{path}: inconsistent cursor")
    return acc


def run(
    config: RunConfig,
    resume: bool = False,
    on_checkpoint: Callable[[Accumulator], None] | None = None,
) -> FTable:
    """Sweep ``config.points`` points, saving state every ``checkpoint_every``.

    Results are written to ``<out>/ftable.csv`` plus a JSON sidecar. With
    ``resume`` the sweep continues from ``<out>/checkpoint.json``; counts are
    integers and blocks are contiguous, so the final table is identical to an
    uninterrupted run.
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    ckpt = out / CHECKPOINT_NAME
    acc = Accumulator.empty(config)
    if resume and ckpt.exists():
        acc = load_checkpoint(ckpt, config)
        if acc.total_points > config.points:
            raise CheckpointError(
                f"checkpoint already holds {acc.total_points} points, more than the {config.points} requested"
            )
    step = max(int(config.checkpoint_every), 1)
    while acc.total_points < config.points:
        n = min(step, config.points - acc.total_points)
        acc = acc.merge(accumulate_parallel(config.skip + acc.total_points, n, config))
        save_checkpoint(ckpt, acc, config)
        if on_checkpoint is not None:
            on_checkpoint(acc)
    try:
        table = FTable.from_accumulator(acc, config)
    except ConfigMismatchError as exc:
        raise CheckpointError(str(exc)) from exc
    table.write(out / TABLE_NAME)
    return table
