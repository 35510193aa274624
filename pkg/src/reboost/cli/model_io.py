"""Versioned text format for trained models.

Models are persisted materialized (flat per-term coefficients), one term
record per line, floats printed with 17 significant digits so predictions
round-trip exactly. A CRC-32 footer over all preceding lines guards
against truncation and corruption.
"""

from __future__ import annotations

import json
import zlib

import numpy as np

from reboost.core import EnsembleModel, InvalidInputError, Task
from reboost.learners import DecisionStump, IntervalAtom, RegressionTree, TreeNode
from reboost.losses import LossKind

FORMAT_NAME = "reboost-model"
FORMAT_VERSION = 1


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _term_line(coef: float, learner) -> str:
    if isinstance(learner, DecisionStump):
        payload = {
            "kind": "stump", "feature": learner.feature,
            "threshold": learner.threshold, "left": learner.left_value,
            "right": learner.right_value, "scale": learner.scale,
        }
    elif isinstance(learner, RegressionTree):
        payload = {
            "kind": "tree", "splits": learner.splits, "scale": learner.scale,
            "nodes": [[n.feature, n.threshold, n.left, n.right, n.value]
                      for n in learner.nodes],
        }
    elif isinstance(learner, IntervalAtom):
        payload = {
            "kind": "atom", "feature": learner.feature, "low": learner.low,
            "high": learner.high, "value": learner.value,
        }
    else:
        raise InvalidInputError(f"cannot serialize learner type {type(learner).__name__}")
    return f"term {_fmt(coef)} {json.dumps(payload, separators=(',', ':'))}"


def _parse_learner(payload: dict):
    kind = payload.get("kind")
    if kind == "stump":
        return DecisionStump(int(payload["feature"]), float(payload["threshold"]),
                             float(payload["left"]), float(payload["right"]),
                             scale=float(payload.get("scale", 1.0)))
    if kind == "tree":
        nodes = tuple(
            TreeNode(int(f), float(t), int(l), int(r), float(v))
            for f, t, l, r, v in payload["nodes"]
        )
        return RegressionTree(nodes=nodes, splits=int(payload["splits"]),
                              scale=float(payload.get("scale", 1.0)))
    if kind == "atom":
        return IntervalAtom(float(payload["low"]), float(payload["high"]),
                            float(payload["value"]), feature=int(payload["feature"]))
    raise InvalidInputError(f"unknown learner kind {kind!r}")


def model_to_text(model: EnsembleModel, loss: LossKind, task: Task, seed: int) -> str:
    flat = model.materialize()
    lines = [
        f"{FORMAT_NAME} {FORMAT_VERSION}",
        f"loss={loss.value}",
        f"task={task.value}",
        f"features={model.n_features if model.n_features is not None else -1}",
        f"seed={seed}",
        f"intercept={_fmt(flat.intercept)}",
        f"terms={len(flat.terms)}",
    ]
    lines.extend(_term_line(c, g) for c, g in flat.terms)
    body = "\n".join(lines) + "\n"
    crc = zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF
    return body + f"checksum={crc:08x}\n"


def save_model(path, model: EnsembleModel, loss: LossKind, task: Task, seed: int) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(model_to_text(model, loss, task, seed))


def model_from_text(text: str) -> tuple[EnsembleModel, LossKind, Task, int]:
    lines = text.splitlines()
    if not lines or not lines[-1].startswith("checksum="):
        raise InvalidInputError("model file has no checksum footer")
    body = "\n".join(lines[:-1]) + "\n"
    expected = int(lines[-1].split("=", 1)[1], 16)
    actual = zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF
    if actual != expected:
        raise InvalidInputError(
            f"model checksum mismatch: file says {expected:08x}, content is {actual:08x}"
        )

    header = lines[0].split()
    if len(header) != 2 or header[0] != FORMAT_NAME:
        raise InvalidInputError("not a model file")
    if int(header[1]) != FORMAT_VERSION:
        raise InvalidInputError(f"unsupported model format version {header[1]}")

    fields = {}
    term_lines = []
    for line in lines[1:-1]:
        if line.startswith("term "):
            term_lines.append(line)
        else:
            key, _, value = line.partition("=")
            fields[key] = value

    n_features = int(fields["features"])
    model = EnsembleModel(None if n_features < 0 else n_features,
                          float(fields["intercept"]))
    declared = int(fields["terms"])
    if declared != len(term_lines):
        raise InvalidInputError(
            f"model declares {declared} terms but has {len(term_lines)}"
        )
    for line in term_lines:
        _, coef_text, payload_text = line.split(" ", 2)
        learner = _parse_learner(json.loads(payload_text))
        model.terms.append((float(coef_text), learner))

    loss = LossKind(fields["loss"])
    task = Task(fields["task"])
    return model, loss, task, int(fields["seed"])


def load_model(path) -> tuple[EnsembleModel, LossKind, Task, int]:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_text(fh.read())
