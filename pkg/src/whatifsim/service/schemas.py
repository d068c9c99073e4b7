"""Pydantic request/response models. The wire bodies mirror the package's
text schemas exactly, so files and API payloads are interchangeable."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field


class PoseModel(BaseModel):
    t: list[float] = Field(min_length=3, max_length=3)
    r: list[float] = Field(min_length=9, max_length=9)


class ShapeModel(BaseModel):
    kind: Literal["box", "sphere", "cylinder"]
    dims: list[float]


class SceneObjectModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    cls: str = Field(alias="class")
    shape: ShapeModel
    mass: float
    pose: PoseModel


class TableModel(BaseModel):
    half_extents: list[float] = Field(min_length=3, max_length=3)


class SceneModel(BaseModel):
    id: str
    table: TableModel
    objects: list[SceneObjectModel]


class CreateSceneRequest(BaseModel):
    """Either a seed for a random settled scene, or an explicit scene body."""

    seed: int | None = None
    scene: SceneModel | None = None


class SceneResponse(BaseModel):
    id: str
    scene: SceneModel


class ActionModel(BaseModel):
    kind: str
    target: str
    params: dict | None


class WhatIfRequest(BaseModel):
    text: str
    backend: Literal["rules", "linear"] = "rules"


class DescriptionModel(BaseModel):
    subject: str
    text: str
    event: str
    agent: str | None = None


class ContactEventModel(BaseModel):
    t: float
    a: str
    b: str
    impulse: float


class TrajectorySampleModel(BaseModel):
    t: float
    t3: list[float] = Field(min_length=3, max_length=3)
    r9: list[float] = Field(min_length=9, max_length=9)


class TrajectoryModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    cls: str = Field(alias="class")
    removed: bool
    rate_hz: int
    samples: list[TrajectorySampleModel]


class WhatIfResponse(BaseModel):
    action: ActionModel
    descriptions: list[DescriptionModel]
    events: list[ContactEventModel]
    trajectories_30hz: list[TrajectoryModel]


class ErrorResponse(BaseModel):
    stage: str
    message: str
