"""Pydantic request models for the service endpoints and the CLI.

Every command's parameters are validated here (unknown keys rejected), so
the CLI and the HTTP service share one source of truth for defaults.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Request(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConstantsRequest(_Request):
    n: float = Field(gt=1)


class DeficitRequest(_Request):
    n: float = Field(default=2.0, gt=1)
    statement: Literal["consistent", "as_printed", "n1"] = "consistent"
    seed: int = 0
    pieces: int = Field(default=8, ge=1)
    r_max: float = Field(default=10.0, gt=0)
    amplitude: float = Field(default=2.0, ge=0)
    nodes: list[float] | None = None
    values: list[float] | None = None

    @model_validator(mode="after")
    def _profile_complete(self) -> "DeficitRequest":
        if (self.nodes is None) != (self.values is None):
            raise ValueError("supply nodes and values together, or neither")
        return self


class ExtremalRequest(_Request):
    n: float = Field(gt=1)
    a: float | None = None
    lambda0: float | None = Field(default=None, gt=0)
    num_nodes: int = Field(default=3000, ge=16)
    r_max: float | None = Field(default=None, gt=0)
    include_profile: bool = False

    @model_validator(mode="after")
    def _one_parameter(self) -> "ExtremalRequest":
        if (self.a is None) == (self.lambda0 is None):
            raise ValueError("supply exactly one of a, lambda0")
        return self


class MinimizeRequest(_Request):
    n: float = Field(gt=1)
    a: float = Field(gt=0)
    r_max: float | None = Field(default=None, gt=0)
    num_nodes: int = Field(default=3000, ge=16)
    epsilon_smooth: float = Field(default=1e-8, ge=0)
    constraint_tol: float = Field(default=1e-9, gt=0)
    grad_tol: float = Field(default=1e-7, gt=0)
    max_iters: int = Field(default=30, ge=1)
    penalty_growth: float = Field(default=10.0, gt=1)
    init: Literal["ramp", "extremal"] = "ramp"
    init_perturbation: float = Field(default=0.2, ge=0)
    include_profile: bool = False


class ShootRequest(_Request):
    n: float = Field(gt=1)
    lambda0: float = Field(gt=0)
    r_max: float = Field(default=20.0, gt=0)
    num_nodes: int = Field(default=2001, ge=3)
    tolerance: float = Field(default=1e-6, gt=0)
    include_profile: bool = False


class OnofriRequest(_Request):
    lambdas: list[float] = Field(default_factory=list)
    seeds: list[int] = Field(default_factory=list)
    max_degree: int = Field(default=6, ge=0)
    coeff_bound: float = Field(default=2.0, ge=0)

    @model_validator(mode="after")
    def _nonempty(self) -> "OnofriRequest":
        if not self.lambdas and not self.seeds:
            raise ValueError("supply at least one of lambdas, seeds")
        if any(lam <= 0 for lam in self.lambdas):
            raise ValueError("lambdas must be positive")
        return self


class BlissRequest(_Request):
    k: float = Field(gt=1)
    l: float
    x_max: float = Field(default=4000.0, gt=0)
    num_samples: int = Field(default=25, ge=0)
    seed: int = 0


class MoserRequest(_Request):
    n: float = Field(gt=1)
    a: float = Field(default=1.0, gt=0)
    beta: float = 1.0
    num_samples: int = Field(default=50, ge=1)
    seed: int = 0
    pieces: int = Field(default=8, ge=1)
    r_max: float = Field(default=10.0, gt=0)


class SweepRequest(_Request):
    quantity: Literal["extremal_deficit", "rough_constants"]
    n: float = Field(default=2.0, gt=1)
    start: float
    stop: float
    points: int = Field(ge=1)
    log_scale: bool = True

    @model_validator(mode="after")
    def _ordered(self) -> "SweepRequest":
        if not (self.start < self.stop):
            raise ValueError("need start < stop")
        if self.log_scale and self.start <= 0:
            raise ValueError("log-scale sweeps need start > 0")
        return self


class VerifyRequest(_Request):
    checks: list[str] | None = None
