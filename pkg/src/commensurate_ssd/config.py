"""JSON design configuration: schema, validation and conversion to domain objects."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .collective import HistoricalSummary, WeightRule
from .commensurate import GammaMixtureHyper
from .errors import ConfigError, SSDError
from .posterior import KnownVariance, UnknownVariance
from .ssd import ACC, ALC, APVC, Allocation

__all__ = ["DesignConfig", "load_config", "parse_config", "config_schema"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SourceSpec(_Strict):
    m: float = Field(description="mean of the historical normal summary")
    s2: float = Field(gt=0, description="variance (not SD) of the historical normal summary")
    w: float = Field(ge=0, le=1, description="prior probability of incommensurability")


class HyperSpec(_Strict):
    a01: float = Field(gt=0)
    b01: float = Field(gt=0)
    a02: float = Field(gt=0)
    b02: float = Field(gt=0)


class WeightRuleSpec(_Strict):
    s0: float = Field(0.05, gt=0)


class VarianceSpec(_Strict):
    known: float | None = Field(None, gt=0, description="known common variance sigma0^2")
    unknown: float | None = Field(None, gt=0, description="degrees of freedom c of the variance prior")

    @model_validator(mode="after")
    def _exactly_one(self):
        if (self.known is None) == (self.unknown is None):
            raise ValueError("give exactly one of 'known' (sigma2) or 'unknown' (c)")
        return self


class AllocationSpec(_Strict):
    ratio_A: int = Field(1, ge=1)
    ratio_B: int = Field(1, ge=1)


class ACCSpec(_Strict):
    kind: Literal["ACC"]
    l0: float = Field(gt=0, description="fixed interval length")
    alpha: float = Field(0.05, gt=0, lt=1, description="1 - target average coverage")


class ALCSpec(_Strict):
    kind: Literal["ALC"]
    l: float = Field(gt=0, description="maximum average interval length")
    alpha0: float = Field(0.05, gt=0, lt=1, description="1 - fixed coverage of each interval")


class APVCSpec(_Strict):
    kind: Literal["APVC"]
    eps0: float = Field(gt=0, description="maximum average posterior variance")


CriterionSpec = Annotated[Union[ACCSpec, ALCSpec, APVCSpec], Field(discriminator="kind")]


class DesignConfig(_Strict):
    name: str | None = None
    sources: list[SourceSpec] = Field(min_length=1)
    hyper: HyperSpec
    weight_rule: WeightRuleSpec = WeightRuleSpec()
    variance: VarianceSpec
    allocation: AllocationSpec = AllocationSpec()
    criteria: list[CriterionSpec] = Field(min_length=1)

    @model_validator(mode="after")
    def _cross_checks(self):
        try:
            hyper = self.gamma_hyper()
            hyper.require_moments()
        except SSDError as exc:
            raise ValueError(f"hyper: {exc}") from None
        c = self.variance.unknown
        if c is not None and c <= 2:
            needs_moment = [cr.kind for cr in self.criteria if cr.kind in ("ACC", "APVC")]
            if needs_moment:
                raise ValueError(
                    f"variance.unknown: c={c} <= 2 leaves E[sigma0^2] of Inv-Gamma(c/2, cS/2) "
                    f"undefined (needs shape c/2 > 1), required by {', '.join(needs_moment)}"
                )
        return self

    def historical(self) -> list[HistoricalSummary]:
        return [HistoricalSummary(s.m, s.s2, s.w) for s in self.sources]

    def gamma_hyper(self) -> GammaMixtureHyper:
        h = self.hyper
        return GammaMixtureHyper(h.a01, h.b01, h.a02, h.b02)

    def rule(self) -> WeightRule:
        return WeightRule(self.weight_rule.s0)

    def variance_model(self):
        if self.variance.known is not None:
            return KnownVariance(self.variance.known)
        return UnknownVariance(self.variance.unknown)

    def allocation_rule(self) -> Allocation:
        return Allocation(self.allocation.ratio_A, self.allocation.ratio_B)

    def criteria_objects(self):
        out = []
        for cr in self.criteria:
            if cr.kind == "ACC":
                out.append(ACC(cr.l0, cr.alpha))
            elif cr.kind == "ALC":
                out.append(ALC(cr.l, cr.alpha0))
            else:
                out.append(APVC(cr.eps0))
        return out


def _format_errors(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        loc = ".".join(str(part) for part in err["loc"]) or "<root>"
        lines.append(f"{loc}: {err['msg']}")
    return "\n".join(lines)


def parse_config(data: dict) -> DesignConfig:
    try:
        return DesignConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_format_errors(exc)) from None


def load_config(path: str | Path) -> DesignConfig:
    """Read and validate a design file.

    Raises:
        OSError: the file cannot be read.
        ConfigError: the content is not valid JSON or fails validation.
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(data)


def config_schema() -> dict:
    return DesignConfig.model_json_schema()
