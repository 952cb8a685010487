import math
import re
from typing import Annotated, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, field_validator, model_validator

import config
from engine.coin import CoinState, format_state, parse_state


def _coerce_state(value):
    if isinstance(value, CoinState):
        return value
    if isinstance(value, str):
        return parse_state(value)
    raise ValueError(f"Expected a coin state or its text form, got {type(value).__name__}")


StateField = Annotated[
    CoinState,
    PlainValidator(_coerce_state),
    PlainSerializer(format_state, return_type=str),
]


class _StepBase(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)


class GeneralStep(_StepBase):
    kind: Literal["general"] = "general"
    p: int = Field(..., description="Stride applied to the shift-state branch.")
    q: int = Field(..., description="Stride applied to the orthogonal branch.")
    coin_out: StateField = Field(..., alias="coin", description="Coin state c the shift-state branch is rotated into.")
    shift_in: StateField = Field(..., alias="shift", description="Shift state s selecting the p-branch.")

    def __str__(self):
        return f"T({self.p},{self.q};{format_state(self.coin_out)},{format_state(self.shift_in)})"


class ConventionalStep(_StepBase):
    kind: Literal["conventional"] = "conventional"
    alpha: float = Field(..., ge=0.0, lt=2 * math.pi, description="Phase alpha of the SU(2) coin toss.")
    beta: float = Field(..., ge=0.0, le=math.pi / 2, description="Mixing angle beta of the SU(2) coin toss.")
    gamma: float = Field(..., ge=0.0, lt=2 * math.pi, description="Phase gamma of the SU(2) coin toss.")

    def __str__(self):
        return f"T(alpha={self.alpha:.6g},beta={self.beta:.6g},gamma={self.gamma:.6g})"


class SplitStep(_StepBase):
    kind: Literal["split"] = "split"
    delta_frac: float = Field(..., alias="delta", ge=0.0, le=1.0, description="Fraction Delta of the amplitude that moves.")
    delta_phase: float = Field(0.0, alias="phase", description="Phase delta (radians) of the resting amplitude.")
    coin: StateField = Field(..., description="Coin state c of the split step.")

    @field_validator("delta_phase")
    @classmethod
    def finite_phase(cls, v):
        if not math.isfinite(v):
            raise ValueError("phase must be finite")
        return v

    def __str__(self):
        return f"T_Delta({self.delta_frac:.6g};{self.delta_phase:.6g},{format_state(self.coin)})"


QuantumStep = Annotated[Union[GeneralStep, ConventionalStep, SplitStep], Field(discriminator="kind")]


class Walk(BaseModel):
    """Steps applied first-to-last, the whole block repeated `repeat` times."""
    model_config = ConfigDict(frozen=True)

    steps: List[Union[QuantumStep, "Walk"]] = Field(..., min_length=1, description="Steps or nested blocks in application order.")
    repeat: int = Field(1, ge=1, description="Number of times the block is applied.")


Walk.model_rebuild()


class DesignSpec(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    m: int = Field(..., ge=1, description="Number of steps; must be even.")
    target: StateField = Field(..., description="Coin state w to be made a Parrondo state.")
    intermediates: List[StateField] = Field(default_factory=list, description="Coin states c_1..c_{m-2} linking the chain.")
    strides: List[Tuple[int, int]] = Field(..., description="(p_i, q_i) for every step.")


class ZeroPositionSpec(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, validate_default=True)

    m: int = Field(..., description="Common stride of T_A; T_B uses -m.")
    n: int = Field(1, ge=1, description="Cycle count.")
    c1: StateField = Field("h", description="Coin state of T_A.")
    s1: StateField = Field("0", description="Shift state of T_A.")
    c2: StateField = Field("d", description="Coin state of T_B.")
    s2: StateField = Field("f", description="Shift state of T_B.")

    @field_validator("m")
    @classmethod
    def nonzero_stride(cls, v):
        if v == 0:
            raise ValueError("m must be non-zero")
        return v


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    steps: Optional[List[QuantumStep]] = Field(None, min_length=1, description="Base steps of a walk family.")
    walk: Optional[Walk] = Field(None, description="A single explicit walk.")
    cycles: int = Field(1, ge=1, description="Cycle count n of the family.")
    n_range: Optional[Tuple[int, int]] = Field(None, description="Inclusive range of n for scans.")
    observable: str = Field("mu", description="Observable token: mu, delta, zero or spectral:<file>.")
    omega: float = Field(0.0, description="Target payoff.")
    home: Optional[str] = Field(None, description="Home state or density in text form.")
    markers: List[str] = Field(default_factory=list, description="States to mark on region maps.")
    design: Optional[DesignSpec] = Field(None, description="Daisy-chain design parameters.")
    zero_position: Optional[ZeroPositionSpec] = Field(None, description="Zero-position construction parameters.")
    grid: Optional[str] = Field(None, description="Region map resolution 'NTxNP'.")
    trials: Optional[int] = Field(None, ge=0, description="Oracle trials per suite.")

    @field_validator("omega")
    @classmethod
    def finite_omega(cls, v):
        if not math.isfinite(v):
            raise ValueError("omega must be finite")
        return v

    @field_validator("grid")
    @classmethod
    def grid_format(cls, v):
        if v is not None:
            parse_grid(v)
        return v

    @model_validator(mode="after")
    def ordered_range(self):
        if self.n_range is not None:
            first, last = self.n_range
            if first < 1 or last < first:
                raise ValueError(f"n_range {list(self.n_range)} must satisfy 1 <= first <= last")
        return self


def parse_grid(text: str) -> Tuple[int, int]:
    """'181x361' -> (181, 361); both sides at least 2."""
    m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", text)
    if not m:
        raise ValueError(f"Grid '{text}' must look like '<n_theta>x<n_phi>'")
    n_theta, n_phi = int(m.group(1)), int(m.group(2))
    if n_theta < 2 or n_phi < 2:
        raise ValueError(f"Grid '{text}' must be at least 2x2")
    return n_theta, n_phi


DEFAULT_GRID_TEXT = f"{config.DEFAULT_GRID[0]}x{config.DEFAULT_GRID[1]}"
