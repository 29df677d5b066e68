"""
Configuration models for the hyperbolic lab.
Defines tolerances, enumeration budgets and scan defaults, and loads them
from a JSON or YAML file.
"""
import json
import logging
import os
from pathlib import Path
from typing import Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / 'configs' / 'lab_config.json'


class ToleranceConfig(BaseModel):
    """Numerical tolerances shared by every module"""
    linear: float = Field(default=1e-9, gt=0, description='Absolute tolerance on normalized quantities')
    rank: float = Field(default=1e-8, gt=0, description='Relative singular value threshold for numeric rank')
    incidence: float = Field(default=1e-7, gt=0, description='Relative tolerance for a face lying in a bisector')
    validation: float = Field(default=1e-9, gt=0, description='Lorentz-orthogonality residual bound')
    dedup: float = Field(default=1e-9, gt=0, description='Max-norm distance identifying two group elements')
    hyperbolic: float = Field(default=1e-9, gt=0, description='Margin below zero for a face to meet H')


class EnumerationConfig(BaseModel):
    """Budgets for word enumeration"""
    element_cap: int = Field(default=200_000, ge=1)


class DomainConfig(BaseModel):
    """Dirichlet domain construction options"""
    len_start: int = Field(default=1, ge=1)
    len_max: int = Field(default=12, ge=1)
    stability_window: int = Field(default=2, ge=1)
    halfspace_cap: int = Field(default=256, ge=1)
    kkt_subset_cap: int = Field(default=12, ge=1)
    sample_check_points: int = Field(default=1000, ge=0)

    @field_validator('len_max')
    def validate_len_max(cls, v, info):
        """Ensure the maximum word length is not below the starting length"""
        start = info.data.get('len_start', 1)
        if v < start:
            raise ValueError(f'len_max ({v}) must be >= len_start ({start})')
        return v


class ComplexConfig(BaseModel):
    """Local tiling complex options"""
    radius_words: int = Field(default=2, ge=0)
    morphism_tol: float = Field(default=1e-7, gt=0)


class ComplexifyConfig(BaseModel):
    """Parasitic enumeration options"""
    tuple_cap: int = Field(default=4, ge=2)
    exact: bool = True
    cache_size: int = Field(default=4096, ge=1)


class ScanConfig(BaseModel):
    """Defaults for randomized scans"""
    seed: int = 0
    klein_radius: float = Field(default=0.95, gt=0, lt=1)
    example1_budget: int = Field(default=10_000, ge=1)
    singular_trials: int = Field(default=64, ge=1)
    exact_points: int = Field(default=8, ge=1)
    exact_entry_bits: int = Field(default=16, ge=1)
    discreteness_threshold: float = Field(default=1e-2, gt=0)


class TracingConfig(BaseModel):
    """JSON-lines tracing of scans"""
    enable_tracing: bool = False
    trace_log_path: Optional[str] = None


class LabConfig(BaseModel):
    """Top-level configuration"""
    name: str = 'Hyperbolic Dirichlet Lab'
    description: Optional[str] = None
    tolerances: ToleranceConfig = Field(default_factory=ToleranceConfig)
    enumeration: EnumerationConfig = Field(default_factory=EnumerationConfig)
    domain: DomainConfig = Field(default_factory=DomainConfig)
    complexes: ComplexConfig = Field(default_factory=ComplexConfig)
    complexify: ComplexifyConfig = Field(default_factory=ComplexifyConfig)
    scans: ScanConfig = Field(default_factory=ScanConfig)
    tracing: TracingConfig = Field(default_factory=TracingConfig)

    def domain_kwargs(self, tol: Optional[float] = None) -> dict:
        """Keyword arguments of compute_domain taken from this configuration."""
        d, t = self.domain, self.tolerances
        return dict(len_start=d.len_start, len_max=d.len_max, stability_window=d.stability_window,
                    tol=tol if tol is not None else t.linear, dedup_tol=t.dedup,
                    element_cap=self.enumeration.element_cap, halfspace_cap=d.halfspace_cap,
                    hyperbolic_tol=t.hyperbolic, kkt_subset_cap=d.kkt_subset_cap,
                    sample_points=d.sample_check_points)


def load_lab_config(config_path: Optional[str] = None) -> LabConfig:
    """
    Load the lab configuration from a JSON or YAML file.

    The path is taken from the argument, then from the HYPERLAB_CONFIG
    environment variable, then from configs/lab_config.json. A missing
    file yields the built-in defaults.

    Args:
        config_path: Optional path to a configuration file

    Returns:
        Validated LabConfig

    Raises:
        ValueError: If the file has an unsupported suffix
        pydantic.ValidationError: If the contents do not validate
    """
    load_dotenv()
    path = Path(config_path or os.getenv('HYPERLAB_CONFIG') or DEFAULT_CONFIG_PATH)
    if not path.exists():
        logger.warning(f"Configuration file not found: {path}; using defaults")
        return LabConfig()

    with open(path, 'r', encoding='utf-8') as f:
        if path.suffix.lower() == '.json':
            data = json.load(f)
        elif path.suffix.lower() in ['.yaml', '.yml']:
            data = yaml.safe_load(f)
        else:
            raise ValueError(f"Unsupported configuration format: {path.suffix}")

    logger.debug(f"Loaded configuration from {path}")
    return LabConfig.model_validate(data or {})
