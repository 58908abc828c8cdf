"""AumAI DepthSep: depth-separation compilers, certificates and sphere tools."""

from __future__ import annotations

from aumai_depthsep.errors import (
    BudgetExceededError,
    CapabilityError,
    ConfigError,
    DegenerateInputError,
    DepthSepError,
    DomainError,
    InputError,
    NormalizationError,
    NumericError,
    PreconditionError,
    ShapeError,
)
from aumai_depthsep.fouriernet import FourierNet, dump_fn, load_fn
from aumai_depthsep.models import (
    Certificate,
    CliConfig,
    CompileConfig,
    ExperimentConfig,
    ExperimentReport,
    LowerBoundCertificate,
    SamplerConfig,
    SweepSpec,
)
from aumai_depthsep.netir import Activation, Layer, LayeredNet, dump_net, load_net
from aumai_depthsep.reporter import ConsoleReporter, CSVReporter, JSONReporter
from aumai_depthsep.runner import ExperimentRunner, run_experiment
from aumai_depthsep.shallowify import (
    compile_deep,
    compile_gaussian,
    compile_oscillatory,
    compile_radial,
    compile_two_layer,
    resynthesize,
)
from aumai_depthsep.spectral import OscillatoryTarget, Window, kappa_certificate
from aumai_depthsep.sphere import RidgeMeasure, ZonalSeries, gamma1_upper

__version__ = "0.1.0"

__all__ = [
    # errors
    "DepthSepError",
    "ShapeError",
    "DomainError",
    "InputError",
    "PreconditionError",
    "NormalizationError",
    "DegenerateInputError",
    "ConfigError",
    "BudgetExceededError",
    "CapabilityError",
    "NumericError",
    # models
    "Certificate",
    "LowerBoundCertificate",
    "CompileConfig",
    "SamplerConfig",
    "SweepSpec",
    "ExperimentConfig",
    "ExperimentReport",
    "CliConfig",
    # networks
    "Activation",
    "Layer",
    "LayeredNet",
    "load_net",
    "dump_net",
    "FourierNet",
    "load_fn",
    "dump_fn",
    # compilers
    "compile_two_layer",
    "compile_deep",
    "compile_oscillatory",
    "compile_radial",
    "compile_gaussian",
    "resynthesize",
    # lower bounds
    "Window",
    "OscillatoryTarget",
    "kappa_certificate",
    "RidgeMeasure",
    "ZonalSeries",
    "gamma1_upper",
    # experiments and reporters
    "ExperimentRunner",
    "run_experiment",
    "ConsoleReporter",
    "JSONReporter",
    "CSVReporter",
]
