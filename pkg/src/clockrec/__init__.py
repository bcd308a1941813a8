"""Cycle-accurate model of an all-digital feedforward clock recovery.

The datapath estimates the timing phase per 256-sample block, unwraps it
into an integer delay ``m`` and fractional delay ``mu``, compensates ``m``
in an overclocked elastic buffer (256 samples written, 261 read per cycle)
and ``mu`` in a cubic Lagrange interpolator producing 258 samples.
"""
from ._kernels import BACKEND
from .elastic_buffer import BufferOverflowError, EbConfig, ElasticBuffer, IntegerDelaySlewError
from .experiment import ExperimentConfig, run_experiment, sweep_cfo
from .pipeline import CycleTrace, Pipeline, PipelineConfig
from .stimulus import StimulusConfig, make_blocks

__all__ = [
    "BACKEND",
    "BufferOverflowError",
    "CycleTrace",
    "EbConfig",
    "ElasticBuffer",
    "ExperimentConfig",
    "IntegerDelaySlewError",
    "Pipeline",
    "PipelineConfig",
    "StimulusConfig",
    "make_blocks",
    "run_experiment",
    "sweep_cfo",
]
