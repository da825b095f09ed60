"""Single-snapshot analysis: field -> Reeb graph -> COT -> filtered COT -> vortices."""

import json
import sys
from dataclasses import dataclass, field

from . import calculus, fieldio
from .cot import build_cot, filter_cot
from .morse import check_stability
from .reeb import build_reeb_graph
from .vortex import extract_terminal_vortices, vortex_quantities

# branches of large COTs are walked recursively
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


@dataclass
class AnalysisConfig:
    eps0: float = 0.1
    coarse_factor: int = 1
    coarse_method: str = "mean"
    normalize: bool = True
    half: bool = False
    derivative: str = "spectral"

    def __post_init__(self):
        if self.eps0 < 0:
            raise ValueError("eps0 must be non-negative")
        if self.coarse_factor < 1:
            raise ValueError("coarse factor must be at least 1")


@dataclass(eq=False)
class AnalysisResult:
    config: AnalysisConfig
    field: object  # the analyzed (coarse-grained, normalized) field
    points: list
    report: object
    reeb: object = None
    cot: object = None
    filtered: object = None
    vortices: list = field(default_factory=list)

    @property
    def stable(self):
        return self.report.stable

    @property
    def cot_string(self):
        return None if self.filtered is None else self.filtered.to_string()

    def summary(self):
        out = {"stability": self.report.to_dict(), "grid": [self.field.nx, self.field.ny]}
        if self.stable:
            out.update(
                {
                    "cut": self.cot.cut.to_dict(),
                    "cot": self.cot.to_string(),
                    "cot_filtered": self.filtered.to_string(),
                    "n_reeb_nodes": len(self.reeb.nodes),
                    "n_reeb_edges": len(self.reeb.edges),
                    "n_cot_nodes": len(self.cot),
                    "n_cot_nodes_filtered": len(self.filtered),
                    "n_vortices": len(self.vortices),
                    "eps0": self.config.eps0,
                }
            )
        return out

    def to_json(self):
        return json.dumps(self.summary(), indent=2, ensure_ascii=False)


def prepare(raw, config):
    """Coarse-grain and optionally normalize; returns ``(flow_field, analyzed_field)``."""
    flow = fieldio.coarse_grain(raw, config.coarse_factor, config.coarse_method)
    constant = flow.values.max() == flow.values.min()
    # a constant field cannot be normalized; stability checking reports it instead
    analyzed = fieldio.normalize(flow) if config.normalize and not constant else flow
    return flow, analyzed


def analyze_field(raw, config=None):
    """Run the whole pipeline on one snapshot.

    Degenerate fields do not raise: the result carries the stability report
    and no COT. Vortex enstrophy and energy are computed from the
    coarse-grained field before normalization.
    """
    config = config or AnalysisConfig()
    flow, analyzed = prepare(raw, config)
    points, report = check_stability(analyzed)
    result = AnalysisResult(config, analyzed, points, report)
    if not report.stable:
        return result
    result.reeb = build_reeb_graph(analyzed, points)
    result.cot = build_cot(result.reeb)
    result.filtered = filter_cot(result.cot, config.eps0)
    vortices = extract_terminal_vortices(result.filtered, analyzed.shape, config.eps0)
    if vortices:
        omega = calculus.vorticity_from_stream(flow, config.derivative)
        vel = calculus.velocity_from_stream(flow, config.derivative)
        vortices = [vortex_quantities(v, omega, vel, config.half) for v in vortices]
    result.vortices = vortices
    return result
