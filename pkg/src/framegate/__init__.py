"""framegate: structural screening and design gating for space-frame car bodies.

Beam-element modal/bending/torsion analysis, reduced-order crush-chain crash
runs, and an iterative sizing loop that gates a concept frame against its
stiffness, mass and crashworthiness targets.
"""

__version__ = "0.1.0"

from .assembly import AnalysisSettings, Mesh, assemble, build_mesh
from .crash import (
    CrashHistories,
    CrashMetrics,
    CrushCell,
    CrushChain,
    build_chain,
    energy_audit,
    explicit_integrate,
    run_scenario,
)
from .demo import build_demo_model
from .design import (
    DesignLoopResult,
    DesignVector,
    GateReport,
    GateRow,
    design_loop,
    evaluate_design,
    gate,
    optimize_module,
)
from .material import CrushLaw, DP600_JC, JCParams, crush_law, flow_stress
from .modal import ModeSet, classify_mode, first_flexible_frequency, modal_analysis
from .model import (
    ConstraintSpec,
    FrameModel,
    LoadSpec,
    MaterialSpec,
    MemberSpec,
    NodeSpec,
    ScenarioConfig,
    TargetSet,
    ValidationReport,
    structural_mass,
    validate,
)
from .modelio import ModelFileError, parse_model, serialize_model
from .report import RunReport, emit_report, model_digest
from .sections import RectHollowSection, SectionProperties, compute_properties
from .static import (
    AnalysisError,
    StaticResult,
    StiffnessResult,
    bending_stiffness_test,
    solve_static,
    torsional_stiffness_eq1,
    torsional_stiffness_eq2,
    torsional_stiffness_test,
)

__all__ = [
    "AnalysisError",
    "AnalysisSettings",
    "CrashHistories",
    "CrashMetrics",
    "ConstraintSpec",
    "CrushCell",
    "CrushChain",
    "CrushLaw",
    "DP600_JC",
    "DesignLoopResult",
    "DesignVector",
    "FrameModel",
    "GateReport",
    "GateRow",
    "JCParams",
    "LoadSpec",
    "MaterialSpec",
    "MemberSpec",
    "Mesh",
    "ModeSet",
    "ModelFileError",
    "NodeSpec",
    "RectHollowSection",
    "RunReport",
    "ScenarioConfig",
    "SectionProperties",
    "StaticResult",
    "StiffnessResult",
    "TargetSet",
    "ValidationReport",
    "assemble",
    "bending_stiffness_test",
    "build_chain",
    "build_demo_model",
    "build_mesh",
    "classify_mode",
    "compute_properties",
    "crush_law",
    "design_loop",
    "emit_report",
    "energy_audit",
    "evaluate_design",
    "explicit_integrate",
    "first_flexible_frequency",
    "flow_stress",
    "gate",
    "modal_analysis",
    "model_digest",
    "optimize_module",
    "parse_model",
    "run_scenario",
    "serialize_model",
    "solve_static",
    "structural_mass",
    "torsional_stiffness_eq1",
    "torsional_stiffness_eq2",
    "torsional_stiffness_test",
    "validate",
]
