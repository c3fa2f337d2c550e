"""Shared fixtures: the demo frame, a coarse-but-converged mesh, and cached
crash runs (they are deterministic, so one run serves every test)."""

from __future__ import annotations

import pytest

from framegate.assembly import AnalysisSettings, assemble
from framegate.crash import run_scenario
from framegate.demo import build_demo_model
from framegate.model import FrameModel, MaterialSpec, MemberSpec, NodeSpec
from framegate.modelio import serialize_model
from framegate.sections import RectHollowSection

# 0.10 m elements: static/modal results match the 15 mm default mesh to
# better than 0.01% on this frame (straight tubes, consistent mass), at a
# fraction of the cost.
COARSE = AnalysisSettings(element_length=0.10)

STEEL = MaterialSpec(name="steel", youngs_modulus=210e9, poisson_ratio=0.3,
                     density=7850.0)
TUBE_40X40X1 = RectHollowSection(outer_width=0.040, outer_height=0.040,
                                 wall_thickness=0.001)


def straight_beam_model(length: float = 2.0) -> FrameModel:
    """A single prismatic member along x: the closed-form benchmark body."""
    return FrameModel(
        name="beam",
        wheelbase=length,
        track_width=1.0,
        nodes={1: NodeSpec(id=1, position=(0.0, 0.0, 0.0)),
               2: NodeSpec(id=2, position=(length, 0.0, 0.0))},
        members={1: MemberSpec(id=1, node_i=1, node_j=2, section="tube",
                               material="steel", module_tag="Deck")},
        materials={"steel": STEEL},
        sections={"tube": TUBE_40X40X1},
    )


@pytest.fixture(scope="session")
def demo():
    return build_demo_model()


@pytest.fixture(scope="session")
def coarse():
    return COARSE


@pytest.fixture(scope="session")
def demo_system(demo):
    return assemble(demo, COARSE)


@pytest.fixture(scope="session")
def demo_crash(demo):
    """All four bundled scenarios, run once per session."""
    return {name: run_scenario(demo, name) for name in sorted(demo.scenarios)}


@pytest.fixture(scope="session")
def demo_json(tmp_path_factory, demo):
    path = tmp_path_factory.mktemp("model") / "demo.json"
    serialize_model(demo, path)
    return path


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance checklist (one verdict line per criterion)."""
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LOG", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
