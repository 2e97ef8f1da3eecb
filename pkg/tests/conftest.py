import itertools
import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "repo", deadline=None, derandomize=True, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("repo")

from treedim.tree_core import BranchingProfile, build_tree  # noqa: E402


def uniform_grid(max_depth: int = 4, s_values=(1, 2, 3), t_values=(2, 3)):
    """Every (S, T) pair of explicit profiles with ``s_j <= t_j``, depth 1..max_depth."""
    for depth in range(1, max_depth + 1):
        for t_prof in itertools.product(t_values, repeat=depth):
            T = build_tree(BranchingProfile.explicit(t_prof), depth, ambient=True)
            for s_prof in itertools.product(s_values, repeat=depth):
                if all(s <= t for s, t in zip(s_prof, t_prof)):
                    yield build_tree(BranchingProfile.explicit(s_prof), depth), T


def binary_subtrees(depth: int):
    """All leafless subtrees of the binary tree truncated at ``depth``, as node lists."""

    def grow(node, remaining):
        if remaining == 0:
            return [[node]]
        out = []
        for choice in ((0,), (1,), (0, 1)):
            parts = [grow(node + (c,), remaining - 1) for c in choice]
            for combo in itertools.product(*parts):
                out.append([node] + [v for part in combo for v in part])
        return out

    return grow((), depth)


@pytest.fixture(scope="session")
def grid4():
    return list(uniform_grid(4))


_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" in report.nodeid and (report.when == "call" or report.outcome != "passed"):
        name = report.nodeid.split("::")[-1]
        detail = dict(report.user_properties).get("detail", "")
        _ACCEPTANCE[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split("_")[2])):
        status, detail = _ACCEPTANCE[name]
        num, label = name.split("_")[2], " ".join(name.split("_")[3:])
        terminalreporter.write_line(f"criterion {num} [{status}] {label}: {detail}")
