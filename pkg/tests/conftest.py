from __future__ import annotations

import numpy as np
import pytest

from hyperlab.forms import DeterminantSymmetric, ElementarySymmetric, LorentzQuadratic, Product, pack_symmetric


def closed_form_families():
    return [Product(3), Product(5), Product(4, [1.0, 2.0, 0.5, 3.0]), LorentzQuadratic(3), LorentzQuadratic(6),
            DeterminantSymmetric(2), DeterminantSymmetric(4)]


def regular_families():
    return [Product(4), LorentzQuadratic(4), DeterminantSymmetric(3), ElementarySymmetric(4, 2), ElementarySymmetric(5, 3)]


def family_id(form):
    return repr(form)


def random_psd_packed(rng, d, count, rank=None):
    rank = d if rank is None else rank
    G = rng.standard_normal((count, d, rank))
    return pack_symmetric(G @ np.swapaxes(G, 1, 2))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
