import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as nps

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


def binary_images(size=64, min_ink=0):
    """Random ink masks with varied density, from sparse specks to solid blobs."""
    @st.composite
    def build(draw):
        seed = draw(st.integers(0, 2**32 - 1))
        rng = np.random.default_rng(seed)
        p = draw(st.sampled_from([0.005, 0.02, 0.1, 0.3, 0.6, 0.9]))
        img = rng.random((size, size)) < p
        if img.sum() < min_ink:
            img[rng.integers(size), rng.integers(size)] = True
        return img
    return build()


small_images = nps.arrays(bool, (16, 16))


@pytest.fixture
def criterion():
    """Record an acceptance criterion outcome and fail the test when it does not hold."""
    def record(number: int, title: str, ok: bool, detail: str = ""):
        ACCEPTANCE[number] = (title, bool(ok), detail)
        status = "PASS" if ok else "FAIL"
        print(f"[acceptance {number:2d}] {status}  {title}  {detail}")
        assert ok, f"criterion {number} ({title}) failed: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{n:2d}. {'PASS' if ok else 'FAIL'}  {title}  {detail}")
