import numpy as np
import pytest

from pxsll import Dsm, Vig
from pxsll import problems

# Upper triangle (1-based pairs) of the 9-variable example DSM used by the
# linkage-tree fixtures. The (4,8) cell is taken as 0.50 on both sides.
TABLE_DSM_TRIANGLE = {
    (1, 2): 0.99, (1, 3): 0.51, (1, 4): 0.51, (1, 5): 0.25, (1, 6): 0.25,
    (1, 7): 0.25, (1, 8): 0.25, (1, 9): 0.25,
    (2, 3): 0.51, (2, 4): 0.51, (2, 5): 0.25, (2, 6): 0.25, (2, 7): 0.25,
    (2, 8): 0.25, (2, 9): 0.25,
    (3, 4): 0.99, (3, 5): 0.49, (3, 6): 0.50, (3, 7): 0.50, (3, 8): 0.50,
    (3, 9): 0.50,
    (4, 5): 0.60, (4, 6): 0.98, (4, 7): 0.73, (4, 8): 0.50, (4, 9): 0.50,
    (5, 6): 0.60, (5, 7): 0.60, (5, 8): 0.49, (5, 9): 0.50,
    (6, 7): 0.73, (6, 8): 0.73, (6, 9): 0.55,
    (7, 8): 0.99, (7, 9): 0.55,
    (8, 9): 0.55,
}


def ref_dsm() -> Dsm:
    m = np.zeros((9, 9))
    for (g, h), v in TABLE_DSM_TRIANGLE.items():
        m[g - 1, h - 1] = m[h - 1, g - 1] = v
    return Dsm(m)


def block_vig9() -> Vig:
    return Vig.from_blocks(9, problems.TRIPLE_BIM4_BLOCKS)


def bits(text: str) -> np.ndarray:
    return np.array([int(c) for c in text.replace(" ", "")], dtype=np.uint8)


@pytest.fixture
def table_dsm() -> Dsm:
    return ref_dsm()


@pytest.fixture
def vig9() -> Vig:
    return block_vig9()


@pytest.fixture
def worked_parents():
    return bits("111100101"), bits("100111111")


@pytest.fixture
def fe_sum():
    return problems.bim4_triple_overlap_sum()


@pytest.fixture
def fe_product():
    return problems.bim4_triple_overlap_product()


@pytest.fixture
def fe_spiked():
    return problems.double_trap4_spiked()


@pytest.fixture
def dec3_ring():
    return problems.trap_ring(3, 1, 3)


@pytest.fixture
def dec4_ring():
    return problems.trap_ring(4, 1, 3)
