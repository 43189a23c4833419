import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from inquest import figure4


@pytest.fixture(scope="session")
def fig4():
    return figure4()
