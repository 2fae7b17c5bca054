import pytest

from helpers import make_vocabulary


@pytest.fixture
def vocab():
    return make_vocabulary(action_count=4)
