import pytest

from riskbench.seed import seed_case_study


@pytest.fixture(scope="session")
def seed_register():
    # Register snapshots are immutable; safe to share across tests.
    return seed_case_study()
