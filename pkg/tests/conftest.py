import numpy as np
import pytest

from rssvrg.bench import ExperimentSpec, reference_optimum
from rssvrg.ranking import generate_instance, to_problem


@pytest.fixture(scope="session")
def paper_instance():
    return generate_instance(1000, 10, 7)


@pytest.fixture(scope="session")
def paper_problem(paper_instance):
    return to_problem(paper_instance)


@pytest.fixture(scope="session")
def paper_reference(paper_problem):
    """(p_star, x_star) for the shared instance, full default budget."""
    return reference_optimum(paper_problem)


@pytest.fixture(scope="session")
def paper_spec():
    return ExperimentSpec()


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
