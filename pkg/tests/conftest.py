import numpy as np
import pytest

from netsub.models import (BlockKernel, ConstantSparsity, GraphonModel,
                           glsm_study_model, sample_graph, sbm_study_model)


@pytest.fixture(scope="session")
def sbm_model():
    return sbm_study_model()


@pytest.fixture(scope="session")
def glsm_model():
    return glsm_study_model()


@pytest.fixture(scope="session")
def er_model():
    """Single-block (Erdos-Renyi style) model with edge probability 0.5."""
    return GraphonModel(kernel=BlockKernel(B=np.array([[0.5]]),
                                           pi=np.array([1.0])),
                        sparsity=ConstantSparsity(1.0))


@pytest.fixture(scope="session")
def sbm_graph_5000(sbm_model):
    """One large realization shared by the slow reference-value checks."""
    return sample_graph(sbm_model, 5000, seed=20240817)
