import pytest

from autoform.config import (
    default_dictionary_path,
    proof_tasks_path,
    seed_declarations_path,
)
from autoform.corpus import build_name_dictionary, ingest_declarations
from autoform.evalharness import load_proof_tasks


@pytest.fixture(scope="session")
def seed_corpus():
    return ingest_declarations(seed_declarations_path())


@pytest.fixture(scope="session")
def name_dict():
    return build_name_dictionary(default_dictionary_path())


@pytest.fixture(scope="session")
def proof_tasks():
    return load_proof_tasks(proof_tasks_path())


TARGET_DOCSTRING = "If a vector space has dimension `2` then it is finite dimensional."

REFERENCE_COMPLETION = (
    "{K : Type u} {V : Type v} [division_ring K] [add_comm_group V] [module K V] "
    "(h : module.rank K V = 2) : finite_dimensional K V"
)

TRANSLATED_COMPLETION = (
    "{K : Type u} {V : Type v} [DivisionRing K] [AddCommGroup V] [Module K V] "
    "(h : Module.rank K V = 2) : FiniteDimensional K V"
)


@pytest.fixture
def target_docstring():
    return TARGET_DOCSTRING


@pytest.fixture
def reference_completion():
    return REFERENCE_COMPLETION


@pytest.fixture
def translated_completion():
    return TRANSLATED_COMPLETION
