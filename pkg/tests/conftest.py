import os
import sys
from functools import lru_cache

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

from kl_descent.coxeter import DiagramAutGroup, fixed_subsystem, named_spec  # noqa: E402
from kl_descent.instance import Instance  # noqa: E402

DESCENT_CASES = [("A2", [2, 1], 2), ("A3", [3, 2, 1], 2), ("D4", [3, 2, 4, 1], 3)]


@lru_cache(maxsize=None)
def instance(name, weights=None):
    return Instance(named_spec(name, weights))


@lru_cache(maxsize=None)
def descent(name, perm):
    inst = instance(name)
    g = DiagramAutGroup.generate(inst.spec, [list(perm)])
    d = fixed_subsystem(inst.table, g)
    sub = Instance(d.sub_spec, table=d.sub_table)
    return d, inst, sub


@pytest.fixture
def get_instance():
    return instance


@pytest.fixture
def get_descent():
    return lambda name, perm: descent(name, tuple(perm))
