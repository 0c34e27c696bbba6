import contextlib
import io
import json
import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from palg.algebra import FullSetAlgebra, non_additive_example  # noqa: E402
from palg.cli import main  # noqa: E402


@pytest.fixture
def A22():
    return FullSetAlgebra.of(2, 2)


@pytest.fixture
def A12():
    return FullSetAlgebra.of(1, 2)


@pytest.fixture
def g_alg():
    return non_additive_example()


def run_cli(*argv):
    buf, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = main([str(a) for a in argv])
    out = buf.getvalue()
    return code, (json.loads(out) if out.strip() else None), err.getvalue()


@pytest.fixture
def cli():
    return run_cli


@pytest.fixture
def algebra_file(tmp_path):
    def make(obj, name="A.json"):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return p
    return make
