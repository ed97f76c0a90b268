import pytest

from blockrep import backend


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jit kernels once so timed tests measure work, not JIT."""
    backend.warmup()
