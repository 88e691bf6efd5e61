import pytest

from probkin import backend


@pytest.fixture(params=backend.available_backends())
def mc_backend(request):
    """Run the decorated test once per importable MC backend."""
    previous = backend.active_backend()
    backend.use(request.param)
    yield request.param
    backend.use(previous)
