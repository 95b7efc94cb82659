import pytest

from longdiff import _kernels


@pytest.fixture(params=sorted(_kernels.available_backends()))
def backend(request):
    """Run the test once per available kernel backend."""
    prev = _kernels.backend_name()
    _kernels.select(request.param)
    yield request.param
    _kernels.select(prev)
