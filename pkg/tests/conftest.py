from pathlib import Path

import pytest
import yaml

from lrpossib import likelihood as lk

DATA_DIR = Path(__file__).parent.joinpath("data").resolve(strict=True)

with DATA_DIR.joinpath("testcases.yaml").open() as fin:
    TESTCASES = yaml.load(fin.read(), Loader=yaml.FullLoader)


@pytest.fixture
def data_dir():
    return DATA_DIR


@pytest.fixture
def cfg():
    return lk.OptConfig(threads=1)


@pytest.fixture(params=TESTCASES["binomial"])
def binomial_case(request):
    return request.param


@pytest.fixture(params=TESTCASES["poisson"])
def poisson_case(request):
    return request.param


@pytest.fixture(params=TESTCASES["normal"])
def normal_case(request):
    return request.param


@pytest.fixture(params=TESTCASES["hwe_reference"])
def hwe_reference_case(request):
    return request.param


@pytest.fixture(params=TESTCASES["severini"])
def severini_case(request):
    return request.param


@pytest.fixture
def finite_binomial_case():
    return TESTCASES["finite_binomial"]
