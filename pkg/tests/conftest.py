import numpy as np
import pytest

from obfuscation_bench.assets import build_default_pack, load_pack
from obfuscation_bench.ranges import load_default_ranges


@pytest.fixture(scope="session")
def pack_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("asset_pack")
    build_default_pack(directory)
    return directory


@pytest.fixture(scope="session")
def pack(pack_dir):
    return load_pack(pack_dir)


@pytest.fixture(scope="session")
def ranges():
    return load_default_ranges()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_image(rng, h=224, w=224):
    return rng.random((h, w, 3))
