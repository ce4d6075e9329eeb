import sys
import time
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from semverml.features import Dataset, extract_dataset
from semverml.mining import load_store
from semverml.synth import generate_corpus

# the planted-signal corpus is pinned: these seeds are part of the fixture
CORPUS_SEED = 5
EVAL_SEED = 7


@dataclass
class PlantedCorpus:
    stores: dict[str, Path]
    datasets: dict[str, Dataset]
    dataset_csvs: dict[str, Path]
    build_seconds: float
    root: Path


@pytest.fixture(scope="session")
def planted_corpus(tmp_path_factory) -> PlantedCorpus:
    """Four synthetic packages of 150 releases with planted change signal."""
    root = tmp_path_factory.mktemp("planted_corpus")
    t0 = time.time()
    stores = generate_corpus(root, n_packages=4, n_releases=150,
                             seed=CORPUS_SEED)
    datasets = {}
    for name, store_dir in stores.items():
        ds, _ = extract_dataset(load_store(store_dir))
        datasets[name] = ds
    return PlantedCorpus(stores=stores, datasets=datasets, dataset_csvs={},
                         build_seconds=time.time() - t0, root=root)
