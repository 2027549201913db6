import shutil
from pathlib import Path

import pytest

from scigauge.pipeline import PipelineConfig, load_config, run

FIXTURE_DIR = Path(__file__).parent / "fixtures"
MINICORPUS = FIXTURE_DIR / "minicorpus"


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory) -> Path:
    """Pristine copy of the bundled mini corpus; the original stays
    untouched because stages write artifacts next to the config."""
    dst = tmp_path_factory.mktemp("corpus") / "minicorpus"
    shutil.copytree(MINICORPUS, dst)
    return dst


@pytest.fixture(scope="session")
def mini_cfg(corpus_dir) -> PipelineConfig:
    return load_config(corpus_dir / "config.toml")


@pytest.fixture(scope="session")
def mini_run(mini_cfg) -> PipelineConfig:
    """One full pipeline run shared by every integration test."""
    run("all", mini_cfg)
    return mini_cfg
