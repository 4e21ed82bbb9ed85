"""Shared fixtures: a synthetic corpus bundle reused by CLI-level tests."""

import pytest

from hcat.synthdata import synth_corpus


@pytest.fixture(scope="session")
def synth_bundle(tmp_path_factory):
    """One deterministic records/labels/edges bundle for the whole session."""
    data_dir = tmp_path_factory.mktemp("bundle")
    result = synth_corpus(str(data_dir), seed=42)
    return result
