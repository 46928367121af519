import pytest

from firedss import data_text


@pytest.fixture(scope="session")
def dataset_text():
    return data_text("forestfires_synthetic.csv")


@pytest.fixture(scope="session")
def rules_tables_text():
    return data_text("tables_3_4_5.rules")


@pytest.fixture(scope="session")
def rules_alerts_text():
    return data_text("fwi_alerts.rules")


@pytest.fixture(scope="session")
def regions_graph_text():
    return data_text("regions_fixture.nt")


@pytest.fixture(scope="session")
def regions_query_text():
    return data_text("hot_dry_regions.rq")


@pytest.fixture(scope="session")
def corpus_text():
    return data_text("corpus.jsonl")
