"""Decision-support engine for forest-fire management.

Submodules:
    ingest     dataset parsing and preprocessing transforms
    fwi        fire-weather index chain and danger classification
    rules      Horn-clause rule DSL and forward chaining
    stream     micro-batch alerting pipeline with checkpointed resume
    semweb     RDF graphs, N-Triples/RDF-XML, SPARQL-subset queries
    metrics    ontology schema metrics and quality scores
    retrieval  hashed-n-gram embeddings, cosine top-k, P/R/F scoring
    cli        operator command-line surface (`firedss <subcommand>`)
"""

from importlib import resources

__version__ = "0.1.0"


def data_path(name):
    """Path to a bundled data file (rules, bands, corpus, fixtures)."""
    return resources.files(__package__).joinpath("data", name)


def data_text(name):
    return data_path(name).read_text(encoding="utf-8")
