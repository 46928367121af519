"""Map alerts to precaution documents with the deterministic embedder,
and score responses against references.

Run: python demos/demo_retrieval.py
"""

from firedss import data_text, retrieval

index = retrieval.load_corpus(data_text("corpus.jsonl"))
print(f"precaution corpus: {len(index)} documents, "
      f"embedder {index.fingerprint}")

# The advisor turns an alert (kind + severity) into a query and retrieves
# the two most relevant precaution documents.
for kind, severity in (("DC_MOPUP", "difficult and extensive"),
                       ("ISI_SPREAD", "fast"),
                       ("FFMC_IGNITION", "extremely easy")):
    query = retrieval.advisor_query(kind, severity)
    hits = index.search(query, k=2)
    print(f"\nalert {kind} / {severity!r}")
    print(f"  query: {query!r}")
    for doc, score in hits:
        print(f"  {score:.3f}  {doc.id}: {doc.text[:70]}...")

# Identical text retrieves itself with cosine exactly 1.
doc = index.docs[0]
top, score = index.search(doc.text, k=1)[0]
print(f"\nself-retrieval check: {top.id} at cosine {score:.9f}")

# Response quality against a reference, token-overlap P/R/F.
reference = ("grid the burned area, probe the perimeter for hot spots, "
             "and plan extended mop up with water and hand tools")
response = ("plan extended mop up with water and hand tools along the "
            "perimeter and watch for hot spots")
scores = retrieval.prf_scores(response, reference)
print("\nresponse scoring against the reference:")
print(f"  precision {scores.precision:.3f}  recall {scores.recall:.3f}  "
      f"F {scores.f_measure:.3f}")
