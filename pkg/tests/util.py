"""Shared test fixtures and builders."""

from protosum.corpus import Document, Sentence, parse_timestamp


def make_doc(doc_id, set_id, stamp, texts):
    return Document(
        doc_id=doc_id,
        set_id=set_id,
        timestamp=parse_timestamp(stamp),
        sentences=tuple(Sentence.make(t, i) for i, t in enumerate(texts)),
    )
