"""Shared fixtures for building small corpora in tests."""

from datetime import date

from newsframe.corpus import Article, Corpus


def make_article(i, body, year=2014, month=6, day=15, title="", source="other",
                 label="unlabeled", topic=None, url=None):
    return Article(
        id=f"a{i}",
        source=source,
        title=title,
        body=body,
        published_at=date(year, month, day),
        label=label,
        topic=topic,
        url=url,
    )


def make_corpus(bodies, year=2014, start=0):
    return Corpus(tuple(make_article(start + i, b, year=year) for i, b in enumerate(bodies)))
