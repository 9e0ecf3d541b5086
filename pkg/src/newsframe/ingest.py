"""Article-search API clients and local corpus files.

Both supported APIs share one fetch path driven by an adapter table:
generic query fields map to source parameter names and article fields
map to dotted JSON paths in the source response. Raw page responses are
cached under cache/<adapter>/<sha256(query)>/page-N.json so a repeated
job never touches the network, and the assembled corpus is stored next
to them as corpus.jsonl.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path

from .corpus import Article, Corpus, GUARDIAN, LABELS, NYT, SOURCES, UNLABELED
from .errors import AuthError, BadDate, MissingField, NetworkError, ParseError, RateLimited


def json_path(doc, path: str):
    """Walk a dotted path through nested dicts; None when absent."""
    node = doc
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            return None
        node = node[part]
    return node


@dataclass(frozen=True)
class SourceAdapter:
    name: str
    source: str                 # Article.source value
    base_url: str
    key_env: str
    key_param: str
    query_params: dict          # keyword/begin_date/end_date/page -> source names
    date_format: str            # strftime format for the date params
    page_start: int             # index of the first page
    page_size: int
    items_path: str             # dotted path to the hits list
    response_paths: dict        # article field -> dotted path within one hit
    extra_params: dict = field(default_factory=dict)

    def __post_init__(self):
        for required in ("id", "title", "published_at"):
            if required not in self.response_paths:
                raise ValueError(f"adapter {self.name} lacks a path for {required}")
        if self.page_size <= 0:
            raise ValueError("page size must be positive")


NYT_ADAPTER = SourceAdapter(
    name="nyt",
    source=NYT,
    base_url="https://api.nytimes.com/svc/search/v2/articlesearch.json",
    key_env="NYT_API_KEY",
    key_param="api-key",
    query_params={"keyword": "q", "begin_date": "begin_date", "end_date": "end_date", "page": "page"},
    date_format="%Y%m%d",
    page_start=0,
    page_size=10,
    items_path="response.docs",
    response_paths={
        "id": "_id",
        "url": "web_url",
        "title": "headline.main",
        "body": "lead_paragraph",
        "published_at": "pub_date",
    },
)

GUARDIAN_ADAPTER = SourceAdapter(
    name="guardian",
    source=GUARDIAN,
    base_url="https://content.guardianapis.com/search",
    key_env="GUARDIAN_API_KEY",
    key_param="api-key",
    query_params={"keyword": "q", "begin_date": "from-date", "end_date": "to-date", "page": "page"},
    date_format="%Y-%m-%d",
    page_start=1,
    page_size=50,
    items_path="response.results",
    response_paths={
        "id": "id",
        "url": "webUrl",
        "title": "webTitle",
        "body": "fields.bodyText",
        "published_at": "webPublicationDate",
    },
    extra_params={"show-fields": "bodyText", "page-size": "50"},
)

ADAPTERS = {a.name: a for a in (NYT_ADAPTER, GUARDIAN_ADAPTER)}


def _parse_utc_date(raw) -> date:
    if isinstance(raw, str):
        text = raw.strip().replace("Z", "+00:00")
        try:
            parsed = datetime.fromisoformat(text)
        except ValueError:
            raise BadDate(f"unparseable publication date {raw!r}") from None
        if parsed.tzinfo is not None:
            parsed = parsed.astimezone(timezone.utc)
        return parsed.date()
    raise BadDate(f"unparseable publication date {raw!r}")


def parse_article(raw: dict, adapter: SourceAdapter, topic: str | None = None) -> Article:
    """Map one raw API hit to an Article via the adapter's response paths."""
    values = {}
    for generic, path in adapter.response_paths.items():
        values[generic] = json_path(raw, path)
    for required in ("id", "title", "published_at"):
        if values.get(required) in (None, ""):
            raise MissingField(required)
    return Article(
        id=str(values["id"]),
        source=adapter.source,
        url=values.get("url"),
        title=str(values["title"]),
        body=str(values.get("body") or ""),
        published_at=_parse_utc_date(values["published_at"]),
        topic=topic,
        label=UNLABELED,
    )


@dataclass(frozen=True)
class FetchJob:
    adapter: SourceAdapter
    keyword: str
    period: tuple[date, date]
    max_pages: int = 10
    cache_dir: Path = Path("cache")

    def __post_init__(self):
        start, end = self.period
        if start > end:
            raise ValueError("period start is after its end")
        if self.max_pages < 1:
            raise ValueError("max_pages must be >= 1")
        object.__setattr__(self, "cache_dir", Path(self.cache_dir))

    def query_digest(self) -> str:
        start, end = self.period
        key = f"{self.adapter.name}|{self.keyword}|{start}|{end}"
        return hashlib.sha256(key.encode("utf-8")).hexdigest()

    def cache_path(self) -> Path:
        return self.cache_dir / self.adapter.name / self.query_digest()


class RateLimiter:
    """At most `rate` requests per second, enforced by sleeping."""

    def __init__(self, rate: float = 1.0, clock=time.monotonic, sleep=time.sleep):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.interval = 1.0 / rate
        self._clock = clock
        self._sleep = sleep
        self._last = None

    def wait(self):
        now = self._clock()
        if self._last is not None:
            remaining = self.interval - (now - self._last)
            if remaining > 0:
                self._sleep(remaining)
                now = self._clock()
        self._last = now


def _requests_transport(url: str, params: dict):
    import requests

    try:
        response = requests.get(url, params=params, timeout=30)
    except requests.RequestException as exc:
        raise NetworkError(str(exc)) from exc
    return response.status_code, dict(response.headers), response.text


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fetch_topic(
    job: FetchJob,
    transport=None,
    rate: float = 1.0,
    api_key: str | None = None,
) -> Corpus:
    """Fetch all pages for a job, serving repeats entirely from cache.

    Pages are requested in order until max_pages, an empty page, or a
    short page. Articles are deduplicated by id and by url. The parsed
    corpus is also written to <cache>/corpus.jsonl.
    """
    adapter = job.adapter
    cache = job.cache_path()
    limiter = RateLimiter(rate)
    transport = transport or _requests_transport
    start, end = job.period

    articles = []
    seen_ids = set()
    seen_urls = set()
    for offset in range(job.max_pages):
        page = adapter.page_start + offset
        page_file = cache / f"page-{page}.json"
        if page_file.exists():
            payload = json.loads(page_file.read_text("utf-8"))
        else:
            if api_key is None:
                api_key = os.environ.get(adapter.key_env)
            if not api_key:
                raise AuthError(f"set {adapter.key_env} to query the {adapter.name} API")
            params = dict(adapter.extra_params)
            params[adapter.query_params["keyword"]] = job.keyword
            params[adapter.query_params["begin_date"]] = start.strftime(adapter.date_format)
            params[adapter.query_params["end_date"]] = end.strftime(adapter.date_format)
            params[adapter.query_params["page"]] = str(page)
            params[adapter.key_param] = api_key
            limiter.wait()
            status, headers, text = transport(adapter.base_url, params)
            if status in (401, 403):
                raise AuthError(f"{adapter.name} API rejected the key in {adapter.key_env}")
            if status == 429:
                raise RateLimited(headers.get("Retry-After"))
            if status != 200:
                raise NetworkError(f"{adapter.name} API returned HTTP {status}")
            try:
                payload = json.loads(text)
            except json.JSONDecodeError as exc:
                raise NetworkError(f"{adapter.name} API returned invalid JSON: {exc}") from exc
            _atomic_write(page_file, json.dumps(payload, sort_keys=True))
        hits = json_path(payload, adapter.items_path) or []
        for raw in hits:
            article = parse_article(raw, adapter, topic=job.keyword)
            if article.id in seen_ids or (article.url and article.url in seen_urls):
                continue
            if not start <= article.published_at <= end:
                continue
            seen_ids.add(article.id)
            if article.url:
                seen_urls.add(article.url)
            articles.append(article)
        if len(hits) < adapter.page_size:
            break

    corpus = Corpus(tuple(articles), period=job.period if articles else None)
    save_corpus(corpus, cache / "corpus.jsonl")
    return corpus


def article_to_record(a: Article) -> dict:
    return {
        "id": a.id,
        "source": a.source,
        "url": a.url,
        "title": a.title,
        "body": a.body,
        "published_at": a.published_at.isoformat(),
        "topic": a.topic,
        "label": a.label,
    }


def article_from_record(record: dict) -> Article:
    if "id" not in record:
        raise MissingField("id")
    if "published_at" not in record:
        raise MissingField("published_at")
    source = record.get("source", "other")
    label = record.get("label", UNLABELED)
    if source not in SOURCES or label not in LABELS:
        raise ParseError(f"unknown source/label {source!r}/{label!r}")
    return Article(
        id=str(record["id"]),
        source=source,
        url=record.get("url"),
        title=str(record.get("title", "")),
        body=str(record.get("body", "")),
        published_at=_parse_utc_date(record["published_at"]),
        topic=record.get("topic"),
        label=label,
    )


def save_corpus(corpus: Corpus, path) -> None:
    """One JSON object per line, keys sorted; byte-stable for equal input."""
    lines = [
        json.dumps(article_to_record(a), sort_keys=True, ensure_ascii=False)
        for a in corpus
    ]
    _atomic_write(Path(path), "".join(line + "\n" for line in lines))


def load_corpus(path, period: tuple[date, date] | None = None) -> Corpus:
    """Read a JSONL corpus; unknown fields are ignored.

    Raises ParseError with the offending 1-based line number.
    """
    articles = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                articles.append(article_from_record(record))
            except (json.JSONDecodeError, MissingField, BadDate, ValueError) as exc:
                raise ParseError(str(exc), line=lineno) from exc
    return Corpus(tuple(articles), period=period)
