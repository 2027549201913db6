"""Corpus records: load, validate, filter, and cross-link postings,
replies, articles, and papers from JSONL files.

Malformed lines are never silently dropped; every ingest reports a skip
tally. Duplicate ids abort the load.
"""
from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from urllib.parse import urlsplit

from .textkit import _data_lines


@dataclass
class Posting:
    id: str
    author_id: str
    text: str
    urls: list[str]
    timestamp: int
    likes: int = 0
    retweets: int = 0
    followers: int = 0
    followees: int = 0
    country: str | None = None
    reply_ids: list[str] = field(default_factory=list)


@dataclass
class Reply:
    id: str
    parent_id: str
    text: str
    likes: int = 0
    retweets: int = 0


@dataclass
class Article:
    id: str
    url: str
    outlet: str
    title: str
    paragraphs: list[str]
    out_links: list[str]
    parse_ok: bool
    byline: str | None = None

    def body_text(self) -> str:
        return "\n\n".join(self.paragraphs)


@dataclass
class Paper:
    id: str
    url: str
    domain: str
    title: str
    body: str
    parse_ok: bool


@dataclass
class Allowlist:
    science_domains: set[str]
    keywords: set[str]


@dataclass
class IngestResult:
    records: list
    skipped: int


def valid_url(u) -> bool:
    if not isinstance(u, str):
        return False
    try:
        p = urlsplit(u)
    except ValueError:
        return False
    return p.scheme in ("http", "https") and bool(p.netloc)


@lru_cache(maxsize=None)
def _suffix_exceptions() -> frozenset[str]:
    return frozenset(_data_lines("suffix_exceptions.txt"))


def registrable_domain(url_or_host: str) -> str:
    s = url_or_host.strip().lower()
    if "://" in s:
        host = urlsplit(s).hostname or ""
    else:
        host = s.split("/", 1)[0].split("?", 1)[0]
        host = host.rsplit("@", 1)[-1].split(":", 1)[0]
    labels = [x for x in host.strip(".").split(".") if x]
    if len(labels) >= 3 and ".".join(labels[-2:]) in _suffix_exceptions():
        return ".".join(labels[-3:])
    if len(labels) >= 2:
        return ".".join(labels[-2:])
    return host


def normalize_url(url: str) -> str:
    """Lowercase scheme and host, drop fragment and default port, strip the
    trailing slash. Scheme-less inputs are treated as http."""
    s = url.strip()
    if "://" not in s:
        s = "http://" + s
    p = urlsplit(s)
    scheme = p.scheme.lower()
    host = (p.hostname or "").lower()
    port = p.port
    if port is not None and not ((scheme == "http" and port == 80)
                                 or (scheme == "https" and port == 443)):
        host = f"{host}:{port}"
    out = f"{scheme}://{host}{p.path.rstrip('/')}"
    if p.query:
        out += "?" + p.query
    return out


def _opt_str(obj, key):
    v = obj.get(key)
    if v is None:
        return None
    if not isinstance(v, str):
        raise ValueError(key)
    return v


def _str_field(obj, key):
    v = obj.get(key)
    if not isinstance(v, str):
        raise ValueError(key)
    return v


def _req_str(obj, key):
    v = obj.get(key)
    if not isinstance(v, str) or not v:
        raise ValueError(key)
    return v


def _nonneg_int(obj, key, default=0):
    v = obj.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ValueError(key)
    return v


def _str_list(obj, key, default=None):
    v = obj.get(key, default if default is not None else [])
    if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
        raise ValueError(key)
    return v


def _parse_posting(obj) -> Posting:
    urls = _str_list(obj, "urls")
    if not all(valid_url(u) for u in urls):
        raise ValueError("urls")
    ts = obj.get("timestamp")
    if isinstance(ts, bool) or not isinstance(ts, (int, float)) or ts <= 0:
        raise ValueError("timestamp")
    return Posting(
        id=_req_str(obj, "id"),
        author_id=_req_str(obj, "author_id"),
        text=_req_str(obj, "text"),
        urls=urls,
        timestamp=int(ts),
        likes=_nonneg_int(obj, "likes"),
        retweets=_nonneg_int(obj, "retweets"),
        followers=_nonneg_int(obj, "followers"),
        followees=_nonneg_int(obj, "followees"),
        country=_opt_str(obj, "country"),
        reply_ids=_str_list(obj, "reply_ids"),
    )


def _parse_reply(obj) -> Reply:
    return Reply(
        id=_req_str(obj, "id"),
        parent_id=_req_str(obj, "parent_id"),
        text=_req_str(obj, "text"),
        likes=_nonneg_int(obj, "likes"),
        retweets=_nonneg_int(obj, "retweets"),
    )


def _parse_article(obj) -> Article:
    url = _req_str(obj, "url")
    if not valid_url(url):
        raise ValueError("url")
    outlet = _req_str(obj, "outlet")
    if outlet != registrable_domain(url):
        raise ValueError("outlet")
    parse_ok = obj.get("parse_ok")
    if not isinstance(parse_ok, bool):
        raise ValueError("parse_ok")
    paragraphs = _str_list(obj, "paragraphs")
    if parse_ok and not paragraphs:
        raise ValueError("paragraphs")
    return Article(
        id=_req_str(obj, "id"),
        url=url,
        outlet=outlet,
        title=_str_field(obj, "title"),
        paragraphs=paragraphs,
        out_links=_str_list(obj, "out_links"),
        parse_ok=parse_ok,
        byline=_opt_str(obj, "byline"),
    )


def _parse_paper(obj) -> Paper:
    parse_ok = obj.get("parse_ok")
    if not isinstance(parse_ok, bool):
        raise ValueError("parse_ok")
    url = _req_str(obj, "url")
    if not valid_url(url):
        raise ValueError("url")
    domain = _req_str(obj, "domain")
    if domain != domain.lower():
        raise ValueError("domain")
    return Paper(
        id=_req_str(obj, "id"),
        url=url,
        domain=domain,
        title=_str_field(obj, "title"),
        body=_str_field(obj, "body"),
        parse_ok=parse_ok,
    )


_PARSERS = {
    "posting": _parse_posting,
    "reply": _parse_reply,
    "article": _parse_article,
    "paper": _parse_paper,
}


def ingest(path, kind: str) -> IngestResult:
    if kind not in _PARSERS:
        raise ValueError(f"unknown record kind: {kind!r}")
    parse = _PARSERS[kind]
    records = []
    seen = set()
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("not an object")
                rec = parse(obj)
            except (ValueError, KeyError, TypeError):
                skipped += 1
                continue
            if rec.id in seen:
                raise ValueError(f"duplicate {kind} id: {rec.id}")
            seen.add(rec.id)
            records.append(rec)
    return IngestResult(records, skipped)


def serialize(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            obj = {k: v for k, v in asdict(rec).items() if v is not None}
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def load_allowlist(domains_path, keywords_path) -> Allowlist:
    domains = {line.lower() for line in _read_lines(domains_path)}
    keywords = {line.lower() for line in _read_lines(keywords_path)}
    if not domains or not keywords:
        raise ValueError("allowlist files must be non-empty")
    return Allowlist(domains, keywords)


def _read_lines(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]


def keyword_pattern(keywords) -> re.Pattern:
    parts = []
    for kw in sorted(keywords):
        parts.append(r"\s+".join(re.escape(p) for p in kw.split()))
    return re.compile(r"\b(?:" + "|".join(parts) + r")\b", re.IGNORECASE)


def filter_postings(postings, allowlist: Allowlist) -> list[Posting]:
    """Keep postings that carry at least one URL and match a query keyword
    on token boundaries."""
    pat = keyword_pattern(allowlist.keywords)
    return [p for p in postings if p.urls and pat.search(p.text)]


def drop_orphan_replies(replies, postings) -> tuple[list[Reply], int]:
    ids = {p.id for p in postings}
    kept = [r for r in replies if r.parent_id in ids]
    return kept, len(replies) - len(kept)


@dataclass
class LinkTable:
    posting_article: set[tuple[str, str]]
    article_paper: set[tuple[str, str]]
    article_domain: set[tuple[str, str]]
    unresolved_posting_urls: int
    unresolved_out_links: int


def resolve_links(postings, articles, papers, allowlist: Allowlist) -> LinkTable:
    article_by_url = {normalize_url(a.url): a.id for a in articles}
    paper_by_url = {normalize_url(p.url): p.id for p in papers}

    posting_article = set()
    unresolved_posting = 0
    for posting in postings:
        for u in posting.urls:
            aid = article_by_url.get(normalize_url(u))
            if aid is not None:
                posting_article.add((posting.id, aid))
            else:
                unresolved_posting += 1

    article_paper = set()
    article_domain = set()
    unresolved_links = 0
    for article in articles:
        for link in article.out_links:
            pid = paper_by_url.get(normalize_url(link))
            if pid is not None:
                article_paper.add((article.id, pid))
                continue
            dom = registrable_domain(link)
            if dom in allowlist.science_domains:
                article_domain.add((article.id, dom))
            else:
                unresolved_links += 1

    return LinkTable(posting_article, article_paper, article_domain,
                     unresolved_posting, unresolved_links)
