"""Parsing of the three source tables and assembly of the joined dataset.

The front half of the pipeline: read trait scores and (user, like) pairs,
resolve each like id to its page category through a pluggable resolver,
and tally per-user counts per category path.

CSV dialect is deliberately plain: comma separator, ``\\n`` or ``\\r\\n``
line endings, no quoting. Ids and categories must not contain commas; a
row that splits into the wrong number of fields is malformed.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol

import requests

from .core import Big5Scores, CategoryPath, Dataset, UserRecord, validate_scores
from .errors import (
    DuplicateLikeIdError,
    DuplicateUserError,
    LikeTraitsError,
    MalformedRowError,
    TransportError,
)

BIG5_HEADER = "userid,ope,con,ext,agr,neu"
USER_LIKES_HEADER = "userid,likeid"
FIXTURE_HEADER = "likeid,category,subcategory"

#: What to do with like ids the resolver cannot find.
ON_UNRESOLVED_DROP = "drop"
ON_UNRESOLVED_MAP_TO_UNKNOWN = "map_to_unknown"


@dataclass(frozen=True)
class ResolverPolicy:
    on_unresolved: str = ON_UNRESOLVED_DROP
    unknown_label: CategoryPath | None = None

    def __post_init__(self):
        if self.on_unresolved not in (ON_UNRESOLVED_DROP, ON_UNRESOLVED_MAP_TO_UNKNOWN):
            raise ValueError(f"bad on_unresolved {self.on_unresolved!r}")
        if self.on_unresolved == ON_UNRESOLVED_MAP_TO_UNKNOWN and self.unknown_label is None:
            raise ValueError("map_to_unknown requires an unknown_label")


@dataclass
class IngestReport:
    """Row accounting for one ingest run.

    likes_resolved + likes_unresolved = likes_parsed, counting row
    occurrences. Orphan likes belong to users with no score row and are
    excluded; dropped likes had a scored user but an unresolved id under
    the drop policy.
    """

    users_parsed: int = 0
    likes_parsed: int = 0
    likes_resolved: int = 0
    likes_unresolved: int = 0
    users_joined: int = 0
    orphan_likes: int = 0
    likes_dropped: int = 0


def _rows(stream, expected_header: str, n_fields: int):
    """Yield (line_number, fields) for each data row after a validated header."""
    text = stream.read() if hasattr(stream, "read") else stream
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedRowError(f"missing header, expected {expected_header!r}", line=1)
    header = lines[0].rstrip("\r")
    if header != expected_header:
        raise MalformedRowError(
            f"bad header {header!r}, expected {expected_header!r}", line=1
        )
    for i, raw in enumerate(lines[1:], start=2):
        line = raw.rstrip("\r")
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != n_fields:
            raise MalformedRowError(
                f"expected {n_fields} fields, got {len(fields)}", line=i
            )
        yield i, fields


def parse_big5_table(stream) -> list[tuple[str, Big5Scores]]:
    """Parse `userid,ope,con,ext,agr,neu` rows, validating every score."""
    out: list[tuple[str, Big5Scores]] = []
    seen: set[str] = set()
    for line_no, fields in _rows(stream, BIG5_HEADER, 6):
        user_id = fields[0]
        if user_id in seen:
            raise DuplicateUserError(f"line {line_no}: duplicate user {user_id!r}")
        seen.add(user_id)
        try:
            values = [float(v) for v in fields[1:]]
        except ValueError as exc:
            raise MalformedRowError(f"non-numeric score: {exc}", line=line_no) from exc
        try:
            scores = validate_scores(*values)
        except LikeTraitsError as exc:
            raise type(exc)(f"line {line_no}: {exc}") from exc
        out.append((user_id, scores))
    return out


def parse_user_likes_table(stream) -> list[tuple[str, str]]:
    """Parse `userid,likeid` rows; repeats are kept (one row per like)."""
    return [(f[0], f[1]) for _, f in _rows(stream, USER_LIKES_HEADER, 2)]


def parse_fixture_table(stream) -> dict[str, CategoryPath]:
    """Parse the `likeid,category,subcategory` fixture (empty third field =
    no subcategory). Duplicate like ids are rejected: each id must map to
    exactly one category path."""
    mapping: dict[str, CategoryPath] = {}
    for line_no, fields in _rows(stream, FIXTURE_HEADER, 3):
        like_id, category, subcategory = fields
        if like_id in mapping:
            raise DuplicateLikeIdError(f"line {line_no}: duplicate like id {like_id!r}")
        try:
            mapping[like_id] = CategoryPath(category, subcategory or None)
        except ValueError as exc:
            raise MalformedRowError(str(exc), line=line_no) from exc
    return mapping


class CategoryResolver(Protocol):
    def lookup(self, like_id: str) -> CategoryPath | None: ...


class FixtureResolver:
    """Resolver backed by an in-memory like->category table.

    Never raises; a missing id is simply unresolved. Repeated lookups
    return identical results.
    """

    max_in_flight = 1

    def __init__(self, mapping: dict[str, CategoryPath]):
        self._mapping = dict(mapping)

    @classmethod
    def from_csv(cls, stream) -> "FixtureResolver":
        return cls(parse_fixture_table(stream))

    def lookup(self, like_id: str) -> CategoryPath | None:
        return self._mapping.get(like_id)


class RemoteResolver:
    """Resolver issuing `GET {base}/{like_id}?fields=category` requests.

    Expects a JSON object with a string ``category`` and optional
    ``subcategory``. 404 means unresolved; transport failures and 5xx
    responses are retried with exponential backoff (default 3 attempts
    starting at 500 ms) before raising :class:`TransportError`. Up to
    ``max_in_flight`` lookups may run concurrently.
    """

    def __init__(
        self,
        base_url: str,
        retries: int = 3,
        backoff: float = 0.5,
        max_in_flight: int = 10,
        timeout: float = 10.0,
        session=None,
        sleep=time.sleep,
    ):
        self.base_url = base_url.rstrip("/")
        self.retries = retries
        self.backoff = backoff
        self.max_in_flight = max_in_flight
        self.timeout = timeout
        self._session = session or requests.Session()
        self._sleep = sleep

    def lookup(self, like_id: str) -> CategoryPath | None:
        url = f"{self.base_url}/{like_id}?fields=category"
        last_error: Exception | None = None
        for attempt in range(self.retries):
            if attempt > 0:
                self._sleep(self.backoff * 2 ** (attempt - 1))
            try:
                response = self._session.get(url, timeout=self.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code == 404:
                return None
            if response.status_code != 200:
                last_error = TransportError(
                    f"status {response.status_code} for {like_id!r}"
                )
                continue
            try:
                body = response.json()
            except ValueError:
                return None  # 200 with a non-JSON body: treat as unresolved
            category = body.get("category") if isinstance(body, dict) else None
            if not isinstance(category, str) or not category.strip():
                return None
            subcategory = body.get("subcategory")
            if not isinstance(subcategory, str):
                subcategory = None
            return CategoryPath(category, subcategory)
        raise TransportError(
            f"lookup of {like_id!r} failed after {self.retries} attempts: {last_error}"
        )


def resolve_categories(
    like_ids, resolver: CategoryResolver, policy: ResolverPolicy
) -> tuple[dict[str, CategoryPath], int]:
    """Resolve a set of like ids into a category map.

    Lookups may run concurrently up to the resolver's rate limit; the
    resulting map is merged in sorted-id order, independent of completion
    order. Returns (map, number of ids the resolver could not find); under
    the map_to_unknown policy those ids still appear in the map, pointing
    at the policy's unknown label.
    """
    ids = sorted(set(like_ids))
    workers = getattr(resolver, "max_in_flight", 1)
    if workers > 1 and len(ids) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(resolver.lookup, ids))
    else:
        results = [resolver.lookup(i) for i in ids]
    mapping: dict[str, CategoryPath] = {}
    unresolved = 0
    for like_id, path in zip(ids, results):
        if path is not None:
            mapping[like_id] = path
        else:
            unresolved += 1
            if policy.on_unresolved == ON_UNRESOLVED_MAP_TO_UNKNOWN:
                mapping[like_id] = policy.unknown_label
    return mapping, unresolved


def load_directory(
    path, policy: ResolverPolicy | None = None
) -> tuple[Dataset, IngestReport]:
    """Read big5.csv, user_likes.csv and like_categories.csv from a directory
    and assemble the joined dataset."""
    from pathlib import Path

    base = Path(path)
    policy = policy or ResolverPolicy()
    with open(base / "big5.csv") as fp:
        scores = parse_big5_table(fp)
    with open(base / "user_likes.csv") as fp:
        likes = parse_user_likes_table(fp)
    with open(base / "like_categories.csv") as fp:
        resolver = FixtureResolver.from_csv(fp)
    catmap, _ = resolve_categories({lid for _, lid in likes}, resolver, policy)
    return assemble_dataset(scores, likes, catmap, policy)


def assemble_dataset(
    scores: list[tuple[str, Big5Scores]],
    likes: list[tuple[str, str]],
    catmap: dict[str, CategoryPath],
    policy: ResolverPolicy,
) -> tuple[Dataset, IngestReport]:
    """Join scores with tallied like counts into one record per scored user.

    Users with scores but no resolved likes keep an empty count map (the
    min-likes filter deals with them later). Likes of unscored users are
    orphans; likes with an unmapped id follow the policy.
    """
    report = IngestReport(users_parsed=len(scores), likes_parsed=len(likes))
    counts: dict[str, dict[CategoryPath, int]] = {uid: {} for uid, _ in scores}
    for user_id, like_id in likes:
        path = catmap.get(like_id)
        if path is None:
            report.likes_unresolved += 1
            if policy.on_unresolved == ON_UNRESOLVED_MAP_TO_UNKNOWN:
                path = policy.unknown_label
        else:
            report.likes_resolved += 1
        if user_id not in counts:
            report.orphan_likes += 1
            continue
        if path is None:
            report.likes_dropped += 1
            continue
        per_user = counts[user_id]
        per_user[path] = per_user.get(path, 0) + 1
    users = tuple(
        UserRecord(uid, user_scores, counts[uid]) for uid, user_scores in scores
    )
    report.users_joined = len(users)
    return Dataset(users), report
