import io
import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import numpy as np
import pytest

from liketraits.core import Big5Scores, CategoryPath
from liketraits.errors import (
    DuplicateLikeIdError,
    DuplicateUserError,
    MalformedRowError,
    OutOfRangeError,
    TransportError,
)
from liketraits.ingest import (
    FixtureResolver,
    IngestReport,
    RemoteResolver,
    ResolverPolicy,
    assemble_dataset,
    parse_big5_table,
    parse_fixture_table,
    parse_user_likes_table,
    resolve_categories,
)

MID = Big5Scores(3.0, 3.0, 3.0, 3.0, 3.0)
DROP = ResolverPolicy()
TO_UNKNOWN = ResolverPolicy("map_to_unknown", CategoryPath("UNKNOWN"))


class TestParseBig5:
    def test_single_row(self):
        rows = parse_big5_table("userid,ope,con,ext,agr,neu\nu1,3.5,2.0,4.0,3.0,1.5")
        assert rows == [("u1", Big5Scores(3.5, 2.0, 4.0, 3.0, 1.5))]

    def test_header_only(self):
        assert parse_big5_table("userid,ope,con,ext,agr,neu\n") == []

    def test_column_count_mismatch(self):
        with pytest.raises(MalformedRowError) as err:
            parse_big5_table("userid,ope,con,ext,agr,neu\nu1,3.5,2.0")
        assert err.value.line == 2

    def test_crlf_endings(self):
        rows = parse_big5_table("userid,ope,con,ext,agr,neu\r\nu1,3,3,3,3,3\r\n")
        assert rows[0][0] == "u1"

    def test_bad_header(self):
        with pytest.raises(MalformedRowError):
            parse_big5_table("userid,o,c,e,a,n\n")

    def test_duplicate_user(self):
        body = "userid,ope,con,ext,agr,neu\nu1,3,3,3,3,3\nu1,3,3,3,3,3"
        with pytest.raises(DuplicateUserError):
            parse_big5_table(body)

    def test_score_error_carries_row(self):
        with pytest.raises(OutOfRangeError, match="line 3"):
            parse_big5_table("userid,ope,con,ext,agr,neu\nu1,3,3,3,3,3\nu2,0.5,3,3,3,3")

    def test_row_order_preserved(self):
        body = "userid,ope,con,ext,agr,neu\nub,3,3,3,3,3\nua,3,3,3,3,3"
        assert [uid for uid, _ in parse_big5_table(body)] == ["ub", "ua"]

    def test_accepts_stream(self):
        rows = parse_big5_table(io.StringIO("userid,ope,con,ext,agr,neu\nu1,3,3,3,3,3\n"))
        assert len(rows) == 1


class TestParseUserLikes:
    def test_two_likes_one_user(self):
        assert parse_user_likes_table("userid,likeid\nu1,L9\nu1,L7") == [("u1", "L9"), ("u1", "L7")]

    def test_header_only(self):
        assert parse_user_likes_table("userid,likeid\n") == []

    def test_three_fields(self):
        with pytest.raises(MalformedRowError):
            parse_user_likes_table("userid,likeid\nu1,L9,extra")


class TestParseFixture:
    def test_empty_subcategory(self):
        table = parse_fixture_table("likeid,category,subcategory\nL9,Sports,\nL7,Sports,Boxing Studio")
        assert table["L9"] == CategoryPath("Sports")
        assert table["L7"] == CategoryPath("Sports", "Boxing Studio")

    def test_duplicate_like_id(self):
        with pytest.raises(DuplicateLikeIdError):
            parse_fixture_table("likeid,category,subcategory\nL9,A,\nL9,B,")


class TestResolveCategories:
    fixture = FixtureResolver({"L9": CategoryPath("Sports", "Boxing Studio")})

    def test_direct_hit(self):
        catmap, unresolved = resolve_categories({"L9"}, self.fixture, DROP)
        assert catmap == {"L9": CategoryPath("Sports", "Boxing Studio")}
        assert unresolved == 0

    def test_miss_dropped(self):
        catmap, unresolved = resolve_categories({"L9", "Lx"}, self.fixture, DROP)
        assert set(catmap) == {"L9"}
        assert unresolved == 1

    def test_policy_forced_unknown(self):
        catmap, unresolved = resolve_categories({"Lx"}, self.fixture, TO_UNKNOWN)
        assert catmap == {"Lx": CategoryPath("UNKNOWN")}
        assert unresolved == 1

    def test_fixture_determinism(self):
        first = resolve_categories({"L9", "La", "Lb"}, self.fixture, DROP)
        second = resolve_categories({"L9", "La", "Lb"}, self.fixture, DROP)
        assert first == second


class TestAssemble:
    def test_duplicate_likes_accumulate(self):
        cat = CategoryPath("C")
        dataset, report = assemble_dataset(
            [("u1", MID)], [("u1", "L9"), ("u1", "L9")], {"L9": cat}, DROP
        )
        assert dataset.users[0].like_counts == {cat: 2}
        assert report.likes_resolved == 2

    def test_scored_user_without_likes(self):
        dataset, _ = assemble_dataset([("u1", MID)], [], {}, DROP)
        assert dataset.users[0].like_counts == {}

    def test_orphan_like_excluded(self):
        dataset, report = assemble_dataset(
            [("u1", MID)], [("u2", "L9")], {"L9": CategoryPath("C")}, DROP
        )
        assert len(dataset) == 1
        assert report.orphan_likes == 1
        assert dataset.users[0].total_likes == 0

    def test_unknown_policy_tallies_label(self):
        dataset, report = assemble_dataset(
            [("u1", MID)], [("u1", "Lx")], {}, TO_UNKNOWN
        )
        assert dataset.users[0].like_counts == {CategoryPath("UNKNOWN"): 1}
        assert report.likes_unresolved == 1

    def test_join_conservation_randomized(self):
        rng = np.random.default_rng(42)
        for _ in range(25):
            n_users = int(rng.integers(1, 6))
            scores = [(f"u{i}", MID) for i in range(n_users)]
            catmap = {f"L{i}": CategoryPath(f"C{i}") for i in range(4)}
            likes = []
            for _ in range(int(rng.integers(0, 30))):
                uid = f"u{rng.integers(0, n_users + 2)}"  # may be unscored
                likes.append((uid, f"L{rng.integers(0, 6)}"))  # may be unresolvable
            dataset, report = assemble_dataset(scores, likes, catmap, DROP)
            tallied = sum(u.total_likes for u in dataset)
            assert tallied + report.orphan_likes + report.likes_dropped == report.likes_parsed
            assert report.likes_resolved + report.likes_unresolved == report.likes_parsed

    def test_order_independent(self):
        catmap = {"L1": CategoryPath("A"), "L2": CategoryPath("B")}
        likes = [("u1", "L1"), ("u2", "L2"), ("u1", "L2"), ("u1", "L1")]
        scores = [("u1", MID), ("u2", MID)]
        base, _ = assemble_dataset(scores, likes, catmap, DROP)
        permuted, _ = assemble_dataset(scores, likes[::-1], catmap, DROP)
        assert base == permuted


# --------------------------------------------------------------------------
# remote resolver against a local fixture server
# --------------------------------------------------------------------------

class _Handler(BaseHTTPRequestHandler):
    table = {}
    fail_first = {}   # like_id -> number of 500s to serve before succeeding
    lock = threading.Lock()

    def do_GET(self):
        like_id = self.path.lstrip("/").split("?")[0]
        with self.lock:
            remaining = self.fail_first.get(like_id, 0)
            if remaining > 0:
                self.fail_first[like_id] = remaining - 1
                self.send_response(500)
                self.end_headers()
                return
        if like_id not in self.table:
            self.send_response(404)
            self.end_headers()
            return
        body = json.dumps(self.table[like_id]).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.end_headers()
        self.wfile.write(body)

    def log_message(self, *args):
        pass


@pytest.fixture
def fixture_server():
    _Handler.table = {
        "L1": {"id": "L1", "category": "Sports", "subcategory": "Boxing Studio"},
        "L2": {"id": "L2", "category": "Politics"},
        "L3": {"id": "L3", "category": "Music"},
    }
    _Handler.fail_first = {}
    server = HTTPServer(("127.0.0.1", 0), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield f"http://127.0.0.1:{server.server_port}"
    server.shutdown()
    thread.join()


class TestRemoteResolver:
    def test_lookup_with_subcategory(self, fixture_server):
        resolver = RemoteResolver(fixture_server, sleep=lambda s: None)
        assert resolver.lookup("L1") == CategoryPath("Sports", "Boxing Studio")
        assert resolver.lookup("L2") == CategoryPath("Politics")

    def test_404_is_unresolved(self, fixture_server):
        resolver = RemoteResolver(fixture_server, sleep=lambda s: None)
        assert resolver.lookup("Lmissing") is None

    def test_retry_then_success(self, fixture_server):
        _Handler.fail_first["L3"] = 2
        naps = []
        resolver = RemoteResolver(fixture_server, retries=3, backoff=0.5, sleep=naps.append)
        assert resolver.lookup("L3") == CategoryPath("Music")
        assert naps == [0.5, 1.0]  # exponential backoff

    def test_retries_exhausted(self, fixture_server):
        _Handler.fail_first["L3"] = 99
        resolver = RemoteResolver(fixture_server, retries=3, sleep=lambda s: None)
        with pytest.raises(TransportError):
            resolver.lookup("L3")

    def test_connection_failure(self):
        resolver = RemoteResolver("http://127.0.0.1:1", retries=2, timeout=0.2, sleep=lambda s: None)
        with pytest.raises(TransportError):
            resolver.lookup("L1")

    def test_concurrent_resolution_deterministic(self, fixture_server):
        resolver = RemoteResolver(fixture_server, max_in_flight=8, sleep=lambda s: None)
        ids = {"L1", "L2", "L3", "La", "Lb"}
        catmap, unresolved = resolve_categories(ids, resolver, DROP)
        assert unresolved == 2
        assert set(catmap) == {"L1", "L2", "L3"}
        again, _ = resolve_categories(ids, resolver, DROP)
        assert again == catmap
