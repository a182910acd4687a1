#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <random>

#include "doctest.h"
#include "envmap/errors.hpp"
#include "envmap/normalize.hpp"

using namespace envmap;

TEST_CASE("numeric segments collapse to {id}") {
    // §2.2 Phase 4 example: /users/123 -> /users/{id}
    CHECK(normalize_url("/users/123", default_rules()) == "/users/{id}");
    CHECK(normalize_url("/project/42/issues", default_rules()) == "/project/{id}/issues");
    CHECK(normalize_url("/users/123/projects/9", default_rules()) ==
          "/users/{id}/projects/{id}");
}

TEST_CASE("uuid and hex segments collapse to their placeholders") {
    CHECK(normalize_url("/jobs/123e4567-e89b-12d3-a456-426614174000", default_rules()) ==
          "/jobs/{uuid}");
    CHECK(normalize_url("/commit/deadbeefcafe", default_rules()) == "/commit/{hash}");
    // Short hex strings stay literal (7-char minimum).
    CHECK(normalize_url("/commit/abc12", default_rules()) == "/commit/abc12");
}

TEST_CASE("scheme, host, query, and fragment are stripped") {
    CHECK(normalize_url("http://gitlab.example.com/users/7?tab=activity", default_rules()) ==
          "/users/{id}");
    CHECK(normalize_url("https://x.test/search#results", default_rules()) == "/search");
    CHECK(normalize_url("/", default_rules()) == "/");
    CHECK(normalize_url("http://x.test", default_rules()) == "/");
}

TEST_CASE("unparseable inputs throw") {
    CHECK_THROWS_AS(normalize_url("not a url", default_rules()), UnparseableUrl);
    CHECK_THROWS_AS(normalize_url("", default_rules()), UnparseableUrl);
}

TEST_CASE("normalization is idempotent on random paths") {
    std::mt19937 rng(12345);
    static const std::vector<std::string> segments = {
        "users",   "123",     "search", "deadbeefcafe", "a1b2",
        "project", "9999999", "issues", "123e4567-e89b-12d3-a456-426614174000",
        "x",       "new",     "42",
    };
    std::uniform_int_distribution<int> len(0, 6);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(segments.size()) - 1);
    for (int i = 0; i < 1000; ++i) {
        std::string path;
        int n = len(rng);
        for (int k = 0; k < n; ++k) path += "/" + segments[static_cast<std::size_t>(pick(rng))];
        if (path.empty()) path = "/";
        std::string once = normalize_url(path, default_rules());
        std::string twice = normalize_url(once, default_rules());
        REQUIRE(once == twice);
    }
}

TEST_CASE("rules files load in priority order and reject bad placeholders") {
    auto dir = std::filesystem::temp_directory_path() / "envmap_rules_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "rules.tsv");
        out << "# custom slug rule\n";
        out << "1\t[a-z]+-[a-z0-9-]+\t{slug}\n";
        out << "2\t[0-9]+\t{id}\n";
    }
    auto rules = load_rules(dir / "rules.tsv");
    REQUIRE(rules.size() == 2);
    CHECK(normalize_url("/blog/my-first-post/9", rules) == "/blog/{slug}/{id}");

    {
        std::ofstream out(dir / "bad.tsv");
        out << "1\t[0-9]+\t{bogus}\n";
    }
    CHECK_THROWS_AS(load_rules(dir / "bad.tsv"), MalformedRecord);
    std::filesystem::remove_all(dir);
}

TEST_CASE("priority decides between overlapping rules") {
    // An all-digit segment is also 7+ chars of hex; {id} has higher priority.
    CHECK(normalize_url("/x/1234567", default_rules()) == "/x/{id}");
}
