#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "envmap/errors.hpp"
#include "envmap/trace.hpp"
#include "synthetic.hpp"

using namespace envmap;

static const std::string kFixtures = ENVMAP_FIXTURE_DIR;

TEST_CASE("fixture trajectory parses with expected shape") {
    Trajectory t = parse_trajectory_file(kFixtures + "/traces/task_103.log");
    CHECK(t.task_id == "task_103");
    CHECK(t.environment == "gitlab");
    CHECK(t.base_url == "http://gitlab.example.com");
    CHECK(t.events.size() == 12);
    CHECK(t.snapshots.size() == 4);
    CHECK(t.events[0].action_type == ActionType::utterance);
    CHECK(t.events[1].snapshot_ref == "snap_0");
    CHECK(t.snapshots.at("snap_1").elements.size() == 4);
    CHECK(validate_trajectory(t).empty());
}

TEST_CASE("serialize/parse is an identity round trip") {
    std::mt19937 rng(777);
    for (int i = 0; i < 20; ++i) {
        Trajectory t = testsupport::make_random_trajectory(rng, "task_rt_" + std::to_string(i));
        Trajectory back = parse_trajectory(serialize_trajectory(t));
        REQUIRE(back == t);
    }
    Trajectory fixture = parse_trajectory_file(kFixtures + "/traces/task_135.log");
    CHECK(parse_trajectory(serialize_trajectory(fixture)) == fixture);
}

TEST_CASE("header is mandatory and must come first") {
    CHECK_THROWS_AS(parse_trajectory(std::string("")), MissingHeader);
    CHECK_THROWS_AS(
        parse_trajectory(std::string(
            R"({"kind":"event","index":0,"timestamp":0,"action_type":"click","url":"/"})")),
        MissingHeader);
}

TEST_CASE("malformed records report their line number") {
    std::string text =
        R"({"kind":"header","task_id":"t","environment":"e","base_url":"b"})" "\n"
        "this is not json\n";
    try {
        parse_trajectory(text);
        FAIL("expected MalformedRecord");
    } catch (const MalformedRecord& e) {
        CHECK(e.line_no == 2);
    }
}

TEST_CASE("dangling snapshot references are rejected") {
    std::string text =
        R"({"kind":"header","task_id":"t","environment":"e","base_url":"b"})" "\n"
        R"({"kind":"event","index":0,"timestamp":0,"action_type":"click","url":"/","snapshot_ref":"nope"})" "\n";
    CHECK_THROWS_AS(parse_trajectory(text), DanglingSnapshotRef);
}

TEST_CASE("validate_trajectory reports ordering and structural breaches") {
    Trajectory t;
    t.task_id = "t";
    t.environment = "e";
    t.base_url = "b";
    RawEvent a;
    a.index = 1;
    a.timestamp = 10;
    a.action_type = ActionType::click;
    a.url = "/";
    RawEvent b;
    b.index = 0;  // non-monotonic
    b.timestamp = 5;  // decreasing
    b.action_type = ActionType::click;
    b.url = "";  // empty url on an action event
    t.events = {a, b};
    auto violations = validate_trajectory(t);
    auto has = [&](const std::string& code) {
        for (const auto& v : violations)
            if (v.code == code) return true;
        return false;
    };
    CHECK(has("NonMonotonicIndex"));
    CHECK(has("DecreasingTimestamp"));
    CHECK(has("EmptyUrl"));

    // Element cycle inside a snapshot.
    Trajectory c;
    c.task_id = "t";
    c.environment = "e";
    c.base_url = "b";
    DomSnapshot s;
    s.snapshot_id = "s";
    s.url = "/";
    InterfaceElement e1{"a", "group", "", false, {"b"}};
    InterfaceElement e2{"b", "group", "", false, {"a"}};
    s.elements = {e1, e2};
    c.snapshots["s"] = s;
    auto cyc = validate_trajectory(c);
    bool cycle = false;
    for (const auto& v : cyc)
        if (v.code == "ElementCycle") cycle = true;
    CHECK(cycle);
}

TEST_CASE("snapshot trees serialize depth-first with indentation") {
    DomSnapshot s;
    s.snapshot_id = "s";
    s.url = "/";
    s.elements = {
        {"root", "page", "Home", false, {"n1", "n2"}},
        {"n1", "link", "Search", true, {}},
        {"n2", "button", "New", true, {}},
    };
    CHECK(serialize_snapshot_tree(s) ==
          "page \"Home\" [root]\n"
          "  link \"Search\" [n1]\n"
          "  button \"New\" [n2]\n");
}
