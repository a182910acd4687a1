#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sstream>

#include "doctest.h"
#include "envmap/tree_filter.hpp"

using namespace envmap;

namespace {

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::string rows(int n, const std::string& role = "row") {
    std::string tree = "table \"Data\" [t1]\n";
    for (int i = 0; i < n; ++i)
        tree += "  " + role + " \"item " + std::to_string(i) + "\" [r" + std::to_string(i) +
                "]\n";
    return tree;
}

}  // namespace

TEST_CASE("sibling runs collapse after ten with a continuation marker") {
    std::string out = filter_accessibility_tree(rows(30));
    auto ls = lines_of(out);
    // 1 table line + 10 kept rows + 1 marker.
    REQUIRE(ls.size() == 12);
    CHECK(ls[10] == "  row \"item 9\" [r9]");
    CHECK(ls[11] == "  [...](row elements continue)");
    // Exactly ten rows survive, ids untouched.
    CHECK(out.find("[r9]") != std::string::npos);
    CHECK(out.find("[r10]") == std::string::npos);
}

TEST_CASE("runs at or under the limit pass through unchanged") {
    std::string t = rows(10);
    CHECK(filter_accessibility_tree(t) == t);
}

TEST_CASE("collapse applies to nested runs, not only top level") {
    std::string tree = "page \"Home\" [p]\n" + std::string();
    tree += "  section \"A\" [s1]\n";
    for (int i = 0; i < 15; ++i)
        tree += "    listitem \"x" + std::to_string(i) + "\" [li" + std::to_string(i) + "]\n";
    std::string out = filter_accessibility_tree(tree);
    CHECK(out.find("[...](listitem elements continue)") != std::string::npos);
    CHECK(out.find("[li10]") == std::string::npos);
    CHECK(out.find("[li9]") != std::string::npos);
}

TEST_CASE("long text truncates at 150 characters with a marker") {
    std::string longtext(500, 'a');
    std::string tree = "heading \"" + longtext + "\" [h1]\n";
    std::string out = filter_accessibility_tree(tree);
    CHECK(out.find(std::string(150, 'a') + "[...]") != std::string::npos);
    CHECK(out.find(std::string(151, 'a')) == std::string::npos);
}

TEST_CASE("output is capped at 20000 characters by whole lines") {
    // Distinct roles per line so sibling collapse never kicks in and the
    // character cap is what limits the output.
    std::string tree;
    for (int i = 0; i < 5000; ++i)
        tree += "role" + std::to_string(i) + " \"node " + std::to_string(i % 7) + " block " +
                std::to_string(i) + "\" [g" + std::to_string(i) + "]\n";
    REQUIRE(tree.size() > 50000);
    std::string out = filter_accessibility_tree(tree);
    CHECK(out.size() <= 20000);
    CHECK(out.rfind("[...](output truncated)\n") == out.size() -
                                                        std::string("[...](output truncated)\n")
                                                            .size());
}

TEST_CASE("filter is idempotent on adversarial input") {
    std::string tree = rows(30, "cell") + "heading \"" + std::string(500, 'z') + "\" [h]\n";
    for (int i = 0; i < 3000; ++i)
        tree += "generic \"filler " + std::to_string(i) + "\" [f" + std::to_string(i) + "]\n";
    std::string once = filter_accessibility_tree(tree);
    std::string twice = filter_accessibility_tree(once);
    CHECK(once == twice);
}

TEST_CASE("custom limits are honored") {
    FilterLimits limits;
    limits.sibling_limit = 2;
    limits.text_limit = 4;
    std::string out = filter_accessibility_tree(rows(5), limits);
    CHECK(out.find("[...](row elements continue)") != std::string::npos);
    CHECK(out.find("item 0") == std::string::npos);
    CHECK(out.find("\"item[...]\"") != std::string::npos);
}
