#include "patchsim/errors.hpp"
#include "patchsim/version.hpp"

#include <doctest.h>

#include <random>

using namespace patchsim;
using nlohmann::json;

TEST_CASE("versions compare segment by segment") {
    CHECK(compare_versions("9.2", "9.10") == std::strong_ordering::less);
    CHECK(compare_versions("6u6", "6u13") == std::strong_ordering::less);
    CHECK(compare_versions("21.0.0.213", "21.0.0.213") == std::strong_ordering::equal);
    CHECK(compare_versions("9.3", "9.3.4") == std::strong_ordering::less);
    CHECK(compare_versions("10.0", "9.4") == std::strong_ordering::greater);
    CHECK(compare_versions("5u16", "6u6") == std::strong_ordering::less);
    CHECK(compare_versions("1.0-beta", "1.0.1") == std::strong_ordering::less);
    CHECK(compare_versions("09.02", "9.2") == std::strong_ordering::equal);
    CHECK(compare_versions("V1.2", "v1.2") == std::strong_ordering::equal);
}

TEST_CASE("long numeric segments do not overflow") {
    CHECK(compare_versions("1.99999999999999999999", "1.100000000000000000000") ==
          std::strong_ordering::less);
}

TEST_CASE("quirk rules") {
    VersionRules jre;
    jre.update_markers = {"u", "update"};
    CHECK(VersionKey("6update13", jre) == VersionKey("6u13", jre));
    CHECK(VersionKey("6u13", jre).to_string() == "6.13");

    VersionRules office;
    office.strip_trailing_zeros = true;
    CHECK(VersionKey("2010.0.0", office) == VersionKey("2010", office));
    CHECK_FALSE(VersionKey("2010.0.0") == VersionKey("2010"));

    VersionRules prefixed;
    prefixed.strip_prefixes = {"r"};
    CHECK(VersionKey("r12", prefixed) == VersionKey("12", prefixed));
}

TEST_CASE("quirk table lookup prefers product over vendor over default") {
    const auto table = QuirkTable::from_json(json::parse(R"({
        "default": {"update_markers": []},
        "oracle": {"update_markers": ["u"]},
        "oracle:jre": {"update_markers": ["u", "update"]}
    })"));
    CHECK(table.rules_for("adobe", "reader").update_markers.empty());
    CHECK(table.rules_for("oracle", "mysql").update_markers == std::vector<std::string>{"u"});
    CHECK(table.rules_for("oracle", "jre").update_markers.size() == 2);
    CHECK_THROWS_AS(QuirkTable::from_json(json::parse(R"({"x": {"bogus": 1}})")), DataError);
    CHECK_THROWS_AS(QuirkTable::load("/nonexistent/quirks.json"), IoError);
}

TEST_CASE("version ordering is a total order on random strings") {
    std::mt19937 rng(7);
    const std::string alphabet = "0123456789.u-ab";
    auto random_version = [&] {
        std::string s;
        const int n = std::uniform_int_distribution<int>(1, 8)(rng);
        for (int i = 0; i < n; ++i) s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
        return s;
    };
    for (int i = 0; i < 2000; ++i) {
        const VersionKey a(random_version()), b(random_version()), c(random_version());
        CHECK((a <=> b) == (0 <=> (b <=> a)));
        if (a <= b && b <= c) CHECK(a <= c);
        CHECK(((a <=> b) == 0) == (a == b));
    }
}

TEST_CASE("constraints") {
    const auto up_to = parse_constraint(json{{"endIncluding", "9.2"}});
    CHECK(up_to.satisfied_by(VersionKey("9.1")));
    CHECK(up_to.satisfied_by(VersionKey("9.2")));
    CHECK_FALSE(up_to.satisfied_by(VersionKey("9.3")));
    CHECK(up_to.satisfied_by(VersionKey("8.1.1")));

    const auto window = parse_constraint(json{{"startIncluding", "9.0"}, {"endExcluding", "9.3.4"}});
    CHECK(window.satisfied_by(VersionKey("9.0")));
    CHECK(window.satisfied_by(VersionKey("9.3")));
    CHECK_FALSE(window.satisfied_by(VersionKey("9.3.4")));
    CHECK_FALSE(window.satisfied_by(VersionKey("8.9")));

    const auto open_start = parse_constraint(json{{"startExcluding", "2.0"}, {"endIncluding", "*"}});
    CHECK_FALSE(open_start.end);
    CHECK(open_start.satisfied_by(VersionKey("2.0.1")));
    CHECK_FALSE(open_start.satisfied_by(VersionKey("2.0")));

    const auto exact = parse_constraint(json{{"exact", "10.1.3"}});
    CHECK(exact.kind == VersionConstraint::Kind::Exact);
    CHECK(exact.satisfied_by(VersionKey("10.1.3")));
    CHECK_FALSE(exact.satisfied_by(VersionKey("10.1.4")));

    const auto everything = parse_constraint(json::object());
    CHECK(everything.satisfied_by(VersionKey("0")));
}

TEST_CASE("malformed constraints are rejected") {
    CHECK_THROWS_AS(parse_constraint(json{{"endIncluding", "1"}, {"endExcluding", "2"}}), DataError);
    CHECK_THROWS_AS(parse_constraint(json{{"exact", "1"}, {"endExcluding", "2"}}), DataError);
    CHECK_THROWS_AS(parse_constraint(json{{"upTo", "1"}}), DataError);
    CHECK_THROWS_AS(parse_constraint(json{{"exact", 3}}), DataError);
    CHECK_THROWS_AS(parse_constraint(json::array()), DataError);
}

TEST_CASE("empty ranges and json round trip") {
    CHECK(parse_constraint(json{{"startIncluding", "3"}, {"endIncluding", "2"}}).is_empty_range());
    CHECK(parse_constraint(json{{"startExcluding", "3"}, {"endIncluding", "3"}}).is_empty_range());
    CHECK_FALSE(parse_constraint(json{{"startIncluding", "3"}, {"endIncluding", "3"}}).is_empty_range());

    for (const auto& doc : {json{{"exact", "1.2"}}, json{{"startExcluding", "1"}, {"endIncluding", "4u2"}},
                            json::object()}) {
        const auto c = parse_constraint(doc);
        CHECK(parse_constraint(c.to_json()) == c);
        CHECK_FALSE(c.describe().empty());
    }
}

TEST_CASE("rekey applies product rules to bounds") {
    auto c = parse_constraint(json{{"endIncluding", "6update13"}});
    VersionRules jre;
    jre.update_markers = {"u", "update"};
    CHECK_FALSE(c.satisfied_by(VersionKey("6u7", jre)));
    c.rekey(jre);
    CHECK(c.satisfied_by(VersionKey("6u7", jre)));
}
