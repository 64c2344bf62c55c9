#include "hypoforge/table_parser.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace hypoforge;

TEST_SUITE("table_parser") {

TEST_CASE("single row with source suffixes") {
    auto result = parse_chart_table(
        "| A | m1 (From text) | S | m2 (From knowledge base) | P |", 5);
    REQUIRE(result.ok());
    REQUIRE(result.rows.size() == 1);
    const auto& row = result.rows[0];
    CHECK(row[0] == TableCell{"A", std::nullopt});
    CHECK(row[1] == TableCell{"m1", MechanismSource::FromText});
    CHECK(row[2] == TableCell{"S", std::nullopt});
    CHECK(row[3] == TableCell{"m2", MechanismSource::FromKnowledgeBase});
    CHECK(row[4] == TableCell{"P", std::nullopt});
}

TEST_CASE("header and separator are skipped") {
    std::string raw =
        "| Property | Mechanism | Structure |\n"
        "|---|---|---|\n"
        "| p1 | m1 (From text) | s1 |\n"
        "| p2 | m2 (From text) | s2 |\n";
    auto result = parse_chart_table(raw, 3);
    REQUIRE(result.ok());
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[0][0].text == "p1");
    CHECK(result.rows[1][2].text == "s2");
}

TEST_CASE("headerless table parses every row") {
    auto result = parse_chart_table("| a | b |\n| c | d |", 2);
    REQUIRE(result.ok());
    CHECK(result.rows.size() == 2);
}

TEST_CASE("code fences and surrounding prose are tolerated") {
    std::string raw =
        "Here is the table you asked for:\n"
        "```\n"
        "| a | b |\n"
        "| c | d |\n"
        "```\n"
        "Let me know if you need more.\n";
    auto result = parse_chart_table(raw, 2);
    REQUIRE(result.ok());
    CHECK(result.rows.size() == 2);
}

TEST_CASE("missing outer pipes are tolerated") {
    auto result = parse_chart_table("a | b | c", 3);
    REQUIRE(result.ok());
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0][1].text == "b");
}

TEST_CASE("arity violation carries the row number and line") {
    auto result = parse_chart_table("| A | B |", 5);
    REQUIRE(!result.ok());
    CHECK(result.error->kind == TableError::Kind::RowArity);
    CHECK(result.error->row == 1);
    CHECK(result.error->line == "| A | B |");

    auto second = parse_chart_table("| a | b | c |\n| x | y |\n", 3);
    REQUIRE(!second.ok());
    CHECK(second.error->row == 2);
}

TEST_CASE("empty input is a typed error") {
    for (const char* raw : {"", "   \n \n", "no table here at all"}) {
        auto result = parse_chart_table(raw, 3);
        REQUIRE(!result.ok());
        CHECK(result.error->kind == TableError::Kind::EmptyTable);
    }
}

TEST_CASE("blank lines inside the table are skipped") {
    auto result = parse_chart_table("| a | b |\n\n\n| c | d |\n", 2);
    REQUIRE(result.ok());
    CHECK(result.rows.size() == 2);
}

TEST_CASE("serialize/parse round-trip on generated rows") {
    std::mt19937_64 rng(7);
    const std::string charset = "abcdefg 0123.;:%";
    for (int iter = 0; iter < 200; ++iter) {
        size_t cols = 1 + rng() % 5;
        size_t n_rows = 1 + rng() % 6;
        std::vector<TableRow> rows;
        for (size_t r = 0; r < n_rows; ++r) {
            TableRow row;
            for (size_t c = 0; c < cols; ++c) {
                TableCell cell;
                // cells must be pipe/newline free and trimmed to round-trip
                do {
                    cell.text = trim(test::random_string(rng, 16, charset));
                } while (cell.text.empty());
                if (rng() % 3 == 0)
                    cell.source = rng() % 2 ? MechanismSource::FromText
                                            : MechanismSource::FromKnowledgeBase;
                row.push_back(std::move(cell));
            }
            rows.push_back(std::move(row));
        }
        auto result = parse_chart_table(serialize_table(rows), static_cast<int>(cols));
        REQUIRE(result.ok());
        CHECK(result.rows == rows);
    }
}

TEST_CASE("fuzz: arbitrary input never crashes") {
    std::mt19937_64 rng(1234);
    const std::string charset = "| abc\n-:()Fromtext knowledge base`\t\"0123456789";
    for (int iter = 0; iter < 2000; ++iter) {
        std::string raw = test::random_string(rng, 160, charset);
        int cols = 1 + static_cast<int>(rng() % 6);
        auto result = parse_chart_table(raw, cols);
        // contract: rows or a typed error, never a crash
        if (!result.ok()) CHECK(result.rows.empty());
        else CHECK(!result.rows.empty());
    }
}

}  // TEST_SUITE
