#include "hypoforge/util.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

using namespace hypoforge;

TEST_SUITE("util") {

TEST_CASE("trim and normalize") {
    CHECK(trim("  a b  ") == "a b");
    CHECK(trim("") == "");
    CHECK(trim(" \t\n ") == "");
    CHECK(normalize_ws("  a \t b\n c ") == "a b c");
    CHECK(fold_key("  Gradient  Dislocation\tCells ") == "gradient dislocation cells");
}

TEST_CASE("split and join") {
    CHECK(split("a|b||c", '|') == std::vector<std::string>{"a", "b", "", "c"});
    CHECK(split_trimmed(" a ; ; b ", ';') == std::vector<std::string>{"a", "b"});
    CHECK(join({"a", "b"}, ", ") == "a, b");
    CHECK(split_lines("a\r\nb\nc") == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("word_count") {
    CHECK(word_count("") == 0);
    CHECK(word_count("   ") == 0);
    CHECK(word_count("one two  three") == 3);
}

TEST_CASE("wrap_text honors the width") {
    auto lines = wrap_text("gradient nanoscaled dislocation cell structures", 24);
    REQUIRE(lines.size() > 1);
    for (const auto& l : lines) CHECK(l.size() <= 24);
    CHECK(join(lines, " ") == "gradient nanoscaled dislocation cell structures");

    auto oversized = wrap_text("supercalifragilisticexpialidocious", 10);
    REQUIRE(oversized.size() == 1);  // unbreakable word stays whole
}

TEST_CASE("sha256 known vector") {
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("csv quoting round-trips") {
    std::string row = csv_row({"plain", "with, comma", "with \"quote\"", "multi\nline"});
    auto parsed = parse_csv(row);
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0] == std::vector<std::string>{"plain", "with, comma", "with \"quote\"",
                                                "multi\nline"});
}

TEST_CASE("csv round-trip property") {
    std::mt19937_64 rng(42);
    const std::string charset = "abc ,\"\n;|x";
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::string> fields;
        size_t n = 1 + rng() % 5;
        for (size_t i = 0; i < n; ++i) fields.push_back(test::random_string(rng, 12, charset));
        // a lone trailing empty field is indistinguishable from none
        if (!fields.back().empty()) {
            auto parsed = parse_csv(csv_row(fields));
            REQUIRE(parsed.size() == 1);
            CHECK(parsed[0] == fields);
        }
    }
}

TEST_CASE("atomic_write_file then read_file") {
    test::TempDir tmp;
    fs::path p = tmp.path / "sub" / "file.txt";
    atomic_write_file(p, "payload");
    CHECK(read_file(p) == "payload");
    atomic_write_file(p, "replaced");
    CHECK(read_file(p) == "replaced");
    CHECK(!try_read_file(tmp.path / "missing").has_value());
}

}  // TEST_SUITE
