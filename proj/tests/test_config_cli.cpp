#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "mln/config.hpp"
#include "mln/report.hpp"

using namespace mln;

TEST_CASE("config: sections, scalars, arrays, inline tables, comments") {
    const char* text = R"(
# run description
name = "demo"
seed = 7
domain = { kind = "ball", r = 0.8, center = [0, 0, 0] }

[params]
n = 3
s = 0.5          # fractional order
mu = 1.0
lambda = -1.5

[grid]
L = 1.0
m = 48
)";
    Config c = Config::parse_string(text);
    CHECK(c.str("name") == "demo");
    CHECK(c.number("seed") == 7);
    CHECK(c.number("params.n") == 3);
    CHECK(c.number("params.s") == doctest::Approx(0.5));
    CHECK(c.number("params.lambda") == doctest::Approx(-1.5));
    CHECK(c.number("grid.m") == 48);
    CHECK(c.str("domain.kind") == "ball");
    CHECK(c.number("domain.r") == doctest::Approx(0.8));
    CHECK(c.at("domain.center").as_array().size() == 3);
    CHECK(c.line_of("params.s") == 9);
    CHECK_FALSE(c.has("missing.key"));
    CHECK_THROWS_AS(c.number("missing.key"), ConfigError);
}

TEST_CASE("config: malformed input carries line numbers") {
    try {
        Config::parse_string("a = 1\nbad line\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS(Config::parse_string("x = \"unterminated\n"));
    CHECK_THROWS(Config::parse_string("x = [1, 2\n"));
    CHECK_THROWS(Config::parse_string("x = twelve\n"));
}

TEST_CASE("csv writer quotes per RFC 4180") {
    std::string path = "test_rfc4180.csv";
    CsvWriter w(path);
    w.header({"a", "b"});
    w.row({"plain", "with,comma"});
    w.row({"with \"quote\"", "line\nbreak"});
    w.write();
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    std::string got = ss.str();
    CHECK(got ==
          "a,b\r\nplain,\"with,comma\"\r\n\"with \"\"quote\"\"\",\"line\nbreak\"\r\n");
    std::remove(path.c_str());
}
