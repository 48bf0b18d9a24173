#include "swtle/csv.hpp"
#include "swtle/svg.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <sstream>

using namespace swtle;

namespace {

std::size_t count_occurrences(const std::string& hay, const std::string& needle) {
    std::size_t n = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++n;
        pos += needle.size();
    }
    return n;
}

} // namespace

TEST_CASE("csv round trip preserves cells", "[csv]") {
    Csv t;
    t.columns = {"x", "y", "label"};
    t.rows = {{"1", "2.5", "a"}, {"-0.25", "1e-3", "b"}};
    std::ostringstream out;
    t.write(out);
    std::istringstream in(out.str());
    Csv back = Csv::read(in);
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
}

TEST_CASE("csv parse failures carry locations", "[csv]") {
    std::istringstream ragged("x,y\n1,2\n3\n");
    CHECK_THROWS_AS(Csv::read(ragged), DataError);

    std::istringstream empty("");
    CHECK_THROWS_AS(Csv::read(empty), DataError);

    std::istringstream bad_cell("x,y\n1,2\n3,abc\n");
    Csv t = Csv::read(bad_cell);
    try {
        t.numeric_column(1, "input");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }

    std::istringstream nonfinite("x,y\n1,nan\n");
    Csv t2 = Csv::read(nonfinite);
    CHECK_THROWS_AS(t2.numeric_column(1, "input"), DataError);
}

TEST_CASE("csv column lookup is case-insensitive on substring", "[csv]") {
    Csv t;
    t.columns = {"No", "Cement (kg)", "Water  (kg)", "Compressive Strength (28-day)(Mpa)"};
    CHECK(t.find_column_containing("water") == 2);
    CHECK(t.find_column_containing("compressive") == 3);
    CHECK(t.find_column_containing("slump") == -1);
    CHECK_THROWS_AS(t.require_column_containing("slump", "slump data"), DataError);
}

TEST_CASE("line chart renders one polyline and marker set per series", "[svg]") {
    LineChart chart("title", "n", "mise");
    chart.add_series("sw-tle", {{50, 0.1}, {100, 0.08}, {200, 0.05}});
    chart.add_series("q-nw", {{50, 0.2}, {100, 0.15}, {200, 0.09}});
    const std::string svg = chart.render();
    CHECK(count_occurrences(svg, "<polyline") == 2);
    CHECK(count_occurrences(svg, "<circle") == 6);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("sw-tle") != std::string::npos);
}

TEST_CASE("identical chart input renders byte-identical output", "[svg]") {
    auto make = [] {
        LineChart chart("MISE vs n", "n", "mise");
        chart.add_series("a", {{1, 0.5}, {2, 0.25}});
        chart.add_series("b", {{1, 0.9}, {2, 0.7}});
        return chart.render();
    };
    CHECK(make() == make());
}

TEST_CASE("log-scale charts reject non-positive values", "[svg]") {
    LineChart chart("t", "x", "y");
    chart.set_log_y(true);
    chart.add_series("a", {{1, 0.0}, {2, 1.0}});
    CHECK_THROWS_AS(chart.render(), ParameterError);
}

TEST_CASE("charts with no series are rejected", "[svg]") {
    LineChart chart("t", "x", "y");
    CHECK_THROWS_AS(chart.render(), ParameterError);
    CHECK_THROWS_AS(chart.add_series("empty", {}), ParameterError);
}
