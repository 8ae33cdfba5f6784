#include <doctest.h>

#include <cmath>
#include <limits>

#include <json.hpp>

#include "divdis/io.hpp"
#include "divdis/report.hpp"
#include "../check_code.hpp"
#include "../support.hpp"

using namespace divdis;
using report::Cell;
using report::Table;

TEST_CASE("number formatting") {
  CHECK(report::format_sig6(0.1234567) == "0.123457");
  CHECK(report::format_sig6(-0.0) == "0");
  CHECK(report::format_sig6(1e-7) == "1e-07");
  CHECK(report::format_sig6(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(report::format_fixed2(20.0) == "20.00");
  CHECK(report::format_fixed2(66.666) == "66.67");
}

TEST_CASE("csv and json rendering") {
  Table t{"demo", {"a note"}, {"name", "x", "n", "ok", "missing"}, {}};
  t.add({Cell(std::string("m0")), Cell(0.5), Cell(std::int64_t{3}), Cell(true), Cell{}});
  CHECK(report::to_csv(t) == "# a note\nname,x,n,ok,missing\nm0,0.5,3,true,\n");
  const auto j = nlohmann::json::parse(report::to_json(t));
  CHECK(j["rows"][0]["x"] == 0.5);
  CHECK(j["rows"][0]["missing"].is_null());
  CHECK(j["columns"].size() == 5);
  CHECK_ERROR_CODE(t.add({Cell(1.0)}), ErrorCode::InvalidArgument);
}

TEST_CASE("json keeps full precision") {
  Table t{"p", {}, {"x"}, {}};
  const double v = 0.1 + 0.2;
  t.add({Cell(v)});
  CHECK(nlohmann::json::parse(report::to_json(t))["rows"][0]["x"].get<double>() == v);
}

TEST_CASE("writing refuses to clobber") {
  const auto dir = testing_support::scratch_dir("report");
  Table t{"w", {}, {"x"}, {}};
  t.add({Cell(1.0)});
  const std::vector<report::Format> both{report::Format::Csv, report::Format::Json};
  CHECK(report::write_table(t, dir, both, false).size() == 2);
  CHECK_ERROR_CODE(report::write_table(t, dir, both, false), ErrorCode::OutputExists);
  CHECK_NOTHROW(report::write_table(t, dir, both, true));
  CHECK(io::read_text(dir / "w.csv") == "x\n1\n");
}
