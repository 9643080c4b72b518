#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "gmsc/curves.hpp"
#include "schema_check.hpp"

using Catch::Matchers::WithinAbs;
using namespace gmsc;
namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(std::move(fields));
  }
  return rows;
}

nlohmann::json load_json_file(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

cli::CurveRequest fig2_request() {
  cli::CurveRequest req;
  req.ell = 3;
  req.rho = 0.6;
  req.ms = {1, 2, 3};
  req.grid = {0.05, 0.95, 19, false};
  return req;
}

}  // namespace

TEST_CASE("numeric formatting is 17 significant digits, lowercase") {
  CHECK(io::format_num(0.5) == "5.0000000000000000e-01");
  CHECK(io::format_num(11.0 / 35.0) == "3.1428571428571428e-01");
  CHECK(io::format_num(-1.0) == "-1.0000000000000000e+00");
}

TEST_CASE("rd-curve output") {
  const cli::CurveRequest req = fig2_request();
  const std::string out = cli::render_rd_curve(req);

  SECTION("byte-deterministic") { CHECK(out == cli::render_rd_curve(req)); }

  const auto rows = parse_csv(out);
  REQUIRE(rows.size() == 1 + 19 * (3 + 3));
  CHECK(rows[0] == std::vector<std::string>{"series", "m", "d", "rate_nats",
                                            "exact", "branch"});

  SECTION("slb rows have an empty m field") {
    CHECK(rows[1][0] == "slb");
    CHECK(rows[1][1].empty());
    CHECK(rows[1][4] == "false");
  }

  SECTION("figure ordering: the m = 2 bound sits between the references") {
    // collect rate by (series/m, d-index)
    std::map<std::pair<std::string, std::string>, std::vector<double>> series;
    for (std::size_t r = 1; r < rows.size(); ++r)
      series[{rows[r][0], rows[r][1]}].push_back(std::stod(rows[r][3]));
    const auto& m1 = series[{"rd", "1"}];
    const auto& m2 = series[{"rd", "2"}];
    const auto& m3 = series[{"rd", "3"}];
    const auto& slb = series[{"slb", ""}];
    REQUIRE(m1.size() == 19);
    for (std::size_t i = 0; i < 19; ++i) {
      CHECK(m1[i] > m2[i]);        // strictly above for rho != 0
      CHECK(m2[i] >= m3[i] - 1e-12);
      CHECK(m3[i] >= slb[i] - 1e-12);
    }
    // coincidence regions: below d_c^(3,2) = 11/35 the m=2 bound equals the
    // centralized curve, and below d_c^+ = 0.4 the centralized equals slb
    const auto& central = series[{"centralized", "3"}];
    for (std::size_t i = 0; i < 19; ++i) {
      const double d = 0.05 + 0.05 * static_cast<double>(i);
      if (d < 11.0 / 35.0) CHECK_THAT(m2[i], WithinAbs(central[i], 1e-13));
      if (d > 11.0 / 35.0 + 1e-9) CHECK(m2[i] > central[i] + 1e-9);
      if (d <= 0.4) CHECK_THAT(central[i], WithinAbs(slb[i], 1e-13));
    }
  }

  SECTION("exactness flags per series") {
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (rows[r][0] == "centralized" || rows[r][0] == "distributed")
        CHECK(rows[r][4] == "true");
      if (rows[r][0] == "rd" && rows[r][1] == "2")
        CHECK(rows[r][4] == (std::stod(rows[r][2]) <= 11.0 / 35.0 ? "true"
                                                                  : "false"));
    }
  }

  SECTION("reference series can be dropped") {
    cli::CurveRequest bare = req;
    bare.quantity = cli::Quantity::bound;
    const auto bare_rows = parse_csv(cli::render_rd_curve(bare));
    CHECK(bare_rows.size() == 1 + 19 * 3);
    for (std::size_t r = 1; r < bare_rows.size(); ++r)
      CHECK(bare_rows[r][0] == "rd");
  }

  SECTION("rho = 0 collapses every series") {
    cli::CurveRequest indep = req;
    indep.rho = 0.0;
    const auto norows = parse_csv(cli::render_rd_curve(indep));
    std::map<std::string, std::vector<double>> by_d;
    for (std::size_t r = 1; r < norows.size(); ++r)
      by_d[norows[r][2]].push_back(std::stod(norows[r][3]));
    for (const auto& [d, rates] : by_d) {
      if (std::stod(d) >= 1.0) continue;
      for (double rate : rates)
        if (rates.front() > 0)  // slb == everything at rho = 0
          CHECK_THAT(rate, WithinAbs(rates.front(), 1e-12));
    }
  }

  SECTION("validation") {
    cli::CurveRequest bad = req;
    bad.grid.min = 0.0;
    CHECK_THROWS_AS(cli::render_rd_curve(bad), std::invalid_argument);
    bad = req;
    bad.grid.count = 1;
    CHECK_THROWS_AS(cli::render_rd_curve(bad), std::invalid_argument);
    bad = req;
    bad.ms = {0};
    CHECK_THROWS_AS(cli::render_rd_curve(bad), std::invalid_argument);
    bad = req;
    bad.ms = {4};
    CHECK_THROWS_AS(cli::render_rd_curve(bad), std::invalid_argument);
    bad = req;
    bad.ms.clear();
    CHECK_THROWS_AS(cli::render_rd_curve(bad), std::invalid_argument);
  }
}

TEST_CASE("gap-curve output") {
  cli::CurveRequest req;
  req.rho = 0.6;
  req.ms = {1, 2, 3};
  req.grid = {0.05, 0.95, 19, false};
  req.quantity = cli::Quantity::gap;
  const std::string out = cli::render_gap_curve(req);
  CHECK(out == cli::render_gap_curve(req));
  const auto rows = parse_csv(out);
  REQUIRE(rows.size() == 1 + 3 * 19);
  CHECK(rows[0] ==
        std::vector<std::string>{"m", "d", "delta_nats", "diverges"});
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const int m = std::stoi(rows[r][0]);
    const double d = std::stod(rows[r][1]);
    if (std::fabs(d - 0.4) < 1e-9) {
      CHECK(rows[r][3] == "true");
      CHECK(rows[r][2].empty());  // sentinel, not a numeric
    } else {
      CHECK(rows[r][3] == "false");
      const double delta = std::stod(rows[r][2]);
      if (m >= 2 && d <= dcm_limit(m, 0.6) + 1e-12) CHECK(delta == 0.0);
      if (m == 1) CHECK(delta > 0.0);
    }
  }
  CHECK_THROWS_AS(
      [&] {
        cli::CurveRequest bad = req;
        bad.rho = -0.2;
        cli::render_gap_curve(bad);
      }(),
      std::invalid_argument);
}

TEST_CASE("spectrum output") {
  cli::CurveRequest req;
  req.ell = 3;
  req.rho = 0.6;
  req.d = 0.5;
  req.ms = {1, 2, 3};
  req.quantity = cli::Quantity::spectrum;
  const std::string out = cli::render_spectrum(req);
  CHECK(out == cli::render_spectrum(req));
  const auto rows = parse_csv(out);
  REQUIRE(rows.size() == 1 + 3 * 3);
  // uncoded modes appear exactly for m = 3 at modes 1 and 2
  int uncoded = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r][4] == "true") {
      ++uncoded;
      CHECK(rows[r][0] == "3");
      CHECK(rows[r][1] != "3");
      CHECK_THAT(std::stod(rows[r][3]),
                 WithinAbs(std::stod(rows[r][2]), 1e-14));
    }
  }
  CHECK(uncoded == 2);

  SECTION("m = 3 and m = 4 allocations coincide below the m = 3 threshold") {
    cli::CurveRequest four;
    four.ell = 4;
    four.rho = 0.3;
    four.d = 0.6;
    four.ms = {1, 2, 3, 4};
    four.quantity = cli::Quantity::spectrum;
    const auto rows4 = parse_csv(cli::render_spectrum(four));
    std::map<std::string, std::vector<std::string>> d_modes;
    for (std::size_t r = 1; r < rows4.size(); ++r)
      d_modes[rows4[r][0]].push_back(rows4[r][3]);
    CHECK(d_modes["3"] == d_modes["4"]);
    CHECK(d_modes["1"] != d_modes["4"]);
  }

  SECTION("independent sources put every bar at d") {
    cli::CurveRequest indep = req;
    indep.rho = 0.0;
    const auto rows0 = parse_csv(cli::render_spectrum(indep));
    for (std::size_t r = 1; r < rows0.size(); ++r)
      CHECK(rows0[r][3] == io::format_num(0.5));
  }
}

TEST_CASE("critical output") {
  cli::CurveRequest req;
  req.ell = 4;
  req.rho = 0.3;
  req.ms = {1, 2, 3, 4};
  req.quantity = cli::Quantity::critical;
  const auto rows = parse_csv(cli::render_critical(req));
  REQUIRE(rows.size() == 1 + 2 + 4 + 4);
  CHECK(rows[1][0] == "dc_minus");
  CHECK_THAT(std::stod(rows[1][2]), WithinAbs(1.9, 1e-14));
  CHECK(rows[2][0] == "dc_plus");
  CHECK_THAT(std::stod(rows[2][2]), WithinAbs(0.7, 1e-14));
  CHECK(rows[4][1] == "2");
  CHECK_THAT(std::stod(rows[4][2]), WithinAbs(0.532, 1e-14));

  // non-positive rho emits only the spectral pair
  cli::CurveRequest neg = req;
  neg.rho = -0.2;
  CHECK(parse_csv(cli::render_critical(neg)).size() == 1 + 2);
}

TEST_CASE("json output validates against the shipped schemas") {
  const fs::path dir = fs::temp_directory_path() / "gmsc_curves_test";
  fs::create_directories(dir);
  const fs::path schema_dir = GMSC_SCHEMA_DIR;

  cli::CurveRequest rd = fig2_request();
  rd.format = cli::Format::json;
  rd.out = (dir / "rd.json").string();
  cli::cmd_rd_curve(rd);
  auto parsed = load_json_file(rd.out);
  CHECK(testsup::validate_against_schema(
            parsed, load_json_file(schema_dir / "rd_curve.schema.json")) ==
        "");
  CHECK(parsed["rows"].size() == 19 * 6);
  CHECK(parsed["rows"][0]["m"].is_null());

  cli::CurveRequest gap;
  gap.rho = 0.6;
  gap.ms = {1, 2};
  gap.grid = {0.05, 0.95, 19, false};
  gap.format = cli::Format::json;
  gap.quantity = cli::Quantity::gap;
  gap.out = (dir / "gap.json").string();
  cli::cmd_gap_curve(gap);
  parsed = load_json_file(gap.out);
  CHECK(testsup::validate_against_schema(
            parsed, load_json_file(schema_dir / "gap_curve.schema.json")) ==
        "");
  bool saw_divergence = false;
  for (const auto& row : parsed["rows"])
    if (row["diverges"].get<bool>()) {
      saw_divergence = true;
      CHECK(row["delta_nats"].is_null());
    }
  CHECK(saw_divergence);

  cli::CurveRequest spec;
  spec.ell = 3;
  spec.rho = 0.6;
  spec.d = 0.5;
  spec.ms = {1, 2, 3};
  spec.format = cli::Format::json;
  spec.quantity = cli::Quantity::spectrum;
  spec.out = (dir / "spec.json").string();
  cli::cmd_spectrum(spec);
  CHECK(testsup::validate_against_schema(
            load_json_file(spec.out),
            load_json_file(schema_dir / "spectrum.schema.json")) == "");

  cli::CurveRequest crit;
  crit.ell = 3;
  crit.rho = 0.6;
  crit.ms = {1, 2, 3};
  crit.format = cli::Format::json;
  crit.quantity = cli::Quantity::critical;
  crit.out = (dir / "crit.json").string();
  cli::cmd_critical(crit);
  CHECK(testsup::validate_against_schema(
            load_json_file(crit.out),
            load_json_file(schema_dir / "critical.schema.json")) == "");

  fs::remove_all(dir);
}

TEST_CASE("atomic writes") {
  const fs::path dir = fs::temp_directory_path() / "gmsc_atomic_test";
  fs::create_directories(dir);

  SECTION("existing files are replaced, no temp residue") {
    const fs::path target = dir / "out.csv";
    io::write_atomic(target, "old\n");
    io::write_atomic(target, "new\n");
    std::ifstream in(target);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    CHECK(content == "new\n");
    int entries = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
      (void)entry;
      ++entries;
    }
    CHECK(entries == 1);
  }

  SECTION("missing directory fails without leaving the target") {
    const fs::path target = dir / "nope" / "out.csv";
    CHECK_THROWS(io::write_atomic(target, "x"));
    CHECK_FALSE(fs::exists(target));
  }

  fs::remove_all(dir);
}

TEST_CASE("verify command reporting") {
  verify::Options opt;
  opt.ell_max = 3;
  opt.suites = {"prop4", "mmse"};
  std::ostringstream os;
  const int code = cli::cmd_verify(opt, os);
  CHECK(code == 0);
  CHECK(os.str().find("[PASS] prop4") != std::string::npos);
  CHECK(os.str().find("[PASS] mmse") != std::string::npos);
  CHECK(os.str().find("all suites passed") != std::string::npos);
}

TEST_CASE("grids") {
  const auto lin = io::spaced_grid(0.05, 0.95, 19, false);
  REQUIRE(lin.size() == 19);
  CHECK_THAT(lin[7], WithinAbs(0.4, 1e-12));
  CHECK_THAT(lin[13], WithinAbs(0.7, 1e-12));
  CHECK(lin.front() == 0.05);
  CHECK(lin.back() == 0.95);
  const auto geo = io::spaced_grid(0.01, 0.81, 5, true);
  CHECK_THAT(geo[2], WithinAbs(0.09, 1e-12));
  CHECK(geo.back() == 0.81);
}
