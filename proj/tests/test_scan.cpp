#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vortex/errors.hpp"
#include "vortex/scan.hpp"

using namespace vortex;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "test");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

ScanConfig small_config() {
  ScanConfig c = parse_config(R"({"N": 5, "l": 2, "m_z": -1, "scan": {"z": ["1zR", "2zR"], "resolution": 9}})");
  return c;
}

}  // namespace

TEST_CASE("minimal config gets defaults") {
  const ScanConfig c = parse_config(R"({"N": 12, "l": 1, "m_z": -1})");
  CHECK(c.array.n_emitters == 12);
  CHECK(c.array.phase_param == 1);
  CHECK(c.array.m_z == -1);
  CHECK(c.array.wavelength == 1e-6);
  CHECK(c.array.radius == 1e-3);
  CHECK(c.rayleigh_range() == doctest::Approx(3.14159).epsilon(1e-5));
  REQUIRE(c.z_list.size() == 3);
  CHECK(c.z_list[0] == c.rayleigh_range());
  CHECK(c.z_list[1] == 1.5 * c.rayleigh_range());
  CHECK(c.z_list[2] == 2.0 * c.rayleigh_range());
  CHECK(c.evaluator == Evaluator::farfield);
}

TEST_CASE("nested sections and units") {
  const ScanConfig c = parse_config(R"({
    "array": {"N": 3, "l": 2, "m_z": 1, "R": "2mm", "lambda": "0.5um"},
    "scan": {"z": [1.0, "1.5zR"], "half_width": "40lambda", "resolution": 11,
             "evaluator": "series", "truncation": {"max_lattice_index": 4}},
    "outputs": ["flux", "all-params", "components"]
  })");
  CHECK(c.array.radius == doctest::Approx(2e-3));
  CHECK(c.array.wavelength == doctest::Approx(0.5e-6));
  CHECK(c.z_list[0] == 1.0);
  CHECK(c.z_list[1] == doctest::Approx(1.5 * c.rayleigh_range()));
  CHECK(c.half_width == doctest::Approx(20e-6));
  CHECK(c.evaluator == Evaluator::series);
  REQUIRE(c.truncation.has_value());
  CHECK(c.truncation->max_lattice_index == 4);
  CHECK(c.outputs.size() == 3);
}

TEST_CASE("validation errors name the field") {
  CHECK(contains(error_of(R"({"N": 12, "l": 1, "m_z": 0})"), "m_z"));
  CHECK(contains(error_of(R"({"array": {"R": -1e-3}})"), "radius"));
  CHECK(contains(error_of(R"({"scan": {"resolution": 1}})"), "scan.resolution"));
  CHECK(contains(error_of(R"({"scan": {"half_width": 0}})"), "scan.half_width"));
  CHECK(contains(error_of(R"({"scan": {"z": [1.0, -2.0]}})"), "scan.z[1]"));
  CHECK(contains(error_of(R"({"scan": {"evaluator": "magic"}})"), "scan.evaluator"));
  CHECK(contains(error_of(R"({"outputs": ["flux", "phase"]})"), "outputs[1]"));
  CHECK(contains(error_of(R"({"N": 12.5})"), "N"));
  CHECK(contains(error_of(R"({"N": 3, "array": {"N": 4}})"), "more than once"));
}

TEST_CASE("unknown keys are rejected") {
  CHECK(contains(error_of(R"({"N": 12, "colour": "red"})"), "colour"));
  CHECK(contains(error_of(R"({"array": {"radius": 1}})"), "array.radius"));
  CHECK(contains(error_of(R"({"scan": {"steps": 3}})"), "scan.steps"));
}

TEST_CASE("parse errors report line and column") {
  const std::string e = error_of("{\n  \"N\": 12,\n  \"l\": ,\n}");
  CHECK(contains(e, "test:3:"));
  CHECK(contains(e, "parse error"));
}

TEST_CASE("load_config from file") {
  const auto path = std::filesystem::temp_directory_path() / "vortex_test_config.json";
  {
    std::ofstream(path) << R"({"N": 6, "l": 3, "m_z": -1})";
  }
  CHECK(load_config(path).array.n_emitters == 6);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("field map shape and cell contents") {
  const ScanConfig c = small_config();
  const auto maps = field_map(c, 2);
  REQUIRE(maps.size() == 2);
  for (const FieldMap& m : maps) {
    CHECK(m.cells.size() == 81);
    CHECK(m.cells.front().x == -c.half_width);
    CHECK(m.cells.front().y == -c.half_width);
    CHECK(m.cells[1].y == -c.half_width);
    CHECK(m.cells.back().x == doctest::Approx(c.half_width));
    for (const FieldCell& cell : m.cells) {
      CHECK(cell.status == CellStatus::defined);
      CHECK(cell.polarization.within_bounds());
      CHECK(cell.flux >= 0.0);
    }
  }
}

TEST_CASE("empty outputs give a metadata-only map") {
  ScanConfig c = small_config();
  c.outputs.clear();
  const auto maps = field_map(c);
  REQUIRE(maps.size() == 2);
  CHECK(maps[0].cells.empty());
  const std::string csv = to_csv(maps[0]);
  CHECK(contains(csv, "# config = "));
  CHECK(contains(csv, "rho_x_m,rho_y_m,flux_au"));
}

TEST_CASE("evaluator failures become marked cells") {
  ScanConfig c = parse_config(R"({"N": 4, "l": 1, "m_z": -1,
    "scan": {"z": [1e-17], "half_width": 1e-3, "resolution": 3, "evaluator": "exact"}})");
  const auto maps = field_map(c);
  bool any_failed = false;
  for (const FieldCell& cell : maps[0].cells) any_failed |= cell.status == CellStatus::failed;
  CHECK(any_failed);
  CHECK(contains(to_csv(maps[0]), "undefined,-1"));
}

TEST_CASE("zero-field cells are marked undefined") {
  // l=1, m_z=-1, N=12 on the continuum: all three orders vanish at rho = 0 only for a_zero absent.
  ScanConfig c = parse_config(R"({"N": 12, "l": 2, "m_z": 1, "scan": {"evaluator": "continuous"}})");
  const FieldCell centre = evaluate_cell(c, 0.0, 0.0, c.rayleigh_range());
  CHECK(centre.status == CellStatus::undefined);
  FieldMap m;
  m.config = c;
  m.z = c.rayleigh_range();
  m.layout = "profile";
  m.points_per_axis = 1;
  m.cells = {centre};
  const std::string csv = to_csv(m);
  CHECK(contains(csv, "undefined,undefined,undefined,undefined,undefined,undefined,undefined,undefined,0\n"));
}

TEST_CASE("output is byte-identical across runs and thread counts") {
  const ScanConfig c = small_config();
  const auto a = field_map(c, 1);
  const auto b = field_map(c, 3);
  const auto d = field_map(c, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(to_csv(a[i]) == to_csv(b[i]));
    CHECK(to_csv(a[i]) == to_csv(d[i]));
  }
}

TEST_CASE("metadata echo re-ingests to the identical scan") {
  ScanConfig c = parse_config(R"({"N": 7, "l": 3, "m_z": 1, "R": 1.1e-3,
      "scan": {"z": [0.37, "1.3zR"], "half_width": 7.7e-4, "resolution": 6, "evaluator": "series",
               "truncation": {"max_lattice_index": 9, "term_floor": 1e-18}},
      "outputs": ["p_z"]})");
  const auto maps = field_map(c);
  const std::string csv = to_csv(maps[1]);
  const ScanConfig back = parse_config(csv, "echo");
  CHECK(config_to_json(back) == config_to_json(c));
  const auto again = field_map(back);
  CHECK(to_csv(again[1]) == csv);
}

TEST_CASE("CSV layout") {
  const auto maps = field_map(small_config());
  std::istringstream in(to_csv(maps[0]));
  std::string line;
  int header = 0;
  while (std::getline(in, line) && line.rfind("#", 0) == 0) ++header;
  CHECK(header > 5);
  CHECK(line ==
        "rho_x_m,rho_y_m,flux_au,re_a_plus,im_a_plus,re_a_zero,im_a_zero,re_a_minus,im_a_minus,"
        "p_x,p_y,p_z,p_xy,p_xz,p_yz,p_xx_minus_yy,p_zz,defined_flag");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 17);
    const auto first = line.substr(0, line.find(','));
    CHECK(first.size() >= 22);  // 17 digits, point, exponent
  }
  CHECK(rows == 81);
  CHECK(contains(to_csv(maps[0]), "# timestamp = none"));
}

TEST_CASE("radial profiles") {
  SUBCASE("l=2 p_z crosses zero near x = 2") {
    ScanConfig c = parse_config(R"({"N": 12, "l": 2, "m_z": -1, "scan": {"z": ["1zR"]}})");
    const double k = c.array.wavenumber();
    const auto maps = radial_profile(c, 0.0, RadialSampling{4.0 / k, 401});
    double crossing = -1.0;
    for (std::size_t i = 1; i < maps[0].cells.size(); ++i) {
      const auto& a = maps[0].cells[i - 1];
      const auto& b = maps[0].cells[i];
      if (a.polarization.p_z > 0.0 && b.polarization.p_z <= 0.0) {
        const double t = a.polarization.p_z / (a.polarization.p_z - b.polarization.p_z);
        crossing = k * (a.x + t * (b.x - a.x));
      }
    }
    CHECK(crossing == doctest::Approx(2.0).epsilon(1e-3));
  }
  SUBCASE("l=1 p_zz on the axis is -2") {
    ScanConfig c = parse_config(R"({"N": 12, "l": 1, "m_z": -1})");
    const auto maps = radial_profile(c, 0.3);
    for (const auto& m : maps) CHECK(m.cells[0].polarization.p_zz == doctest::Approx(-2.0).epsilon(1e-9));
  }
  SUBCASE("a single point sits on the axis") {
    ScanConfig c = parse_config(R"({"N": 12, "l": 1, "m_z": -1, "scan": {"z": ["2zR"]}})");
    const auto maps = radial_profile(c, 1.0, RadialSampling{0.0, 1});
    REQUIRE(maps.size() == 1);
    REQUIRE(maps[0].cells.size() == 1);
    CHECK(maps[0].cells[0].x == 0.0);
    CHECK(maps[0].cells[0].y == 0.0);
    const std::string csv = to_csv(maps[0]);
    CHECK(csv.substr(csv.rfind("rho_x_m")).find('\n') == csv.find('\n', csv.rfind("rho_x_m")) - csv.rfind("rho_x_m"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == std::count(csv.begin(), csv.end(), '#') + 2);
  }
  CHECK_THROWS_AS(radial_profile(small_config(), 0.0, RadialSampling{1e-3, 0}), ConfigError);
}

TEST_CASE("N=3 flux lattice versus N=12 ring") {
  auto ring_variance = [](int n) {
    ScanConfig c = parse_config(R"({"l": 1, "m_z": -1, "scan": {"z": ["2zR"]}})");
    c.array.n_emitters = n;
    std::vector<double> f;
    for (int i = 0; i < 360; ++i) {
      const double phi = 2.0 * 3.141592653589793 * i / 360.0;
      f.push_back(evaluate_cell(c, 1.84e-3 * std::cos(phi), 1.84e-3 * std::sin(phi), c.z_list[0]).flux);
    }
    double mean = 0.0;
    for (double v : f) mean += v / f.size();
    double var = 0.0;
    for (double v : f) var += (v - mean) * (v - mean) / f.size();
    return var / (mean * mean);
  };
  CHECK(ring_variance(3) >= 10.0 * ring_variance(12));
}

TEST_CASE("singularity export") {
  ScanConfig c = parse_config(R"({"N": 12, "l": 1, "m_z": -1,
      "scan": {"z": ["2zR"], "half_width": "2lambda", "resolution": 17}})");
  const auto found = scan_singularities(c);
  REQUIRE(found.size() == 3);
  std::ostringstream out;
  write_singularities_csv(out, c, found);
  CHECK(contains(out.str(), "z_m,component,kind,x_m,y_m,winding"));
  CHECK(contains(out.str(), ",minus,phase-vortex,"));
}

TEST_CASE("heatmaps") {
  ScanConfig c = small_config();
  c.outputs = {OutputKind::flux, OutputKind::p_z, OutputKind::components};
  const auto maps = field_map(c);
  const auto dir = std::filesystem::temp_directory_path() / "vortex_heatmaps";
  std::filesystem::create_directories(dir);
  const auto files = write_heatmaps(maps[0], dir, "t");
  if (heatmaps_supported()) {
    CHECK(files.size() == 5);
    for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);
  } else {
    CHECK(files.empty());
  }
  std::filesystem::remove_all(dir);
}
