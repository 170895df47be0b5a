#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>

#include "vortex/errors.hpp"
#include "vortex/scan.hpp"

#ifdef VORTEX_HAVE_PNG
#include <png.h>
#endif

namespace vortex {

#ifdef VORTEX_HAVE_PNG
namespace {

using Rgb = std::array<unsigned char, 3>;

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  Rgb out{};
  for (int i = 0; i < 3; ++i) out[i] = static_cast<unsigned char>(std::lround(a[i] + (b[i] - a[i]) * t));
  return out;
}

// Blue-white-red with white at `mid`.
Rgb diverging(double v, double lo, double mid, double hi) {
  const Rgb blue{33, 102, 172};
  const Rgb white{247, 247, 247};
  const Rgb red{178, 24, 43};
  v = std::clamp(v, lo, hi);
  if (v < mid) return lerp(blue, white, (v - lo) / (mid - lo));
  return lerp(white, red, (v - mid) / (hi - mid));
}

// Black to yellow through purple and orange.
Rgb sequential(double t) {
  static const std::array<Rgb, 5> stops{Rgb{0, 0, 4}, Rgb{87, 16, 110}, Rgb{188, 55, 84},
                                        Rgb{249, 142, 9}, Rgb{252, 255, 164}};
  t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
  const std::size_t i = std::min<std::size_t>(std::size_t(t), stops.size() - 2);
  return lerp(stops[i], stops[i + 1], t - double(i));
}

const Rgb kUndefined{128, 128, 128};

void write_png(const std::filesystem::path& path, int n, const std::vector<Rgb>& pixels) {
  FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (!fp) throw ConfigError(path.string(), "cannot open for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw ConfigError(path.string(), "PNG encoding failed");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, png_uint_32(n), png_uint_32(n), 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<unsigned char> row(std::size_t(n) * 3);
  // Image rows run top to bottom, grid rows bottom (y = -w) to top.
  for (int j = n - 1; j >= 0; --j) {
    for (int i = 0; i < n; ++i) {
      const Rgb& p = pixels[std::size_t(j) * n + i];
      std::copy(p.begin(), p.end(), row.begin() + 3 * i);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

struct Channel {
  std::string name;
  std::function<double(const FieldCell&)> value;
  bool needs_polarization;
  bool sequential;
  double lo, mid, hi;
};

std::vector<Channel> channels_for(OutputKind k) {
  auto pol = [](double PolarizationState::*m) {
    return [m](const FieldCell& c) { return c.polarization.*m; };
  };
  switch (k) {
    case OutputKind::flux:
      return {{"flux", [](const FieldCell& c) { return c.flux; }, false, true, 0, 0, 0}};
    case OutputKind::p_z:
      return {{"p_z", pol(&PolarizationState::p_z), true, false, -1, 0, 1}};
    case OutputKind::p_zz:
      return {{"p_zz", pol(&PolarizationState::p_zz), true, false, -2, 0, 1}};
    case OutputKind::all_params:
      return {{"p_x", pol(&PolarizationState::p_x), true, false, -1, 0, 1},
              {"p_y", pol(&PolarizationState::p_y), true, false, -1, 0, 1},
              {"p_z", pol(&PolarizationState::p_z), true, false, -1, 0, 1},
              {"p_xy", pol(&PolarizationState::p_xy), true, false, -1.5, 0, 1.5},
              {"p_xz", pol(&PolarizationState::p_xz), true, false, -1.5, 0, 1.5},
              {"p_yz", pol(&PolarizationState::p_yz), true, false, -1.5, 0, 1.5},
              {"p_xx_minus_yy", pol(&PolarizationState::p_xx_minus_yy), true, false, -3, 0, 3},
              {"p_zz", pol(&PolarizationState::p_zz), true, false, -2, 0, 1}};
    case OutputKind::components:
      return {{"abs_a_plus", [](const FieldCell& c) { return std::abs(c.amplitudes.plus); }, false, true, 0, 0, 0},
              {"abs_a_zero", [](const FieldCell& c) { return std::abs(c.amplitudes.zero); }, false, true, 0, 0, 0},
              {"abs_a_minus", [](const FieldCell& c) { return std::abs(c.amplitudes.minus); }, false, true, 0, 0, 0}};
  }
  return {};
}

}  // namespace

bool heatmaps_supported() { return true; }

std::vector<std::filesystem::path> write_heatmaps(const FieldMap& map, const std::filesystem::path& dir,
                                                  const std::string& stem) {
  std::vector<std::filesystem::path> written;
  if (map.layout != "grid" || map.cells.empty()) return written;
  const int n = map.points_per_axis;
  std::vector<std::string> done;
  for (OutputKind k : map.config.outputs) {
    for (const Channel& ch : channels_for(k)) {
      if (std::find(done.begin(), done.end(), ch.name) != done.end()) continue;
      done.push_back(ch.name);
      double top = 0.0;
      if (ch.sequential) {
        for (const FieldCell& c : map.cells) {
          if (c.status != CellStatus::failed) top = std::max(top, ch.value(c));
        }
      }
      std::vector<Rgb> px(map.cells.size());
      for (std::size_t i = 0; i < map.cells.size(); ++i) {
        const FieldCell& c = map.cells[i];
        const bool ok = c.status == CellStatus::defined ||
                        (c.status == CellStatus::undefined && !ch.needs_polarization);
        if (!ok) {
          px[i] = kUndefined;
        } else if (ch.sequential) {
          px[i] = sequential(top > 0.0 ? ch.value(c) / top : 0.0);
        } else {
          px[i] = diverging(ch.value(c), ch.lo, ch.mid, ch.hi);
        }
      }
      const auto path = dir / (stem + "_" + ch.name + ".png");
      write_png(path, n, px);
      written.push_back(path);
    }
  }
  return written;
}

#else

bool heatmaps_supported() { return false; }

std::vector<std::filesystem::path> write_heatmaps(const FieldMap&, const std::filesystem::path&,
                                                  const std::string&) {
  return {};
}

#endif

}  // namespace vortex
