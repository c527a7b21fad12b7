#include "hfrac/field_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hfrac {

namespace {

constexpr char kMagic[] = "HFLD1\n";

uint64_t to_le_bits(double v) {
  uint64_t u;
  std::memcpy(&u, &v, 8);
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  return u;
}

double from_le_bits(uint64_t u) {
  if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_field(const GridField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_field: cannot open " + path);
  os.write(kMagic, 6);
  std::ostringstream hdr;
  hdr << f.spec.n;
  for (const auto& ax : f.spec.axes) hdr << ' ' << ax.count;
  for (const auto& ax : f.spec.axes) hdr << ' ' << format_double(ax.a) << ' ' << format_double(ax.b);
  hdr << ' ' << (f.spec.mode == BoundaryMode::Periodic ? 'P' : 'Z') << '\n';
  const std::string h = hdr.str();
  os.write(h.data(), static_cast<std::streamsize>(h.size()));
  std::vector<uint64_t> buf(2 * f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    buf[2 * i] = to_le_bits(f.values[i].real());
    buf[2 * i + 1] = to_le_bits(f.values[i].imag());
  }
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 8));
  if (!os) throw std::runtime_error("save_field: write failed for " + path);
}

GridField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_field: cannot open " + path);
  char magic[6];
  is.read(magic, 6);
  if (!is || std::memcmp(magic, kMagic, 6) != 0) {
    throw std::runtime_error("load_field: magic mismatch (not an HFLD1 file): " + path);
  }
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("load_field: malformed header");
  std::istringstream hs(header);
  int n = 0;
  if (!(hs >> n) || n < 1) throw std::runtime_error("load_field: malformed header (n)");
  std::vector<AxisSpec> axes(2 * n + 1);
  for (auto& ax : axes) {
    if (!(hs >> ax.count)) throw std::runtime_error("load_field: malformed header (counts)");
  }
  for (auto& ax : axes) {
    if (!(hs >> ax.a >> ax.b)) throw std::runtime_error("load_field: malformed header (extents)");
  }
  char mode_ch = 0;
  if (!(hs >> mode_ch) || (mode_ch != 'P' && mode_ch != 'Z')) {
    throw std::runtime_error("load_field: malformed header (mode)");
  }
  GridSpec spec(n, std::move(axes),
                mode_ch == 'P' ? BoundaryMode::Periodic : BoundaryMode::ZeroExtended);
  GridField f(spec);
  std::vector<uint64_t> buf(2 * f.values.size());
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 8));
  if (is.gcount() != static_cast<std::streamsize>(buf.size() * 8)) {
    throw std::runtime_error("load_field: truncated payload in " + path);
  }
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    f.values[i] = Complex(from_le_bits(buf[2 * i]), from_le_bits(buf[2 * i + 1]));
  }
  return f;
}

}  // namespace hfrac
