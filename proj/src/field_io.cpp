#include "fraclab/field_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace fraclab {

namespace {

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("read_field: truncated header");
  return v;
}

}  // namespace

void write_field(const std::filesystem::path& path, const Field& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  put<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid().dim()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(f.grid().points()));
  put<double>(os, f.grid().length());
  put<std::uint64_t>(os, static_cast<std::uint64_t>(f.species()));
  os.write(reinterpret_cast<const char*>(f.values().data()),
           static_cast<std::streamsize>(f.values().size() * sizeof(double)));
  if (!os) throw std::runtime_error("failed writing " + path.string());
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  const auto d = get<std::uint64_t>(is);
  const auto M = get<std::uint64_t>(is);
  const auto L = get<double>(is);
  const auto n = get<std::uint64_t>(is);
  if (d < 1 || d > 3 || M < 4 || M > (1u << 24) || n < 1 || n > 64)
    throw std::runtime_error("read_field: implausible header in " + path.string());
  const PeriodicGrid grid(static_cast<int>(d), L, static_cast<int>(M));
  std::vector<double> values(grid.size() * n);
  is.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("read_field: truncated data in " + path.string());
  return Field(grid, static_cast<int>(n), std::move(values));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_field_csv(std::ostream& os, const Field& f) {
  if (f.grid().dim() != 1) throw std::invalid_argument("write_field_csv: only d = 1 fields");
  os << 'x';
  for (int i = 0; i < f.species(); ++i) os << ",u_" << (i + 1);
  os << '\n';
  for (int m = 0; m < f.grid().points(); ++m) {
    os << format_double(f.grid().node(m));
    for (int i = 0; i < f.species(); ++i) os << ',' << format_double(f.component(i)[static_cast<std::size_t>(m)]);
    os << '\n';
  }
}

void write_positions_csv(std::ostream& os, const ParticleEnsemble& e) {
  os << "species,index";
  for (int a = 0; a < e.dim(); ++a) os << ",x_" << (a + 1);
  os << '\n';
  for (int i = 0; i < e.species(); ++i) {
    for (std::size_t k = 0; k < e.count(i); ++k) {
      os << (i + 1) << ',' << k;
      for (double x : e.particle(i, k)) os << ',' << format_double(x);
      os << '\n';
    }
  }
}

void write_dat(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::string& comment) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  if (!comment.empty()) os << "# " << comment << '\n';
  os << '#';
  for (const auto& c : columns) os << ' ' << c;
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t k = 0; k < r.size(); ++k) os << (k ? " " : "") << format_double(r[k]);
    os << '\n';
  }
}

}  // namespace fraclab
