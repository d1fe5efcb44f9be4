#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fraclab/grid.hpp"
#include "fraclab/particles.hpp"

namespace fraclab {

/// Binary layout (native little-endian):
///   uint64 d, uint64 M, float64 L, uint64 n,
///   then n * M^d float64 values, species-major, each species row-major.
void write_field(const std::filesystem::path& path, const Field& f);
Field read_field(const std::filesystem::path& path);

/// d = 1 only: columns x, u_1, ..., u_n.
void write_field_csv(std::ostream& os, const Field& f);

/// Columns species, index, x_1..x_d.
void write_positions_csv(std::ostream& os, const ParticleEnsemble& e);

/// Plot-ready whitespace-separated columns with '#' comment header.
void write_dat(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows, const std::string& comment = {});

/// Shortest round-trip decimal form of a double ("%.17g").
std::string format_double(double v);

}  // namespace fraclab
