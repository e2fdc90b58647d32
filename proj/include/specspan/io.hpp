#pragma once

// Text vector files: '#' comment lines, comma-separated decimal rows. In the
// partitioned layout (announced by a "# layout: partitioned" comment) the
// first column of every row is a nonnegative integer part id.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "specspan/vector_set.hpp"

namespace specspan {

struct VectorFile {
  VectorSet vectors;
  std::optional<std::vector<std::size_t>> parts;
  std::vector<std::string> comments;  // without the leading '#', in file order
};

inline constexpr const char* kPartitionedMarker = "layout: partitioned";

/// Locale-independent; throws Parse (malformed number, ragged rows) or
/// BadPartColumn (part id not a nonnegative integer).
VectorFile parse_vector_file(std::istream& in);
VectorFile read_vector_file(const std::string& path);

/// 17 significant digits, so every double round-trips exactly.
std::string format_double(double x);

void write_vector_file(std::ostream& out, const VectorFile& file);
void write_vector_file(const std::string& path, const VectorFile& file);

}  // namespace specspan
