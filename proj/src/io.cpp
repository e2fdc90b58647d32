#include "specspan/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "specspan/error.hpp"

namespace specspan {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(x))
    throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  return x;
}

std::size_t parse_part(std::string_view field, std::size_t line) {
  field = trim(field);
  std::size_t id = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
    throw Error(ErrorCode::BadPartColumn,
                "line " + std::to_string(line) + ": part id '" + std::string(field) + "' is not a nonnegative integer");
  return id;
}

}  // namespace

VectorFile parse_vector_file(std::istream& in) {
  VectorFile file;
  bool partitioned = false;
  std::vector<double> flat;
  std::vector<std::size_t> parts;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::string raw;
  for (std::size_t line = 1; std::getline(in, raw); ++line) {
    const std::string_view s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '#') {
      const std::string_view body = trim(s.substr(1));
      if (body == kPartitionedMarker) {
        if (rows > 0) throw Error(ErrorCode::Parse, "layout marker after data rows");
        partitioned = true;
      }
      file.comments.emplace_back(body);
      continue;
    }
    std::size_t fields = 0;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = s.find(',', start);
      const std::string_view field = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
      if (partitioned && fields == 0)
        parts.push_back(parse_part(field, line));
      else
        flat.push_back(parse_number(field, line));
      ++fields;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rows == 0) width = fields;
    if (fields != width)
      throw Error(ErrorCode::Parse, "line " + std::to_string(line) + ": expected " + std::to_string(width) +
                                        " fields, got " + std::to_string(fields));
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::Parse, "no data rows");
  const std::size_t dim = partitioned ? width - 1 : width;
  if (dim == 0) throw Error(ErrorCode::Parse, "rows carry no coordinates");
  file.vectors = VectorSet(dim, std::move(flat));
  if (partitioned) file.parts = std::move(parts);
  return file;
}

VectorFile read_vector_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return parse_vector_file(in);
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  if (ec != std::errc()) throw Error(ErrorCode::Internal, "number formatting failed");
  return std::string(buf, ptr);
}

void write_vector_file(std::ostream& out, const VectorFile& file) {
  bool marked = false;
  for (const auto& c : file.comments) marked = marked || trim(c) == kPartitionedMarker;
  if (file.parts && !marked) out << "# " << kPartitionedMarker << '\n';
  for (const auto& c : file.comments) out << "# " << c << '\n';
  const VectorSet& vs = file.vectors;
  if (file.parts && file.parts->size() != vs.size())
    throw Error(ErrorCode::BadPartColumn, "part column length differs from the vector count");
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (file.parts) out << (*file.parts)[i] << ',';
    const VecView v = vs[i];
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (j) out << ',';
      out << format_double(v[j]);
    }
    out << '\n';
  }
}

void write_vector_file(const std::string& path, const VectorFile& file) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  write_vector_file(out, file);
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

}  // namespace specspan
