#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "comodep/model.hpp"

namespace comodep {

// Reads a sample: first row is a header, each following row holds one
// observation as comma-separated decimal numbers ('.' separator). Throws
// ParseError carrying the offending row and column.
SampleMatrix read_csv(std::istream& in);
SampleMatrix read_csv(const std::filesystem::path& path);

// Writes the header (column names, or x1..xm when unnamed) followed by one
// row per observation with 17 significant digits, which round-trips exactly.
void write_csv(std::ostream& out, const SampleMatrix& sample);
void write_csv(const std::filesystem::path& path, const SampleMatrix& sample);

}  // namespace comodep
