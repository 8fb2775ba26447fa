#include "comodep/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "comodep/errors.hpp"

namespace comodep {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

SampleMatrix read_csv(std::istream& in) {
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> names;
    // Header, skipping a UTF-8 byte order mark.
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (row == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ParseError("missing header row", row == 0 ? 1 : row, 1);
    for (auto& f : split_fields(line)) names.push_back(trim(f));
    const std::size_t m = names.size();
    if (m < 2) throw ParseError("need at least two columns", row, 1);

    std::vector<double> data;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != m) {
            throw ParseError("expected " + std::to_string(m) + " fields, found " + std::to_string(fields.size()), row,
                             std::min(fields.size(), m) + 1);
        }
        for (std::size_t j = 0; j < m; ++j) {
            const std::string f = trim(fields[j]);
            double v = 0.0;
            const char* first = f.data();
            const char* last = f.data() + f.size();
            if (!f.empty() && *first == '+') ++first;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (f.empty() || ec != std::errc() || ptr != last) {
                throw ParseError("not a number: '" + f + "'", row, j + 1);
            }
            if (!std::isfinite(v)) throw ParseError("non-finite value: '" + f + "'", row, j + 1);
            data.push_back(v);
        }
        ++n;
    }
    if (n < 2) throw ParseError("need at least two data rows", row + 1, 1);
    return SampleMatrix(n, m, std::move(data), std::move(names));
}

SampleMatrix read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'", 0, 0);
    return read_csv(in);
}

void write_csv(std::ostream& out, const SampleMatrix& sample) {
    for (std::size_t j = 0; j < sample.cols(); ++j) {
        if (j) out << ',';
        out << (sample.names().empty() ? "x" + std::to_string(j + 1) : sample.names()[j]);
    }
    out << '\n';
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < sample.rows(); ++i) {
        os.str({});
        for (std::size_t j = 0; j < sample.cols(); ++j) {
            if (j) os << ',';
            os << sample(i, j);
        }
        out << os.str() << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const SampleMatrix& sample) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write '" + path.string() + "'");
    write_csv(out, sample);
}

}  // namespace comodep
