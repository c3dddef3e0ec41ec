#include "ace/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ace {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_design_csv(std::ostream& out, const Design& design,
                      const std::vector<std::pair<std::string, std::string>>& metadata) {
    for (const auto& [key, value] : metadata) out << "# " << key << ": " << value << "\n";
    out << "run";
    for (std::size_t j = 0; j < design.n_vars(); ++j) out << ",x" << (j + 1);
    out << "\n";
    for (std::size_t k = 0; k < design.n_runs(); ++k) {
        out << (k + 1);
        for (std::size_t j = 0; j < design.n_vars(); ++j) {
            out << "," << format_double(design.run_value(k, j));
        }
        out << "\n";
    }
}

Design read_design_csv(std::istream& in) {
    std::string line;
    std::string header;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        header = line;
        break;
    }
    if (header.rfind("run", 0) != 0) {
        throw std::runtime_error("design csv: missing 'run,x1,...' header");
    }
    std::size_t v = 0;
    for (char c : header) v += c == ',';
    if (v == 0) throw std::runtime_error("design csv: no coordinate columns");

    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> row;
        bool first = true;
        while (std::getline(ss, field, ',')) {
            if (first) {
                first = false;
                continue;  // run index column
            }
            char* end = nullptr;
            const double value = std::strtod(field.c_str(), &end);
            if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(value)) {
                throw std::runtime_error("design csv: malformed numeric field '" + field + "'");
            }
            row.push_back(value);
        }
        if (row.size() != v) throw std::runtime_error("design csv: inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("design csv: no runs");

    const std::size_t n = rows.size();
    std::vector<double> delta(n * v);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < v; ++j) delta[j * n + k] = rows[k][j];
    }
    return Design(n, v, std::move(delta));
}

Design read_design_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("design csv: cannot open '" + path + "'");
    return read_design_csv(in);
}

} // namespace ace
