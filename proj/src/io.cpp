#include "cip/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace cip {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << std::setprecision(17);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

std::vector<double> parse_row(const std::string& line, const std::string& path) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            row.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": cannot parse value '" + cell + "'");
        }
    }
    return row;
}

}  // namespace

void write_gridfn1d(const std::string& path, const GridFn1D& f) {
    auto out = open_out(path);
    out << "# " << f.grid.start << "," << f.grid.step << "," << f.grid.count << "\n";
    for (double v : f.values) out << v << "\n";
}

GridFn1D read_gridfn1d(const std::string& path) {
    Table t = read_table(path);
    if (t.comments.empty()) throw std::runtime_error(path + ": missing grid header");
    auto hdr = parse_row(t.comments.front(), path);
    if (hdr.size() != 3) throw std::runtime_error(path + ": bad 1D grid header");
    UniformGrid1D g(hdr[0], hdr[1], static_cast<int>(hdr[2]));
    std::vector<double> v;
    for (const auto& row : t.cols)
        for (double x : row) v.push_back(x);
    // read_table stores column-wise; 1D files have one value per line.
    if (t.cols.size() != 1 || static_cast<int>(t.cols[0].size()) != g.count)
        throw std::runtime_error(path + ": value count does not match grid header");
    return GridFn1D(g, t.cols[0]);
}

void write_gridfn2d(const std::string& path, const GridFn2D& f) {
    auto out = open_out(path);
    const auto& g = f.grid();
    out << "# " << g.x.start << "," << g.x.step << "," << g.x.count << "," << g.t.start << ","
        << g.t.step << "," << g.t.count << "\n";
    for (int i = 0; i < f.nx(); ++i) {
        for (int j = 0; j < f.nt(); ++j) out << (j ? "," : "") << f.at(i, j);
        out << "\n";
    }
}

GridFn2D read_gridfn2d(const std::string& path) {
    auto in = open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#')
        throw std::runtime_error(path + ": missing grid header");
    auto hdr = parse_row(line.substr(1), path);
    if (hdr.size() != 6) throw std::runtime_error(path + ": bad 2D grid header");
    UniformGrid2D g{UniformGrid1D(hdr[0], hdr[1], static_cast<int>(hdr[2])),
                    UniformGrid1D(hdr[3], hdr[4], static_cast<int>(hdr[5]))};
    GridFn2D f(g);
    for (int i = 0; i < g.nx(); ++i) {
        if (!std::getline(in, line)) throw std::runtime_error(path + ": truncated 2D field");
        auto row = parse_row(line, path);
        if (static_cast<int>(row.size()) != g.nt())
            throw std::runtime_error(path + ": row width does not match grid header");
        for (int j = 0; j < g.nt(); ++j) f.at(i, j) = row[j];
    }
    return f;
}

void write_columns(const std::string& path, const std::vector<std::string>& names,
                   const std::vector<const std::vector<double>*>& cols) {
    if (names.size() != cols.size())
        throw std::invalid_argument("write_columns: names/columns mismatch");
    auto out = open_out(path);
    out << "# ";
    for (size_t k = 0; k < names.size(); ++k) out << (k ? "," : "") << names[k];
    out << "\n";
    const size_t n = cols.empty() ? 0 : cols[0]->size();
    for (const auto* c : cols)
        if (c->size() != n) throw std::invalid_argument("write_columns: ragged columns");
    for (size_t r = 0; r < n; ++r) {
        for (size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << (*cols[k])[r];
        out << "\n";
    }
}

Table read_table(const std::string& path) {
    auto in = open_in(path);
    Table t;
    std::string line;
    bool header_done = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (!header_done) t.comments.push_back(line.substr(1));
            continue;
        }
        header_done = true;
        auto row = parse_row(line, path);
        if (t.cols.empty()) t.cols.resize(row.size());
        if (row.size() != t.cols.size())
            throw std::runtime_error(path + ": inconsistent column count");
        for (size_t k = 0; k < row.size(); ++k) t.cols[k].push_back(row[k]);
    }
    return t;
}

}  // namespace cip
