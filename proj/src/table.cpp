#include "abckit/table.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace abckit {

int ReferenceTable::param_index(const std::string& name) const {
    for (int j = 0; j < n_params(); ++j)
        if (param_names[j] == name) return j;
    throw ConfigError("unknown parameter: " + name);
}

void write_reference_table_csv(const ReferenceTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    std::string line;
    for (std::size_t j = 0; j < table.param_names.size(); ++j) {
        if (j) line += ',';
        line += "theta_" + table.param_names[j];
    }
    for (const auto& s : table.stat_names) line += ",stat_" + s;
    out << line << '\n';
    for (Eigen::Index i = 0; i < table.n(); ++i) {
        line.clear();
        for (int j = 0; j < table.n_params(); ++j) {
            if (j) line += ',';
            line += format_double(table.params(i, j));
        }
        for (int j = 0; j < table.n_stats(); ++j) {
            line += ',';
            line += format_double(table.stats(i, j));
        }
        out << line << '\n';
    }
    if (!out) throw ConfigError("failed writing " + path);
}

ReferenceTable read_reference_table_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::string header;
    if (!std::getline(in, header)) throw ConfigError("empty table file: " + path);
    if (!header.empty() && header.back() == '\r') header.pop_back();

    ReferenceTable table;
    std::vector<bool> is_param;
    {
        std::stringstream ss(header);
        std::string col;
        while (std::getline(ss, col, ',')) {
            if (col.rfind("theta_", 0) == 0) {
                table.param_names.push_back(col.substr(6));
                is_param.push_back(true);
            } else if (col.rfind("stat_", 0) == 0) {
                table.stat_names.push_back(col.substr(5));
                is_param.push_back(false);
            } else {
                throw ConfigError("table column '" + col +
                                  "' must be prefixed theta_ or stat_");
            }
        }
    }
    const std::size_t p = table.param_names.size(), d = table.stat_names.size();
    if (p == 0 || d == 0)
        throw ConfigError("table needs at least one theta_ and one stat_ column");

    std::vector<double> pbuf, sbuf;
    std::string line;
    Eigen::Index n = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t pi = 0, si = 0, pos = 0, col = 0;
        while (pos <= line.size()) {
            std::size_t next = line.find(',', pos);
            if (next == std::string::npos) next = line.size();
            const double v = std::strtod(line.c_str() + pos, nullptr);
            if (col >= is_param.size()) throw ConfigError("ragged row in " + path);
            if (is_param[col]) {
                pbuf.push_back(v);
                ++pi;
            } else {
                sbuf.push_back(v);
                ++si;
            }
            ++col;
            pos = next + 1;
            if (next == line.size()) break;
        }
        if (pi != p || si != d) throw ConfigError("ragged row in " + path);
        ++n;
    }
    table.params.resize(n, static_cast<Eigen::Index>(p));
    table.stats.resize(n, static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < p; ++j) table.params(i, j) = pbuf[i * p + j];
        for (std::size_t j = 0; j < d; ++j) table.stats(i, j) = sbuf[i * d + j];
    }
    return table;
}

}  // namespace abckit
