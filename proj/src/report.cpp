#include "mln/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#ifndef MLN_GIT_DESCRIBE
#define MLN_GIT_DESCRIBE "unknown"
#endif

namespace mln {

void CsvWriter::header(const std::vector<std::string>& cols) { rows_.insert(rows_.begin(), cols); }

void CsvWriter::row(const std::vector<std::string>& cells) { rows_.push_back(cells); }

std::string CsvWriter::num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {
std::string escape(const std::string& s) {
    bool need = s.find_first_of(",\"\r\n") != std::string::npos;
    if (!need) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}
}  // namespace

void CsvWriter::write() const {
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path_);
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) f << ',';
            f << escape(r[i]);
        }
        f << "\r\n";
    }
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << "\n";
}

std::string git_describe() { return MLN_GIT_DESCRIBE; }

}  // namespace mln
