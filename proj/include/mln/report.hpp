#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace mln {

// RFC-4180 CSV writer: fields quoted when they contain commas, quotes or
// newlines; CRLF record separators.
class CsvWriter {
  public:
    explicit CsvWriter(std::string path) : path_(std::move(path)) {}
    void header(const std::vector<std::string>& cols);
    void row(const std::vector<std::string>& cells);
    void write() const;

    static std::string num(double v);

  private:
    std::string path_;
    std::vector<std::vector<std::string>> rows_;
};

void write_json(const std::string& path, const nlohmann::json& j);

std::string git_describe();

}  // namespace mln
