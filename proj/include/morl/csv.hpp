#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "morl/common.hpp"

namespace morl {

std::vector<std::string> split_csv_line(const std::string& line);

// Whole-file read including the header row.
std::vector<std::vector<std::string>> read_csv(const std::string& path);

// Row-oriented writer; numbers rendered with enough digits to round-trip.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& header);
    void row(const std::vector<std::string>& fields);
    static std::string num(double v);

  private:
    std::ofstream out_;
};

}  // namespace morl
