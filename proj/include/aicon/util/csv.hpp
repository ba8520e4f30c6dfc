#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace aicon {

// Fixed-format numeric printing so repeated runs with identical seeds
// produce byte-identical files.
std::string fmt_num(double v);
std::string fmt_num(int v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();

  void row(const std::vector<std::string>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const;  // -1 if absent
  static CsvTable read(const std::string& path);
};

}  // namespace aicon
