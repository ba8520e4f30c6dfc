#include "aicon/harness/report.hpp"

#include <map>
#include <sstream>

#include "aicon/util/csv.hpp"

namespace aicon::harness {

namespace {

struct DrawerAgg {
  int n = 0, successes = 0;
  double ticks = 0.0, jerk = 0.0;
};

struct BwAgg {
  int n = 0, solved = 0, max_steps = 0;
  double ratio_sum = 0.0;
  int ratio_n = 0;
};

const char* kBwHeader = "instance_id,variant,seed,solved,steps,bound_value,bound_kind";
const char* kDrawerHeader =
    "scenario,mode,trial,seed,success,ticks,final_q_error,jerk,status";

std::string join(const std::vector<std::string>& cells) {
  std::string s;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  return s;
}

}  // namespace

SummaryReport aggregate_report(const std::vector<std::string>& files) {
  std::map<std::pair<std::string, std::string>, DrawerAgg> drawer;
  std::map<std::string, BwAgg> bw;

  for (const auto& file : files) {
    CsvTable t;
    try {
      t = CsvTable::read(file);
    } catch (const std::exception& e) {
      throw ReportError("cannot read " + file + ": " + e.what());
    }
    std::string header = join(t.header);
    if (header == kBwHeader) {
      for (const auto& r : t.rows) {
        BwAgg& a = bw[r[1]];
        ++a.n;
        bool solved = r[3] == "1" || r[3] == "true";
        if (solved) ++a.solved;
        int steps = std::stoi(r[4]);
        a.max_steps = std::max(a.max_steps, steps);
        if (r[6] == "exact" && solved) {
          double bound = std::stod(r[5]);
          a.ratio_sum += bound > 0 ? steps / bound : 1.0;
          ++a.ratio_n;
        }
      }
    } else if (header == kDrawerHeader) {
      for (const auto& r : t.rows) {
        DrawerAgg& a = drawer[{r[0], r[1]}];
        ++a.n;
        if (r[4] == "1" || r[4] == "true") ++a.successes;
        a.ticks += std::stod(r[5]);
        a.jerk += std::stod(r[7]);
      }
    } else {
      throw ReportError("unrecognized result schema in " + file);
    }
  }

  SummaryReport rep;
  rep.csv_header =
      "kind,group,condition,n,success_rate,mean_ticks,mean_jerk,"
      "mean_ratio_exact,max_steps";
  std::ostringstream human;
  for (const auto& [variant, a] : bw) {
    double rate = a.n ? static_cast<double>(a.solved) / a.n : 0.0;
    double ratio = a.ratio_n ? a.ratio_sum / a.ratio_n : 0.0;
    std::ostringstream row;
    row << "bw," << variant << ",," << a.n << ',' << fmt_num(rate) << ",,,"
        << fmt_num(ratio) << ',' << a.max_steps;
    rep.csv_rows.push_back(row.str());
    human << "bw " << variant << ": " << a.solved << "/" << a.n
          << " solved, mean exact-subset ratio " << fmt_num(ratio)
          << ", max steps " << a.max_steps << "\n";
  }
  for (const auto& [key, a] : drawer) {
    double rate = a.n ? static_cast<double>(a.successes) / a.n : 0.0;
    double mticks = a.n ? a.ticks / a.n : 0.0;
    double mjerk = a.n ? a.jerk / a.n : 0.0;
    std::ostringstream row;
    row << "drawer," << key.first << ',' << key.second << ',' << a.n << ','
        << fmt_num(rate) << ',' << fmt_num(mticks) << ',' << fmt_num(mjerk)
        << ",,";
    rep.csv_rows.push_back(row.str());
    human << "drawer " << key.first << " [" << key.second
          << "]: " << a.successes << "/" << a.n << " success, mean ticks "
          << fmt_num(mticks) << ", mean jerk " << fmt_num(mjerk) << "\n";
  }
  rep.human = human.str();
  return rep;
}

}  // namespace aicon::harness
