#include "aicon/bw/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "aicon/util/csv.hpp"

namespace aicon::bw {

namespace {

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

}  // namespace

Instance parse_instance(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int declared = -1;
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> towers;
  std::vector<std::pair<std::string, std::string>> goal_lines;
  bool in_goal = false;

  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto toks = tokens(line);
    if (toks.empty()) continue;

    if (toks[0] == "blocks:") {
      if (toks.size() != 2) throw BwError("malformed blocks line");
      declared = std::stoi(toks[1]);
      continue;
    }
    if (toks[0] == "goal:") {
      in_goal = true;
      continue;
    }
    if (in_goal) {
      if (toks[0] != "on" || toks.size() != 3)
        throw BwError("malformed goal line: " + line);
      goal_lines.emplace_back(toks[1], toks[2]);
      continue;
    }
    for (const auto& id : toks) {
      for (const auto& seen : ids)
        if (seen == id) throw BwError("block listed twice: " + id);
      ids.push_back(id);
    }
    towers.push_back(toks);
  }

  if (declared < 0) throw BwError("missing blocks: line");
  if (static_cast<int>(ids.size()) != declared)
    throw BwError("blocks: count does not match listed blocks");

  Instance inst;
  inst.initial = BwState::all_on_table(ids);
  for (const auto& tower : towers)
    for (size_t k = 1; k < tower.size(); ++k)
      inst.initial.on(inst.initial.index(tower[k]),
                      inst.initial.index(tower[k - 1])) = 1.0;
  inst.initial.validate_crisp();

  for (const auto& [x, y] : goal_lines)
    inst.goal.pairs.emplace_back(inst.initial.index(x),
                                 y == "table" ? -1 : inst.initial.index(y));
  inst.goal.validate(inst.initial.count());
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BwError("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string format_instance(const Instance& inst) {
  const auto& s = inst.initial;
  std::ostringstream out;
  out << "blocks: " << s.count() << "\n";
  for (int b = 0; b < s.count(); ++b) {
    if (!s.on_table(b)) continue;
    out << s.blocks[b];
    for (int t = s.block_on(b); t != -1; t = s.block_on(t))
      out << " " << s.blocks[t];
    out << "\n";
  }
  out << "goal:\n";
  for (const auto& [x, y] : inst.goal.pairs)
    out << "on " << s.blocks[x] << " " << (y == -1 ? "table" : s.blocks[y])
        << "\n";
  return out.str();
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw BwError("cannot write instance file: " + path);
  out << format_instance(inst);
}

std::string solution_csv(const BwState& initial, const BwGoal& goal,
                         const Solution& sol) {
  std::ostringstream out;
  out << "step,action,args,goal_cost\n";
  out << "0,start,," << fmt_num(goal.cost(initial)) << "\n";
  for (size_t i = 0; i < sol.actions.size(); ++i) {
    const Action& a = sol.actions[i];
    out << (i + 1) << ","
        << (a.kind == Action::stack ? "stack" : "unstack") << ","
        << initial.blocks[a.x]
        << (a.kind == Action::stack ? " " + initial.blocks[a.y] : "") << ","
        << fmt_num(sol.costs[i]) << "\n";
  }
  return out.str();
}

}  // namespace aicon::bw
