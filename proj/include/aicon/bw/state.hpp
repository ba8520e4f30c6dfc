#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace aicon::bw {

struct BwError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// How clear(X) normalizes the column sum: the published likelihood uses
// 1 - (1/|B|) * sum, which keeps values graded; crisp drops the 1/|B| so a
// covered block has clear exactly 0. The two are argmax-equivalent per
// gradient family (see tests).
enum class ClearNorm { paper, crisp };

// Likelihood matrix of the on-relation over a fixed block set. The table is
// implicit: a block on nothing is on the table.
struct BwState {
  std::vector<std::string> blocks;
  Eigen::MatrixXd on;  // on(x, y): likelihood that block x is on block y

  static BwState all_on_table(std::vector<std::string> block_ids);

  int count() const { return static_cast<int>(blocks.size()); }
  int index(const std::string& id) const;  // throws on unknown id

  // Crisp queries.
  int support_of(int x) const;  // block x sits on, -1 for table
  int block_on(int x) const;    // block directly on x, -1 if none
  bool is_clear(int x) const { return block_on(x) == -1; }
  bool on_table(int x) const { return support_of(x) == -1; }
  // Topmost block of the pile above x (x itself if clear).
  int topmost_above(int x) const;

  void validate_crisp() const;  // row/col sums <= 1, acyclic
};

double clear_of(const BwState& s, int x, ClearNorm norm);
double clear_of(const BwState& s, const std::string& x, ClearNorm norm);

struct Action {
  enum Kind { stack, unstack } kind;
  int x = -1;  // moved block
  int y = -1;  // destination for stack
  bool operator==(const Action& o) const = default;
  bool operator<(const Action& o) const {
    return std::tie(kind, x, y) < std::tie(o.kind, o.x, o.y);
  }
  std::string str(const BwState& s) const;
};

// Crisp executor: preconditions checked, result re-binarized. stack(X,Y)
// moves X onto Y (from table or another block); unstack(X) moves X to the
// table.
BwState apply_action(const BwState& s, const Action& a);

struct BwGoal {
  // (x, y) pairs meaning x directly on y; y == -1 means x on the table.
  std::vector<std::pair<int, int>> pairs;
  enum Mode { naive, interconnected } mode = naive;

  void validate(int block_count) const;  // consistency: unique support, acyclic
  bool pair_satisfied(const BwState& s, int i) const;
  double cost(const BwState& s) const;  // sum over pairs of (1 - o)
  bool unstacking_only() const;
  int goal_support(int x) const;  // y of pair (x,y), -2 if unconstrained
};

}  // namespace aicon::bw
