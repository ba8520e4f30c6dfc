#include "aicon/bw/state.hpp"

#include <set>

namespace aicon::bw {

BwState BwState::all_on_table(std::vector<std::string> block_ids) {
  BwState s;
  s.blocks = std::move(block_ids);
  s.on = Eigen::MatrixXd::Zero(s.count(), s.count());
  return s;
}

int BwState::index(const std::string& id) const {
  for (int i = 0; i < count(); ++i)
    if (blocks[i] == id) return i;
  throw BwError("unknown block id: " + id);
}

int BwState::support_of(int x) const {
  for (int y = 0; y < count(); ++y)
    if (on(x, y) > 0.5) return y;
  return -1;
}

int BwState::block_on(int x) const {
  for (int z = 0; z < count(); ++z)
    if (on(z, x) > 0.5) return z;
  return -1;
}

int BwState::topmost_above(int x) const {
  int t = x;
  int guard = count();
  while (guard-- > 0) {
    int above = block_on(t);
    if (above == -1) return t;
    t = above;
  }
  throw BwError("cycle in on-relation above block " + blocks[x]);
}

void BwState::validate_crisp() const {
  for (int i = 0; i < count(); ++i) {
    double row = 0.0, col = 0.0;
    for (int j = 0; j < count(); ++j) {
      if (on(i, j) != 0.0 && on(i, j) != 1.0)
        throw BwError("non-crisp entry in on-matrix");
      row += on(i, j);
      col += on(j, i);
    }
    if (row > 1.0) throw BwError("block on more than one support: " + blocks[i]);
    if (col > 1.0) throw BwError("more than one block on: " + blocks[i]);
  }
  for (int i = 0; i < count(); ++i) topmost_above(i);  // throws on cycles
}

double clear_of(const BwState& s, int x, ClearNorm norm) {
  if (x < 0 || x >= s.count()) throw BwError("block index out of range");
  double sum = s.on.col(x).sum();
  double scale = norm == ClearNorm::paper ? 1.0 / s.count() : 1.0;
  return 1.0 - scale * sum;
}

double clear_of(const BwState& s, const std::string& x, ClearNorm norm) {
  return clear_of(s, s.index(x), norm);
}

std::string Action::str(const BwState& s) const {
  if (kind == stack)
    return "stack(" + s.blocks[x] + "," + s.blocks[y] + ")";
  return "unstack(" + s.blocks[x] + ")";
}

BwState apply_action(const BwState& s, const Action& a) {
  BwState next = s;
  if (a.kind == Action::stack) {
    if (a.x == a.y) throw BwError("cannot stack a block on itself");
    if (!s.is_clear(a.x))
      throw BwError("stack precondition: " + s.blocks[a.x] + " is not clear");
    if (!s.is_clear(a.y))
      throw BwError("stack precondition: " + s.blocks[a.y] + " is not clear");
    next.on.row(a.x).setZero();  // moving X releases its previous support
    next.on(a.x, a.y) = 1.0;
  } else {
    if (!s.is_clear(a.x))
      throw BwError("unstack precondition: " + s.blocks[a.x] + " is not clear");
    if (s.on_table(a.x))
      throw BwError("unstack precondition: " + s.blocks[a.x] +
                    " is already on the table");
    next.on.row(a.x).setZero();
  }
  return next;
}

void BwGoal::validate(int block_count) const {
  std::set<int> placed, used;
  std::vector<int> support(block_count, -2);
  for (const auto& [x, y] : pairs) {
    if (x < 0 || x >= block_count || y < -1 || y >= block_count || x == y)
      throw BwError("goal pair out of range");
    if (placed.count(x))
      throw BwError("goal requires a block on two distinct supports");
    if (y >= 0 && used.count(y))
      throw BwError("goal requires two blocks on one support");
    placed.insert(x);
    if (y >= 0) used.insert(y);
    support[x] = y;
  }
  // No cycles in the required support chain.
  for (const auto& [x, y] : pairs) {
    int at = y, guard = block_count;
    while (at >= 0 && guard-- > 0) {
      if (at == x) throw BwError("goal contains a support cycle");
      at = support[at] >= 0 ? support[at] : -1;
    }
  }
}

int BwGoal::goal_support(int x) const {
  for (const auto& [a, b] : pairs)
    if (a == x) return b;
  return -2;
}

bool BwGoal::pair_satisfied(const BwState& s, int i) const {
  const auto& [x, y] = pairs[i];
  if (y == -1) return s.on_table(x);
  return s.on(x, y) > 0.5;
}

double BwGoal::cost(const BwState& s) const {
  double c = 0.0;
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    if (y == -1)
      c += s.on.row(x).sum();  // mass of being on any block
    else
      c += 1.0 - s.on(x, y);
  }
  return c;
}

bool BwGoal::unstacking_only() const {
  for (const auto& [x, y] : pairs)
    if (y != -1) return false;
  return true;
}

}  // namespace aicon::bw
