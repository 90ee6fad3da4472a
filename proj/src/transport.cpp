#include "wbary/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "wbary/detail/compensated_sum.hpp"

namespace wbary {
namespace {

constexpr double kMarginalTolerance = 1e-12;

void validate(const TransportInstance& inst) {
  const Matrix& c = inst.cost;
  if (c.rows() != inst.p.size() || c.cols() != inst.q.size()) {
    throw InvalidArgument("transport: cost is " + std::to_string(c.rows()) + "x" +
                          std::to_string(c.cols()) + " but marginals have lengths " +
                          std::to_string(inst.p.size()) + " and " +
                          std::to_string(inst.q.size()));
  }
  if (c.size() == 0) throw InvalidArgument("transport: empty instance");
  if (!c.allFinite() || (c.array() < 0.0).any()) {
    throw InvalidArgument("transport: cost must be finite and non-negative");
  }
  if (!inst.p.allFinite() || !inst.q.allFinite() || (inst.p.array() < 0.0).any() ||
      (inst.q.array() < 0.0).any()) {
    throw InvalidArgument("transport: marginals must be finite and non-negative");
  }
  const double sp = inst.p.sum();
  const double sq = inst.q.sum();
  if (std::abs(sp - 1.0) > kMarginalTolerance || std::abs(sq - 1.0) > kMarginalTolerance) {
    throw InvalidArgument("transport: marginal mismatch (row mass " + format_double(sp) +
                          ", column mass " + format_double(sq) + ", both must be 1)");
  }
}

std::vector<Index> positive_indices(const Vector& v) {
  std::vector<Index> idx;
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0) idx.push_back(i);
  }
  return idx;
}

struct Arc {
  Index row;
  Index col;
  double flow;
};

// Spanning-tree basis of the reduced (all marginals positive) problem. Row
// nodes are 0..m-1, column nodes m..m+n-1.
class TransportationSimplex {
 public:
  TransportationSimplex(const Matrix& cost, const Vector& supply, const Vector& demand)
      : c_(cost), m_(cost.rows()), n_(cost.cols()), basis_index_(m_, n_) {
    basis_index_.setConstant(-1);
    north_west_corner(supply, demand);
    scale_ = std::max(1.0, c_.maxCoeff());
  }

  void run() {
    const long max_pivots = 100L * (m_ + n_) * (m_ + n_) + 10000L;
    long degenerate_run = 0;
    const long bland_threshold = m_ + n_;
    const double tol = 1e-12 * scale_;
    while (true) {
      compute_potentials();
      const bool bland = degenerate_run > bland_threshold;
      Index er = -1, ec = -1;
      double best = -tol;
      for (Index i = 0; i < m_ && !(bland && er >= 0); ++i) {
        for (Index j = 0; j < n_; ++j) {
          if (basis_index_(i, j) >= 0) continue;
          const double reduced = c_(i, j) - u_[i] - v_[j];
          if (reduced < best) {
            best = reduced;
            er = i;
            ec = j;
            if (bland) break;
          }
        }
      }
      if (er < 0) return;
      if (++pivots_ > max_pivots) {
        throw NumericalError("transport: network simplex exceeded its pivot limit");
      }
      const double theta = pivot(er, ec, bland);
      degenerate_run = theta > 0.0 ? 0 : degenerate_run + 1;
    }
  }

  Matrix plan() const {
    Matrix z = Matrix::Zero(m_, n_);
    for (const Arc& a : arcs_) z(a.row, a.col) = a.flow;
    return z;
  }

  const Vector& u() const { return u_; }
  const Vector& v() const { return v_; }
  long pivots() const { return pivots_; }

 private:
  void add_arc(Index i, Index j, double flow) {
    basis_index_(i, j) = static_cast<Index>(arcs_.size());
    arcs_.push_back({i, j, flow});
  }

  // Staircase path from (0,0) to (m-1,n-1): exactly m+n-1 cells, a spanning tree.
  void north_west_corner(const Vector& supply, const Vector& demand) {
    std::vector<double> s(supply.data(), supply.data() + m_);
    std::vector<double> d(demand.data(), demand.data() + n_);
    Index i = 0, j = 0;
    while (true) {
      const double x = std::min(s[i], d[j]);
      add_arc(i, j, std::max(x, 0.0));
      s[i] -= x;
      d[j] -= x;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (i == m_ - 1) {
        ++j;
      } else if (j == n_ - 1) {
        ++i;
      } else if (s[i] <= d[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  void build_adjacency() {
    adjacency_.assign(m_ + n_, {});
    for (std::size_t k = 0; k < arcs_.size(); ++k) {
      adjacency_[arcs_[k].row].push_back(k);
      adjacency_[m_ + arcs_[k].col].push_back(k);
    }
  }

  void compute_potentials() {
    build_adjacency();
    u_.setZero(m_);
    v_.setZero(n_);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<Index> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const Index node = stack.back();
      stack.pop_back();
      for (std::size_t k : adjacency_[node]) {
        const Arc& a = arcs_[k];
        const Index other = node < m_ ? m_ + a.col : a.row;
        if (seen[other]) continue;
        seen[other] = 1;
        if (node < m_) {
          v_[a.col] = c_(a.row, a.col) - u_[a.row];
        } else {
          u_[a.row] = c_(a.row, a.col) - v_[a.col];
        }
        stack.push_back(other);
      }
    }
  }

  // Tree path from column node of `ec` to row node `er`, as arc indices ordered
  // starting at the column end.
  std::vector<std::size_t> tree_path(Index er, Index ec) const {
    const Index start = m_ + ec;
    const Index goal = er;
    std::vector<std::ptrdiff_t> parent_arc(m_ + n_, -1);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<Index> queue{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Index node = queue[head];
      if (node == goal) break;
      for (std::size_t k : adjacency_[node]) {
        const Arc& a = arcs_[k];
        const Index other = node < m_ ? m_ + a.col : a.row;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_arc[other] = static_cast<std::ptrdiff_t>(k);
        queue.push_back(other);
      }
    }
    std::vector<std::size_t> path;
    Index node = goal;
    while (node != start) {
      const auto k = static_cast<std::size_t>(parent_arc[node]);
      path.push_back(k);
      const Arc& a = arcs_[k];
      node = node < m_ ? m_ + a.col : a.row;
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  double pivot(Index er, Index ec, bool bland) {
    const std::vector<std::size_t> path = tree_path(er, ec);
    // Arcs at even positions of the path lose flow, odd positions gain.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = path.front();
    Index leave_key = std::numeric_limits<Index>::max();
    for (std::size_t pos = 0; pos < path.size(); pos += 2) {
      const Arc& a = arcs_[path[pos]];
      const Index key = a.row * n_ + a.col;
      if (a.flow < theta || (a.flow == theta && bland && key < leave_key)) {
        theta = a.flow;
        leave = path[pos];
        leave_key = key;
      }
    }
    for (std::size_t pos = 0; pos < path.size(); ++pos) {
      Arc& a = arcs_[path[pos]];
      a.flow = pos % 2 == 0 ? a.flow - theta : a.flow + theta;
    }
    arcs_[leave].flow = 0.0;

    // The entering arc takes the leaving arc's slot.
    const Arc old = arcs_[leave];
    basis_index_(old.row, old.col) = -1;
    arcs_[leave] = {er, ec, theta};
    basis_index_(er, ec) = static_cast<Index>(leave);
    return theta;
  }

  const Matrix& c_;
  Index m_;
  Index n_;
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> basis_index_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adjacency_;
  Vector u_;
  Vector v_;
  double scale_ = 1.0;
  long pivots_ = 0;
};

double plan_value(const Matrix& plan, const Matrix& cost) {
  detail::CompensatedSum sum;
  for (Index j = 0; j < plan.cols(); ++j) {
    for (Index i = 0; i < plan.rows(); ++i) {
      if (plan(i, j) != 0.0) sum.add(plan(i, j) * cost(i, j));
    }
  }
  return sum.value();
}

// Potentials for eliminated rows/columns, chosen as large as dual
// feasibility allows: columns first against the kept rows, then rows against
// every column.
void extend_potentials(const Matrix& cost, const std::vector<Index>& rows, Vector& u, Vector& v,
                       const std::vector<char>& row_kept, const std::vector<char>& col_kept) {
  for (Index j = 0; j < cost.cols(); ++j) {
    if (col_kept[j]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (Index i : rows) best = std::min(best, cost(i, j) - u[i]);
    v[j] = std::isfinite(best) ? best : 0.0;
  }
  for (Index i = 0; i < cost.rows(); ++i) {
    if (row_kept[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < cost.cols(); ++j) best = std::min(best, cost(i, j) - v[j]);
    u[i] = best;
  }
}

}  // namespace

TransportSolution solve_transport(const TransportInstance& inst) {
  validate(inst);
  const std::vector<Index> rows = positive_indices(inst.p);
  const std::vector<Index> cols = positive_indices(inst.q);

  Matrix reduced(rows.size(), cols.size());
  Vector supply(rows.size()), demand(cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a) supply[a] = inst.p[rows[a]];
  for (std::size_t b = 0; b < cols.size(); ++b) demand[b] = inst.q[cols[b]];
  for (std::size_t b = 0; b < cols.size(); ++b) {
    for (std::size_t a = 0; a < rows.size(); ++a) reduced(a, b) = inst.cost(rows[a], cols[b]);
  }

  TransportationSimplex simplex(reduced, supply, demand);
  simplex.run();

  TransportSolution sol;
  sol.plan = Matrix::Zero(inst.cost.rows(), inst.cost.cols());
  sol.u = Vector::Zero(inst.cost.rows());
  sol.v = Vector::Zero(inst.cost.cols());
  const Matrix sub = simplex.plan();
  for (std::size_t b = 0; b < cols.size(); ++b) {
    sol.v[cols[b]] = simplex.v()[b];
    for (std::size_t a = 0; a < rows.size(); ++a) sol.plan(rows[a], cols[b]) = sub(a, b);
  }
  for (std::size_t a = 0; a < rows.size(); ++a) sol.u[rows[a]] = simplex.u()[a];

  std::vector<char> row_kept(inst.cost.rows(), 0), col_kept(inst.cost.cols(), 0);
  for (Index i : rows) row_kept[i] = 1;
  for (Index j : cols) col_kept[j] = 1;
  extend_potentials(inst.cost, rows, sol.u, sol.v, row_kept, col_kept);

  sol.value = plan_value(sol.plan, inst.cost);
  sol.pivots = simplex.pivots();
  return sol;
}

TransportSolution brute_force_transport(const TransportInstance& inst) {
  validate(inst);
  const Index m = inst.cost.rows();
  const Index n = inst.cost.cols();
  if (m + n > 8) {
    throw InvalidArgument("brute_force_transport: instance too large (m + n = " +
                          std::to_string(m + n) + " > 8)");
  }
  const Index cells = m * n;
  const Index basis_size = m + n - 1;

  TransportSolution best;
  best.value = std::numeric_limits<double>::infinity();

  // Lexicographic walk over all (basis_size)-subsets of the cells.
  std::vector<Index> pick(basis_size);
  std::iota(pick.begin(), pick.end(), Index{0});
  while (true) {
    // Spanning tree test by union-find (m+n-1 edges and no cycle).
    std::vector<Index> parent(m + n);
    std::iota(parent.begin(), parent.end(), Index{0});
    auto find = [&](Index a) {
      while (parent[a] != a) a = parent[a] = parent[parent[a]];
      return a;
    };
    bool tree = true;
    for (Index cell : pick) {
      const Index r = find(cell / n), c = find(m + cell % n);
      if (r == c) {
        tree = false;
        break;
      }
      parent[r] = c;
    }

    if (tree) {
      // Leaf elimination fixes the flows; the same pass yields potentials.
      std::vector<double> residual(m + n);
      for (Index i = 0; i < m; ++i) residual[i] = inst.p[i];
      for (Index j = 0; j < n; ++j) residual[m + j] = inst.q[j];
      std::vector<char> used(basis_size, 0);
      std::vector<Index> degree(m + n, 0);
      for (Index cell : pick) {
        ++degree[cell / n];
        ++degree[m + cell % n];
      }
      Matrix plan = Matrix::Zero(m, n);
      bool feasible = true;
      for (Index step = 0; step < basis_size; ++step) {
        Index chosen = -1, leaf = -1;
        for (Index k = 0; k < basis_size && chosen < 0; ++k) {
          if (used[k]) continue;
          const Index r = pick[k] / n, c = m + pick[k] % n;
          if (degree[r] == 1) {
            chosen = k;
            leaf = r;
          } else if (degree[c] == 1) {
            chosen = k;
            leaf = c;
          }
        }
        const Index r = pick[chosen] / n, c = m + pick[chosen] % n;
        const Index other = leaf == r ? c : r;
        const double flow = residual[leaf];
        if (flow < -1e-12) feasible = false;
        plan(r, c - m) = std::max(flow, 0.0);
        residual[leaf] = 0.0;
        residual[other] -= flow;
        used[chosen] = 1;
        --degree[r];
        --degree[c];
      }
      if (feasible) {
        const double value = plan_value(plan, inst.cost);
        if (value < best.value) {
          best.value = value;
          best.plan = plan;
          // Potentials: u_0 = 0 and u_i + v_j = C_ij on the tree arcs.
          Vector u = Vector::Zero(m), v = Vector::Zero(n);
          std::vector<char> known(m + n, 0);
          known[0] = 1;
          for (Index sweep = 0; sweep < m + n; ++sweep) {
            for (Index cell : pick) {
              const Index r = cell / n, c = cell % n;
              if (known[r] && !known[m + c]) {
                v[c] = inst.cost(r, c) - u[r];
                known[m + c] = 1;
              } else if (!known[r] && known[m + c]) {
                u[r] = inst.cost(r, c) - v[c];
                known[r] = 1;
              }
            }
          }
          best.u = u;
          best.v = v;
        }
      }
    }

    // Next combination.
    Index k = basis_size - 1;
    while (k >= 0 && pick[k] == cells - basis_size + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (Index l = k + 1; l < basis_size; ++l) pick[l] = pick[l - 1] + 1;
  }
  if (!std::isfinite(best.value)) throw NumericalError("brute_force_transport: no feasible basis");
  return best;
}

double w2_squared(const Vector& weights, const Matrix& support, const DiscreteDistribution& q) {
  return solve_transport({cost_matrix(support, q), weights, q.weights()}).value;
}

double w2_squared(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  if (p.dim() != q.dim()) {
    throw InvalidArgument("w2: dimension mismatch " + std::to_string(p.dim()) + " vs " +
                          std::to_string(q.dim()));
  }
  return w2_squared(p.weights(), p.support(), q);
}

double w2_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  return std::sqrt(std::max(0.0, w2_squared(p, q)));
}

}  // namespace wbary
