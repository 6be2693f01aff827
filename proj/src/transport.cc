/*
 * Copyright 2026 The predmat Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "predmat/transport.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "predmat/error.h"

namespace predmat::numerics {

Histogram::Histogram(std::vector<double> mass) : mass_(std::move(mass)) {
  if (mass_.empty()) throw DataError("histogram: empty");
  double sum = 0.0;
  for (double v : mass_) {
    if (!std::isfinite(v) || v < 0.0) throw DataError("histogram: negative or non-finite mass");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw DataError("histogram: masses sum to " + std::to_string(sum) + ", expected 1");
}

Histogram Histogram::Uniform(std::size_t k) {
  return Histogram(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Histogram Histogram::FromWeights(std::span<const double> weights) {
  double sum = 0.0;
  for (double v : weights) {
    if (!std::isfinite(v) || v < 0.0) throw DataError("histogram: negative or non-finite weight");
    sum += v;
  }
  if (sum <= 0.0) throw DataError("histogram: weights sum to zero");
  std::vector<double> mass(weights.begin(), weights.end());
  for (double& v : mass) v /= sum;
  return Histogram(std::move(mass));
}

Histogram Histogram::FromCounts(std::span<const std::size_t> counts) {
  std::vector<double> w(counts.begin(), counts.end());
  return FromWeights(w);
}

CostMatrix::CostMatrix(Matrix cost) : cost_(std::move(cost)) {
  if (cost_.rows() == 0 || cost_.cols() == 0) throw DataError("cost matrix: empty");
  for (double v : cost_.values())
    if (!std::isfinite(v) || v < 0.0) throw DataError("cost matrix: negative or non-finite cost");
}

CostMatrix CostMatrix::AbsoluteIndexDistance(std::size_t k) {
  Matrix c(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      c(i, j) = std::abs(static_cast<double>(i) - static_cast<double>(j));
  return CostMatrix(std::move(c));
}

double Emd1d(const Histogram& target, const Histogram& source) {
  if (target.size() != source.size())
    throw DataError("emd_1d: histogram lengths differ (" + std::to_string(target.size()) +
                    " vs " + std::to_string(source.size()) + ")");
  double cdf_t = 0.0, cdf_s = 0.0, total = 0.0;
  for (std::size_t c = 0; c + 1 < target.size(); ++c) {
    cdf_t += target[c];
    cdf_s += source[c];
    total += std::abs(cdf_t - cdf_s);
  }
  return total;
}

namespace {

void CheckMasses(std::span<const double> masses, const char* what) {
  for (double v : masses)
    if (!std::isfinite(v) || v < 0.0)
      throw DataError(std::string("optimal transport: ") + what +
                      " has negative or non-finite mass");
}

struct BasicCell {
  int row;
  int col;
  double flow;
};

// Spanning tree over row nodes [0, n) and column nodes [n, n + m) formed by
// the basic cells of a transportation-simplex iterate.
class TransportTree {
 public:
  TransportTree(int n, int m) : n_(n), adjacency_(n + m) {}

  void Add(int cell, const BasicCell& c) {
    adjacency_[c.row].push_back(cell);
    adjacency_[n_ + c.col].push_back(cell);
  }
  void Remove(int cell, const BasicCell& c) {
    Erase(adjacency_[c.row], cell);
    Erase(adjacency_[n_ + c.col], cell);
  }

  // Roots the tree at row 0, fills potentials with u_r + v_c = cost for
  // every basic cell, and records parent cells and depths.
  void Orient(const std::vector<BasicCell>& cells, const CostMatrix& cost,
              std::vector<double>& potential) {
    const int nodes = static_cast<int>(adjacency_.size());
    parent_cell_.assign(nodes, -1);
    depth_.assign(nodes, -1);
    potential.assign(nodes, 0.0);
    std::vector<int> stack = {0};
    depth_[0] = 0;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (int cell : adjacency_[node]) {
        const BasicCell& c = cells[cell];
        const int other = node < n_ ? n_ + c.col : c.row;
        if (depth_[other] >= 0) continue;
        depth_[other] = depth_[node] + 1;
        parent_cell_[other] = cell;
        potential[other] = cost(c.row, c.col) - potential[node];
        stack.push_back(other);
      }
    }
    for (int d : depth_)
      if (d < 0) throw NumericalError("transportation simplex: basis is not a spanning tree");
  }

  // Tree cells on the path from column node `col` to row node `row`, in
  // path order.
  std::vector<int> Path(const std::vector<BasicCell>& cells, int row, int col) const {
    std::vector<int> from_col, from_row;
    int a = n_ + col;
    int b = row;
    auto step = [&](int node) {
      const BasicCell& c = cells[parent_cell_[node]];
      return node < n_ ? n_ + c.col : c.row;
    };
    while (depth_[a] > depth_[b]) {
      from_col.push_back(parent_cell_[a]);
      a = step(a);
    }
    while (depth_[b] > depth_[a]) {
      from_row.push_back(parent_cell_[b]);
      b = step(b);
    }
    while (a != b) {
      from_col.push_back(parent_cell_[a]);
      a = step(a);
      from_row.push_back(parent_cell_[b]);
      b = step(b);
    }
    from_col.insert(from_col.end(), from_row.rbegin(), from_row.rend());
    return from_col;
  }

 private:
  static void Erase(std::vector<int>& v, int x) {
    v.erase(std::find(v.begin(), v.end(), x));
  }

  int n_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> parent_cell_;
  std::vector<int> depth_;
};

}  // namespace

TransportPlan OtExact(const CostMatrix& cost, std::span<const double> supply,
                      std::span<const double> demand) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  if (supply.size() != cost.rows() || demand.size() != cost.cols())
    throw DataError("optimal transport: marginal sizes do not match the cost matrix");
  CheckMasses(supply, "supply");
  CheckMasses(demand, "demand");
  const double supply_total = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double demand_total = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(supply_total - demand_total) > 1e-9 * std::max(1.0, supply_total))
    throw DataError("optimal transport: infeasible marginals (supply total " +
                    std::to_string(supply_total) + ", demand total " +
                    std::to_string(demand_total) + ")");

  std::vector<double> s(supply.begin(), supply.end());
  std::vector<double> d(demand.begin(), demand.end());
  if (demand_total > 0.0)
    for (double& v : d) v *= supply_total / demand_total;

  // Northwest-corner start: n + m − 1 cells forming a staircase tree.
  std::vector<BasicCell> cells;
  cells.reserve(n + m - 1);
  for (int i = 0, j = 0;;) {
    const double x = std::min(s[i], d[j]);
    cells.push_back({i, j, x});
    s[i] -= x;
    d[j] -= x;
    if (i == n - 1 && j == m - 1) break;
    if (i == n - 1) {
      ++j;
    } else if (j == m - 1) {
      ++i;
    } else if (s[i] <= d[j]) {
      ++i;
    } else {
      ++j;
    }
  }

  TransportTree tree(n, m);
  for (int c = 0; c < static_cast<int>(cells.size()); ++c) tree.Add(c, cells[c]);

  double max_cost = 0.0;
  for (double v : cost.matrix().values()) max_cost = std::max(max_cost, v);
  const double tolerance = 1e-12 * std::max(1.0, max_cost);
  const long max_pivots = 10L * n * m + 1000;

  std::vector<double> potential;
  std::vector<char> is_basic(static_cast<std::size_t>(n) * m, 0);
  for (const auto& c : cells) is_basic[static_cast<std::size_t>(c.row) * m + c.col] = 1;

  TransportPlan result;
  for (long pivot = 0;; ++pivot) {
    if (pivot > max_pivots)
      throw NumericalError("transportation simplex: no convergence after " +
                           std::to_string(max_pivots) + " pivots");
    tree.Orient(cells, cost, potential);
    int enter_row = -1, enter_col = -1;
    double best = -tolerance;
    for (int i = 0; i < n; ++i) {
      const double u = potential[i];
      for (int j = 0; j < m; ++j) {
        if (is_basic[static_cast<std::size_t>(i) * m + j]) continue;
        const double reduced = cost(i, j) - u - potential[n + j];
        if (reduced < best) {
          best = reduced;
          enter_row = i;
          enter_col = j;
        }
      }
    }
    if (enter_row < 0) break;

    const std::vector<int> path = tree.Path(cells, enter_row, enter_col);
    // Path cells alternate −, +, −, ... starting next to the entering column.
    int leaving = -1;
    double theta = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p < path.size(); p += 2) {
      if (cells[path[p]].flow < theta) {
        theta = cells[path[p]].flow;
        leaving = path[p];
      }
    }
    for (std::size_t p = 0; p < path.size(); ++p)
      cells[path[p]].flow += (p % 2 == 0) ? -theta : theta;

    tree.Remove(leaving, cells[leaving]);
    is_basic[static_cast<std::size_t>(cells[leaving].row) * m + cells[leaving].col] = 0;
    cells[leaving] = {enter_row, enter_col, theta};
    is_basic[static_cast<std::size_t>(enter_row) * m + enter_col] = 1;
    tree.Add(leaving, cells[leaving]);
    result.pivots = static_cast<int>(pivot + 1);
  }

  result.plan = Matrix(n, m);
  for (const auto& c : cells) {
    result.plan(c.row, c.col) += c.flow;
    result.total_cost += c.flow * cost(c.row, c.col);
  }
  return result;
}

namespace {

double LogSumExp(const std::vector<double>& v) {
  double max = -std::numeric_limits<double>::infinity();
  for (double x : v) max = std::max(max, x);
  if (!std::isfinite(max)) return max;
  double s = 0.0;
  for (double x : v) s += std::exp(x - max);
  return max + std::log(s);
}

}  // namespace

EntropicResult OtEntropic(const CostMatrix& cost, std::span<const double> supply,
                          std::span<const double> demand, double epsilon, int max_iter,
                          double tolerance) {
  if (!(epsilon > 0.0)) throw ConfigError("entropic OT: epsilon must be positive");
  if (max_iter < 1) throw ConfigError("entropic OT: max_iter must be positive");
  if (supply.size() != cost.rows() || demand.size() != cost.cols())
    throw DataError("optimal transport: marginal sizes do not match the cost matrix");
  CheckMasses(supply, "supply");
  CheckMasses(demand, "demand");
  const double supply_total = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double demand_total = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(supply_total - demand_total) > 1e-9 * std::max(1.0, supply_total))
    throw DataError("optimal transport: infeasible marginals");

  // Zero-mass rows and columns carry no plan mass; drop them.
  std::vector<int> rows, cols;
  for (std::size_t i = 0; i < supply.size(); ++i)
    if (supply[i] > 0.0) rows.push_back(static_cast<int>(i));
  for (std::size_t j = 0; j < demand.size(); ++j)
    if (demand[j] > 0.0) cols.push_back(static_cast<int>(j));
  const std::size_t n = rows.size(), m = cols.size();
  std::vector<double> log_a(n), log_b(m);
  for (std::size_t i = 0; i < n; ++i) log_a[i] = std::log(supply[rows[i]]);
  for (std::size_t j = 0; j < m; ++j) log_b[j] = std::log(demand[cols[j]] * supply_total / demand_total);

  double max_cost = 0.0;
  for (double v : cost.matrix().values()) max_cost = std::max(max_cost, v);

  std::vector<double> f(n, 0.0), g(m, 0.0), scratch;
  auto update_f = [&](double eps) {
    scratch.resize(m);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) scratch[j] = (g[j] - cost(rows[i], cols[j])) / eps;
      f[i] = eps * (log_a[i] - LogSumExp(scratch));
    }
  };
  auto update_g = [&](double eps) {
    scratch.resize(n);
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) scratch[i] = (f[i] - cost(rows[i], cols[j])) / eps;
      g[j] = eps * (log_b[j] - LogSumExp(scratch));
    }
  };
  // After a g-update the column marginals are exact; measure the rows.
  auto row_violation = [&](double eps) {
    double violation = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < m; ++j)
        row += std::exp((f[i] + g[j] - cost(rows[i], cols[j])) / eps);
      violation += std::abs(row - supply[rows[i]]);
    }
    return violation;
  };

  // Anneal epsilon from the cost scale down to the target, warm-starting the
  // potentials at each stage.
  EntropicResult result;
  double eps = std::max(epsilon, max_cost);
  int iter = 0;
  while (eps > epsilon) {
    for (int s = 0; s < 10 && iter < max_iter; ++s, ++iter) {
      update_f(eps);
      update_g(eps);
    }
    eps = std::max(epsilon, eps * 0.5);
  }
  double violation = std::numeric_limits<double>::infinity();
  while (iter < max_iter) {
    update_f(eps);
    update_g(eps);
    ++iter;
    violation = row_violation(eps);
    if (violation <= tolerance) break;
  }
  result.iterations = iter;
  result.marginal_violation = violation;
  if (!(violation <= tolerance))
    throw NumericalError("entropic OT: no convergence after " + std::to_string(max_iter) +
                         " iterations (marginal violation " + std::to_string(violation) + ")");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const double c = cost(rows[i], cols[j]);
      result.total_cost += std::exp((f[i] + g[j] - c) / eps) * c;
    }
  return result;
}

std::vector<std::size_t> LargestRemainder(std::span<const double> weights, std::size_t total) {
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw DataError("apportionment: invalid weight");
    sum += w;
  }
  if (sum <= 0.0) throw DataError("apportionment: weights sum to zero");
  const std::size_t k = weights.size();
  std::vector<std::size_t> counts(k);
  std::vector<double> remainder(k);
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    double quota = static_cast<double>(total) * weights[c] / sum;
    const double nearest = std::round(quota);
    if (std::abs(quota - nearest) < 1e-9) quota = nearest;
    counts[c] = static_cast<std::size_t>(std::floor(quota));
    remainder[c] = quota - std::floor(quota);
    assigned += counts[c];
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++counts[order[r % k]];
  while (assigned > total) {
    // Only reachable through round-off in the floors.
    for (std::size_t r = k; r-- > 0 && assigned > total;)
      if (counts[order[r]] > 0) {
        --counts[order[r]];
        --assigned;
      }
  }
  return counts;
}

namespace {

// Dinic max flow on source → rows (cap 1) → admissible columns (cap 1) →
// sink (cap = column capacity).
class BipartiteFlow {
 public:
  explicit BipartiteFlow(int nodes) : graph_(nodes) {}

  void AddEdge(int from, int to, int cap) {
    graph_[from].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({to, cap});
    graph_[to].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({from, 0});
  }

  int MaxFlow(int source, int sink) {
    int flow = 0;
    while (Bfs(source, sink)) {
      next_.assign(graph_.size(), 0);
      while (int pushed = Dfs(source, sink, std::numeric_limits<int>::max())) flow += pushed;
    }
    return flow;
  }

 private:
  struct Edge {
    int to;
    int cap;
  };

  bool Bfs(int source, int sink) {
    level_.assign(graph_.size(), -1);
    std::queue<int> q;
    q.push(source);
    level_[source] = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int e : graph_[v])
        if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
          level_[edges_[e].to] = level_[v] + 1;
          q.push(edges_[e].to);
        }
    }
    return level_[sink] >= 0;
  }

  int Dfs(int v, int sink, int limit) {
    if (v == sink) return limit;
    for (int& idx = next_[v]; idx < static_cast<int>(graph_[v].size()); ++idx) {
      const int e = graph_[v][idx];
      const int to = edges_[e].to;
      if (edges_[e].cap <= 0 || level_[to] != level_[v] + 1) continue;
      if (int pushed = Dfs(to, sink, std::min(limit, edges_[e].cap))) {
        edges_[e].cap -= pushed;
        edges_[e ^ 1].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  std::vector<std::vector<int>> graph_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<int> next_;
};

bool AssignmentFeasible(const CostMatrix& cost, std::span<const std::size_t> capacity,
                        double threshold) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  const int source = n + m, sink = n + m + 1;
  BipartiteFlow flow(n + m + 2);
  for (int i = 0; i < n; ++i) {
    flow.AddEdge(source, i, 1);
    for (int j = 0; j < m; ++j)
      if (capacity[j] > 0 && cost(i, j) <= threshold) flow.AddEdge(i, n + j, 1);
  }
  for (int j = 0; j < m; ++j)
    if (capacity[j] > 0) flow.AddEdge(n + j, sink, static_cast<int>(capacity[j]));
  return flow.MaxFlow(source, sink) == n;
}

}  // namespace

double BottleneckAssignment(const CostMatrix& cost, std::span<const std::size_t> capacity) {
  if (capacity.size() != cost.cols())
    throw DataError("bottleneck assignment: capacity size does not match the cost matrix");
  const std::size_t total = std::accumulate(capacity.begin(), capacity.end(), std::size_t{0});
  if (total != cost.rows())
    throw DataError("bottleneck assignment: capacities must sum to the row count");
  std::vector<double> levels(cost.matrix().values().begin(), cost.matrix().values().end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (AssignmentFeasible(cost, capacity, levels[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return levels[lo];
}

}  // namespace predmat::numerics
