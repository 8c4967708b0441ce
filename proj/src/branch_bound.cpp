#include "polybound/branch_bound.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <queue>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace polybound {

namespace {

using Clock = std::chrono::steady_clock;

struct Node {
  double bound = -std::numeric_limits<double>::infinity();
  long long seq = 0;  // creation order; makes best-bound ties deterministic
  std::map<int, VarBounds> fixed;
  std::vector<double> point;  // LP solution, computed when the node is created
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.seq > b.seq;
  }
};

std::vector<int> binary_ids(const MilpModel& model) {
  std::vector<int> ids;
  for (const auto& v : model.vars) {
    if (v.binary) ids.push_back(v.id);
  }
  return ids;
}

/// Most-fractional binary, ties by lowest id; -1 when integral within tol.
int pick_branching(const std::vector<double>& point, const std::vector<int>& binaries,
                   double tol) {
  int best = -1;
  double best_dist = 0.5;
  for (int id : binaries) {
    const double u = point[static_cast<std::size_t>(id)];
    if (std::abs(u - std::round(u)) <= tol) continue;
    const double dist = std::abs(u - 0.5);
    if (dist < best_dist || best < 0) {
      best_dist = dist;
      best = id;
    }
  }
  return best;
}

LiftedPoint snap_binaries(const std::vector<double>& point,
                          const std::vector<int>& binaries) {
  LiftedPoint lp;
  lp.assignment = point;
  for (int id : binaries) {
    lp.assignment[static_cast<std::size_t>(id)] =
        std::round(lp.assignment[static_cast<std::size_t>(id)]);
  }
  return lp;
}

/// Shared branch-and-bound state; one mutex guards everything mutable.
class Search {
 public:
  Search(const MilpModel& model, const MilpOptions& options)
      : model_(model),
        options_(options),
        binaries_(binary_ids(model)),
        deadline_(options.time_limit > 0.0
                      ? Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(options.time_limit))
                      : Clock::time_point::max()) {}

  MilpOutcome run() {
    // Root relaxation; children are solved eagerly when created, so the
    // queue orders open nodes by their own LP value, not the parent's.
    Node root;
    const LpOutcome lp = solve_lp(model_, root.fixed);
    ++nodes_;
    lp_iterations_ += lp.iterations;
    if (!lp.optimal()) {
      MilpOutcome out;
      out.status = MilpOutcome::Status::Infeasible;
      out.nodes = nodes_;
      out.lp_iterations = lp_iterations_;
      return out;
    }
    if (pick_branching(lp.point, binaries_, options_.integrality_tol) < 0) {
      offer_incumbent(lp.value, lp.point);
    } else {
      root.bound = lp.value;
      root.point = lp.point;
      queue_.push(std::move(root));
    }

    const int nthreads = std::max(1, options_.threads);
    if (nthreads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(nthreads));
      for (int i = 0; i < nthreads; ++i) pool.emplace_back([this] { worker(); });
      for (auto& t : pool) t.join();
    }
    return finish();
  }

 private:
  void worker() {
    std::unique_lock<std::mutex> lock(mu_);
    while (true) {
      cv_.wait(lock, [&] { return stop_ || !queue_.empty() || in_flight_ == 0; });
      if (stop_ || (queue_.empty() && in_flight_ == 0)) return;
      if (queue_.empty()) continue;  // spurious wake while others work

      if ((options_.node_limit > 0 && nodes_ >= options_.node_limit) ||
          Clock::now() >= deadline_) {
        stop_ = true;
        limit_reached_ = true;
        cv_.notify_all();
        return;
      }
      Node node = queue_.top();
      queue_.pop();
      if (has_incumbent_ && node.bound >= incumbent_value_ - options_.abs_gap) {
        continue;  // pruned by bound
      }
      const int branch_var =
          pick_branching(node.point, binaries_, options_.integrality_tol);
      // Rounding heuristic: fix every binary at its rounded LP value.  Many
      // nodes round to the same pattern, so patterns are solved only once.
      std::string pattern(binaries_.size(), '0');
      for (std::size_t k = 0; k < binaries_.size(); ++k) {
        const double u = node.point[static_cast<std::size_t>(binaries_[k])];
        if (std::round(u) > 0.5) pattern[k] = '1';
      }
      const bool run_heuristic = tried_patterns_.insert(std::move(pattern)).second;
      ++in_flight_;
      lock.unlock();

      LpOutcome rounded;
      rounded.status = LpOutcome::Status::Infeasible;
      if (run_heuristic) {
        std::map<int, VarBounds> fix = node.fixed;
        for (std::size_t k = 0; k < binaries_.size(); ++k) {
          const int id = binaries_[k];
          const double u = std::round(node.point[static_cast<std::size_t>(id)]);
          fix[id] = VarBounds{u, u};
        }
        rounded = solve_lp(model_, fix);
      }

      LpOutcome child_lp[2];
      std::map<int, VarBounds> child_fixed[2];
      for (int side = 0; side <= 1; ++side) {
        child_fixed[side] = node.fixed;
        child_fixed[side][branch_var] =
            VarBounds{static_cast<double>(side), static_cast<double>(side)};
        child_lp[side] = solve_lp(model_, child_fixed[side]);
      }

      lock.lock();
      --in_flight_;
      lp_iterations_ += rounded.iterations;
      if (rounded.optimal()) offer_incumbent(rounded.value, rounded.point);
      for (int side = 0; side <= 1; ++side) {
        const LpOutcome& lp = child_lp[side];
        lp_iterations_ += lp.iterations;
        ++nodes_;
        if (!lp.optimal()) continue;
        if (has_incumbent_ && lp.value >= incumbent_value_ - options_.abs_gap) continue;
        if (pick_branching(lp.point, binaries_, options_.integrality_tol) < 0) {
          offer_incumbent(lp.value, lp.point);
        } else {
          Node child;
          child.bound = lp.value;
          child.seq = ++seq_;
          child.fixed = std::move(child_fixed[side]);
          child.point = lp.point;
          queue_.push(std::move(child));
        }
      }
      cv_.notify_all();
    }
  }

  void offer_incumbent(double value, const std::vector<double>& point) {
    if (!has_incumbent_ || value < incumbent_value_) {
      has_incumbent_ = true;
      incumbent_value_ = value;
      incumbent_point_ = point;
    }
  }

  MilpOutcome finish() {
    MilpOutcome out;
    out.nodes = nodes_;
    out.lp_iterations = lp_iterations_;
    out.limit_reached = limit_reached_;
    double lowest = std::numeric_limits<double>::infinity();
    {
      // queue_ holds the surviving open nodes; their best bound is the proof
      auto q = queue_;
      while (!q.empty()) {
        lowest = std::min(lowest, q.top().bound);
        q.pop();
      }
    }
    if (has_incumbent_) {
      out.value = incumbent_value_;
      out.point = snap_binaries(incumbent_point_, binaries_);
      out.status = MilpOutcome::Status::Optimal;
      out.gap = limit_reached_ && std::isfinite(lowest)
                    ? std::max(0.0, incumbent_value_ - lowest)
                    : 0.0;
    } else if (!limit_reached_) {
      out.status = MilpOutcome::Status::Infeasible;
    } else {
      out.status = MilpOutcome::Status::Undecided;
    }
    return out;
  }

  const MilpModel& model_;
  MilpOptions options_;
  std::vector<int> binaries_;
  Clock::time_point deadline_;

  std::mutex mu_;
  std::condition_variable cv_;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> queue_;
  std::set<std::string> tried_patterns_;  // rounding-heuristic memo
  int in_flight_ = 0;
  long long nodes_ = 0;
  long long lp_iterations_ = 0;
  long long seq_ = 0;
  bool stop_ = false;
  bool limit_reached_ = false;
  bool has_incumbent_ = false;
  double incumbent_value_ = 0.0;
  std::vector<double> incumbent_point_;
};

}  // namespace

MilpOutcome solve_milp(const MilpModel& model, const MilpOptions& options) {
  Search search(model, options);
  return search.run();
}

MilpOutcome enumerate_oracle(const MilpModel& model) {
  const std::vector<int> binaries = binary_ids(model);
  const int phi = static_cast<int>(binaries.size());
  if (phi > 25) {
    throw DomainError("enumerate_oracle refuses models with more than 25 binaries");
  }
  MilpOutcome out;
  bool found = false;
  const std::uint64_t total = std::uint64_t{1} << phi;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    std::map<int, VarBounds> fixed;
    for (int k = 0; k < phi; ++k) {
      const double v = (mask >> k) & 1 ? 1.0 : 0.0;
      fixed[binaries[static_cast<std::size_t>(k)]] = VarBounds{v, v};
    }
    const LpOutcome lp = solve_lp(model, fixed);
    ++out.nodes;
    out.lp_iterations += lp.iterations;
    if (lp.optimal() && (!found || lp.value < out.value)) {
      found = true;
      out.value = lp.value;
      out.point = snap_binaries(lp.point, binaries);
    }
  }
  out.status = found ? MilpOutcome::Status::Optimal : MilpOutcome::Status::Infeasible;
  out.gap = 0.0;
  return out;
}

}  // namespace polybound
