#include "polybound/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

namespace polybound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarStatus { NonbasicLower, NonbasicUpper, Basic };

/// Revised primal simplex over A x + s = b with individual variable bounds.
/// Basis inverse is kept as an LU factorization plus product-form eta
/// updates; the basis is refactorized periodically and before reporting.
class Simplex {
 public:
  Simplex(const MilpModel& model, const std::map<int, VarBounds>& extra_bounds,
          const LpTolerances& tol)
      : tol_(tol),
        m_(static_cast<int>(model.rows.size())),
        nv_(static_cast<int>(model.vars.size())) {
    lower_.reserve(nv_);
    upper_.reserve(nv_);
    for (const auto& v : model.vars) {
      lower_.push_back(v.lower);
      upper_.push_back(v.upper);
    }
    for (const auto& [idx, vb] : extra_bounds) {
      if (idx < 0 || idx >= nv_) throw DomainError("extra bound on unknown variable");
      if (vb.lower < lower_[idx] - 1e-12 || vb.upper > upper_[idx] + 1e-12 ||
          vb.lower > vb.upper) {
        throw DomainError("extra bounds must lie within the variable's box");
      }
      lower_[idx] = vb.lower;
      upper_[idx] = vb.upper;
    }

    cols_.assign(static_cast<std::size_t>(nv_), {});
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      b_(i) = model.rows[static_cast<std::size_t>(i)].rhs;
      for (const auto& [id, c] : model.rows[static_cast<std::size_t>(i)].expr.terms) {
        cols_[static_cast<std::size_t>(id)].emplace_back(i, c);
      }
    }
    // slacks: one per row, [0, inf)
    for (int i = 0; i < m_; ++i) {
      cols_.push_back({{i, 1.0}});
      lower_.push_back(0.0);
      upper_.push_back(kInf);
    }
    cost2_.assign(cols_.size(), 0.0);
    for (const auto& [id, c] : model.objective.terms) {
      cost2_[static_cast<std::size_t>(id)] = c;
    }
    objective_constant_ = model.objective.constant;
  }

  LpOutcome solve() {
    LpOutcome out;
    if (m_ == 0) {
      solve_unconstrained(out);
      return out;
    }
    const bool need_phase1 = initialize_basis();
    if (need_phase1) {
      phase1_ = true;
      const auto status = iterate();
      if (status == LpOutcome::Status::Unbounded) {
        throw DomainError("phase 1 reported unbounded; solver state corrupt");
      }
      refactorize();
      if (phase_objective() > 1e-6) {
        out.status = LpOutcome::Status::Infeasible;
        out.iterations = iterations_;
        return out;
      }
      // Pin artificials at zero for phase 2.
      for (std::size_t j = first_artificial_; j < cols_.size(); ++j) {
        lower_[j] = upper_[j] = 0.0;
        if (status_[j] == VarStatus::NonbasicUpper) status_[j] = VarStatus::NonbasicLower;
        if (status_[j] != VarStatus::Basic) x_[j] = 0.0;
      }
    }
    phase1_ = false;
    out.status = iterate();
    refactorize();
    out.iterations = iterations_;
    if (out.status == LpOutcome::Status::Optimal) {
      out.point.assign(static_cast<std::size_t>(nv_), 0.0);
      double value = objective_constant_;
      for (int j = 0; j < nv_; ++j) {
        out.point[static_cast<std::size_t>(j)] = x_[static_cast<std::size_t>(j)];
        value += cost2_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
      }
      out.value = value;
    }
    return out;
  }

 private:
  double cost(std::size_t j) const {
    if (phase1_) return j >= first_artificial_ ? 1.0 : 0.0;
    return cost2_[j];
  }

  double phase_objective() const {
    double v = 0.0;
    for (std::size_t j = first_artificial_; j < cols_.size(); ++j) v += x_[j];
    return v;
  }

  void solve_unconstrained(LpOutcome& out) {
    out.point.assign(static_cast<std::size_t>(nv_), 0.0);
    double value = objective_constant_;
    for (int j = 0; j < nv_; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      double v = cost2_[ju] > 0.0 ? lower_[ju] : (cost2_[ju] < 0.0 ? upper_[ju] : lower_[ju]);
      if (!std::isfinite(v)) {
        out.status = LpOutcome::Status::Unbounded;
        return;
      }
      out.point[ju] = v;
      value += cost2_[ju] * v;
    }
    out.value = value;
    out.status = LpOutcome::Status::Optimal;
  }

  /// Start from all structural variables at a bound and slacks basic.  Rows
  /// whose slack would be negative get an artificial instead.  Returns true
  /// when phase 1 is required.
  bool initialize_basis() {
    const std::size_t n0 = cols_.size();
    first_artificial_ = n0;
    status_.assign(n0, VarStatus::NonbasicLower);
    x_.assign(n0, 0.0);
    for (std::size_t j = 0; j < static_cast<std::size_t>(nv_); ++j) {
      x_[j] = lower_[j];
    }
    Eigen::VectorXd residual = b_;
    for (std::size_t j = 0; j < static_cast<std::size_t>(nv_); ++j) {
      if (x_[j] == 0.0) continue;
      for (const auto& [row, c] : cols_[j]) residual(row) -= c * x_[j];
    }
    basis_.resize(static_cast<std::size_t>(m_));
    basis_row_.assign(n0, -1);
    bool need_phase1 = false;
    for (int i = 0; i < m_; ++i) {
      const std::size_t slack = static_cast<std::size_t>(nv_ + i);
      if (residual(i) >= -tol_.feasibility) {
        set_basic(slack, i, residual(i));
      } else {
        // artificial with column -e_i, so its basic value is -residual > 0
        cols_.push_back({{i, -1.0}});
        lower_.push_back(0.0);
        upper_.push_back(kInf);
        cost2_.push_back(0.0);
        status_.push_back(VarStatus::Basic);
        x_.push_back(-residual(i));
        basis_row_.push_back(i);
        basis_[static_cast<std::size_t>(i)] = static_cast<int>(cols_.size() - 1);
        need_phase1 = true;
      }
    }
    refactorize();
    return need_phase1;
  }

  void set_basic(std::size_t j, int row, double value) {
    status_[j] = VarStatus::Basic;
    x_[j] = value;
    basis_[static_cast<std::size_t>(row)] = static_cast<int>(j);
    basis_row_[j] = row;
  }

  void refactorize() {
    std::vector<Eigen::Triplet<double>> trips;
    for (int i = 0; i < m_; ++i) {
      const auto j = static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)]);
      for (const auto& [row, c] : cols_[j]) trips.emplace_back(row, i, c);
    }
    Eigen::SparseMatrix<double> B(m_, m_);
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    lu_.compute(B);
    if (lu_.info() != Eigen::Success) {
      throw DomainError("singular basis matrix during refactorization");
    }
    etas_.clear();
    // recompute basic values from scratch to shed accumulated drift
    Eigen::VectorXd rhs = b_;
    for (std::size_t j = 0; j < cols_.size(); ++j) {
      if (status_[j] == VarStatus::Basic || x_[j] == 0.0) continue;
      for (const auto& [row, c] : cols_[j]) rhs(row) -= c * x_[j];
    }
    Eigen::VectorXd xb = lu_.solve(rhs);
    for (int i = 0; i < m_; ++i) {
      x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = xb(i);
    }
    pivots_since_refactor_ = 0;
  }

  // FTRAN/BTRAN work on member scratch vectors; a fresh allocation per
  // iteration is measurable at branch-and-bound LP volumes.
  void ftran_inplace(const Eigen::VectorXd& v, Eigen::VectorXd& y) const {
    y = lu_.solve(v);
    for (const auto& [r, d] : etas_) {
      const double t = y(r) / d(r);
      y -= t * d;
      y(r) = t;
    }
  }

  void btran_inplace(Eigen::VectorXd& y) {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      const auto& [r, d] = *it;
      const double s = d.dot(y);
      y(r) = (y(r) - (s - d(r) * y(r))) / d(r);
    }
    scratch_ = lu_.adjoint().solve(y);
    y.swap(scratch_);
  }

  void column_dense(std::size_t j, Eigen::VectorXd& v) const {
    v.setZero(m_);
    for (const auto& [row, c] : cols_[j]) v(row) = c;
  }

  double reduced_cost(std::size_t j, const Eigen::VectorXd& y) const {
    double d = cost(j);
    for (const auto& [row, c] : cols_[j]) d -= y(row) * c;
    return d;
  }

  LpOutcome::Status iterate() {
    while (true) {
      if (pivots_since_refactor_ >= tol_.refactor_every) refactorize();
      y_.resize(m_);
      for (int i = 0; i < m_; ++i) {
        y_(i) = cost(static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)]));
      }
      btran_inplace(y_);
      const Eigen::VectorXd& y = y_;

      const bool bland = iterations_ >= tol_.bland_after;
      int entering = -1;
      int dir = 0;
      double best = tol_.reduced_cost;
      for (std::size_t j = 0; j < cols_.size(); ++j) {
        if (status_[j] == VarStatus::Basic) continue;
        if (lower_[j] == upper_[j]) continue;  // fixed, cannot move
        const double dj = reduced_cost(j, y);
        double viol = 0.0;
        int d = 0;
        if (status_[j] == VarStatus::NonbasicLower && dj < -tol_.reduced_cost) {
          viol = -dj;
          d = 1;
        } else if (status_[j] == VarStatus::NonbasicUpper && dj > tol_.reduced_cost) {
          viol = dj;
          d = -1;
        } else {
          continue;
        }
        if (bland) {
          entering = static_cast<int>(j);
          dir = d;
          break;
        }
        if (viol > best) {
          best = viol;
          entering = static_cast<int>(j);
          dir = d;
        }
      }
      if (entering < 0) return LpOutcome::Status::Optimal;

      const auto q = static_cast<std::size_t>(entering);
      column_dense(q, col_);
      ftran_inplace(col_, d_);
      const Eigen::VectorXd& d = d_;

      // ratio test: x_B moves by -dir*step*d, x_q by dir*step
      double limit = upper_[q] - lower_[q];  // bound flip distance
      int leaving_row = -1;
      double leaving_pivot = 0.0;
      bool leaving_to_lower = true;
      for (int i = 0; i < m_; ++i) {
        const double di = dir * d(i);
        if (std::abs(di) <= tol_.pivot) continue;
        const auto bj = static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)]);
        double cap;
        bool to_lower;
        if (di > 0.0) {  // basic value decreases toward its lower bound
          if (lower_[bj] == -kInf) continue;
          cap = (x_[bj] - lower_[bj]) / di;
          to_lower = true;
        } else {  // increases toward its upper bound
          if (upper_[bj] == kInf) continue;
          cap = (x_[bj] - upper_[bj]) / di;
          to_lower = false;
        }
        cap = std::max(cap, 0.0);
        bool take = false;
        if (cap < limit - 1e-12) {
          take = true;  // strictly smaller step
        } else if (cap <= limit + 1e-12 && leaving_row >= 0) {
          if (bland) {
            // Bland needs ratio ties broken by lowest variable index to
            // guarantee termination on degenerate problems.
            const auto cur = static_cast<std::size_t>(
                basis_[static_cast<std::size_t>(leaving_row)]);
            take = bj < cur;
          } else {
            take = std::abs(di) > std::abs(leaving_pivot) + 1e-12;
          }
        }
        if (take) {
          limit = std::min(limit, cap);
          leaving_row = i;
          leaving_pivot = d(i);
          leaving_to_lower = to_lower;
        }
      }

      if (!std::isfinite(limit)) return LpOutcome::Status::Unbounded;
      if (++iterations_ > tol_.max_iterations) {
        throw DomainError("simplex iteration limit exceeded (numerical trouble)");
      }

      if (leaving_row < 0) {
        // bound flip: entering moves to its opposite bound
        for (int i = 0; i < m_; ++i) {
          const auto bj = static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)]);
          x_[bj] -= dir * limit * d(i);
        }
        x_[q] += dir * limit;
        status_[q] = dir > 0 ? VarStatus::NonbasicUpper : VarStatus::NonbasicLower;
        continue;
      }

      if (std::abs(d(leaving_row)) <= tol_.pivot) {
        refactorize();
        continue;  // retry with a fresh factorization
      }

      for (int i = 0; i < m_; ++i) {
        const auto bj = static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)]);
        x_[bj] -= dir * limit * d(i);
      }
      const auto leaving = static_cast<std::size_t>(
          basis_[static_cast<std::size_t>(leaving_row)]);
      status_[leaving] = leaving_to_lower ? VarStatus::NonbasicLower : VarStatus::NonbasicUpper;
      x_[leaving] = leaving_to_lower ? lower_[leaving] : upper_[leaving];
      basis_row_[leaving] = -1;
      const double xq = x_[q] + dir * limit;
      set_basic(q, leaving_row, xq);
      etas_.emplace_back(leaving_row, std::move(d_));
      ++pivots_since_refactor_;
    }
  }

  LpTolerances tol_;
  int m_;
  int nv_;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> lower_, upper_, cost2_;
  double objective_constant_ = 0.0;
  Eigen::VectorXd b_;

  std::vector<VarStatus> status_;
  std::vector<double> x_;
  std::vector<int> basis_;      // row -> variable
  std::vector<int> basis_row_;  // variable -> row or -1
  std::size_t first_artificial_ = 0;
  bool phase1_ = false;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  Eigen::VectorXd y_, d_, col_, scratch_;  // iteration scratch space
  std::vector<std::pair<int, Eigen::VectorXd>> etas_;
  int pivots_since_refactor_ = 0;
  long long iterations_ = 0;
};

}  // namespace

LpOutcome solve_lp(const MilpModel& model, const std::map<int, VarBounds>& extra_bounds,
                   const LpTolerances& tol) {
  Simplex solver(model, extra_bounds, tol);
  return solver.solve();
}

}  // namespace polybound
