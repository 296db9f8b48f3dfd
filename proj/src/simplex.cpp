#include "sodta/simplex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sodta {

namespace {

enum class ColumnKind : unsigned char { Structural, Slack, Artificial };

/// Standard-form view: A' x' = b', b' >= 0, x' = (x, slacks, artificials).
class RevisedSimplex {
 public:
  RevisedSimplex(const ConstraintSystem& sys, std::span<const double> cost, const SimplexOptions& opt)
      : sys_(sys), opt_(opt), m_(sys.num_rows()), n_(sys.num_vars()) {
    sign_.resize(m_);
    rhs_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      sign_[r] = sys.rhs(r) < 0.0 ? -1.0 : 1.0;
      rhs_[r] = sign_[r] * sys.rhs(r);
    }
    // structural columns, CSC with row signs applied
    std::vector<std::size_t> count(n_ + 1, 0);
    for (std::size_t r = 0; r < m_; ++r) {
      for (auto j : sys.row_indices(r)) ++count[j + 1];
    }
    for (std::size_t j = 0; j < n_; ++j) count[j + 1] += count[j];
    col_start_ = count;
    col_row_.resize(count[n_]);
    col_val_.resize(count[n_]);
    std::vector<std::size_t> fill(count.begin(), count.end() - 1);
    for (std::size_t r = 0; r < m_; ++r) {
      const auto idx = sys.row_indices(r);
      const auto val = sys.row_values(r);
      for (std::size_t p = 0; p < idx.size(); ++p) {
        auto pos = fill[idx[p]]++;
        col_row_[pos] = r;
        col_val_[pos] = sign_[r] * val[p];
      }
    }
    kind_.assign(n_, ColumnKind::Structural);
    unit_row_.assign(n_, 0);
    unit_val_.assign(n_, 0.0);
    cost_.assign(cost.begin(), cost.end());
    basis_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      if (sys.relation(r) == Relation::LessEqual) {
        kind_.push_back(ColumnKind::Slack);
        unit_row_.push_back(r);
        unit_val_.push_back(sign_[r]);
        cost_.push_back(0.0);
        if (sign_[r] > 0.0) basis_[r] = kind_.size() - 1;
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (sys.relation(r) == Relation::LessEqual && sign_[r] > 0.0) continue;
      kind_.push_back(ColumnKind::Artificial);
      unit_row_.push_back(r);
      unit_val_.push_back(1.0);
      cost_.push_back(0.0);
      basis_[r] = kind_.size() - 1;
    }
    ncols_ = kind_.size();
    in_basis_.assign(ncols_, -1);
    for (std::size_t r = 0; r < m_; ++r) in_basis_[basis_[r]] = static_cast<long>(r);
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) binv_[r * m_ + r] = 1.0;
    xb_ = rhs_;
  }

  LpResult solve() {
    LpResult res;
    // Phase 1: minimise the sum of artificials.
    std::vector<double> phase1(ncols_, 0.0);
    bool any_artificial = false;
    for (std::size_t j = 0; j < ncols_; ++j) {
      if (kind_[j] == ColumnKind::Artificial) {
        phase1[j] = 1.0;
        any_artificial = true;
      }
    }
    if (any_artificial) {
      active_cost_ = &phase1;
      allow_artificial_ = true;
      run_phase(res);
      reinvert();
      double infeas = 0.0;
      for (std::size_t r = 0; r < m_; ++r) {
        if (kind_[basis_[r]] == ColumnKind::Artificial) infeas += std::max(0.0, xb_[r]);
      }
      if (infeas > opt_.feasibility_tolerance * std::max(1.0, norm_inf(rhs_))) {
        res.status = LpStatus::Infeasible;
        refresh_prices();
        res.farkas.resize(m_);
        for (std::size_t r = 0; r < m_; ++r) res.farkas[r] = sign_[r] * pi_[r];
        return res;
      }
      drive_out_artificials();
    }
    active_cost_ = &cost_;
    allow_artificial_ = false;
    refresh_prices();
    if (!run_phase(res)) {
      res.status = LpStatus::Unbounded;
      return res;
    }
    reinvert();
    refresh_prices();

    res.status = LpStatus::Optimal;
    res.x.assign(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) res.x[basis_[r]] = std::max(0.0, xb_[r]);
    }
    res.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) res.objective += cost_[j] * res.x[j];
    res.duals.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) res.duals[r] = sign_[r] * pi_[r];
    return res;
  }

 private:
  static double norm_inf(const std::vector<double>& v) {
    double s = 0.0;
    for (double a : v) s = std::max(s, std::abs(a));
    return s;
  }

  double column_dot(std::size_t j, const std::vector<double>& y) const {
    if (kind_[j] != ColumnKind::Structural) return unit_val_[j] * y[unit_row_[j]];
    double s = 0.0;
    for (auto p = col_start_[j]; p < col_start_[j + 1]; ++p) s += col_val_[p] * y[col_row_[p]];
    return s;
  }

  // u = B^{-1} A_j
  void ftran(std::size_t j, std::vector<double>& u) const {
    std::fill(u.begin(), u.end(), 0.0);
    auto axpy = [&](std::size_t row, double a) {
      const double* col = &binv_[row * m_];
      for (std::size_t r = 0; r < m_; ++r) u[r] += a * col[r];
    };
    if (kind_[j] != ColumnKind::Structural) {
      axpy(unit_row_[j], unit_val_[j]);
      return;
    }
    for (auto p = col_start_[j]; p < col_start_[j + 1]; ++p) axpy(col_row_[p], col_val_[p]);
  }

  void refresh_prices() {
    pi_.assign(m_, 0.0);
    const auto& c = *active_cost_;
    for (std::size_t col = 0; col < m_; ++col) {
      const double* b = &binv_[col * m_];
      double s = 0.0;
      for (std::size_t r = 0; r < m_; ++r) s += c[basis_[r]] * b[r];
      pi_[col] = s;
    }
  }

  void refresh_values() {
    std::fill(xb_.begin(), xb_.end(), 0.0);
    for (std::size_t col = 0; col < m_; ++col) {
      const double bc = rhs_[col];
      if (bc == 0.0) continue;
      const double* b = &binv_[col * m_];
      for (std::size_t r = 0; r < m_; ++r) xb_[r] += bc * b[r];
    }
  }

  void reinvert() {
    if (m_ == 0) return;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    for (std::size_t r = 0; r < m_; ++r) {
      const auto j = basis_[r];
      const auto c = static_cast<Eigen::Index>(r);
      if (kind_[j] != ColumnKind::Structural) {
        B(static_cast<Eigen::Index>(unit_row_[j]), c) = unit_val_[j];
      } else {
        for (auto p = col_start_[j]; p < col_start_[j + 1]; ++p) B(static_cast<Eigen::Index>(col_row_[p]), c) = col_val_[p];
      }
    }
    Eigen::MatrixXd inv = B.partialPivLu().inverse();
    // binv_ is column-major, same as Eigen's default
    std::copy(inv.data(), inv.data() + m_ * m_, binv_.begin());
    refresh_values();
    refresh_prices();
  }

  void pivot(std::size_t p, std::size_t q, const std::vector<double>& u, double reduced_cost) {
    nz_.clear();
    for (std::size_t r = 0; r < m_; ++r) {
      if (r != p && u[r] != 0.0) nz_.push_back(r);
    }
    const double up = u[p];
    const double theta = xb_[p] / up;
    for (auto r : nz_) xb_[r] -= theta * u[r];
    xb_[p] = theta;
    for (std::size_t col = 0; col < m_; ++col) {
      double* b = &binv_[col * m_];
      if (b[p] == 0.0) continue;
      const double e = b[p] / up;
      b[p] = e;
      for (auto r : nz_) b[r] -= u[r] * e;
    }
    // pi' = pi + d_q * (new row p of B^{-1})
    for (std::size_t col = 0; col < m_; ++col) {
      const double e = binv_[col * m_ + p];
      if (e != 0.0) pi_[col] += reduced_cost * e;
    }
    in_basis_[basis_[p]] = -1;
    basis_[p] = q;
    in_basis_[q] = static_cast<long>(p);
  }

  // Returns false if unbounded.
  bool run_phase(LpResult& res) {
    refresh_prices();
    std::vector<double> u(m_);
    const auto& c = *active_cost_;
    std::size_t since_refresh = 0, since_reinvert = 0;
    for (;;) {
      if (res.iterations >= opt_.max_iterations) {
        throw OracleError("simplex cycling guard exceeded after " + std::to_string(res.iterations) + " iterations");
      }
      // Bland: lowest-index improving column
      std::size_t q = ncols_;
      double dq = 0.0;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (in_basis_[j] >= 0) continue;
        if (kind_[j] == ColumnKind::Artificial && !allow_artificial_) continue;
        const double d = c[j] - column_dot(j, pi_);
        if (d < -opt_.cost_tolerance) {
          q = j;
          dq = d;
          break;
        }
      }
      if (q == ncols_) return true;
      ftran(q, u);
      // Bland ratio test: ties broken by the smallest basic column index
      std::size_t p = m_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < m_; ++r) {
        if (u[r] <= opt_.pivot_tolerance) continue;
        const double ratio = std::max(0.0, xb_[r]) / u[r];
        if (p == m_ || ratio < best - 1e-12) {
          best = ratio;
          p = r;
        } else if (ratio <= best + 1e-12 && basis_[r] < basis_[p]) {
          best = std::min(best, ratio);
          p = r;
        }
      }
      if (p == m_) return false;
      if (xb_[p] < 0.0) xb_[p] = 0.0;
      pivot(p, q, u, dq);
      ++res.iterations;
      if (opt_.reinvert_interval > 0 && ++since_reinvert >= opt_.reinvert_interval) {
        reinvert();
        since_reinvert = since_refresh = 0;
      } else if (opt_.refresh_interval > 0 && ++since_refresh >= opt_.refresh_interval) {
        refresh_values();
        refresh_prices();
        since_refresh = 0;
      }
    }
  }

  void drive_out_artificials() {
    std::vector<double> row(ncols_);
    for (std::size_t p = 0; p < m_; ++p) {
      if (kind_[basis_[p]] != ColumnKind::Artificial) continue;
      // row p of B^{-1} A'
      std::vector<double> e(m_);
      for (std::size_t col = 0; col < m_; ++col) e[col] = binv_[col * m_ + p];
      std::size_t q = ncols_;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (in_basis_[j] >= 0 || kind_[j] == ColumnKind::Artificial) continue;
        if (std::abs(column_dot(j, e)) > 1e-7) {
          q = j;
          break;
        }
      }
      if (q == ncols_) continue;  // redundant row; the artificial stays basic at zero
      std::vector<double> u(m_);
      ftran(q, u);
      xb_[p] = 0.0;
      pivot(p, q, u, 0.0);
    }
    refresh_values();
  }

  const ConstraintSystem& sys_;
  SimplexOptions opt_;
  std::size_t m_, n_, ncols_ = 0;
  std::vector<double> sign_, rhs_;
  std::vector<std::size_t> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<ColumnKind> kind_;
  std::vector<std::size_t> unit_row_;
  std::vector<double> unit_val_;
  std::vector<double> cost_;
  const std::vector<double>* active_cost_ = nullptr;
  bool allow_artificial_ = true;
  std::vector<std::size_t> basis_;
  std::vector<long> in_basis_;
  std::vector<double> binv_, xb_, pi_;
  std::vector<std::size_t> nz_;
};

}  // namespace

LpResult solve_lp(const ConstraintSystem& system, std::span<const double> cost, const SimplexOptions& options) {
  if (cost.size() != system.num_vars()) throw OracleError("cost vector dimension does not match the system");
  RevisedSimplex simplex(system, cost, options);
  return simplex.solve();
}

LpResult solve_central(const ConstraintSystem& system, const LinearObjective& objective,
                       const SimplexOptions& options) {
  return solve_lp(system, objective.coefficients, options);
}

double duality_gap(const ConstraintSystem& system, std::span<const double> cost, const LpResult& result) {
  double primal = 0.0, dual = 0.0;
  for (std::size_t j = 0; j < result.x.size(); ++j) primal += cost[j] * result.x[j];
  for (std::size_t r = 0; r < system.num_rows(); ++r) dual += system.rhs(r) * result.duals[r];
  return std::abs(primal - dual);
}

double complementarity_violation(const ConstraintSystem& system, std::span<const double> cost,
                                 const LpResult& result) {
  std::vector<double> reduced(cost.begin(), cost.end());
  double worst = 0.0;
  for (std::size_t r = 0; r < system.num_rows(); ++r) {
    const auto idx = system.row_indices(r);
    const auto val = system.row_values(r);
    for (std::size_t p = 0; p < idx.size(); ++p) reduced[idx[p]] -= result.duals[r] * val[p];
    if (system.relation(r) == Relation::LessEqual) {
      const double slack = system.rhs(r) - system.row_activity(r, result.x);
      worst = std::max(worst, std::abs(result.duals[r] * slack));
    }
  }
  for (std::size_t j = 0; j < result.x.size(); ++j) worst = std::max(worst, std::abs(reduced[j] * result.x[j]));
  return worst;
}

double optimality_gap(double dga_objective, double oracle_objective) {
  if (oracle_objective == 0.0) {
    throw std::domain_error("optimality gap is undefined for a zero oracle optimum; compare for an exact match");
  }
  return 100.0 * (dga_objective - oracle_objective) / oracle_objective;
}

}  // namespace sodta
