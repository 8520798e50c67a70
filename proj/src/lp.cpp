#include "bagbound/lp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace bagbound::lp {

LinearProgram::LinearProgram(Eigen::Index num_vars)
    : c(Eigen::VectorXd::Zero(num_vars)),
      a_eq(0, num_vars),
      b_eq(0),
      a_ub(0, num_vars),
      b_ub(0),
      lower(Eigen::VectorXd::Zero(num_vars)),
      upper(Eigen::VectorXd::Constant(num_vars, kInf)) {}

void LinearProgram::validate() const {
  const auto m = num_vars();
  if (m < 1) throw std::invalid_argument("linear program has no variables");
  if (a_eq.rows() != b_eq.size() || (a_eq.rows() > 0 && a_eq.cols() != m)) {
    throw std::invalid_argument("equality rows inconsistent with variable count");
  }
  if (a_ub.rows() != b_ub.size() || (a_ub.rows() > 0 && a_ub.cols() != m)) {
    throw std::invalid_argument("inequality rows inconsistent with variable count");
  }
  if (lower.size() != m || upper.size() != m) {
    throw std::invalid_argument("bounds inconsistent with variable count");
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    if (!(lower(j) <= upper(j)) || lower(j) == kInf || upper(j) == -kInf) {
      throw std::invalid_argument("variable bounds require lo <= hi");
    }
  }
}

void LinearProgram::add_equality(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs) {
  a_eq.conservativeResize(a_eq.rows() + 1, num_vars());
  a_eq.row(a_eq.rows() - 1) = row;
  b_eq.conservativeResize(b_eq.size() + 1);
  b_eq(b_eq.size() - 1) = rhs;
}

void LinearProgram::add_inequality(const Eigen::Ref<const Eigen::RowVectorXd>& row, double rhs) {
  a_ub.conservativeResize(a_ub.rows() + 1, num_vars());
  a_ub.row(a_ub.rows() - 1) = row;
  b_ub.conservativeResize(b_ub.size() + 1);
  b_ub(b_ub.size() - 1) = rhs;
}

double max_violation(const LinearProgram& lp, const Eigen::VectorXd& y) {
  double v = 0.0;
  if (lp.a_eq.rows() > 0) v = std::max(v, (lp.a_eq * y - lp.b_eq).cwiseAbs().maxCoeff());
  if (lp.a_ub.rows() > 0) v = std::max(v, (lp.a_ub * y - lp.b_ub).maxCoeff());
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (std::isfinite(lp.lower(j))) v = std::max(v, lp.lower(j) - y(j));
    if (std::isfinite(lp.upper(j))) v = std::max(v, y(j) - lp.upper(j));
  }
  return v;
}

namespace {

// min c^T z + c_offset  s.t.  A z = b (b >= 0), z >= 0, with the map back
// to the original variables y = y_offset + T z[0:n_struct].
struct StandardForm {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  double c_offset{0.0};
  Eigen::VectorXd y_offset;
  Eigen::MatrixXd t;
  Eigen::Index n_struct{0};
  std::vector<Eigen::Index> initial_basic;  // per row, -1 when none
};

StandardForm to_standard_form(const LinearProgram& lp) {
  const auto n = lp.num_vars();
  StandardForm sf;
  sf.y_offset = Eigen::VectorXd::Zero(n);

  // Structural columns per original variable.
  std::vector<std::pair<Eigen::Index, double>> first(n);
  std::vector<Eigen::Index> second(n, -1);
  std::vector<Eigen::Index> boxed;
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const bool lo = std::isfinite(lp.lower(j));
    const bool hi = std::isfinite(lp.upper(j));
    if (lo) {
      sf.y_offset(j) = lp.lower(j);
      first[j] = {col++, 1.0};
      if (hi) boxed.push_back(j);
    } else if (hi) {
      sf.y_offset(j) = lp.upper(j);
      first[j] = {col++, -1.0};
    } else {
      first[j] = {col++, 1.0};
      second[j] = col++;
    }
  }
  sf.n_struct = col;
  sf.t = Eigen::MatrixXd::Zero(n, sf.n_struct);
  for (Eigen::Index j = 0; j < n; ++j) {
    sf.t(j, first[j].first) = first[j].second;
    if (second[j] >= 0) sf.t(j, second[j]) = -1.0;
  }

  const auto n_eq = lp.a_eq.rows();
  const auto n_ub = lp.a_ub.rows();
  const auto n_box = static_cast<Eigen::Index>(boxed.size());
  const auto m = n_eq + n_ub + n_box;
  const auto cols = sf.n_struct + n_ub + n_box;
  sf.a = Eigen::MatrixXd::Zero(m, cols);
  sf.b = Eigen::VectorXd::Zero(m);
  sf.initial_basic.assign(static_cast<std::size_t>(m), -1);

  if (n_eq > 0) {
    sf.a.block(0, 0, n_eq, sf.n_struct) = lp.a_eq * sf.t;
    sf.b.head(n_eq) = lp.b_eq - lp.a_eq * sf.y_offset;
  }
  if (n_ub > 0) {
    sf.a.block(n_eq, 0, n_ub, sf.n_struct) = lp.a_ub * sf.t;
    sf.b.segment(n_eq, n_ub) = lp.b_ub - lp.a_ub * sf.y_offset;
  }
  for (Eigen::Index r = 0; r < n_ub; ++r) {
    sf.a(n_eq + r, sf.n_struct + r) = 1.0;
    sf.initial_basic[static_cast<std::size_t>(n_eq + r)] = sf.n_struct + r;
  }
  for (Eigen::Index r = 0; r < n_box; ++r) {
    const auto j = boxed[static_cast<std::size_t>(r)];
    const auto row = n_eq + n_ub + r;
    sf.a(row, first[j].first) = 1.0;
    sf.a(row, sf.n_struct + n_ub + r) = 1.0;
    sf.b(row) = lp.upper(j) - lp.lower(j);
    sf.initial_basic[static_cast<std::size_t>(row)] = sf.n_struct + n_ub + r;
  }
  for (Eigen::Index r = 0; r < m; ++r) {
    if (sf.b(r) < 0.0) {
      sf.a.row(r) *= -1.0;
      sf.b(r) *= -1.0;
      sf.initial_basic[static_cast<std::size_t>(r)] = -1;
    }
  }

  sf.c = Eigen::VectorXd::Zero(cols);
  sf.c.head(sf.n_struct) = sf.t.transpose() * lp.c;
  sf.c_offset = lp.c.dot(sf.y_offset);
  return sf;
}

class Tableau {
 public:
  Tableau(const StandardForm& sf, const SimplexOptions& opt)
      : m_(sf.a.rows()), n_(sf.a.cols()), opt_(opt) {
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (sf.initial_basic[static_cast<std::size_t>(r)] < 0) ++n_art_;
    }
    rhs_ = n_ + n_art_;
    tab_.setZero(m_ + 1, rhs_ + 1);
    tab_.topLeftCorner(m_, n_) = sf.a;
    tab_.col(rhs_).head(m_) = sf.b;
    basis_.resize(static_cast<std::size_t>(m_));
    Eigen::Index art = n_;
    for (Eigen::Index r = 0; r < m_; ++r) {
      const auto ib = sf.initial_basic[static_cast<std::size_t>(r)];
      if (ib >= 0) {
        basis_[static_cast<std::size_t>(r)] = ib;
      } else {
        tab_(r, art) = 1.0;
        basis_[static_cast<std::size_t>(r)] = art++;
      }
    }
    cap_ = opt.max_iterations > 0 ? opt.max_iterations
                                  : static_cast<int>(50 * (m_ + n_ + n_art_));
  }

  /// Returns false if the phase-1 optimum is positive (infeasible).
  bool phase_one() {
    if (n_art_ == 0) return true;
    tab_.row(m_).setZero();
    tab_.row(m_).segment(n_, n_art_).setOnes();
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (is_artificial(basis_[static_cast<std::size_t>(r)])) tab_.row(m_) -= tab_.row(r);
    }
    if (!iterate(rhs_, true)) throw std::logic_error("phase one cannot be unbounded");
    const double infeasibility = -tab_(m_, rhs_);
    const double scale = std::max(1.0, tab_.col(rhs_).head(m_).cwiseAbs().maxCoeff());
    if (infeasibility > opt_.feasibility_tol * scale) return false;
    drive_out_artificials();
    return true;
  }

  /// Returns false if unbounded.
  bool phase_two(const Eigen::VectorXd& c) {
    tab_.row(m_).setZero();
    tab_.row(m_).head(n_) = c.transpose();
    for (Eigen::Index r = 0; r < m_; ++r) {
      const auto bv = basis_[static_cast<std::size_t>(r)];
      if (!is_artificial(bv) && c(bv) != 0.0) tab_.row(m_) -= c(bv) * tab_.row(r);
    }
    return iterate(n_);
  }

  Eigen::VectorXd primal() const {
    Eigen::VectorXd z = Eigen::VectorXd::Zero(n_);
    for (Eigen::Index r = 0; r < m_; ++r) {
      const auto bv = basis_[static_cast<std::size_t>(r)];
      if (!is_artificial(bv)) z(bv) = std::max(0.0, tab_(r, rhs_));
    }
    return z;
  }

  const std::vector<Eigen::Index>& basis() const { return basis_; }
  Eigen::Index num_cols() const { return n_; }
  int iterations() const { return iterations_; }
  bool is_artificial(Eigen::Index j) const { return j >= n_; }

 private:
  // Bland's rule over columns [0, eligible). Returns false when unbounded.
  // With `bounded`, a column without a usable pivot is skipped until the
  // next pivot: its negative reduced cost can only be rounding noise.
  bool iterate(Eigen::Index eligible, bool bounded = false) {
    constexpr double kOptTol = 1e-10;
    std::vector<char> skipped(static_cast<std::size_t>(eligible), 0);
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < eligible; ++j) {
        if (tab_(m_, j) < -kOptTol && !skipped[static_cast<std::size_t>(j)]) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      Eigen::Index leave = -1;
      double best = 0.0;
      for (Eigen::Index r = 0; r < m_; ++r) {
        const double a = tab_(r, enter);
        if (a <= opt_.pivot_tol) continue;
        const double ratio = tab_(r, rhs_) / a;
        if (leave < 0 || ratio < best - 1e-12 * std::max(1.0, std::abs(best))) {
          leave = r;
          best = ratio;
        } else if (std::abs(ratio - best) <= 1e-12 * std::max(1.0, std::abs(best)) &&
                   basis_[static_cast<std::size_t>(r)] <
                       basis_[static_cast<std::size_t>(leave)]) {
          leave = r;
        }
      }
      if (leave < 0) {
        if (!bounded) return false;
        skipped[static_cast<std::size_t>(enter)] = 1;
        continue;
      }
      if (++iterations_ > cap_) throw SimplexStalled();
      std::fill(skipped.begin(), skipped.end(), 0);
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index col) {
    tab_.row(r) /= tab_(r, col);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = tab_(i, col);
      if (f != 0.0) tab_.row(i) -= f * tab_.row(r);
    }
    tab_(r, col) = 1.0;
    basis_[static_cast<std::size_t>(r)] = col;
  }

  void drive_out_artificials() {
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[static_cast<std::size_t>(r)])) continue;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (std::abs(tab_(r, j)) > opt_.pivot_tol) {
          pivot(r, j);
          break;
        }
      }
      // A row with no structural entry is redundant; its artificial stays
      // basic at zero and never re-enters.
    }
  }

  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::Index n_art_{0};
  Eigen::Index rhs_{0};
  SimplexOptions opt_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> tab_;
  std::vector<Eigen::Index> basis_;
  int iterations_{0};
  int cap_{0};
};

}  // namespace

LpSolution simplex_solve(const LinearProgram& lp, const SimplexOptions& options) {
  lp.validate();
  const StandardForm sf = to_standard_form(lp);
  Tableau tab(sf, options);
  LpSolution out;
  if (!tab.phase_one()) {
    out.status = LpStatus::Infeasible;
    out.iterations = tab.iterations();
    return out;
  }
  if (!tab.phase_two(sf.c)) {
    out.status = LpStatus::Unbounded;
    out.iterations = tab.iterations();
    return out;
  }
  const Eigen::VectorXd z = tab.primal();
  out.status = LpStatus::Optimal;
  out.point = sf.y_offset + sf.t * z.head(sf.n_struct);
  out.value = lp.c.dot(out.point);
  out.iterations = tab.iterations();

  // Dual certificate: solve B^T y = c_B against the untouched standard form.
  const auto m = sf.a.rows();
  if (m > 0) {
    Eigen::MatrixXd basis_mat(m, m);
    Eigen::VectorXd c_b(m);
    for (Eigen::Index r = 0; r < m; ++r) {
      const auto bv = tab.basis()[static_cast<std::size_t>(r)];
      if (tab.is_artificial(bv)) {
        basis_mat.col(r) = Eigen::VectorXd::Unit(m, r);
        c_b(r) = 0.0;
      } else {
        basis_mat.col(r) = sf.a.col(bv);
        c_b(r) = sf.c(bv);
      }
    }
    const Eigen::VectorXd y = basis_mat.transpose().partialPivLu().solve(c_b);
    out.dual_value = sf.b.dot(y) + sf.c_offset;
    out.min_reduced_cost = (sf.c - sf.a.transpose() * y).minCoeff();
  } else {
    out.dual_value = out.value;
    out.min_reduced_cost = sf.c.size() > 0 ? sf.c.minCoeff() : 0.0;
  }
  return out;
}

LpSolution enumerate_vertices(const LinearProgram& lp, double tol) {
  lp.validate();
  const auto n = lp.num_vars();
  if (n > 8) throw std::invalid_argument("oracle scale exceeded");

  std::vector<Eigen::RowVectorXd> rows;
  std::vector<double> rhs;
  for (Eigen::Index r = 0; r < lp.a_eq.rows(); ++r) {
    rows.emplace_back(lp.a_eq.row(r));
    rhs.push_back(lp.b_eq(r));
  }
  for (Eigen::Index r = 0; r < lp.a_ub.rows(); ++r) {
    rows.emplace_back(lp.a_ub.row(r));
    rhs.push_back(lp.b_ub(r));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isfinite(lp.lower(j))) {
      rows.emplace_back(Eigen::RowVectorXd::Unit(n, j));
      rhs.push_back(lp.lower(j));
    }
    if (std::isfinite(lp.upper(j))) {
      rows.emplace_back(Eigen::RowVectorXd::Unit(n, j));
      rhs.push_back(lp.upper(j));
    }
  }
  const auto k = static_cast<Eigen::Index>(rows.size());
  LpSolution best;
  best.status = LpStatus::Infeasible;
  if (k < n) return best;

  double combos = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) combos = combos * static_cast<double>(k - i) / static_cast<double>(i + 1);
  if (combos > 5e6) throw std::invalid_argument("oracle scale exceeded");

  std::vector<Eigen::Index> pick(static_cast<std::size_t>(n));
  std::iota(pick.begin(), pick.end(), 0);
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd b(n);
  for (;;) {
    for (Eigen::Index i = 0; i < n; ++i) {
      m.row(i) = rows[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
      b(i) = rhs[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (lu.rank() == n) {
      const Eigen::VectorXd y = lu.solve(b);
      const double scale = std::max(1.0, y.cwiseAbs().maxCoeff());
      if (max_violation(lp, y) <= tol * scale) {
        const double value = lp.c.dot(y);
        if (best.status != LpStatus::Optimal || value < best.value) {
          best.status = LpStatus::Optimal;
          best.value = value;
          best.point = y;
        }
      }
    }
    // Next combination in lexicographic order.
    Eigen::Index i = n - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == k - n + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < n; ++j) {
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  if (best.status == LpStatus::Optimal) {
    best.dual_value = best.value;
  }
  return best;
}

}  // namespace bagbound::lp
