// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/sdp.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "koopid/error.hpp"

namespace koopid::sdp {

LmiBlock::LmiBlock(std::string name, int size)
    : name_(std::move(name)), size_(size), constant_(Matrix::Zero(size, size)) {
  KOOPID_CHECK(size > 0, ErrorCode::kDimension, "LmiBlock: size must be >= 1");
}

void LmiBlock::add_constant(int r, int c, double v) {
  constant_(r, c) += v;
  if (r != c) constant_(c, r) += v;
}

void LmiBlock::add_coefficient(int var, int r, int c, double v) {
  KOOPID_CHECK(r >= 0 && c >= 0 && r < size_ && c < size_ && var >= 0,
               ErrorCode::kDimension, "LmiBlock: coefficient out of range");
  if (v == 0.0) return;
  terms_.push_back({var, {{r, c, v}}});
  if (r != c) terms_.back().second.push_back({c, r, v});
  finalized_ = false;
}

const std::vector<std::pair<int, std::vector<Entry>>>& LmiBlock::terms() const {
  finalize();
  return terms_;
}

void LmiBlock::finalize() const {
  if (finalized_) return;
  std::map<int, std::map<std::pair<int, int>, double>> merged;
  for (const auto& [var, entries] : terms_) {
    for (const Entry& e : entries) merged[var][{e.row, e.col}] += e.value;
  }
  terms_.clear();
  for (const auto& [var, cells] : merged) {
    std::vector<Entry> entries;
    for (const auto& [rc, v] : cells) {
      if (v != 0.0) entries.push_back({rc.first, rc.second, v});
    }
    if (!entries.empty()) terms_.emplace_back(var, std::move(entries));
  }
  finalized_ = true;
}

Matrix LmiBlock::evaluate(const Vector& y) const {
  Matrix out = constant_;
  for (const auto& [var, entries] : terms()) {
    const double yi = y(var);
    for (const Entry& e : entries) out(e.row, e.col) += yi * e.value;
  }
  return out;
}

void Problem::write_text(std::ostream& os) const {
  os << "# koopid conic program: minimize c^T y s.t. F0 + sum_i y_i F_i >= 0\n";
  os << "vars " << num_vars << "\n";
  os << "blocks " << blocks.size() << "\n";
  for (const auto& b : blocks) os << "block " << b.name() << " " << b.size() << "\n";
  os << "objective";
  for (Eigen::Index i = 0; i < objective.size(); ++i) os << " " << objective(i);
  os << "\n# block var row col value (var -1 is F0; both triangles listed)\n";
  os.precision(17);
  for (size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    for (int r = 0; r < b.size(); ++r) {
      for (int c = 0; c < b.size(); ++c) {
        if (b.constant()(r, c) != 0.0) {
          os << k << " -1 " << r << " " << c << " " << b.constant()(r, c) << "\n";
        }
      }
    }
    for (const auto& [var, entries] : b.terms()) {
      for (const Entry& e : entries) {
        os << k << " " << var << " " << e.row << " " << e.col << " " << e.value
           << "\n";
      }
    }
  }
}

const char* status_name(Status s) {
  switch (s) {
    case Status::kOptimal: return "optimal";
    case Status::kInfeasible: return "infeasible";
    case Status::kMaxIterations: return "max-iterations";
    case Status::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

struct BlockState {
  Matrix X;
  Matrix S;
  Matrix S_inv;
};

double inner(const Matrix& A, const Matrix& B) {
  return (A.array() * B.array()).sum();
}

double inner_sparse(const std::vector<Entry>& entries, const Matrix& W) {
  double acc = 0.0;
  for (const Entry& e : entries) acc += e.value * W(e.row, e.col);
  return acc;
}

Matrix sym(const Matrix& A) { return 0.5 * (A + A.transpose()); }

// Largest alpha in (0, cap] keeping X + alpha * D positive definite.
double max_step(const Matrix& X, const Matrix& D, double cap) {
  Eigen::LLT<Matrix> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix L_inv_D =
      llt.matrixL().solve(llt.matrixL().solve(D).transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym(L_inv_D), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return cap;
  return std::min(cap, -1.0 / lmin);
}

class Solver {
 public:
  Solver(const Problem& p, const Settings& s) : p_(p), s_(s) {}

  Result run();

 private:
  void scale_problem();
  void initialize();
  void compute_residuals();
  bool build_schur();
  Vector rhs(const std::vector<Matrix>& K) const;
  void direction(const Vector& dy_rhs, const std::vector<Matrix>& K, Vector& dy,
                 std::vector<Matrix>& dS, std::vector<Matrix>& dX) const;

  const Problem& p_;
  Settings s_;
  int m_ = 0;
  Vector c_;
  Vector var_scale_;  // y = var_scale .* y_scaled
  std::vector<std::vector<std::pair<int, std::vector<Entry>>>> terms_;
  std::vector<Matrix> F0_;

  Vector y_;
  std::vector<BlockState> st_;
  std::vector<Matrix> R_;  // F(y) - S
  Vector r_;               // c - A(X)
  Vector ax_abs_;          // sum of |terms| in each A_i(X)
  Matrix M_;
  Eigen::LLT<Matrix> M_fact_;
  double norm_c_ = 0.0;
  double norm_F0_ = 0.0;
  int total_size_ = 0;
  double schur_reg_ = 0.0;
};

void Solver::scale_problem() {
  m_ = p_.num_vars;
  Vector norms = Vector::Zero(m_);
  for (const auto& b : p_.blocks) {
    for (const auto& [var, entries] : b.terms()) {
      for (const Entry& e : entries) norms(var) += e.value * e.value;
    }
  }
  var_scale_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    KOOPID_CHECK(norms(i) > 0.0, ErrorCode::kInvalidInput,
                 "sdp: variable " + std::to_string(i) +
                     " does not appear in any constraint");
    var_scale_(i) = 1.0 / std::sqrt(norms(i));
  }
  c_ = p_.objective.cwiseProduct(var_scale_);
  terms_.clear();
  F0_.clear();
  for (const auto& b : p_.blocks) {
    auto t = b.terms();
    for (auto& [var, entries] : t) {
      for (Entry& e : entries) e.value *= var_scale_(var);
    }
    terms_.push_back(std::move(t));
    F0_.push_back(b.constant());
  }
}

void Solver::initialize() {
  const size_t nb = p_.blocks.size();
  st_.assign(nb, {});
  R_.assign(nb, Matrix());
  y_ = Vector::Zero(m_);
  total_size_ = 0;
  norm_c_ = c_.norm();
  norm_F0_ = 0.0;
  for (size_t b = 0; b < nb; ++b) {
    const int n = p_.blocks[b].size();
    total_size_ += n;
    norm_F0_ += F0_[b].squaredNorm();
    double max_ratio = 0.0;
    double max_norm = F0_[b].norm();
    for (const auto& [var, entries] : terms_[b]) {
      double fn = 0.0;
      for (const Entry& e : entries) fn += e.value * e.value;
      fn = std::sqrt(fn);
      max_ratio = std::max(max_ratio, (1.0 + std::abs(c_(var))) / (1.0 + fn));
      max_norm = std::max(max_norm, fn);
    }
    const double sq = std::sqrt(static_cast<double>(n));
    const double xi = std::max({10.0, sq, sq * max_ratio});
    const double eta = std::max({10.0, sq, max_norm});
    st_[b].X = xi * Matrix::Identity(n, n);
    st_[b].S = eta * Matrix::Identity(n, n);
  }
  norm_F0_ = std::sqrt(norm_F0_);
}

void Solver::compute_residuals() {
  r_ = c_;
  ax_abs_ = Vector::Zero(m_);
  for (size_t b = 0; b < st_.size(); ++b) {
    Matrix F = F0_[b];
    for (const auto& [var, entries] : terms_[b]) {
      r_(var) -= inner_sparse(entries, st_[b].X);
      for (const Entry& e : entries) {
        ax_abs_(var) += std::abs(e.value * st_[b].X(e.row, e.col));
      }
      for (const Entry& e : entries) F(e.row, e.col) += y_(var) * e.value;
    }
    R_[b] = F - st_[b].S;
  }
}

bool Solver::build_schur() {
  M_.setZero(m_, m_);
  for (size_t b = 0; b < st_.size(); ++b) {
    const Matrix& X = st_[b].X;
    const Matrix& Si = st_[b].S_inv;
    const auto& terms = terms_[b];
    const int n = p_.blocks[b].size();
    Matrix Y(n, n);
    for (size_t ii = 0; ii < terms.size(); ++ii) {
      const auto& [vi, ei] = terms[ii];
      // Y = X F_i S^-1
      Y.setZero();
      for (const Entry& e : ei) {
        Y.noalias() += e.value * X.col(e.row) * Si.row(e.col);
      }
      for (size_t jj = ii; jj < terms.size(); ++jj) {
        const auto& [vj, ej] = terms[jj];
        double acc = 0.0;
        for (const Entry& e : ej) acc += e.value * Y(e.col, e.row);
        const int lo = std::min(vi, vj);
        const int hi = std::max(vi, vj);
        M_(lo, hi) += acc;
      }
    }
  }
  M_.triangularView<Eigen::StrictlyLower>() =
      M_.triangularView<Eigen::StrictlyUpper>().transpose();
  schur_reg_ = 0.0;
  M_fact_.compute(M_);
  if (M_fact_.info() == Eigen::Success) return true;
  // Near the optimum M can lose definiteness to rounding; shift it slightly.
  const double dmax = M_.diagonal().cwiseAbs().maxCoeff();
  for (double reg = 1e-14; reg <= 1e-6; reg *= 100.0) {
    Matrix Mr = M_;
    Mr.diagonal().array() += reg * dmax;
    M_fact_.compute(Mr);
    if (M_fact_.info() == Eigen::Success) {
      schur_reg_ = reg;
      return true;
    }
  }
  return false;
}

Vector Solver::rhs(const std::vector<Matrix>& K) const {
  Vector out = -r_;
  for (size_t b = 0; b < st_.size(); ++b) {
    const Matrix W = K[b] - st_[b].X * R_[b] * st_[b].S_inv;
    for (const auto& [var, entries] : terms_[b]) out(var) += inner_sparse(entries, W);
  }
  return out;
}

void Solver::direction(const Vector& dy_rhs, const std::vector<Matrix>& K,
                       Vector& dy, std::vector<Matrix>& dS,
                       std::vector<Matrix>& dX) const {
  dy = M_fact_.solve(dy_rhs);
  dS.resize(st_.size());
  dX.resize(st_.size());
  const auto assemble = [&] {
    for (size_t b = 0; b < st_.size(); ++b) {
      dS[b] = R_[b];
      for (const auto& [var, entries] : terms_[b]) {
        for (const Entry& e : entries) dS[b](e.row, e.col) += dy(var) * e.value;
      }
      dX[b] = sym(K[b] - st_[b].X * dS[b] * st_[b].S_inv);
    }
  };
  assemble();
  // Iterative refinement on the dual residual condition A(dX) = r, measured
  // with the operator itself rather than the (ill-conditioned) Schur matrix.
  double prev = std::numeric_limits<double>::infinity();
  for (int round = 0; round < 4; ++round) {
    Vector e = -r_;
    for (size_t b = 0; b < st_.size(); ++b) {
      for (const auto& [var, entries] : terms_[b]) {
        e(var) += inner_sparse(entries, dX[b]);
      }
    }
    const double en = e.norm();
    if (en <= 1e-14 * (1.0 + r_.norm()) || en >= 0.5 * prev) break;
    prev = en;
    dy += M_fact_.solve(e);
    assemble();
  }
}

Result Solver::run() {
  scale_problem();
  initialize();
  Result res;
  const size_t nb = st_.size();
  std::vector<Matrix> K(nb), dS(nb), dX(nb), dS_a(nb), dX_a(nb);
  Vector dy, dy_a;
  const double x_scale0 = [&] {
    double t = 0.0;
    for (const auto& s : st_) t += s.X.trace();
    return t;
  }();

  // Best iterate seen so far, returned when the method stalls.
  struct Best {
    double merit = std::numeric_limits<double>::infinity();
    Vector y;
    std::vector<BlockState> st;
    Result stats;
  } best;

  Status stop = Status::kMaxIterations;
  std::string stop_message;
  for (int it = 0; it <= s_.max_iterations; ++it) {
    compute_residuals();
    double gap = 0.0;
    double f0x = 0.0;
    double trace_x = 0.0;
    double R_norm = 0.0;
    for (size_t b = 0; b < nb; ++b) {
      gap += inner(st_[b].X, st_[b].S);
      f0x += inner(F0_[b], st_[b].X);
      trace_x += st_[b].X.trace();
      R_norm += R_[b].squaredNorm();
    }
    R_norm = std::sqrt(R_norm);
    const double pobj = c_.dot(y_);
    const double dobj = -f0x;
    // <X, S> equals pobj - dobj only at feasible points; take the larger.
    const double rel_gap = std::max(gap, std::abs(pobj - dobj)) /
                           (1.0 + std::abs(pobj) + std::abs(dobj));
    const double pinf = R_norm / (1.0 + norm_F0_);
    // Relative to the magnitude of the summed terms: with large X the
    // residual cannot be resolved below rounding of A(X) itself.
    const double dinf = r_.norm() / (1.0 + norm_c_ + ax_abs_.norm());

    res.iterations = it;
    res.gap = rel_gap;
    res.primal_objective = pobj;
    res.dual_objective = dobj;
    res.primal_infeasibility = pinf;
    res.dual_infeasibility = dinf;
    if (s_.verbose) {
      std::fprintf(stderr,
                   "%3d pobj % .8e dobj % .8e gap %.2e pinf %.2e dinf %.2e "
                   "trX %.2e\n",
                   it, pobj, dobj, rel_gap, pinf, dinf, trace_x);
    }
    const double merit = std::max({rel_gap / s_.gap_tol,
                                   pinf / s_.feasibility_tol,
                                   dinf / s_.feasibility_tol});
    if (merit < best.merit) {
      best.merit = merit;
      best.y = y_;
      best.st = st_;
      best.stats = res;
    }
    if (merit <= 1.0) {
      stop = Status::kOptimal;
      break;
    }
    // Certificate of LMI infeasibility: X >= 0, A(X) ~ 0, <F0, X> < 0.
    // For a feasible y0, <F0, X> >= -y0^T A(X); the ray must beat that
    // bound at well beyond the scale of the current iterate.
    if (trace_x > 1e8 * x_scale0) {
      const double ax_norm = (c_ - r_).norm();
      const double ax = ax_norm / trace_x;
      const double explainable = 1e2 * (1.0 + y_.norm()) * ax_norm;
      if (ax < 1e-8 && f0x / trace_x < -1e-10 && -f0x > explainable) {
        stop = Status::kInfeasible;
        stop_message = "LMI system infeasible: dual ray with <F0,X>/tr(X) = " +
                       std::to_string(f0x / trace_x);
        break;
      }
    }
    if (it == s_.max_iterations) {
      stop_message = "iteration limit reached";
      break;
    }

    bool ok = true;
    for (size_t b = 0; b < nb; ++b) {
      Eigen::LLT<Matrix> llt(st_[b].S);
      if (llt.info() != Eigen::Success) { ok = false; break; }
      st_[b].S_inv = sym(
          llt.solve(Matrix::Identity(st_[b].S.rows(), st_[b].S.cols())));
    }
    if (!ok) {
      stop = Status::kNumericalFailure;
      stop_message = "slack lost positive definiteness";
      break;
    }
    if (!build_schur()) {
      stop = Status::kNumericalFailure;
      stop_message = "Schur complement factorization failed";
      break;
    }
    const double mu = gap / total_size_;

    // Predictor.
    for (size_t b = 0; b < nb; ++b) K[b] = -st_[b].X;
    direction(rhs(K), K, dy_a, dS_a, dX_a);
    double ap = 1.0;
    double ad = 1.0;
    for (size_t b = 0; b < nb; ++b) {
      ap = std::min(ap, max_step(st_[b].X, dX_a[b], 1.0));
      ad = std::min(ad, max_step(st_[b].S, dS_a[b], 1.0));
    }
    double gap_aff = 0.0;
    for (size_t b = 0; b < nb; ++b) {
      gap_aff += inner(st_[b].X + ap * dX_a[b], st_[b].S + ad * dS_a[b]);
    }
    double sigma = std::pow(std::max(gap_aff, 0.0) / gap, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    for (size_t b = 0; b < nb; ++b) {
      K[b] = sigma * mu * st_[b].S_inv - st_[b].X -
             dX_a[b] * dS_a[b] * st_[b].S_inv;
    }
    direction(rhs(K), K, dy, dS, dX);
    ap = 1.0;
    ad = 1.0;
    for (size_t b = 0; b < nb; ++b) {
      ap = std::min(ap, max_step(st_[b].X, dX[b], 1.0 / s_.step_fraction));
      ad = std::min(ad, max_step(st_[b].S, dS[b], 1.0 / s_.step_fraction));
    }
    ap = std::min(ap * s_.step_fraction, 1.0);
    ad = std::min(ad * s_.step_fraction, 1.0);

    // Back off until both iterates factor; rounding can defeat max_step.
    std::vector<BlockState> next(nb);
    bool accepted = false;
    for (int tries = 0; tries < 30 && !accepted; ++tries) {
      accepted = true;
      for (size_t b = 0; b < nb && accepted; ++b) {
        next[b].X = sym(st_[b].X + ap * dX[b]);
        next[b].S = sym(st_[b].S + ad * dS[b]);
        accepted = Eigen::LLT<Matrix>(next[b].X).info() == Eigen::Success &&
                   Eigen::LLT<Matrix>(next[b].S).info() == Eigen::Success;
      }
      if (!accepted) {
        ap *= 0.5;
        ad *= 0.5;
      }
    }
    if (!accepted || (ap < 1e-12 && ad < 1e-12)) {
      stop = Status::kNumericalFailure;
      stop_message = "step length collapsed";
      break;
    }
    if (s_.verbose) {
      std::fprintf(stderr, "    step p %.2e d %.2e sigma %.2e reg %.1e\n", ap, ad,
                   sigma, schur_reg_);
    }
    y_ += ad * dy;
    for (size_t b = 0; b < nb; ++b) {
      st_[b].X = std::move(next[b].X);
      st_[b].S = std::move(next[b].S);
    }
  }

  if (stop != Status::kOptimal && stop != Status::kInfeasible &&
      best.y.size() == m_) {
    y_ = best.y;
    st_ = best.st;
    const std::string m = stop_message;
    res = best.stats;
    stop_message = m;
  }
  res.status = stop;
  res.message = stop_message;
  res.y = y_.cwiseProduct(var_scale_);
  res.dual.clear();
  res.slack.clear();
  for (size_t b = 0; b < nb; ++b) {
    res.dual.push_back(st_[b].X);
    res.slack.push_back(p_.blocks[b].evaluate(res.y));
  }
  return res;
}

}  // namespace

Result solve(const Problem& problem, const Settings& settings) {
  KOOPID_CHECK(problem.num_vars > 0, ErrorCode::kInvalidInput,
               "sdp: problem has no variables");
  KOOPID_CHECK(problem.objective.size() == problem.num_vars,
               ErrorCode::kDimension, "sdp: objective length mismatch");
  KOOPID_CHECK(!problem.blocks.empty(), ErrorCode::kInvalidInput,
               "sdp: problem has no constraints");
  Solver solver(problem, settings);
  return solver.run();
}

}  // namespace koopid::sdp
