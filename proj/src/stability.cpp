// Copyright 2026 The koopid Authors
// SPDX-License-Identifier: Apache-2.0

#include "koopid/stability.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>

#include "koopid/error.hpp"

namespace koopid {

void StabilityConfig::validate() const {
  KOOPID_CHECK(rho_bar > 0.0 && rho_bar <= 1.0, ErrorCode::kInvalidInput,
               "stability: rho_bar must lie in (0, 1]");
  KOOPID_CHECK(!epsilon || *epsilon > 0.0, ErrorCode::kInvalidInput,
               "stability: epsilon must be positive");
  KOOPID_CHECK(!strict_margin || *strict_margin > 0.0, ErrorCode::kInvalidInput,
               "stability: strict margin must be positive");
  KOOPID_CHECK(feasibility_tol > 0.0 && gap_tol > 0.0 && max_iterations > 0,
               ErrorCode::kInvalidInput, "stability: bad solver tolerances");
}

double StabilitySolution::min_margin() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& c : margins) m = std::min(m, c.value);
  return m;
}

double auto_epsilon(const GramPair& forward, int q, double pinv_tol) {
  KOOPID_CHECK(q > 0, ErrorCode::kInvalidInput, "epsilon: no snapshots");
  // (Psi^T (Psi Psi^T)^+)^T (Psi^T (Psi Psi^T)^+) = (Psi Psi^T)^+
  const Matrix Hq = forward.H * static_cast<double>(q);
  const double n = spectral_norm(pinv(Hq, pinv_tol));
  KOOPID_CHECK(std::isfinite(n) && n > 0.0, ErrorCode::kNumeric,
               "epsilon: snapshot matrix has no nonzero singular value");
  return std::sqrt(n);
}

namespace {

class VarLayout {
 public:
  int scalar() { return next_++; }

  // Full r x c matrix, row-major.
  struct Full {
    int base, rows, cols;
    int operator()(int i, int j) const { return base + i * cols + j; }
  };
  Full full(int r, int c) {
    Full f{next_, r, c};
    next_ += r * c;
    return f;
  }

  // Symmetric n x n matrix, packed upper triangle.
  struct Sym {
    int base, n;
    int operator()(int i, int j) const {
      if (i > j) std::swap(i, j);
      return base + i * n - i * (i - 1) / 2 + (j - i);
    }
  };
  Sym sym(int n) {
    Sym s{next_, n};
    next_ += n * (n + 1) / 2;
    return s;
  }

  int count() const { return next_; }

 private:
  int next_ = 0;
};

void shift(sdp::LmiBlock& b, double mu) {
  for (int i = 0; i < b.size(); ++i) b.add_constant(i, i, -mu);
}

// S >= mu 1 for a symmetric matrix variable, with S - floor 1 in the block.
sdp::LmiBlock sym_floor(const std::string& name, const VarLayout::Sym& S,
                        double floor, double mu) {
  sdp::LmiBlock b(name, S.n);
  for (int i = 0; i < S.n; ++i) {
    for (int j = i; j < S.n; ++j) b.add_coefficient(S(i, j), i, j, 1.0);
  }
  shift(b, floor + mu);
  return b;
}

// [[W, E^T], [E, s 1]] >= mu 1 with E = U_A P - X  |  U_B - Bv.
sdp::LmiBlock cost_block(const std::string& name, const Matrix& U, int pt,
                         const VarLayout::Sym& W, const VarLayout::Sym& P,
                         const VarLayout::Full& X, const VarLayout::Full& Bv,
                         int s, double mu) {
  const int p = static_cast<int>(U.cols());
  const int pu = p - pt;
  sdp::LmiBlock b(name, p + pt);
  for (int i = 0; i < p; ++i) {
    for (int j = i; j < p; ++j) b.add_coefficient(W(i, j), i, j, 1.0);
  }
  for (int r = 0; r < pt; ++r) {
    b.add_coefficient(s, p + r, p + r, 1.0);
    for (int c = 0; c < pt; ++c) {
      for (int k = 0; k < pt; ++k) {
        const double u = U(r, k);
        if (u != 0.0) b.add_coefficient(P(k, c), p + r, c, u);
      }
      b.add_coefficient(X(r, c), p + r, c, -1.0);
    }
    for (int c = 0; c < pu; ++c) {
      b.add_constant(p + r, pt + c, U(r, pt + c));
      b.add_coefficient(Bv(r, c), p + r, pt + c, -1.0);
    }
  }
  shift(b, mu);
  return b;
}

// 1 - mu - tr W >= 0
sdp::LmiBlock trace_block(const std::string& name, const VarLayout::Sym& W,
                          double mu) {
  sdp::LmiBlock b(name, 1);
  b.add_constant(0, 0, 1.0 - mu);
  for (int i = 0; i < W.n; ++i) b.add_coefficient(W(i, i), 0, 0, -1.0);
  return b;
}

// [[rho P, X], [X^T, rho P]] >= mu 1
sdp::LmiBlock forward_stability_block(const VarLayout::Sym& P,
                                      const VarLayout::Full& X, double rho,
                                      double mu) {
  const int n = P.n;
  sdp::LmiBlock b("forward-stability", 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      b.add_coefficient(P(i, j), i, j, rho);
      b.add_coefficient(P(i, j), n + i, n + j, rho);
    }
    for (int j = 0; j < n; ++j) b.add_coefficient(X(i, j), i, n + j, 1.0);
  }
  shift(b, mu);
  return b;
}

// rho X + rho X^T - 2 P >= mu 1
sdp::LmiBlock backward_stability_block(const VarLayout::Sym& P,
                                       const VarLayout::Full& X, double rho,
                                       double mu) {
  const int n = P.n;
  sdp::LmiBlock b("backward-stability", n);
  for (int i = 0; i < n; ++i) {
    b.add_coefficient(X(i, i), i, i, 2.0 * rho);
    b.add_coefficient(P(i, i), i, i, -2.0);
    for (int j = i + 1; j < n; ++j) {
      b.add_coefficient(X(i, j), i, j, rho);
      b.add_coefficient(X(j, i), i, j, rho);
      b.add_coefficient(P(i, j), i, j, -2.0);
    }
  }
  shift(b, mu);
  return b;
}

struct Layout {
  VarLayout v;
  int gamma = -1, nu = -1;
  VarLayout::Full Xf{}, Bff{}, Xb{}, Bbb{};
  VarLayout::Sym P{}, Z{}, V{};
};

void check_grams(const GramPair& g, int pt, int pu, Direction d) {
  KOOPID_CHECK(g.direction == d, ErrorCode::kInvalidInput,
               std::string("stability: expected ") + direction_name(d) +
                   " Gram pair");
  KOOPID_CHECK(pt > 0 && pu >= 0 && g.G.rows() == pt && g.G.cols() == pt + pu &&
                   g.H.rows() == pt + pu && g.H.cols() == pt + pu,
               ErrorCode::kDimension, "stability: Gram dimensions");
  KOOPID_CHECK(g.G.allFinite() && g.H.allFinite(), ErrorCode::kNumeric,
               "stability: non-finite Gram matrices");
}

Layout make_layout(int pt, int pu, bool combined) {
  Layout L;
  const int p = pt + pu;
  L.gamma = L.v.scalar();
  L.Xf = L.v.full(pt, pt);
  L.Bff = L.v.full(pt, pu);
  L.P = L.v.sym(pt);
  L.Z = L.v.sym(p);
  if (combined) {
    L.nu = L.v.scalar();
    L.Xb = L.v.full(pt, pt);
    L.Bbb = L.v.full(pt, pu);
    L.V = L.v.sym(p);
  }
  return L;
}

sdp::Problem assemble(const Layout& L, const GramPair& gf, const GramPair* gb,
                      int pt, double epsilon, double mu, double rho) {
  sdp::Problem prob;
  prob.num_vars = L.v.count();
  prob.objective = Vector::Zero(prob.num_vars);
  prob.objective(L.gamma) = 1.0;

  const Matrix Uf = gf.G * pinv(gf.H);
  prob.blocks.push_back(
      cost_block("forward-cost", Uf, pt, L.Z, L.P, L.Xf, L.Bff, L.gamma, mu));
  prob.blocks.push_back(trace_block("forward-trace", L.Z, mu));
  prob.blocks.push_back(sym_floor("forward-slack", L.Z, 0.0, mu));
  prob.blocks.push_back(sym_floor("lyapunov-floor", L.P, epsilon, mu));
  prob.blocks.push_back(forward_stability_block(L.P, L.Xf, rho, mu));

  if (gb != nullptr) {
    prob.objective(L.nu) = 1.0;
    const Matrix Ub = gb->G * pinv(gb->H);
    prob.blocks.push_back(
        cost_block("backward-cost", Ub, pt, L.V, L.P, L.Xb, L.Bbb, L.nu, mu));
    prob.blocks.push_back(trace_block("backward-trace", L.V, mu));
    prob.blocks.push_back(sym_floor("backward-slack", L.V, 0.0, mu));
    prob.blocks.push_back(backward_stability_block(L.P, L.Xb, rho, mu));
  }
  return prob;
}

Matrix read_full(const Vector& y, const VarLayout::Full& f) {
  Matrix M(f.rows, f.cols);
  for (int i = 0; i < f.rows; ++i) {
    for (int j = 0; j < f.cols; ++j) M(i, j) = y(f(i, j));
  }
  return M;
}

Matrix read_sym(const Vector& y, const VarLayout::Sym& s) {
  Matrix M(s.n, s.n);
  for (int i = 0; i < s.n; ++i) {
    for (int j = 0; j < s.n; ++j) M(i, j) = y(s(i, j));
  }
  return M;
}

// A = X P^{-1} by a linear solve against symmetric positive definite P.
Matrix recover(const Matrix& X, const Matrix& P, const char* which) {
  Eigen::LLT<Matrix> llt(P);
  KOOPID_CHECK(llt.info() == Eigen::Success, ErrorCode::kNumeric,
               std::string("stability: P is not positive definite while "
                           "recovering ") + which);
  const Matrix A = llt.solve(X.transpose()).transpose();
  const double res = (X - A * P).norm();
  const double scale = std::max(X.norm(), std::numeric_limits<double>::min());
  KOOPID_CHECK(A.allFinite() && res <= 1e-8 * scale, ErrorCode::kNumeric,
               std::string("stability: recovery residual too large for ") +
                   which + " (" + std::to_string(res / scale) + ")");
  return A;
}

double resolve_mu(const GramPair& gf, const StabilityConfig& cfg) {
  if (cfg.strict_margin) return *cfg.strict_margin;
  // Z >= mu 1 and tr Z <= 1 - mu need (p + 1) mu <= 1; stay well inside.
  const double cap = 1e-3 / static_cast<double>(gf.H.rows() + 1);
  return std::min(1e-7 * std::max(1.0, spectral_norm(gf.H)), cap);
}

StabilitySolution run(const GramPair& gf, const GramPair* gb, int pt, int pu,
                      double epsilon, const StabilityConfig& cfg) {
  cfg.validate();
  KOOPID_CHECK(std::isfinite(epsilon) && epsilon > 0.0, ErrorCode::kInvalidInput,
               "stability: epsilon must be positive");
  check_grams(gf, pt, pu, Direction::kForward);
  if (gb != nullptr) check_grams(*gb, pt, pu, Direction::kBackward);

  const double mu = resolve_mu(gf, cfg);
  const Layout L = make_layout(pt, pu, gb != nullptr);
  const sdp::Problem prob = assemble(L, gf, gb, pt, epsilon, mu, cfg.rho_bar);

  if (!cfg.dump_path.empty()) {
    std::ofstream os(cfg.dump_path);
    KOOPID_CHECK(os.good(), ErrorCode::kIo,
                 "stability: cannot open dump file " + cfg.dump_path);
    prob.write_text(os);
  }

  sdp::Settings st;
  st.feasibility_tol = cfg.feasibility_tol;
  st.gap_tol = cfg.gap_tol;
  st.max_iterations = cfg.max_iterations;
  st.verbose = cfg.verbose;

  const auto t0 = std::chrono::steady_clock::now();
  const sdp::Result res = sdp::solve(prob, st);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  if (res.status == sdp::Status::kInfeasible) {
    throw Error(ErrorCode::kInfeasible,
                "stability: problem infeasible (" + res.message + ")");
  }
  if (res.status != sdp::Status::kOptimal) {
    // Accept a stalled run only if it is close to optimal.
    const double loose = 1e3;
    const bool near = res.primal_infeasibility <= loose * cfg.feasibility_tol &&
                      res.dual_infeasibility <= loose * cfg.feasibility_tol &&
                      res.gap <= loose * cfg.gap_tol;
    if (!near) {
      throw Error(ErrorCode::kSolverFailure,
                  std::string("stability: solver ") + sdp::status_name(res.status) +
                      " after " + std::to_string(res.iterations) +
                      " iterations (pinf " +
                      std::to_string(res.primal_infeasibility) + ", dinf " +
                      std::to_string(res.dual_infeasibility) + ", gap " +
                      std::to_string(res.gap) + "): " + res.message);
    }
  }

  StabilitySolution sol;
  sol.combined = gb != nullptr;
  sol.epsilon = epsilon;
  sol.strict_margin = mu;
  sol.solver_status = res.status == sdp::Status::kOptimal ? "optimal" : "inaccurate";
  sol.iterations = res.iterations;
  sol.gap = res.gap;
  sol.solve_seconds = secs;

  const Vector& y = res.y;
  sol.gamma = y(L.gamma);
  sol.X_f = read_full(y, L.Xf);
  sol.B_ff = read_full(y, L.Bff);
  sol.P = read_sym(y, L.P);
  sol.A_ff = recover(sol.X_f, sol.P, "A_ff");
  if (sol.combined) {
    sol.nu = y(L.nu);
    sol.X_b = read_full(y, L.Xb);
    sol.B_bb = read_full(y, L.Bbb);
    sol.A_bb = recover(sol.X_b, sol.P, "A_bb");
  }

  for (std::size_t i = 0; i < prob.blocks.size(); ++i) {
    const Matrix F = prob.blocks[i].evaluate(y);
    // Report the margin of the unshifted left-hand side.
    const double shift_back = prob.blocks[i].name().find("trace") !=
                                      std::string::npos
                                  ? 0.0
                                  : mu;
    sol.margins.push_back({prob.blocks[i].name(),
                           lambda_min_sym(F) + shift_back});
  }

  sol.forward_lmi_margin = check_forward_lmi(sol.A_ff, sol.P, cfg.rho_bar);
  if (sol.combined) {
    const BackwardMargins bm = check_backward_lmi(sol.A_bb, sol.P, cfg.rho_bar);
    sol.backward_quadratic_margin = bm.quadratic;
    sol.backward_linearized_margin = bm.linearized;
  }
  return sol;
}

}  // namespace

sdp::Problem build_forward_as_problem(const GramPair& gf, int p_theta,
                                      int p_upsilon, double epsilon, double mu,
                                      const StabilityConfig& cfg) {
  check_grams(gf, p_theta, p_upsilon, Direction::kForward);
  const Layout L = make_layout(p_theta, p_upsilon, false);
  return assemble(L, gf, nullptr, p_theta, epsilon, mu, cfg.rho_bar);
}

sdp::Problem build_combined_problem(const GramPair& gf, const GramPair& gb,
                                    int p_theta, int p_upsilon, double epsilon,
                                    double mu, const StabilityConfig& cfg) {
  check_grams(gf, p_theta, p_upsilon, Direction::kForward);
  check_grams(gb, p_theta, p_upsilon, Direction::kBackward);
  const Layout L = make_layout(p_theta, p_upsilon, true);
  return assemble(L, gf, &gb, p_theta, epsilon, mu, cfg.rho_bar);
}

StabilitySolution solve_forward_as(const GramPair& gf, int p_theta,
                                   int p_upsilon, double epsilon,
                                   const StabilityConfig& cfg) {
  return run(gf, nullptr, p_theta, p_upsilon, epsilon, cfg);
}

StabilitySolution solve_combined(const GramPair& gf, const GramPair& gb,
                                 int p_theta, int p_upsilon, double epsilon,
                                 const StabilityConfig& cfg) {
  return run(gf, &gb, p_theta, p_upsilon, epsilon, cfg);
}

namespace {

void check_pair(const Matrix& A, const Matrix& P, double rho) {
  KOOPID_CHECK(A.rows() == A.cols() && P.rows() == P.cols() &&
                   A.rows() == P.rows(),
               ErrorCode::kDimension, "lmi check: A and P must be square and equal size");
  KOOPID_CHECK(is_symmetric(P), ErrorCode::kInvalidInput,
               "lmi check: P must be symmetric");
  KOOPID_CHECK(rho > 0.0, ErrorCode::kInvalidInput, "lmi check: rho must be positive");
}

}  // namespace

double check_forward_lmi(const Matrix& A, const Matrix& P, double rho_bar) {
  check_pair(A, P, rho_bar);
  return lambda_max_sym(A * P * A.transpose() - rho_bar * rho_bar * P);
}

BackwardMargins check_backward_lmi(const Matrix& A_bb, const Matrix& P,
                                   double rho_bar) {
  check_pair(A_bb, P, rho_bar);
  BackwardMargins m;
  m.quadratic = lambda_min_sym(A_bb * P * A_bb.transpose() -
                               P / (rho_bar * rho_bar));
  // Same form as the SDP constraint with X_b = A_bb P.
  m.linearized = lambda_min_sym(rho_bar * A_bb * P +
                                rho_bar * P * A_bb.transpose() - 2.0 * P);
  return m;
}

}  // namespace koopid
