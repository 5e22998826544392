#include "rsrrr/admm.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace rsrrr {

Problem::Problem(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() < 1) throw DimensionError("Problem: design has no rows");
  if (x_.cols() < 1 || y_.cols() < 1) throw DimensionError("Problem: empty design or response");
  if (x_.rows() != y_.rows()) {
    throw DimensionError("Problem: X is " + shape_string(x_) + " but Y is " + shape_string(y_));
  }
  require_finite(x_, "X");
  require_finite(y_, "Y");
}

bool Problem::is_standardized(double tol) const {
  return std::abs(x_.cwiseAbs().maxCoeff() - 1.0) <= tol;
}

Problem Problem::rows(const std::vector<Eigen::Index>& idx) const {
  return Problem(x_(idx, Eigen::all), y_(idx, Eigen::all));
}

void Hyperparams::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be finite and >= 0");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be positive");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1");
}

AdmmState AdmmState::zeros(const Problem& problem) {
  const auto n = problem.n(), p = problem.p(), q = problem.q();
  AdmmState s;
  s.A = Matrix::Zero(p, q);
  s.Z = Matrix::Zero(p, q);
  s.W = Matrix::Zero(p, q);
  s.D = Matrix::Zero(n, q);
  s.B_D = Matrix::Zero(n, q);
  s.B_Z = Matrix::Zero(p, q);
  s.B_W = Matrix::Zero(p, q);
  return s;
}

NormalSolver::NormalSolver(const Matrix& x) : dim_(x.cols()) {
  require_finite(x, "X");
  Matrix gram = Matrix::Identity(dim_, dim_) * 2.0;
  gram.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  llt_.compute(gram);
  if (llt_.info() != Eigen::Success) {
    throw NumericalError("Cholesky of X^T X + 2I failed for X " + shape_string(x));
  }
}

Matrix NormalSolver::solve(const Matrix& rhs) const {
  if (rhs.rows() != dim_) {
    throw DimensionError("NormalSolver: rhs has " + std::to_string(rhs.rows()) + " rows, expected " +
                         std::to_string(dim_));
  }
  return llt_.solve(rhs);
}

double objective(const Problem& problem, const Matrix& A, const Hyperparams& hp) {
  require_shape(A, problem.p(), problem.q(), "objective: coefficient matrix");
  const Matrix resid = problem.y() - problem.x() * A;
  double value = huber_sum(resid, hp.tau) / static_cast<double>(problem.n());
  if (hp.lambda > 0.0) value += hp.lambda * (nuclear_norm(A) + hp.gamma * l11_norm(A));
  return value;
}

namespace {

void check_state(const AdmmState& s, const Problem& problem) {
  const auto n = problem.n(), p = problem.p(), q = problem.q();
  require_shape(s.A, p, q, "state A");
  require_shape(s.Z, p, q, "state Z");
  require_shape(s.W, p, q, "state W");
  require_shape(s.D, n, q, "state D");
  require_shape(s.B_D, n, q, "state B_D");
  require_shape(s.B_Z, p, q, "state B_Z");
  require_shape(s.B_W, p, q, "state B_W");
}

Matrix a_update(const AdmmState& s, const Problem& problem, const NormalSolver& solver) {
  Matrix rhs = s.Z + s.B_Z + s.W + s.B_W;
  rhs.noalias() += problem.x().transpose() * (s.D + s.B_D);
  return solver.solve(rhs);
}

Matrix d_update(const Matrix& y, const Matrix& c, HuberParam tau, long n, double rho) {
  Matrix d(y.rows(), y.cols());
  const double* yp = y.data();
  const double* cp = c.data();
  double* dp = d.data();
  for (Eigen::Index i = 0; i < y.size(); ++i) dp[i] = prox_d_entry(yp[i], cp[i], tau, n, rho);
  return d;
}

void require_block_finite(const Matrix& m, const char* block, long iter) {
  if (!m.allFinite()) {
    std::ostringstream os;
    os << "non-finite value in block " << block << " at iteration " << iter;
    throw NumericalError(os.str());
  }
}

// One sweep sharing the product XA between the D- and dual updates.
void step(AdmmState& s, const Problem& problem, const Hyperparams& hp, const NormalSolver& solver) {
  const long iter = s.iter + 1;
  s.A = a_update(s, problem, solver);
  require_block_finite(s.A, "A", iter);
  s.Z = soft_threshold(s.A - s.B_Z, hp.lambda * hp.gamma / hp.rho);
  s.W = svd_soft_threshold(s.A - s.B_W, hp.lambda / hp.rho);
  const Matrix xa = problem.x() * s.A;
  s.D = d_update(problem.y(), xa - s.B_D, hp.tau, static_cast<long>(problem.n()), hp.rho);
  require_block_finite(s.D, "D", iter);
  s.B_D += s.D - xa;
  s.B_Z += s.Z - s.A;
  s.B_W += s.W - s.A;
  require_block_finite(s.B_D, "B_D", iter);
  s.iter = iter;
}

}  // namespace

Matrix update_A(const AdmmState& state, const Problem& problem, const NormalSolver& solver) {
  check_state(state, problem);
  if (solver.dim() != problem.p()) throw DimensionError("update_A: solver built for a different design");
  return a_update(state, problem, solver);
}

Matrix update_Z(const AdmmState& state, const Hyperparams& hp) {
  hp.validate();
  return soft_threshold(state.A - state.B_Z, hp.lambda * hp.gamma / hp.rho);
}

Matrix update_W(const AdmmState& state, const Hyperparams& hp) {
  hp.validate();
  return svd_soft_threshold(state.A - state.B_W, hp.lambda / hp.rho);
}

Matrix update_D(const AdmmState& state, const Problem& problem, const Hyperparams& hp) {
  check_state(state, problem);
  hp.validate();
  const Matrix c = problem.x() * state.A - state.B_D;
  return d_update(problem.y(), c, hp.tau, static_cast<long>(problem.n()), hp.rho);
}

Duals update_duals(const AdmmState& state, const Problem& problem) {
  check_state(state, problem);
  return Duals{state.B_D + state.D - problem.x() * state.A, state.B_Z + state.Z - state.A,
               state.B_W + state.W - state.A};
}

void admm_step(AdmmState& state, const Problem& problem, const Hyperparams& hp, const NormalSolver& solver) {
  check_state(state, problem);
  hp.validate();
  if (solver.dim() != problem.p()) throw DimensionError("admm_step: solver built for a different design");
  step(state, problem, hp, solver);
}

PrimalResiduals primal_residuals(const AdmmState& state, const Problem& problem) {
  return PrimalResiduals{(state.D - problem.x() * state.A).norm(), (state.Z - state.A).norm(),
                         (state.W - state.A).norm()};
}

Support support_of(const Matrix& z) {
  Support out;
  for (Eigen::Index j = 0; j < z.cols(); ++j)
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      if (z(i, j) != 0.0) out.push_back({i, j});
  return out;
}

long numerical_rank(const Matrix& w, double rel_tol) {
  if (w.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(w);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  return static_cast<long>((s.array() > rel_tol * s(0)).count());
}

FitResult fit(const Problem& problem, const Hyperparams& hp) {
  const NormalSolver solver(problem.x());
  return fit(problem, hp, solver);
}

FitResult fit(const Problem& problem, const Hyperparams& hp, const NormalSolver& solver) {
  hp.validate();
  if (solver.dim() != problem.p()) throw DimensionError("fit: solver built for a different design");

  AdmmState s = AdmmState::zeros(problem);
  Matrix previous = s.A;
  bool converged = false;
  while (s.iter < hp.max_iter) {
    step(s, problem, hp, solver);
    // The first A-update sees only zero blocks and returns zero, so the
    // change criterion is meaningful from the second iteration on.
    if (s.iter >= 2) {
      const double change = (s.A - previous).squaredNorm();
      const double base = previous.squaredNorm();
      const bool small = base < 1e-24 ? change <= hp.eps : change <= hp.eps * base;
      if (small) {
        converged = true;
        break;
      }
    }
    previous = s.A;
  }

  FitResult r;
  r.A_hat = s.A;
  r.support = support_of(s.Z);
  r.rank_estimate = numerical_rank(s.W);
  r.objective = objective(problem, s.A, hp);
  r.iterations = s.iter;
  r.converged = converged;
  r.residuals = primal_residuals(s, problem);
  return r;
}

}  // namespace rsrrr
