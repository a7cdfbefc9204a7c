#include "isac_edge/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "isac_edge/error.hpp"

namespace isac_edge::sdp {

const char* to_string(Status status) noexcept {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

LinearFunctional& LinearFunctional::add_block(std::size_t block, Eigen::MatrixXcd coefficient) {
  block_terms.emplace_back(block, std::move(coefficient));
  return *this;
}

LinearFunctional& LinearFunctional::add_scalar(std::size_t scalar, double coefficient) {
  scalar_terms.emplace_back(scalar, coefficient);
  return *this;
}

std::size_t SdpProblem::add_block(std::string name, Eigen::Index size) {
  if (size < 1) throw Error(ErrorCode::InvalidArgument, "PSD block size must be >= 1");
  blocks_.push_back({std::move(name), size});
  return blocks_.size() - 1;
}

std::size_t SdpProblem::add_scalar(std::string name) {
  scalars_.push_back(std::move(name));
  return scalars_.size() - 1;
}

void SdpProblem::set_objective(Sense sense, LinearFunctional objective) {
  sense_ = sense;
  objective_ = std::move(objective);
}

void SdpProblem::add_constraint(LinearConstraint constraint) {
  constraints_.push_back(std::move(constraint));
}

namespace {

bool is_hermitian(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.norm());
  return (a - a.adjoint()).norm() <= 1e-12 * scale;
}

void check_functional(const SdpProblem& p, const LinearFunctional& f, const std::string& where) {
  for (const auto& [k, coeff] : f.block_terms) {
    if (k >= p.blocks().size()) {
      throw Error(ErrorCode::InvalidArgument, where + ": block index out of range");
    }
    const Eigen::Index n = p.blocks()[k].size;
    if (coeff.rows() != n || coeff.cols() != n) {
      std::ostringstream os;
      os << where << ": coefficient for block '" << p.blocks()[k].name << "' is "
         << coeff.rows() << "x" << coeff.cols() << ", expected " << n << "x" << n;
      throw Error(ErrorCode::DimensionMismatch, os.str());
    }
    if (!coeff.allFinite() || !is_hermitian(coeff)) {
      throw Error(ErrorCode::InvalidArgument,
                  where + ": coefficient matrices must be finite and Hermitian");
    }
  }
  for (const auto& [j, c] : f.scalar_terms) {
    if (j >= p.scalars().size()) {
      throw Error(ErrorCode::InvalidArgument, where + ": scalar index out of range");
    }
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidArgument, where + ": non-finite scalar");
  }
}

}  // namespace

void SdpProblem::validate() const {
  if (blocks_.empty() && scalars_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "SDP has no variables");
  }
  if (constraints_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "SDP needs at least one constraint");
  }
  check_functional(*this, objective_, "objective");
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const LinearConstraint& c = constraints_[i];
    const std::string where = "constraint " + (c.label.empty() ? std::to_string(i) : c.label);
    if (c.lhs.block_terms.empty() && c.lhs.scalar_terms.empty()) {
      throw Error(ErrorCode::InvalidArgument, where + ": empty left-hand side");
    }
    if (!std::isfinite(c.rhs)) throw Error(ErrorCode::InvalidArgument, where + ": non-finite rhs");
    check_functional(*this, c.lhs, where);
  }
}

Eigen::MatrixXd hermitian_to_real_embedding(const Eigen::MatrixXcd& a) {
  if (!is_hermitian(a)) {
    throw Error(ErrorCode::InvalidArgument, "embedding requires a Hermitian matrix");
  }
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = a.real();
  e.topRightCorner(n, n) = -a.imag();
  e.bottomLeftCorner(n, n) = a.imag();
  e.bottomRightCorner(n, n) = a.real();
  return e;
}

Eigen::MatrixXcd real_embedding_to_hermitian(const Eigen::MatrixXd& x) {
  if (x.rows() != x.cols() || x.rows() % 2 != 0) {
    throw Error(ErrorCode::DimensionMismatch, "embedding must be square with even size");
  }
  const Eigen::Index n = x.rows() / 2;
  Eigen::MatrixXcd h(n, n);
  h.real() = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
  h.imag() = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
  return 0.5 * (h + h.adjoint());
}

namespace {

using Blocks = std::vector<Eigen::MatrixXd>;

// Real standard form. An empty matrix stands for a zero coefficient block.
struct StandardForm {
  std::vector<Eigen::Index> dims;
  std::vector<Blocks> a;
  Blocks c;
  Eigen::VectorXd b;
  Eigen::VectorXd row_scale;
  double objective_scale = 1.0;
  double sense_sign = 1.0;  // original objective = sense_sign * (min-form objective)
  std::size_t first_scalar = 0;
  Eigen::Index total_dim = 0;
};

void accumulate(Eigen::MatrixXd& slot, const Eigen::MatrixXd& term, Eigen::Index dim) {
  if (slot.size() == 0) slot = Eigen::MatrixXd::Zero(dim, dim);
  slot += term;
}

StandardForm to_standard_form(const SdpProblem& p) {
  StandardForm sf;
  for (const BlockSpec& blk : p.blocks()) sf.dims.push_back(2 * blk.size);
  sf.first_scalar = sf.dims.size();
  for (std::size_t j = 0; j < p.scalars().size(); ++j) sf.dims.push_back(1);
  const std::size_t m = p.constraints().size();
  std::vector<std::size_t> slack_block(m, SIZE_MAX);
  for (std::size_t i = 0; i < m; ++i) {
    if (p.constraints()[i].relation != Relation::Equal) {
      slack_block[i] = sf.dims.size();
      sf.dims.push_back(1);
    }
  }
  const std::size_t nblocks = sf.dims.size();
  for (Eigen::Index d : sf.dims) sf.total_dim += d;

  auto lower = [&](const LinearFunctional& f, Blocks& out) {
    out.assign(nblocks, Eigen::MatrixXd());
    for (const auto& [k, coeff] : f.block_terms) {
      accumulate(out[k], 0.5 * hermitian_to_real_embedding(0.5 * (coeff + coeff.adjoint())),
                 sf.dims[k]);
    }
    for (const auto& [j, c] : f.scalar_terms) {
      accumulate(out[sf.first_scalar + j], Eigen::MatrixXd::Constant(1, 1, c), 1);
    }
  };

  sf.a.resize(m);
  sf.b.resize(static_cast<Eigen::Index>(m));
  sf.row_scale.resize(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const LinearConstraint& con = p.constraints()[i];
    lower(con.lhs, sf.a[i]);
    if (slack_block[i] != SIZE_MAX) {
      const double s = con.relation == Relation::LessEqual ? 1.0 : -1.0;
      sf.a[i][slack_block[i]] = Eigen::MatrixXd::Constant(1, 1, s);
    }
    double norm2 = 0.0;
    for (const auto& blk : sf.a[i]) norm2 += blk.squaredNorm();
    const double scale = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 1.0;
    for (auto& blk : sf.a[i]) blk *= scale;
    sf.b[i] = con.rhs * scale;
    sf.row_scale[i] = scale;
  }

  lower(p.objective(), sf.c);
  sf.sense_sign = p.sense() == Sense::Maximize ? -1.0 : 1.0;
  double cnorm2 = 0.0;
  for (std::size_t k = 0; k < nblocks; ++k) {
    if (sf.c[k].size() == 0) sf.c[k] = Eigen::MatrixXd::Zero(sf.dims[k], sf.dims[k]);
    sf.c[k] *= sf.sense_sign;
    cnorm2 += sf.c[k].squaredNorm();
  }
  if (cnorm2 > 0.0) {
    sf.objective_scale = std::sqrt(cnorm2);
    for (auto& blk : sf.c) blk /= sf.objective_scale;
  }
  return sf;
}

double inner(const Blocks& x, const Blocks& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k].size() == 0 || y[k].size() == 0) continue;
    s += x[k].cwiseProduct(y[k]).sum();
  }
  return s;
}

double norm(const Blocks& x) {
  double s = 0.0;
  for (const auto& blk : x) s += blk.squaredNorm();
  return std::sqrt(s);
}

Eigen::VectorXd apply_map(const StandardForm& sf, const Blocks& x) {
  Eigen::VectorXd out(sf.b.size());
  for (std::size_t i = 0; i < sf.a.size(); ++i) out[static_cast<Eigen::Index>(i)] = inner(sf.a[i], x);
  return out;
}

Blocks adjoint_map(const StandardForm& sf, const Eigen::VectorXd& y) {
  Blocks out(sf.dims.size());
  for (std::size_t k = 0; k < sf.dims.size(); ++k) out[k] = Eigen::MatrixXd::Zero(sf.dims[k], sf.dims[k]);
  for (std::size_t i = 0; i < sf.a.size(); ++i) {
    for (std::size_t k = 0; k < sf.dims.size(); ++k) {
      if (sf.a[i][k].size() != 0) out[k] += y[static_cast<Eigen::Index>(i)] * sf.a[i][k];
    }
  }
  return out;
}

Blocks combine(const Blocks& x, double alpha, const Blocks& dx) {
  Blocks out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] + alpha * dx[k];
  return out;
}

// Largest alpha with x + alpha*dx PSD (infinity when dx is PSD along x).
double max_step(const Blocks& x, const Blocks& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    double lambda_min;
    if (x[k].rows() == 1) {
      lambda_min = dx[k](0, 0) / x[k](0, 0);
    } else {
      Eigen::LLT<Eigen::MatrixXd> llt(x[k]);
      if (llt.info() != Eigen::Success) return 0.0;
      const Eigen::MatrixXd t = llt.matrixL().solve(dx[k]);
      const Eigen::MatrixXd s = llt.matrixL().solve(t.transpose());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (s + s.transpose()),
                                                         Eigen::EigenvaluesOnly);
      lambda_min = eig.eigenvalues()[0];
    }
    if (lambda_min < 0.0) alpha = std::min(alpha, -1.0 / lambda_min);
  }
  return alpha;
}

struct Direction {
  Blocks dx;
  Eigen::VectorXd dy;
  Blocks dz;
};

class InteriorPoint {
 public:
  InteriorPoint(const StandardForm& sf, const Tolerances& tol, const IterateObserver& observer)
      : sf_(sf), tol_(tol), observer_(observer) {}

  SdpSolution run();

 private:
  bool factor();
  Direction direction(const Blocks& target) const;
  SdpSolution finish(Status status, int iterations, std::string message) const;

  const StandardForm& sf_;
  const Tolerances& tol_;
  const IterateObserver& observer_;

  Blocks x_, z_, zinv_;
  Eigen::VectorXd y_;
  Eigen::VectorXd rp_;
  Blocks rd_;
  Eigen::LDLT<Eigen::MatrixXd> schur_;
  double pinf_ = 0, dinf_ = 0, pobj_ = 0, dobj_ = 0;
};

bool InteriorPoint::factor() {
  const std::size_t nb = sf_.dims.size();
  zinv_.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    Eigen::LLT<Eigen::MatrixXd> llt(z_[k]);
    if (llt.info() != Eigen::Success) return false;
    zinv_[k] = llt.solve(Eigen::MatrixXd::Identity(sf_.dims[k], sf_.dims[k]));
  }
  const Eigen::Index m = sf_.b.size();
  Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < nb; ++k) {
      const Eigen::MatrixXd& ai = sf_.a[i][k];
      if (ai.size() == 0) continue;
      const Eigen::MatrixXd t = x_[k] * ai * zinv_[k];
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::MatrixXd& aj = sf_.a[j][k];
        if (aj.size() != 0) schur(j, i) += aj.cwiseProduct(t).sum();
      }
    }
  }
  schur_.compute(0.5 * (schur + schur.transpose()));
  return schur_.info() == Eigen::Success && schur_.isPositive();
}

// HKM direction for the complementarity target R = sigma*mu*I - XZ - correction.
Direction InteriorPoint::direction(const Blocks& target) const {
  const std::size_t nb = sf_.dims.size();
  Blocks g(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    g[k] = (target[k] - x_[k] * rd_[k]) * zinv_[k];
  }
  Eigen::VectorXd rhs = rp_ - apply_map(sf_, g);
  Direction d;
  d.dy = schur_.solve(rhs);
  const Blocks aty = adjoint_map(sf_, d.dy);
  d.dz.resize(nb);
  d.dx.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    d.dz[k] = rd_[k] - aty[k];
    const Eigen::MatrixXd raw = (target[k] - x_[k] * d.dz[k]) * zinv_[k];
    d.dx[k] = 0.5 * (raw + raw.transpose());
  }
  return d;
}

SdpSolution InteriorPoint::run() {
  const std::size_t nb = sf_.dims.size();
  const Eigen::Index m = sf_.b.size();

  x_.resize(nb);
  z_.resize(nb);
  y_ = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < nb; ++k) {
    const double n = static_cast<double>(sf_.dims[k]);
    double xscale = std::max(10.0, std::sqrt(n));
    double zscale = std::max({10.0, std::sqrt(n), sf_.c[k].norm()});
    for (Eigen::Index i = 0; i < m; ++i) {
      const double an = sf_.a[i][k].size() ? sf_.a[i][k].norm() : 0.0;
      xscale = std::max(xscale, n * (1.0 + std::abs(sf_.b[i])) / (1.0 + an));
      zscale = std::max(zscale, an);
    }
    x_[k] = xscale * Eigen::MatrixXd::Identity(sf_.dims[k], sf_.dims[k]);
    z_[k] = zscale * Eigen::MatrixXd::Identity(sf_.dims[k], sf_.dims[k]);
  }

  const double bnorm = sf_.b.norm();
  const double cnorm = norm(sf_.c);
  const double total_dim = static_cast<double>(sf_.total_dim);
  double step_primal = 0.0, step_dual = 0.0, sigma = 0.0;
  int stalled = 0;
  // Progress watchdog: the gap must shrink by 10% within each window.
  constexpr int kProgressWindow = 10;
  double checkpoint_gap = std::numeric_limits<double>::infinity();
  int checkpoint_it = 0;

  for (int it = 0;; ++it) {
    rp_ = sf_.b - apply_map(sf_, x_);
    const Blocks aty = adjoint_map(sf_, y_);
    rd_.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) rd_[k] = sf_.c[k] - aty[k] - z_[k];
    pobj_ = inner(sf_.c, x_);
    dobj_ = sf_.b.dot(y_);
    const double complementarity = inner(x_, z_);
    const double mu = complementarity / total_dim;
    const double denom = 1.0 + std::abs(pobj_) + std::abs(dobj_);
    const double rel_gap = std::max(std::abs(pobj_ - dobj_), std::abs(complementarity)) / denom;
    pinf_ = rp_.norm() / (1.0 + bnorm);
    dinf_ = norm(rd_) / (1.0 + cnorm);

    if (observer_) {
      IterateRecord rec;
      rec.iteration = it;
      rec.primal_objective = sf_.sense_sign * sf_.objective_scale * pobj_;
      rec.dual_objective = sf_.sense_sign * sf_.objective_scale * dobj_;
      rec.relative_gap = rel_gap;
      rec.primal_infeasibility = pinf_;
      rec.dual_infeasibility = dinf_;
      rec.mu = mu;
      rec.step_primal = step_primal;
      rec.step_dual = step_dual;
      rec.centering = sigma;
      observer_(rec);
    }

    if (!std::isfinite(rel_gap) || !std::isfinite(pinf_) || !std::isfinite(dinf_)) {
      return finish(Status::NumericalFailure, it, "non-finite iterate");
    }
    if (rel_gap <= tol_.gap && pinf_ <= tol_.feasibility && dinf_ <= tol_.feasibility) {
      return finish(Status::Optimal, it, "converged");
    }

    // Farkas-type certificates: y/(b^T y) with A^T y + Z -> 0 proves primal
    // infeasibility, X/(-<C,X>) with A(X) -> 0 proves dual infeasibility.
    if (pinf_ > tol_.feasibility && dobj_ > 0.0) {
      const double residual = norm(combine(aty, 1.0, z_));
      if (dobj_ > tol_.infeasibility_certificate * residual) {
        return finish(Status::Infeasible, it, "primal infeasibility certificate");
      }
    }
    if (dinf_ > tol_.feasibility && pobj_ < 0.0) {
      const double residual = apply_map(sf_, x_).norm();
      if (-pobj_ > tol_.infeasibility_certificate * residual) {
        return finish(Status::Unbounded, it, "dual infeasibility certificate");
      }
    }
    if (rel_gap < 0.9 * checkpoint_gap) {
      checkpoint_gap = rel_gap;
      checkpoint_it = it;
    } else if (it - checkpoint_it >= kProgressWindow) {
      // Stuck at the floating-point floor; accept if close to the targets.
      constexpr double kSlack = 100.0;
      if (rel_gap <= kSlack * tol_.gap && pinf_ <= kSlack * tol_.feasibility &&
          dinf_ <= kSlack * tol_.feasibility) {
        return finish(Status::Optimal, it, "converged to reduced accuracy");
      }
      return finish(Status::NumericalFailure, it, "no progress");
    }
    if (it >= tol_.max_iterations) {
      return finish(Status::NumericalFailure, it, "iteration limit reached");
    }
    if (!factor()) {
      return finish(Status::NumericalFailure, it, "Schur complement lost definiteness");
    }

    Blocks target(nb);
    for (std::size_t k = 0; k < nb; ++k) target[k] = -x_[k] * z_[k];
    const Direction pred = direction(target);
    const double ap = std::min(1.0, max_step(x_, pred.dx));
    const double ad = std::min(1.0, max_step(z_, pred.dz));
    const double mu_aff = inner(combine(x_, ap, pred.dx), combine(z_, ad, pred.dz)) / total_dim;
    const double expo = std::max(1.0, 3.0 * std::min(ap, ad) * std::min(ap, ad));
    sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, expo), 0.0, 1.0);

    for (std::size_t k = 0; k < nb; ++k) {
      target[k] = sigma * mu * Eigen::MatrixXd::Identity(sf_.dims[k], sf_.dims[k]) -
                  x_[k] * z_[k] - pred.dx[k] * pred.dz[k];
    }
    const Direction corr = direction(target);
    const double gamma = 0.9 + 0.09 * std::min(step_primal, step_dual);
    step_primal = std::min(1.0, gamma * max_step(x_, corr.dx));
    step_dual = std::min(1.0, gamma * max_step(z_, corr.dz));

    x_ = combine(x_, step_primal, corr.dx);
    y_ += step_dual * corr.dy;
    z_ = combine(z_, step_dual, corr.dz);

    stalled = (step_primal < 1e-10 && step_dual < 1e-10) ? stalled + 1 : 0;
    if (stalled >= 5) return finish(Status::NumericalFailure, it + 1, "step length stalled");
  }
}

SdpSolution InteriorPoint::finish(Status status, int iterations, std::string message) const {
  SdpSolution sol;
  sol.status = status;
  sol.iterations = iterations;
  sol.message = std::move(message);
  sol.primal_infeasibility = pinf_;
  sol.dual_infeasibility = dinf_;

  for (std::size_t k = 0; k < sf_.first_scalar; ++k) {
    sol.block_values.push_back(real_embedding_to_hermitian(x_[k]));
  }
  for (std::size_t k = sf_.first_scalar; k < sf_.dims.size(); ++k) {
    sol.scalar_values.push_back(x_[k](0, 0));
  }
  sol.constraint_duals.resize(static_cast<std::size_t>(sf_.b.size()));
  for (Eigen::Index i = 0; i < sf_.b.size(); ++i) {
    sol.constraint_duals[static_cast<std::size_t>(i)] =
        sf_.objective_scale * sf_.row_scale[i] * y_[i];
  }
  sol.objective_value = sf_.sense_sign * sf_.objective_scale * pobj_;
  sol.dual_value = sf_.sense_sign * sf_.objective_scale * dobj_;
  sol.duality_gap = std::abs(sol.objective_value - sol.dual_value);
  sol.relative_gap =
      sol.duality_gap / (1.0 + std::abs(sol.objective_value) + std::abs(sol.dual_value));
  return sol;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const Tolerances& tol,
                  const IterateObserver& observer) {
  problem.validate();
  const StandardForm sf = to_standard_form(problem);
  InteriorPoint ipm(sf, tol, observer);
  SdpSolution sol = ipm.run();
  // Slack scalars are internal; expose only the declared ones.
  sol.scalar_values.resize(problem.scalars().size());
  return sol;
}

}  // namespace isac_edge::sdp
