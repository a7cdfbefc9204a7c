#pragma once

// Small dense semidefinite programming.
//
// Problems are stated over complex Hermitian PSD blocks and non-negative
// scalars with a linear objective and linear (in)equality constraints:
//
//   max/min  sum_k Tr{C_k X_k} + sum_j c_j s_j
//   s.t.     sum_k Tr{A_ik X_k} + sum_j a_ij s_j  (=, <=, >=)  b_i
//            X_k Hermitian PSD,  s_j >= 0.
//
// Internally each n x n Hermitian block becomes a 2n x 2n real symmetric block
// via [[Re, -Im], [Im, Re]] and coefficients are halved so that inner products
// are preserved (Tr of the embedding is twice the real trace). Inequalities get
// a non-negative slack. The resulting standard-form pair
//
//   (P) min <C, X>  s.t. A(X) = b, X >= 0
//   (D) max b^T y   s.t. A^T(y) + Z = C, Z >= 0
//
// is solved with an infeasible-start primal-dual path-following method using
// the HKM search direction and Mehrotra predictor-corrector steps.

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace isac_edge::sdp {

enum class Sense { Maximize, Minimize };
enum class Relation { Equal, LessEqual, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded, NumericalFailure };

const char* to_string(Status status) noexcept;

struct LinearFunctional {
  std::vector<std::pair<std::size_t, Eigen::MatrixXcd>> block_terms;
  std::vector<std::pair<std::size_t, double>> scalar_terms;

  LinearFunctional& add_block(std::size_t block, Eigen::MatrixXcd coefficient);
  LinearFunctional& add_scalar(std::size_t scalar, double coefficient);
};

struct LinearConstraint {
  LinearFunctional lhs;
  Relation relation = Relation::Equal;
  double rhs = 0.0;
  std::string label;
};

struct BlockSpec {
  std::string name;
  Eigen::Index size = 0;
};

class SdpProblem {
 public:
  std::size_t add_block(std::string name, Eigen::Index size);
  std::size_t add_scalar(std::string name);
  void set_objective(Sense sense, LinearFunctional objective);
  void add_constraint(LinearConstraint constraint);

  const std::vector<BlockSpec>& blocks() const noexcept { return blocks_; }
  const std::vector<std::string>& scalars() const noexcept { return scalars_; }
  const std::vector<LinearConstraint>& constraints() const noexcept { return constraints_; }
  const LinearFunctional& objective() const noexcept { return objective_; }
  Sense sense() const noexcept { return sense_; }

  /// Throws Error(InvalidArgument / DimensionMismatch) on malformed input:
  /// bad indices, non-Hermitian or mis-sized coefficients, no constraints.
  void validate() const;

 private:
  std::vector<BlockSpec> blocks_;
  std::vector<std::string> scalars_;
  std::vector<LinearConstraint> constraints_;
  LinearFunctional objective_;
  Sense sense_ = Sense::Maximize;
};

struct Tolerances {
  double gap = 1e-8;          // relative duality gap
  double feasibility = 1e-8;  // relative primal / dual residual
  int max_iterations = 200;
  double infeasibility_certificate = 1e8;
};

struct IterateRecord {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double mu = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
  double centering = 0.0;
};

using IterateObserver = std::function<void(const IterateRecord&)>;

struct SdpSolution {
  Status status = Status::NumericalFailure;
  std::vector<Eigen::MatrixXcd> block_values;
  std::vector<double> scalar_values;
  // Multipliers of the original constraints in the minimisation convention.
  std::vector<double> constraint_duals;
  double objective_value = 0.0;  // primal, in the problem's own sense
  double dual_value = 0.0;
  double duality_gap = 0.0;      // |primal - dual|
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
  std::string message;
};

SdpSolution solve(const SdpProblem& problem, const Tolerances& tol = {},
                  const IterateObserver& observer = {});

/// [[Re A, -Im A], [Im A, Re A]]; throws for non-Hermitian input.
Eigen::MatrixXd hermitian_to_real_embedding(const Eigen::MatrixXcd& a);

/// Inverse of the embedding for any real symmetric 2n x 2n matrix: averages
/// the two copies, so the result is the Hermitian matrix whose embedding is
/// closest in Frobenius norm.
Eigen::MatrixXcd real_embedding_to_hermitian(const Eigen::MatrixXd& x);

}  // namespace isac_edge::sdp
