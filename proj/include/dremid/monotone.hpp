#pragma once

#include <functional>
#include <vector>

#include "dremid/common.hpp"

namespace dremid {

enum class MappingKind { ClassI, ClassII };

// Extended-parameter mapping specification.
//
// Class I:  theta = (theta1, theta2, eta),  W(theta) = [theta1, theta2,
//           theta1*theta2, theta1*G', theta1*theta2*G']',  ell = 2 + n_eta,
//           s = 3 + 2*p_eta.
// Class II: theta = (theta1, eta),  W(theta) = [theta1, G', theta1*G']',
//           ell = 1 + n_eta, s = 1 + 2*p_eta.
//
// T_G must satisfy  T_G*grad_G + grad_G'*T_G' >= rho_G * I  on the domain of
// interest (declared, then spot-checked by sampling).
struct MappingSpec {
    MappingKind kind = MappingKind::ClassI;
    int n_eta = 1;
    int p_eta = 1;
    std::function<VectorXd(const VectorXd&)> G;
    std::function<MatrixXd(const VectorXd&)> grad_G;  // p_eta x n_eta
    MatrixXd T_G;                                     // n_eta x p_eta
    double rho_G = 1.0;
};

// Identity mapping G(eta) = eta with T_G = (rho_G/2) I.
MappingSpec identity_mapping(MappingKind kind, int n_eta, double rho_G = 1.0);

// Axis-aligned box of admissible parameter vectors, used for sampled LMI
// verification and for the alpha bound. lo/hi are full-length theta boxes
// (ell entries, ordered as theta1 [, theta2], eta...).
struct ParameterBounds {
    VectorXd lo;
    VectorXd hi;
    int grid_per_dim = 3;
    int random_samples = 64;
    std::uint64_t seed = 12345;
};

std::vector<VectorXd> sample_box(const ParameterBounds& bounds);

class ExtendedMapping {
  public:
    // Class I construction; sign_theta1 must be +1 or -1.
    static ExtendedMapping class1(MappingSpec spec, double alpha, int sign_theta1);
    // Class II construction; consumes neither alpha nor sign(theta1).
    static ExtendedMapping class2(MappingSpec spec);

    int ell() const { return ell_; }
    int s() const { return s_; }
    const MappingSpec& spec() const { return spec_; }
    double alpha() const { return alpha_; }
    int sign_theta1() const { return sign_theta1_; }

    // W(theta); theta must have ell entries.
    VectorXd eval_W(const VectorXd& theta) const;

    // Analytic Jacobian of W, s x ell.
    MatrixXd jac_W(const VectorXd& theta) const;

    // The structured T_W matrix (ell x s) of the respective mapping class.
    MatrixXd build_T_W() const;

    // lambda_min of T_W*jac_W + (T_W*jac_W)' at one theta.
    double lmi_min_eig_at(const VectorXd& theta) const;

  private:
    ExtendedMapping() = default;
    MappingSpec spec_;
    MappingKind kind_ = MappingKind::ClassI;
    int ell_ = 0, s_ = 0;
    double alpha_ = 0.0;
    int sign_theta1_ = 0;
};

// Smallest alpha rendering the Class-I symmetrized Jacobian PSD over the
// bound set, per the Schur-complement bound
//
//   alpha_m = sup ||T_G G(eta)||^2 / (inf |theta1| * rho_G).
//
// Throws ConfigError when the theta1 interval touches zero (the bound is
// then unbounded).
double alpha_min(const MappingSpec& spec, const ParameterBounds& bounds);

// min over samples of lambda_min(T_W jac_W + jac_W' T_W'). Positive values
// certify strict monotonicity of T_W * W on the sampled region.
double lmi_min_eig(const ExtendedMapping& map, const std::vector<VectorXd>& theta_samples);

// Central-difference Jacobian of W (verification oracle for jac_W).
MatrixXd jac_W_fd(const ExtendedMapping& map, const VectorXd& theta, double h = 1e-6);

// max over samples of the relative deviation between jac_W and its
// finite-difference counterpart.
double jac_fd_max_rel_err(const ExtendedMapping& map, const std::vector<VectorXd>& theta_samples);

}  // namespace dremid
