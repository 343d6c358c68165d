#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

#include "abckit/common.hpp"

namespace abckit {

enum class KernelFamily { epanechnikov, gaussian, uniform };

KernelFamily kernel_family_from_name(std::string_view name);
std::string_view kernel_family_name(KernelFamily family);

//! Symmetric univariate density kernel k(u).
struct UnivariateKernel {
    KernelFamily family = KernelFamily::epanechnikov;

    double operator()(double u) const;
    //! mu2 = int u^2 k(u) du
    double second_moment() const;
    //! R = int k(u)^2 du
    double roughness() const;
    //! true when k vanishes outside [-1, 1]
    bool compact_support() const;
};

//! Spherically symmetric d-variate kernel K(u) = c_d * k1(||u||).
struct MultivariateKernel {
    UnivariateKernel base;
    int dim = 1;

    //! normalizing constant c_d making K integrate to 1 over R^d
    double normalizing() const;
    double operator()(const Eigen::VectorXd& u) const;
    //! mu2(K): the kernel's variance-covariance matrix is mu2(K) I_d
    double second_moment() const;
    //! R(K) = int K(u)^2 du
    double roughness() const;
};

//! Diagonal bandwidth matrix B = b * D: per-statistic scale D times a global
//! dimensionless smoothing level b.
struct BandwidthMatrix {
    Eigen::VectorXd scale;  // diag(D), strictly positive
    double global = 1.0;    // b > 0

    int dim() const { return static_cast<int>(scale.size()); }
    //! |B| = b^d |D|
    double det() const;
    //! throws NumericalError("degenerate bandwidth") unless B is non-singular
    void validate() const;
};

//! K_B(delta) = |B|^{-1} K(B^{-1} delta). Zero outside support for compact kernels.
double kernel_weight(const MultivariateKernel& kernel, const BandwidthMatrix& B,
                     const Eigen::VectorXd& delta);

//! Lower empirical q-quantile (order statistic at ceil(q*n)) of a set of
//! nonnegative distances. Throws NumericalError("degenerate reference table")
//! when the selected statistic is zero.
double bandwidth_from_quantile(std::vector<double> distances, double q);

struct MomentFunctionals {
    double mu2;
    double roughness;
};
MomentFunctionals moment_functionals(const UnivariateKernel& kernel);

// Radial moments of the base kernel, used for the multivariate functionals:
// int_0^inf k1(r) r^m dr and int_0^inf k1(r)^2 r^m dr.
double radial_moment(const UnivariateKernel& kernel, int m);
double radial_square_moment(const UnivariateKernel& kernel, int m);

//! Surface area of the unit (d-1)-sphere, 2 pi^{d/2} / Gamma(d/2).
double unit_sphere_area(int d);

}  // namespace abckit
