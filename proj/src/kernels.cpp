#include "abckit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace abckit {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2Pi = 2.5066282746310005024;
}  // namespace

KernelFamily kernel_family_from_name(std::string_view name) {
    if (name == "epanechnikov") return KernelFamily::epanechnikov;
    if (name == "gaussian") return KernelFamily::gaussian;
    if (name == "uniform") return KernelFamily::uniform;
    throw ConfigError("unknown kernel family: " + std::string(name));
}

std::string_view kernel_family_name(KernelFamily family) {
    switch (family) {
        case KernelFamily::epanechnikov: return "epanechnikov";
        case KernelFamily::gaussian: return "gaussian";
        case KernelFamily::uniform: return "uniform";
    }
    return "?";
}

double UnivariateKernel::operator()(double u) const {
    switch (family) {
        case KernelFamily::epanechnikov:
            return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
        case KernelFamily::gaussian:
            return std::exp(-0.5 * u * u) / kSqrt2Pi;
        case KernelFamily::uniform:
            return std::abs(u) <= 1.0 ? 0.5 : 0.0;
    }
    return 0.0;
}

double UnivariateKernel::second_moment() const {
    switch (family) {
        case KernelFamily::epanechnikov: return 0.2;
        case KernelFamily::gaussian: return 1.0;
        case KernelFamily::uniform: return 1.0 / 3.0;
    }
    return 0.0;
}

double UnivariateKernel::roughness() const {
    switch (family) {
        case KernelFamily::epanechnikov: return 0.6;
        case KernelFamily::gaussian: return 1.0 / (2.0 * std::sqrt(kPi));
        case KernelFamily::uniform: return 0.5;
    }
    return 0.0;
}

bool UnivariateKernel::compact_support() const {
    return family != KernelFamily::gaussian;
}

double radial_moment(const UnivariateKernel& kernel, int m) {
    switch (kernel.family) {
        case KernelFamily::epanechnikov:
            // 0.75 int_0^1 (1 - r^2) r^m dr
            return 1.5 / (double(m + 1) * double(m + 3));
        case KernelFamily::uniform:
            return 0.5 / double(m + 1);
        case KernelFamily::gaussian:
            // (2pi)^{-1/2} 2^{(m-1)/2} Gamma((m+1)/2)
            return std::exp2(0.5 * (m - 1)) * std::tgamma(0.5 * (m + 1)) / kSqrt2Pi;
    }
    return 0.0;
}

double radial_square_moment(const UnivariateKernel& kernel, int m) {
    switch (kernel.family) {
        case KernelFamily::epanechnikov:
            // 0.5625 int_0^1 (1 - r^2)^2 r^m dr
            return 4.5 / (double(m + 1) * double(m + 3) * double(m + 5));
        case KernelFamily::uniform:
            return 0.25 / double(m + 1);
        case KernelFamily::gaussian:
            // (2pi)^{-1} int_0^inf r^m e^{-r^2} dr
            return std::tgamma(0.5 * (m + 1)) / (4.0 * kPi);
    }
    return 0.0;
}

double unit_sphere_area(int d) {
    return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

double MultivariateKernel::normalizing() const {
    return 1.0 / (unit_sphere_area(dim) * radial_moment(base, dim - 1));
}

double MultivariateKernel::operator()(const Eigen::VectorXd& u) const {
    return normalizing() * base(u.norm());
}

double MultivariateKernel::second_moment() const {
    return radial_moment(base, dim + 1) / (dim * radial_moment(base, dim - 1));
}

double MultivariateKernel::roughness() const {
    const double i = radial_moment(base, dim - 1);
    return radial_square_moment(base, dim - 1) / (unit_sphere_area(dim) * i * i);
}

double BandwidthMatrix::det() const {
    return std::pow(global, dim()) * scale.prod();
}

void BandwidthMatrix::validate() const {
    bool ok = scale.size() > 0 && global > 0.0 && std::isfinite(global);
    for (int i = 0; ok && i < scale.size(); ++i)
        ok = scale[i] > 0.0 && std::isfinite(scale[i]);
    if (!ok) throw NumericalError("degenerate bandwidth");
}

double kernel_weight(const MultivariateKernel& kernel, const BandwidthMatrix& B,
                     const Eigen::VectorXd& delta) {
    B.validate();
    if (delta.size() != B.dim() || kernel.dim != B.dim())
        throw NumericalError("bandwidth/delta dimension mismatch");
    const double r = (delta.cwiseQuotient(B.scale)).norm() / B.global;
    if (kernel.base.compact_support() && r > 1.0) return 0.0;
    return kernel.normalizing() * kernel.base(r) / B.det();
}

double bandwidth_from_quantile(std::vector<double> distances, double q) {
    if (distances.empty()) throw NumericalError("degenerate reference table");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantile fraction must lie in (0,1)");
    for (double v : distances)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw NumericalError("distances must be finite and nonnegative");
    const auto n = static_cast<std::ptrdiff_t>(distances.size());
    auto k = static_cast<std::ptrdiff_t>(std::ceil(q * double(n)));
    k = std::clamp<std::ptrdiff_t>(k, 1, n);
    std::nth_element(distances.begin(), distances.begin() + (k - 1), distances.end());
    const double b = distances[k - 1];
    if (b <= 0.0) throw NumericalError("degenerate reference table");
    return b;
}

MomentFunctionals moment_functionals(const UnivariateKernel& kernel) {
    return {kernel.second_moment(), kernel.roughness()};
}

}  // namespace abckit
