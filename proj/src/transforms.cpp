#include "abckit/transforms.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace abckit {

namespace {

bool tag_defined(StatTag tag, double v) {
    switch (tag) {
        case StatTag::identity: return true;
        case StatTag::sqrt: return v >= 0.0;
        case StatTag::log: return v > 0.0;
    }
    return false;
}

double tag_apply(StatTag tag, double v) {
    switch (tag) {
        case StatTag::identity: return v;
        case StatTag::sqrt: return std::sqrt(v);
        case StatTag::log: return std::log(v);
    }
    return v;
}

// numerically stable logistic
double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

}  // namespace

std::string_view stat_tag_name(StatTag tag) {
    switch (tag) {
        case StatTag::identity: return "id";
        case StatTag::sqrt: return "sqrt";
        case StatTag::log: return "log";
    }
    return "?";
}

StatTag stat_tag_from_name(std::string_view name) {
    if (name == "id" || name == "identity") return StatTag::identity;
    if (name == "sqrt") return StatTag::sqrt;
    if (name == "log") return StatTag::log;
    throw ConfigError("unknown statistic transform: " + std::string(name));
}

bool StatTransform::all_identity() const {
    for (auto t : tags)
        if (t != StatTag::identity) return false;
    return true;
}

int StatTransform::transformed_count() const {
    int c = 0;
    for (auto t : tags)
        if (t != StatTag::identity) ++c;
    return c;
}

std::string StatTransform::spec() const {
    std::string out;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (i) out += ',';
        out += stat_tag_name(tags[i]);
    }
    return out;
}

StatTransform StatTransform::parse(std::string_view spec, int d) {
    StatTransform t;
    std::stringstream ss{std::string(spec)};
    std::string item;
    while (std::getline(ss, item, ',')) t.tags.push_back(stat_tag_from_name(item));
    if (static_cast<int>(t.tags.size()) != d)
        throw ConfigError("transform spec '" + std::string(spec) + "' does not have " +
                          std::to_string(d) + " entries");
    return t;
}

StatTransform StatTransform::identity(int d) {
    StatTransform t;
    t.tags.assign(static_cast<std::size_t>(d), StatTag::identity);
    return t;
}

std::optional<std::string> stat_transform_obstacle(const Eigen::MatrixXd& stats,
                                                   const Eigen::VectorXd& s_obs,
                                                   const StatTransform& transform,
                                                   double max_undefined_fraction) {
    const int d = static_cast<int>(stats.cols());
    if (static_cast<int>(transform.tags.size()) != d)
        throw ConfigError("transform dimension mismatch");
    for (int j = 0; j < d; ++j)
        if (!tag_defined(transform.tags[j], s_obs[j]))
            return std::string(stat_tag_name(transform.tags[j])) +
                   " undefined at observed statistic " + std::to_string(j);
    Eigen::Index undefined = 0;
    for (Eigen::Index i = 0; i < stats.rows(); ++i) {
        for (int j = 0; j < d; ++j) {
            if (!tag_defined(transform.tags[j], stats(i, j))) {
                ++undefined;
                break;
            }
        }
    }
    const double frac = double(undefined) / double(stats.rows());
    if (frac > max_undefined_fraction) {
        std::ostringstream oss;
        oss << "undefined on " << undefined << "/" << stats.rows() << " rows";
        return oss.str();
    }
    return std::nullopt;
}

TransformedStats apply_stat_transform(const Eigen::MatrixXd& stats,
                                      const Eigen::VectorXd& s_obs,
                                      const StatTransform& transform) {
    const int d = static_cast<int>(stats.cols());
    if (static_cast<int>(transform.tags.size()) != d)
        throw ConfigError("transform dimension mismatch");

    TransformedStats out;
    out.s_obs.resize(d);
    for (int j = 0; j < d; ++j) {
        if (!tag_defined(transform.tags[j], s_obs[j]))
            throw NumericalError("transform undefined at the observed statistics");
        out.s_obs[j] = tag_apply(transform.tags[j], s_obs[j]);
    }

    out.rows.reserve(static_cast<std::size_t>(stats.rows()));
    for (Eigen::Index i = 0; i < stats.rows(); ++i) {
        bool ok = true;
        for (int j = 0; ok && j < d; ++j) ok = tag_defined(transform.tags[j], stats(i, j));
        if (ok)
            out.rows.push_back(i);
        else
            ++out.n_dropped;
    }
    out.stats.resize(static_cast<Eigen::Index>(out.rows.size()), d);
    for (Eigen::Index k = 0; k < out.stats.rows(); ++k)
        for (int j = 0; j < d; ++j)
            out.stats(k, j) = tag_apply(transform.tags[j], stats(out.rows[static_cast<std::size_t>(k)], j));
    return out;
}

double ParamTransform::forward(double x) const {
    switch (kind) {
        case Kind::identity: return x;
        case Kind::log:
            if (!(x > 0.0))
                throw NumericalError("log transform of nonpositive parameter value " +
                                     format_double(x));
            return std::log(x);
        case Kind::logit:
            if (!(x > lower && x < upper))
                throw NumericalError("logit transform of out-of-support parameter value " +
                                     format_double(x));
            return std::log((x - lower) / (upper - x));
    }
    return x;
}

double ParamTransform::backward(double z) const {
    switch (kind) {
        case Kind::identity: return z;
        case Kind::log: {
            double v = std::exp(z);
            if (v <= 0.0) v = std::numeric_limits<double>::min();
            if (std::isinf(v)) v = std::numeric_limits<double>::max();
            return v;
        }
        case Kind::logit: {
            double v = lower + (upper - lower) * sigmoid(z);
            // keep the image strictly inside the open interval
            if (v <= lower) v = std::nextafter(lower, upper);
            if (v >= upper) v = std::nextafter(upper, lower);
            return v;
        }
    }
    return z;
}

double ParamTransform::backward_jacobian(double z) const {
    switch (kind) {
        case Kind::identity: return 1.0;
        case Kind::log: return std::exp(z);
        case Kind::logit: {
            const double s = sigmoid(z);
            return (upper - lower) * s * (1.0 - s);
        }
    }
    return 1.0;
}

Eigen::VectorXd ParamTransform::forward(const Eigen::VectorXd& values) const {
    Eigen::VectorXd out(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        try {
            out[i] = forward(values[i]);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " (draw " + std::to_string(i) + ")");
        }
    }
    return out;
}

Eigen::VectorXd ParamTransform::backward(const Eigen::VectorXd& values) const {
    Eigen::VectorXd out(values.size());
    for (Eigen::Index i = 0; i < values.size(); ++i) out[i] = backward(values[i]);
    return out;
}

bool ParamTransform::in_support(double x) const {
    switch (kind) {
        case Kind::identity: return std::isfinite(x);
        case Kind::log: return x > 0.0;
        case Kind::logit: return x > lower && x < upper;
    }
    return false;
}

std::string ParamTransform::name() const {
    switch (kind) {
        case Kind::identity: return "identity";
        case Kind::log: return "log";
        case Kind::logit:
            return "logit(" + format_double(lower) + "," + format_double(upper) + ")";
    }
    return "?";
}

ParamTransform ParamTransform::identity() { return {}; }

ParamTransform ParamTransform::log() {
    ParamTransform t;
    t.kind = Kind::log;
    return t;
}

ParamTransform ParamTransform::logit(double lower, double upper) {
    if (!(lower < upper)) throw ConfigError("logit bounds must satisfy lower < upper");
    ParamTransform t;
    t.kind = Kind::logit;
    t.lower = lower;
    t.upper = upper;
    return t;
}

}  // namespace abckit
