#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace idapbc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Generalized position / momentum pair.
struct State {
    Vec q;
    Vec p;

    State() = default;
    State(Vec q_, Vec p_) : q(std::move(q_)), p(std::move(p_)) {}

    Index dof() const { return q.size(); }
};

/// A field evaluation produced a non-finite value.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& what, Vec probe)
        : std::runtime_error(what), probe_point(std::move(probe)) {}
    Vec probe_point;
};

/// Matrix expected symmetric positive (semi)definite was not.
class NotPsdError : public std::runtime_error {
public:
    NotPsdError(const std::string& what, double eig)
        : std::runtime_error(what), offending_eigenvalue(eig) {}
    double offending_eigenvalue;
};

class RankDeficiencyError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class SingularMatrixError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// det K(q_u) = 0 or another A6 violation hit at runtime.
class GainConditionError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class IntegrationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void check_finite(double v, const char* what, const Vec& probe) {
    if (!std::isfinite(v)) {
        throw EvaluationError(std::string(what) + " evaluated to a non-finite value", probe);
    }
}

inline void check_finite(const Eigen::Ref<const Mat>& m, const char* what, const Vec& probe) {
    if (!m.allFinite()) {
        throw EvaluationError(std::string(what) + " evaluated to a non-finite value", probe);
    }
}

}  // namespace idapbc
