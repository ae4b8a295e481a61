#pragma once

#include "idapbc/types.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace idapbc {

/// Axis-aligned box of states to probe. The design conditions typically hold
/// only on a restricted domain (e.g. q_u inside the upper half plane), so
/// every system declares its own box.
struct ProbeBox {
    Vec q_min, q_max;
    Vec p_min, p_max;
};

ProbeBox symmetric_box(const Vec& q_half_width, const Vec& p_half_width);

/// Deterministic uniform state sampler (seed recorded by callers).
class StateSampler {
public:
    StateSampler(ProbeBox box, std::uint64_t seed) : box_(std::move(box)), rng_(seed) {}

    State next();
    std::vector<State> take(int count);

    /// Uniform sample of the q-box only (p = 0).
    Vec next_q();

private:
    ProbeBox box_;
    std::mt19937_64 rng_;
};

/// Pointwise residual evaluation over sampled states, reduced by max |.|_inf.
struct ResidualReport {
    double max_abs = 0.0;
    std::vector<std::pair<State, Vec>> per_sample;
    int samples = 0;
    std::uint64_t seed = 0;
};

template <typename ResidualFn>
ResidualReport evaluate_residuals(const ProbeBox& box, int samples, std::uint64_t seed,
                                  ResidualFn&& residual) {
    ResidualReport report;
    report.samples = samples;
    report.seed = seed;
    report.per_sample.reserve(static_cast<std::size_t>(samples));
    StateSampler sampler(box, seed);
    for (int i = 0; i < samples; ++i) {
        State x = sampler.next();
        Vec r = residual(x);
        report.max_abs = std::max(report.max_abs, r.size() ? r.cwiseAbs().maxCoeff() : 0.0);
        report.per_sample.emplace_back(std::move(x), std::move(r));
    }
    return report;
}

}  // namespace idapbc
