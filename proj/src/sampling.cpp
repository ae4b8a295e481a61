#include "idapbc/sampling.hpp"

namespace idapbc {

ProbeBox symmetric_box(const Vec& q_half_width, const Vec& p_half_width) {
    ProbeBox box;
    box.q_min = -q_half_width;
    box.q_max = q_half_width;
    box.p_min = -p_half_width;
    box.p_max = p_half_width;
    return box;
}

State StateSampler::next() {
    State x;
    x.q.resize(box_.q_min.size());
    x.p.resize(box_.p_min.size());
    for (Index i = 0; i < x.q.size(); ++i) {
        std::uniform_real_distribution<double> dist(box_.q_min(i), box_.q_max(i));
        x.q(i) = dist(rng_);
    }
    for (Index i = 0; i < x.p.size(); ++i) {
        std::uniform_real_distribution<double> dist(box_.p_min(i), box_.p_max(i));
        x.p(i) = dist(rng_);
    }
    return x;
}

std::vector<State> StateSampler::take(int count) {
    std::vector<State> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(next());
    return out;
}

Vec StateSampler::next_q() { return next().q; }

}  // namespace idapbc
