#pragma once

#include <algorithm>
#include <numeric>
#include <random>

#include "qsg/error.hpp"

namespace qsg {

template <class Rng>
std::vector<std::pair<std::uint64_t, std::uint64_t>> sample_counts(std::span<const double> probs,
                                                                   std::uint64_t shots, Rng& rng) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    if (shots == 0) {
        return out;
    }
    double total = 0.0;
    std::size_t support = 0;
    for (double p : probs) {
        total += p;
        support += p > 0.0 ? 1 : 0;
    }
    if (!(total > 0.0)) {
        throw InvalidArgument("cannot sample from a zero-norm distribution");
    }

    if (shots <= support) {
        std::vector<double> cdf(probs.size());
        std::partial_sum(probs.begin(), probs.end(), cdf.begin());
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<std::uint64_t> draws;
        draws.reserve(shots);
        for (std::uint64_t s = 0; s < shots; ++s) {
            const double u = unit(rng) * total;
            auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            if (it == cdf.end()) {
                it = std::prev(cdf.end());
            }
            auto idx = static_cast<std::size_t>(it - cdf.begin());
            while (probs[idx] <= 0.0 && idx > 0) {
                --idx;
            }
            draws.push_back(idx);
        }
        std::sort(draws.begin(), draws.end());
        for (std::uint64_t idx : draws) {
            if (!out.empty() && out.back().first == idx) {
                ++out.back().second;
            } else {
                out.emplace_back(idx, 1);
            }
        }
        return out;
    }

    std::size_t last_positive = probs.size();
    for (std::size_t i = probs.size(); i-- > 0;) {
        if (probs[i] > 0.0) {
            last_positive = i;
            break;
        }
    }
    std::uint64_t remaining = shots;
    double mass_left = total;
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        const double p = probs[i];
        if (p <= 0.0) {
            continue;
        }
        std::uint64_t k = 0;
        if (i == last_positive || p >= mass_left) {
            k = remaining;
        } else {
            std::binomial_distribution<std::uint64_t> draw(remaining, std::clamp(p / mass_left, 0.0, 1.0));
            k = draw(rng);
        }
        mass_left -= p;
        if (k > 0) {
            out.emplace_back(i, k);
            remaining -= k;
        }
    }
    return out;
}

}  // namespace qsg
