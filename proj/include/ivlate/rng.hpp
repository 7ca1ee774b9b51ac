#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

#include "ivlate/errors.hpp"

namespace ivlate {

// SplitMix64 step; used to derive independent stage seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic sampling layer over mt19937_64. All distribution transforms
// live here so a (config, seed) pair yields the same stream on every
// standard-library vendor; std::*_distribution is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform on [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Marsaglia polar method; the spare deviate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Index into probs by cumulative sum; probs must sum to 1.
    std::size_t categorical(std::span<const double> probs) {
        const double u = uniform01();
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            cum += probs[i];
            if (u < cum) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

    // Marsaglia-Tsang; unit scale. Shapes below 1 use the boost
    // G(a) = G(a+1) * U^(1/a).
    double gamma(double shape) {
        if (!(shape > 0.0)) throw InvalidConfig("gamma shape must be positive");
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        for (;;) {
            const double ga = gamma(a);
            const double gb = gamma(b);
            const double s = ga + gb;
            if (s > 0.0) return ga / s;  // redraw on double underflow
        }
    }

    // alpha and out must have equal, nonzero length.
    void dirichlet(std::span<const double> alpha, std::span<double> out) {
        for (;;) {
            double sum = 0.0;
            for (std::size_t i = 0; i < alpha.size(); ++i) {
                out[i] = gamma(alpha[i]);
                sum += out[i];
            }
            if (sum > 0.0) {
                for (double& x : out) x /= sum;
                return;
            }
        }
    }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ivlate
