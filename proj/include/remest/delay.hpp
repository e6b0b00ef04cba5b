#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "remest/rng.hpp"

namespace remest {

enum class DelayKind { deterministic, exponential, lognormal, discrete };

inline const char* to_string(DelayKind k) {
    switch (k) {
        case DelayKind::deterministic: return "deterministic";
        case DelayKind::exponential: return "exponential";
        case DelayKind::lognormal: return "lognormal";
        case DelayKind::discrete: return "discrete";
    }
    return "?";
}

struct DelayMoments {
    double mean = 0.0;
    double second_moment = 0.0;
    double variance() const { return second_moment - mean * mean; }
};

namespace detail {

// Acklam's rational approximation of the standard normal quantile,
// accurate to ~1e-9. Used only for grid sizing, not for sampling.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1.0 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > phigh) {
        q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    q = p - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

// Channel delay distribution. Four families, each with exact closed-form
// moments and nonnegative support with finite second moment.
struct DelayModel {
    DelayKind kind = DelayKind::deterministic;
    double d = 0.0;                 // deterministic value
    double rate = 1.0;              // exponential rate
    double location = 0.0;          // lognormal log-space mean
    double scale = 0.0;             // lognormal log-space std dev, >= 0
    std::vector<double> values;     // discrete atoms
    std::vector<double> probs;      // discrete probabilities

    static DelayModel deterministic(double d) {
        DelayModel m;
        m.kind = DelayKind::deterministic;
        m.d = d;
        m.validate();
        return m;
    }

    static DelayModel exponential(double rate) {
        DelayModel m;
        m.kind = DelayKind::exponential;
        m.rate = rate;
        m.validate();
        return m;
    }

    static DelayModel lognormal(double location, double scale) {
        DelayModel m;
        m.kind = DelayKind::lognormal;
        m.location = location;
        m.scale = scale;
        m.validate();
        return m;
    }

    static DelayModel discrete(std::vector<double> values, std::vector<double> probs) {
        DelayModel m;
        m.kind = DelayKind::discrete;
        m.values = std::move(values);
        m.probs = std::move(probs);
        m.validate();
        return m;
    }

    void validate() const {
        switch (kind) {
            case DelayKind::deterministic:
                if (!(d >= 0.0) || !std::isfinite(d))
                    throw std::invalid_argument("delay.d: must be a finite value >= 0");
                break;
            case DelayKind::exponential:
                if (!(rate > 0.0) || !std::isfinite(rate))
                    throw std::invalid_argument("delay.rate: must be finite and > 0");
                break;
            case DelayKind::lognormal:
                if (!std::isfinite(location))
                    throw std::invalid_argument("delay.location: must be finite");
                if (!(scale >= 0.0) || !std::isfinite(scale))
                    throw std::invalid_argument("delay.scale: must be finite and >= 0");
                break;
            case DelayKind::discrete: {
                if (values.empty() || values.size() != probs.size())
                    throw std::invalid_argument(
                        "delay.values: must be nonempty and match delay.probs in length");
                double total = 0.0;
                for (std::size_t i = 0; i < values.size(); ++i) {
                    if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
                        throw std::invalid_argument("delay.values: must all be finite and >= 0");
                    if (!(probs[i] >= 0.0))
                        throw std::invalid_argument("delay.probs: must all be >= 0");
                    total += probs[i];
                }
                if (std::abs(total - 1.0) > 1e-12)
                    throw std::invalid_argument("delay.probs: must sum to 1 within 1e-12");
                break;
            }
        }
    }

    DelayMoments moments() const {
        switch (kind) {
            case DelayKind::deterministic:
                return {d, d * d};
            case DelayKind::exponential:
                return {1.0 / rate, 2.0 / (rate * rate)};
            case DelayKind::lognormal: {
                const double s2 = scale * scale;
                return {std::exp(location + 0.5 * s2), std::exp(2.0 * location + 2.0 * s2)};
            }
            case DelayKind::discrete: {
                double m1 = 0.0, m2 = 0.0;
                for (std::size_t i = 0; i < values.size(); ++i) {
                    m1 += probs[i] * values[i];
                    m2 += probs[i] * values[i] * values[i];
                }
                return {m1, m2};
            }
        }
        return {};
    }

    double sample(RngStream& rng) const {
        switch (kind) {
            case DelayKind::deterministic:
                return d;
            case DelayKind::exponential:
                return rng.exponential(rate);
            case DelayKind::lognormal:
                return std::exp(location + scale * rng.normal());
            case DelayKind::discrete: {
                const double u = rng.uniform01();
                double cum = 0.0;
                for (std::size_t i = 0; i < values.size(); ++i) {
                    cum += probs[i];
                    if (u <= cum) return values[i];
                }
                return values.back();
            }
        }
        return 0.0;
    }

    double quantile(double p) const {
        switch (kind) {
            case DelayKind::deterministic:
                return d;
            case DelayKind::exponential:
                return -std::log1p(-p) / rate;
            case DelayKind::lognormal:
                return scale == 0.0 ? std::exp(location)
                                    : std::exp(location + scale * detail::normal_quantile(p));
            case DelayKind::discrete: {
                double cum = 0.0;
                for (std::size_t i = 0; i < values.size(); ++i) {
                    cum += probs[i];
                    if (p <= cum) return values[i];
                }
                return values.back();
            }
        }
        return 0.0;
    }
};

// Family used by the delay-variance sweeps: fixed mean, variance set by
// sigma2. Zero variance collapses to a point mass for either family.
//   lognormal:  scale^2 = ln(1 + sigma2/mean^2), location = ln(mean) - scale^2/2
//   discrete:   atoms {0, mean + sigma2/mean} with matching probabilities
inline DelayModel delay_model_with_mean_variance(DelayKind family, double mean,
                                                 double sigma2) {
    if (!(mean > 0.0)) throw std::invalid_argument("delay family: mean must be > 0");
    if (!(sigma2 >= 0.0)) throw std::invalid_argument("delay family: sigma2 must be >= 0");
    if (sigma2 == 0.0) return DelayModel::deterministic(mean);
    switch (family) {
        case DelayKind::lognormal: {
            const double s2 = std::log1p(sigma2 / (mean * mean));
            return DelayModel::lognormal(std::log(mean) - 0.5 * s2, std::sqrt(s2));
        }
        case DelayKind::discrete: {
            const double v = mean + sigma2 / mean;
            const double p = mean * mean / (mean * mean + sigma2);
            return DelayModel::discrete({0.0, v}, {1.0 - p, p});
        }
        default:
            throw std::invalid_argument(
                "delay family: variance sweeps support lognormal or discrete");
    }
}

}  // namespace remest
