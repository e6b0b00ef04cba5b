#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "remest/delay.hpp"
#include "remest/policy.hpp"
#include "remest/rng.hpp"
#include "remest/wiener.hpp"

namespace remest {

struct Costs {
    double c_s = 0.0;
    double c_tau = 0.0;
};

// Executable policy: the solved waiting-time rule, a fixed period after
// each delivery, or transmit-on-delivery.
struct PolicySpec {
    enum class Kind { optimal, periodic, zero_wait };
    Kind kind = Kind::zero_wait;
    std::shared_ptr<const Policy> policy;
    double period = 0.0;

    static PolicySpec optimal(Policy p) {
        PolicySpec s;
        s.kind = Kind::optimal;
        s.policy = std::make_shared<Policy>(std::move(p));
        return s;
    }
    static PolicySpec periodic(double period) {
        if (!(period > 0.0)) throw std::invalid_argument("periodic policy: period must be > 0");
        PolicySpec s;
        s.kind = Kind::periodic;
        s.period = period;
        return s;
    }
    static PolicySpec zero_wait() { return {}; }

    const char* name() const {
        switch (kind) {
            case Kind::optimal: return "optimal";
            case Kind::periodic: return "periodic";
            case Kind::zero_wait: return "zero_wait";
        }
        return "?";
    }
};

// One renewal cycle: the interval between consecutive deliveries.
struct EpochRecord {
    double duration = 0.0;     // delay + sum of waits
    double se_integral = 0.0;  // integral of squared estimation error
    int n_samples = 0;
    double delay = 0.0;        // realized delay of the packet sent this epoch
    std::vector<double> waits;
    double final_error = 0.0;  // squared error at the transmit instant
    bool forced = false;       // k_max valve tripped
};

namespace detail {

// Wiener path relative to the held estimate, advanced in steps of at
// most dt with exact Gaussian increments; the squared offset integrates
// by the trapezoidal rule.
struct HeldErrorPath {
    double x = 0.0;   // current offset from the held value
    double se = 0.0;  // accumulated integral of x^2
    double dt;
    RngStream* rng;

    void advance(double span) {
        double remaining = span;
        while (remaining > 0.0) {
            const double h = remaining > dt ? dt : remaining;
            const double x_next = x + std::sqrt(h) * rng->normal();
            se += 0.5 * h * (x * x + x_next * x_next);
            x = x_next;
            remaining -= h;
        }
    }
};

}  // namespace detail

// Simulates one delivery-to-delivery epoch. The estimator holds the last
// delivered sample value throughout; the sender sees the previous
// realized delay at the delivery instant and then follows the policy.
// Only one packet is ever in flight: the next transmission happens after
// all waits, and the epoch closes at its delivery.
inline EpochRecord run_epoch(const PolicySpec& spec, const DelayModel& model,
                             RngStream& rng, double dt, int k_max) {
    if (!(dt > 0.0)) throw std::invalid_argument("run_epoch: dt must be > 0");
    if (k_max < 1) throw std::invalid_argument("run_epoch: k_max must be >= 1");
    if (spec.kind == PolicySpec::Kind::optimal && !spec.policy)
        throw std::invalid_argument("run_epoch: optimal spec carries no policy");

    EpochRecord rec;
    const double y_prev = model.sample(rng);
    detail::HeldErrorPath path{wiener_increment(y_prev, rng), 0.0, dt, &rng};

    double z1 = 0.0;
    switch (spec.kind) {
        case PolicySpec::Kind::optimal: z1 = spec.policy->first_step.z1_at(y_prev); break;
        case PolicySpec::Kind::periodic: z1 = spec.period; break;
        case PolicySpec::Kind::zero_wait: z1 = 0.0; break;
    }
    path.advance(z1);
    rec.waits.push_back(z1);
    double error = path.x * path.x;

    if (spec.kind == PolicySpec::Kind::optimal) {
        const Policy& pol = *spec.policy;
        while (!pol.should_stop(error)) {
            if (static_cast<int>(rec.waits.size()) >= k_max) {
                rec.forced = true;
                break;
            }
            const double z = pol.wait_at(error);
            path.advance(z);
            rec.waits.push_back(z);
            error = path.x * path.x;
        }
    }
    rec.n_samples = static_cast<int>(rec.waits.size());
    rec.final_error = error;

    rec.delay = model.sample(rng);
    path.advance(rec.delay);
    rec.se_integral = path.se;

    double total_wait = 0.0;
    for (double z : rec.waits) total_wait += z;
    rec.duration = total_wait + rec.delay;
    return rec;
}

// Renewal-reward aggregate of a simulated policy. The objective is
// assembled from its parts, so objective - mse always equals
// c_s * sample_rate + c_tau * tx_rate exactly.
struct SimResult {
    std::size_t n_epochs = 0;
    double total_time = 0.0;
    double objective = 0.0;
    double mse = 0.0;
    double sample_rate = 0.0;
    double tx_rate = 0.0;
    double ci_halfwidth = 0.0;      // 95% on the objective, batch means
    double mse_ci_halfwidth = 0.0;  // 95% on the mse, batch means
    std::size_t n_forced = 0;
};

inline constexpr int kNumBatches = 20;
inline constexpr double kStudentT975Df19 = 2.093024054408263;

// Runs n_epochs independent replications on substreams of (seed, salt)
// and aggregates the renewal-reward ratios with a 20-batch-means CI.
inline SimResult run_simulation(const PolicySpec& spec, const Costs& costs,
                                const DelayModel& model, std::size_t n_epochs,
                                double dt, int k_max, std::uint64_t seed,
                                std::uint64_t stream_salt = 0) {
    if (n_epochs < 100)
        throw std::invalid_argument("run_simulation: n_epochs must be >= 100");

    double sum_se = 0.0, sum_time = 0.0;
    double sum_samples = 0.0, sum_tx = 0.0;
    std::size_t n_forced = 0;
    struct Batch {
        double se = 0.0, time = 0.0, samples = 0.0, tx = 0.0;
    };
    std::vector<Batch> batches(kNumBatches);

    for (std::size_t i = 0; i < n_epochs; ++i) {
        RngStream rng(seed, substream_id(stream_salt, i));
        const EpochRecord rec = run_epoch(spec, model, rng, dt, k_max);
        sum_se += rec.se_integral;
        sum_time += rec.duration;
        sum_samples += rec.n_samples;
        sum_tx += 1.0;
        if (rec.forced) ++n_forced;
        Batch& b = batches[i * kNumBatches / n_epochs];
        b.se += rec.se_integral;
        b.time += rec.duration;
        b.samples += rec.n_samples;
        b.tx += 1.0;
    }

    if (!(sum_time > 0.0))
        throw std::runtime_error(
            "run_simulation: epochs have zero total duration (zero delay and no waits)");

    SimResult r;
    r.n_epochs = n_epochs;
    r.total_time = sum_time;
    r.mse = sum_se / sum_time;
    r.sample_rate = sum_samples / sum_time;
    r.tx_rate = sum_tx / sum_time;
    r.objective = r.mse + costs.c_s * r.sample_rate + costs.c_tau * r.tx_rate;
    r.n_forced = n_forced;

    double obj_mean = 0.0, mse_mean = 0.0;
    std::vector<double> obj_b(kNumBatches), mse_b(kNumBatches);
    for (int b = 0; b < kNumBatches; ++b) {
        mse_b[b] = batches[b].se / batches[b].time;
        obj_b[b] = mse_b[b] + costs.c_s * batches[b].samples / batches[b].time +
                   costs.c_tau * batches[b].tx / batches[b].time;
        obj_mean += obj_b[b];
        mse_mean += mse_b[b];
    }
    obj_mean /= kNumBatches;
    mse_mean /= kNumBatches;
    double obj_var = 0.0, mse_var = 0.0;
    for (int b = 0; b < kNumBatches; ++b) {
        obj_var += (obj_b[b] - obj_mean) * (obj_b[b] - obj_mean);
        mse_var += (mse_b[b] - mse_mean) * (mse_b[b] - mse_mean);
    }
    obj_var /= (kNumBatches - 1);
    mse_var /= (kNumBatches - 1);
    r.ci_halfwidth = kStudentT975Df19 * std::sqrt(obj_var / kNumBatches);
    r.mse_ci_halfwidth = kStudentT975Df19 * std::sqrt(mse_var / kNumBatches);
    return r;
}

struct PeriodicScan {
    double t_best = 0.0;
    SimResult best;
    std::vector<std::pair<double, SimResult>> scan;
};

// Simulates every period in t_grid and keeps the one with the smallest
// objective.
inline PeriodicScan best_periodic(const DelayModel& model, const Costs& costs,
                                  std::span<const double> t_grid, std::size_t n_epochs,
                                  double dt, int k_max, std::uint64_t seed,
                                  std::uint64_t stream_salt = 0) {
    if (t_grid.empty()) throw std::invalid_argument("best_periodic: t_grid must be nonempty");
    PeriodicScan out;
    std::size_t best = 0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        SimResult r = run_simulation(PolicySpec::periodic(t_grid[i]), costs, model,
                                     n_epochs, dt, k_max, seed, stream_salt + 1 + i);
        out.scan.emplace_back(t_grid[i], std::move(r));
        if (out.scan[i].second.objective < out.scan[best].second.objective) best = i;
    }
    out.t_best = out.scan[best].first;
    out.best = out.scan[best].second;
    return out;
}

}  // namespace remest
