#ifndef RELAYVI_HARNESS_HPP
#define RELAYVI_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "relayvi/relay_sim.hpp"
#include "relayvi/types.hpp"
#include "relayvi/viterbi_detector.hpp"

namespace relayvi {

struct HopConfig {
    int max_delay = 1;
    int n_taps = 1;
    std::vector<int> tap_pool;
    double max_norm_doppler = 0.0;
};

struct ExperimentConfig {
    int n_subcarriers = 128;
    int cp_len = 8;
    int n_pilot_clusters = 14;
    double pilot_power_ratio = 3.0;
    int oversampling = 20;
    int kappa = 3;
    int n_iters = 10;
    int n_runs = 100;
    std::vector<double> snr_db{10.0, 20.0, 30.0};
    std::uint64_t seed = 1;
    double carrier_freq_hz = 2e9;
    double sample_interval_s = 2e-6;
    std::vector<std::vector<HopConfig>> links;  // [k][rho]
    std::string out = "results.csv";

    int n_hops() const { return links.empty() ? 0 : static_cast<int>(links.front().size()); }
    /// Receiver-side Doppler bound: n_hops times the largest per-hop maximum.
    double f_upper_norm() const;
    void validate() const;
};

ExperimentConfig dualhop_preset();
ExperimentConfig threehop_preset();

/// Loads a config from JSON; unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& path);

/// One aggregated row. iteration 0 is the LS initialization, 1..n_iters the
/// VI iterations, and -1 the perfect-CSI reference detector (mse/active 0).
struct MetricsRecord {
    double snr_db = 0.0;
    int iteration = 0;
    double mse_mean = 0.0;
    double ber_mean = 0.0;
    double active_bases_mean = 0.0;
    int runs = 0;
};

/// Per-run trajectories, exposed for statistical tests.
struct RunTrace {
    std::vector<double> mse;     // index = iteration (0..n_iters)
    std::vector<double> ber;
    std::vector<double> active;
    double csi_ber = 0.0;
};

/// Bit error rate between detected and true data symbols, counted over the
/// free data positions (pilots and forced-zero edges excluded).
double qpsk_ber(const CVec& detected_x_d, const CVec& true_x_d, const OfdmFrameSpec& spec);

/// Viterbi detection with the true composite channel (empty spread set).
CVec perfect_csi_detect(const CVec& y, const CompositeChannel& truth,
                        const OfdmFrameSpec& spec, int kappa);

/// Full Monte Carlo sweep. n_threads 0 picks the hardware concurrency.
/// Results are deterministic for a fixed seed regardless of thread count.
std::vector<MetricsRecord> run_experiment(const ExperimentConfig& config,
                                          int n_threads = 0,
                                          std::vector<std::vector<RunTrace>>* traces = nullptr);

/// CSV with header snr_db,iteration,mse_mean,ber_mean,active_bases_mean,runs
/// and 9-significant-digit floats.
void write_csv(const std::string& path, const std::vector<MetricsRecord>& records);
std::string csv_string(const std::vector<MetricsRecord>& records);

} // namespace relayvi

#endif
