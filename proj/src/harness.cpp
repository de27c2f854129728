#include "relayvi/harness.hpp"

#include <atomic>
#include <bit>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "relayvi/bem.hpp"
#include "relayvi/init_ls.hpp"
#include "relayvi/vi_estimator.hpp"

namespace relayvi {

double ExperimentConfig::f_upper_norm() const {
    double max_doppler = 0.0;
    for (const auto& link : links) {
        for (const auto& hop : link) {
            max_doppler = std::max(max_doppler, hop.max_norm_doppler);
        }
    }
    return n_hops() * max_doppler;
}

void ExperimentConfig::validate() const {
    if (n_subcarriers < 8) throw std::invalid_argument("config: n_subcarriers too small");
    if (cp_len < 1) throw std::invalid_argument("config: cp_len must be positive");
    if (3 * n_pilot_clusters > n_subcarriers)
        throw std::invalid_argument("config: pilot clusters do not fit");
    if (oversampling < 1) throw std::invalid_argument("config: oversampling must be >= 1");
    if (kappa < 0 || 2 * kappa + 1 > n_subcarriers)
        throw std::invalid_argument("config: kappa too large");
    if (n_iters < 0 || n_runs < 1) throw std::invalid_argument("config: bad run counts");
    if (snr_db.empty()) throw std::invalid_argument("config: empty SNR list");
    if (links.empty()) throw std::invalid_argument("config: no links");
    const int hops = n_hops();
    if (hops < 2) throw std::invalid_argument("config: need at least two hops per link");
    int worst = 0;
    for (const auto& link : links) {
        if (static_cast<int>(link.size()) != hops)
            throw std::invalid_argument("config: ragged links");
        int sum = 0;
        for (const auto& hop : link) {
            if (hop.n_taps < 1 || hop.n_taps > static_cast<int>(hop.tap_pool.size()))
                throw std::invalid_argument("config: bad tap counts");
            sum += hop.max_delay;
        }
        worst = std::max(worst, sum - (hops - 1));
    }
    if (worst > cp_len)
        throw std::invalid_argument("config: composite channel exceeds CP length");
}

ExperimentConfig dualhop_preset() {
    ExperimentConfig cfg;
    cfg.kappa = 3;
    // Two links; the worst path pairs the 5-delay-span first hop with the
    // 4-span second hop, giving composite length 5+4-1 = 8 = cp_len.
    HopConfig sr1{3, 2, {0, 1, 2}, 0.05};
    HopConfig rd1{3, 2, {0, 1, 2}, 0.15};
    HopConfig sr2{5, 2, {0, 1, 2, 3, 4}, 0.05};
    HopConfig rd2{4, 2, {0, 1, 2, 3}, 0.15};
    cfg.links = {{sr1, rd1}, {sr2, rd2}};
    return cfg;
}

ExperimentConfig threehop_preset() {
    ExperimentConfig cfg;
    cfg.kappa = 4;
    const auto consecutive = [](int n_taps, double doppler) {
        HopConfig h;
        h.max_delay = n_taps;
        h.n_taps = n_taps;
        for (int i = 0; i < n_taps; ++i) h.tap_pool.push_back(i);
        h.max_norm_doppler = doppler;
        return h;
    };
    cfg.links = {
        {consecutive(2, 0.05), consecutive(3, 0.15), consecutive(2, 0.05)},
        {consecutive(3, 0.05), consecutive(2, 0.15), consecutive(2, 0.05)},
    };
    return cfg;
}

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& j, const std::vector<std::string>& allowed,
                         const std::string& where) {
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const auto& k : allowed) {
            if (item.key() == k) { ok = true; break; }
        }
        if (!ok) throw std::invalid_argument("config: unknown key '" + item.key() + "' in " + where);
    }
}

HopConfig hop_from_json(const json& j) {
    reject_unknown_keys(j, {"max_delay", "n_taps", "tap_pool", "max_norm_doppler"}, "hop");
    HopConfig h;
    h.max_delay = j.at("max_delay").get<int>();
    h.n_taps = j.at("n_taps").get<int>();
    h.tap_pool = j.at("tap_pool").get<std::vector<int>>();
    h.max_norm_doppler = j.at("max_norm_doppler").get<double>();
    return h;
}

} // namespace

ExperimentConfig config_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    json j = json::parse(in);
    reject_unknown_keys(j,
                        {"n_subcarriers", "cp_len", "n_pilot_clusters", "pilot_power_ratio",
                         "oversampling", "kappa", "n_iters", "n_runs", "snr_db", "seed",
                         "carrier_freq_hz", "sample_interval_s", "links", "out"},
                        "top level");

    ExperimentConfig cfg;
    if (j.contains("n_subcarriers")) cfg.n_subcarriers = j["n_subcarriers"].get<int>();
    if (j.contains("cp_len")) cfg.cp_len = j["cp_len"].get<int>();
    if (j.contains("n_pilot_clusters")) cfg.n_pilot_clusters = j["n_pilot_clusters"].get<int>();
    if (j.contains("pilot_power_ratio")) cfg.pilot_power_ratio = j["pilot_power_ratio"].get<double>();
    if (j.contains("oversampling")) cfg.oversampling = j["oversampling"].get<int>();
    if (j.contains("kappa")) cfg.kappa = j["kappa"].get<int>();
    if (j.contains("n_iters")) cfg.n_iters = j["n_iters"].get<int>();
    if (j.contains("n_runs")) cfg.n_runs = j["n_runs"].get<int>();
    if (j.contains("snr_db")) cfg.snr_db = j["snr_db"].get<std::vector<double>>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("carrier_freq_hz")) cfg.carrier_freq_hz = j["carrier_freq_hz"].get<double>();
    if (j.contains("sample_interval_s")) cfg.sample_interval_s = j["sample_interval_s"].get<double>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("links")) {
        cfg.links.clear();
        for (const auto& jl : j["links"]) {
            reject_unknown_keys(jl, {"hops"}, "link");
            std::vector<HopConfig> link;
            for (const auto& jh : jl.at("hops")) link.push_back(hop_from_json(jh));
            cfg.links.push_back(std::move(link));
        }
    } else {
        cfg.links = dualhop_preset().links;
    }
    return cfg;
}

double qpsk_ber(const CVec& detected_x_d, const CVec& true_x_d, const OfdmFrameSpec& spec) {
    if (detected_x_d.size() != spec.n_data() || true_x_d.size() != spec.n_data())
        throw std::invalid_argument("qpsk_ber: length mismatch");
    const auto index_of = [&](cplx v) {
        int best = 0;
        double best_d2 = std::norm(v - spec.constellation[0]);
        for (int k = 1; k < static_cast<int>(spec.constellation.size()); ++k) {
            const double d2 = std::norm(v - spec.constellation[k]);
            if (d2 < best_d2) { best_d2 = d2; best = k; }
        }
        return best;
    };
    const int bits_per_symbol = std::bit_width(spec.constellation.size() - 1);
    long errors = 0;
    long total = 0;
    for (int i = 0; i < spec.n_data(); ++i) {
        if (spec.is_forced_zero_data(i)) continue;
        errors += std::popcount(static_cast<unsigned>(index_of(detected_x_d(i)) ^
                                                      index_of(true_x_d(i))));
        total += bits_per_symbol;
    }
    return total ? static_cast<double>(errors) / total : 0.0;
}

CVec perfect_csi_detect(const CVec& y, const CompositeChannel& truth,
                        const OfdmFrameSpec& spec, int kappa) {
    const CMat d = spec.dft * truth.circulant_form * spec.dft.adjoint();
    BandedSet set;
    set.kappa = kappa;
    set.center = banded_projection(d, kappa);
    return detect(y, set, spec);
}

namespace {

std::mt19937_64 run_rng(std::uint64_t master, int snr_index, int run_index) {
    std::seed_seq seq{static_cast<std::uint32_t>(master),
                      static_cast<std::uint32_t>(master >> 32),
                      static_cast<std::uint32_t>(snr_index),
                      static_cast<std::uint32_t>(run_index)};
    return std::mt19937_64(seq);
}

RunTrace simulate_one_run(const ExperimentConfig& cfg, int snr_index, int run_index) {
    std::mt19937_64 rng = run_rng(cfg.seed, snr_index, run_index);
    const double noise_power = std::pow(10.0, -cfg.snr_db[snr_index] / 10.0);

    OfdmFrameSpec frame = build_pilot_pattern(cfg.n_subcarriers, cfg.n_pilot_clusters,
                                              rng(), cfg.pilot_power_ratio, cfg.kappa);
    frame.cp_len = cfg.cp_len;

    // Source data; forced-zero edges transmitted as zeros.
    CVec true_x_d(frame.n_data());
    std::uniform_int_distribution<int> pick(0, static_cast<int>(frame.constellation.size()) - 1);
    for (int i = 0; i < frame.n_data(); ++i) {
        true_x_d(i) = frame.is_forced_zero_data(i) ? cplx(0.0, 0.0)
                                                   : frame.constellation[pick(rng)];
    }
    const FreqSymbol x = assemble(frame, true_x_d, frame.pilot_values);

    std::vector<std::vector<HopChannelSpec>> hop_specs;
    for (const auto& link : cfg.links) {
        std::vector<HopChannelSpec> specs;
        for (const auto& hop : link) {
            specs.push_back(HopChannelSpec{hop.max_delay, hop.n_taps, hop.tap_pool,
                                           hop.max_norm_doppler});
        }
        hop_specs.push_back(std::move(specs));
    }
    const RelaySystem system =
        draw_system(hop_specs, noise_power, cfg.n_subcarriers, cfg.cp_len, rng);
    const PropagateResult rx = propagate(frame, x, system, rng);

    const double f_up = cfg.f_upper_norm();
    const BemBasis basis1 = make_basis(cfg.n_subcarriers, 1, f_up, cfg.cp_len);
    const BemBasis basis = make_basis(cfg.n_subcarriers, cfg.oversampling, f_up, cfg.cp_len);

    const InitBundle init = make_init(rx.y_freq, frame, basis1);

    RunTrace trace;
    trace.mse.assign(cfg.n_iters + 1, 0.0);
    trace.ber.assign(cfg.n_iters + 1, 0.0);
    trace.active.assign(cfg.n_iters + 1, 0.0);
    trace.mse[0] = channel_mse(coeffs_to_taps(basis1, init.mu0), rx.truth.taps);
    trace.ber[0] = qpsk_ber(init.x_d0, true_x_d, frame);
    trace.active[0] = basis.total_cols();

    ViRunOptions opts;
    opts.n_iters = cfg.n_iters;
    opts.kappa = cfg.kappa;
    opts.diagnostics = [&](int iter, const ViState& state, double) {
        trace.mse[iter] = channel_mse(coeffs_to_taps(state.basis, state.m_mu), rx.truth.taps);
        trace.ber[iter] = qpsk_ber(state.x_d_hat, true_x_d, frame);
        trace.active[iter] = state.basis.n_active();
    };
    run(rx.y_freq, frame, basis, init, opts);

    trace.csi_ber =
        qpsk_ber(perfect_csi_detect(rx.y_freq, rx.truth, frame, cfg.kappa), true_x_d, frame);
    return trace;
}

} // namespace

std::vector<MetricsRecord> run_experiment(const ExperimentConfig& cfg, int n_threads,
                                          std::vector<std::vector<RunTrace>>* traces_out) {
    cfg.validate();
    const int n_snr = static_cast<int>(cfg.snr_db.size());
    std::vector<std::vector<RunTrace>> traces(n_snr, std::vector<RunTrace>(cfg.n_runs));

    if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    const int total = n_snr * cfg.n_runs;
    n_threads = std::min(n_threads, total);

    std::atomic<int> next{0};
    const auto worker = [&]() {
        for (;;) {
            const int job = next.fetch_add(1);
            if (job >= total) return;
            const int si = job / cfg.n_runs;
            const int run = job % cfg.n_runs;
            traces[si][run] = simulate_one_run(cfg, si, run);
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads - 1; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<MetricsRecord> records;
    for (int si = 0; si < n_snr; ++si) {
        MetricsRecord csi;
        csi.snr_db = cfg.snr_db[si];
        csi.iteration = -1;
        csi.runs = cfg.n_runs;
        for (const auto& tr : traces[si]) csi.ber_mean += tr.csi_ber;
        csi.ber_mean /= cfg.n_runs;
        records.push_back(csi);

        for (int it = 0; it <= cfg.n_iters; ++it) {
            MetricsRecord rec;
            rec.snr_db = cfg.snr_db[si];
            rec.iteration = it;
            rec.runs = cfg.n_runs;
            for (const auto& tr : traces[si]) {
                rec.mse_mean += tr.mse[it];
                rec.ber_mean += tr.ber[it];
                rec.active_bases_mean += tr.active[it];
            }
            rec.mse_mean /= cfg.n_runs;
            rec.ber_mean /= cfg.n_runs;
            rec.active_bases_mean /= cfg.n_runs;
            records.push_back(rec);
        }
    }
    if (traces_out) *traces_out = std::move(traces);
    return records;
}

std::string csv_string(const std::vector<MetricsRecord>& records) {
    std::string out = "snr_db,iteration,mse_mean,ber_mean,active_bases_mean,runs\n";
    char line[256];
    for (const auto& r : records) {
        std::snprintf(line, sizeof(line), "%.9g,%d,%.9g,%.9g,%.9g,%d\n", r.snr_db,
                      r.iteration, r.mse_mean, r.ber_mean, r.active_bases_mean, r.runs);
        out += line;
    }
    return out;
}

void write_csv(const std::string& path, const std::vector<MetricsRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    out << csv_string(records);
}

} // namespace relayvi
