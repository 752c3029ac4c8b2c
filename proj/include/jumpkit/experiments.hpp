#ifndef JUMPKIT_EXPERIMENTS_HPP
#define JUMPKIT_EXPERIMENTS_HPP

// Configuration-driven experiment runner. Each experiment resolves its config
// against a schema (unknown keys rejected, defaults filled in), writes its
// CSV tables plus a manifest echoing the resolved configuration, and is
// bit-reproducible for identical (config, seed, version).

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "jumpkit/beables.hpp"
#include "jumpkit/config.hpp"
#include "jumpkit/csv.hpp"
#include "jumpkit/decay.hpp"
#include "jumpkit/errors.hpp"
#include "jumpkit/hilbert.hpp"
#include "jumpkit/ion.hpp"
#include "jumpkit/pilot.hpp"
#include "jumpkit/zeno.hpp"

namespace jumpkit {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

namespace experiments {

inline Matrix pauli_x() {
    Matrix s(2, 2);
    s << 0.0, 1.0, 1.0, 0.0;
    return s;
}

struct Schema {
    std::vector<std::string> known;
    std::vector<std::string> required;
    std::vector<std::pair<std::string, std::string>> defaults;
};

inline Schema schema_for(const std::string& experiment) {
    Schema s;
    s.known = {"experiment", "seed", "output_dir"};
    s.defaults = {{"seed", "0"}, {"output_dir", "."}};
    auto add = [&s](const std::string& key, const std::string& def) {
        s.known.push_back(key);
        if (!def.empty()) s.defaults.emplace_back(key, def);
    };
    if (experiment == "zeno") {
        add("N_list", "1,2,4,8,16,32,64,128,256");
        add("T", "1.5707963267948966");
        add("omega", "1");
    } else if (experiment == "decay") {
        s.required = {"epsilon"};
        add("epsilon", "");
        add("g", "1");
        add("L", "400");
        add("E0", "0");
        add("T", "50");
        add("dt", "0.01");
    } else if (experiment == "ion") {
        add("lambda_re", "1");
        add("lambda_im", "0");
        add("Lambda_re", "0.02");
        add("Lambda_im", "0");
        add("delta_R", "0");
        add("delta_B", "0");
        add("gamma_R_re", "1");
        add("gamma_R_im", "0");
        add("gamma_B_re", "0.001");
        add("gamma_B_im", "0");
        add("horizon", "2000");
        add("bin_width", "0");
    } else if (experiment == "beables-demo") {
        add("T", "1.4");
        add("steps", "20000");
        add("p_floor", "1e-12");
    } else {
        throw ConfigError("key 'experiment': unknown experiment '" + experiment + "'");
    }
    return s;
}

// Parse, fill defaults, and run every domain check that does not require
// actually executing the experiment.
inline Config resolve(const std::string& config_path) {
    Config cfg = Config::parse_file(config_path);
    std::string experiment = cfg.get_string("experiment");
    Schema schema = schema_for(experiment);
    cfg.check_schema(schema.known, schema.required);
    for (const auto& [key, value] : schema.defaults) cfg.set_default(key, value);

    if (experiment == "zeno") {
        if (!(cfg.get_double("T") > 0.0)) throw ConfigError("key 'T': must be positive");
        for (std::int64_t n : cfg.get_int_list("N_list"))
            if (n < 1) throw ConfigError("key 'N_list': entries must be >= 1");
    } else if (experiment == "decay") {
        double epsilon = cfg.get_double("epsilon");
        double g = cfg.get_double("g");
        std::int64_t chain = cfg.get_int("L");
        if (!(epsilon > 0.0)) throw ConfigError("key 'epsilon': must be positive");
        if (!(g > 0.0)) throw ConfigError("key 'g': must be positive");
        if (epsilon > 0.5 * g) throw ConfigError("key 'epsilon': must be <= g/2 (weak coupling)");
        if (chain < 50) throw ConfigError("key 'L': must be >= 50");
        if (!(cfg.get_double("dt") > 0.0)) throw ConfigError("key 'dt': must be positive");
        double t_end = cfg.get_double("T");
        if (!(t_end > 0.0)) throw ConfigError("key 'T': must be positive");
        if (t_end > static_cast<double>(chain) / (2.0 * g))
            throw ConfigError("key 'T': exceeds the pre-revival window L/(2g)");
    } else if (experiment == "ion") {
        if (cfg.get_double("gamma_R_re") < 0.0) throw ConfigError("key 'gamma_R_re': must be >= 0");
        if (!(cfg.get_double("gamma_B_re") > 0.0)) throw ConfigError("key 'gamma_B_re': must be positive");
        if (!(cfg.get_double("horizon") > 0.0)) throw ConfigError("key 'horizon': must be positive");
        if (cfg.get_double("bin_width") < 0.0) throw ConfigError("key 'bin_width': must be >= 0");
    } else if (experiment == "beables-demo") {
        double t_end = cfg.get_double("T");
        if (!(t_end > 0.0 && t_end <= 1.5))
            throw ConfigError("key 'T': must lie in (0, 1.5]; rates blow up at the quarter period");
        if (cfg.get_int("steps") < 2) throw ConfigError("key 'steps': must be >= 2");
        if (!(cfg.get_double("p_floor") > 0.0)) throw ConfigError("key 'p_floor': must be positive");
    }
    return cfg;
}

inline void write_manifest(const Config& cfg, const std::filesystem::path& dir) {
    std::ofstream out(dir / "manifest", std::ios::binary);
    if (!out) throw IoError("cannot write manifest in " + dir.string());
    out << "# jumpkit " << kVersion << "\n";
    for (const auto& [key, value] : cfg.values()) out << key << " = " << value << "\n";
    if (!out) throw IoError("write failure on manifest");
}

inline void run_zeno(const Config& cfg, const std::filesystem::path& dir) {
    double omega = cfg.get_double("omega");
    double t_end = cfg.get_double("T");
    Matrix h = omega * pauli_x();
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    Projector pi_a = Projector::onto_basis(2, {0});

    CsvWriter csv((dir / "zeno_survival.csv").string(), "N,p_N");
    for (std::int64_t n : cfg.get_int_list("N_list")) {
        double p_n = watched_pot(h, psi0, pi_a, Dissection::uniform(t_end, static_cast<int>(n))).back();
        csv.field(static_cast<long long>(n)).field(p_n);
        csv.end_row();
    }
}

// Two-block rate evaluator with the family and Hamiltonian built once.
class DecayRateSeries {
  public:
    explicit DecayRateSeries(const DecayModel& m)
        : fam_(m.two_block_family()), h_(m.full_hamiltonian()) {}

    std::pair<double, double> at(const Trajectory& pilot, std::size_t k) const {
        const Vector& psi = pilot.states[k];
        RealMatrix j = current_matrix(psi, h_, fam_, pilot.times[k]);
        RealVector p = born_probabilities(psi, fam_, pilot.times[k]);
        RealMatrix rates = bell_rates(j, p);
        return {rates(0, 1), rates(1, 0)};
    }

  private:
    ViableFamily fam_;
    Matrix h_;
};

inline void run_decay(const Config& cfg, const std::filesystem::path& dir) {
    DecayModel model = DecayModel::make(cfg.get_double("epsilon"), cfg.get_double("E0"),
                                        static_cast<int>(cfg.get_int("L")), cfg.get_double("g"));
    double t_end = cfg.get_double("T");
    double dt = cfg.get_double("dt");
    auto n_pts = static_cast<std::size_t>(std::lround(t_end / dt)) + 1;
    std::vector<double> grid = uniform_grid(0.0, t_end, n_pts);

    ComplexSamples f = survival_direct(model, grid);
    CsvWriter amp((dir / "decay_amplitude.csv").string(), "t,re_f,im_f,abs_f2");
    for (std::size_t k = 0; k < grid.size(); ++k) {
        Complex v = f.values[static_cast<Eigen::Index>(k)];
        amp.field(grid[k]).field(v.real()).field(v.imag()).field(std::norm(v));
        amp.end_row();
    }

    Trajectory pilot = decay_pilot(model, grid);
    DecayRateSeries rates(model);
    std::size_t stride = std::max<std::size_t>(1, (grid.size() - 1) / 400);
    CsvWriter rate_csv((dir / "decay_rates.csv").string(), "t,T_0d,T_d0");
    for (std::size_t k = 0; k < grid.size(); k += stride) {
        auto [t_0d, t_d0] = rates.at(pilot, k);
        rate_csv.field(grid[k]).field(t_0d).field(t_d0);
        rate_csv.end_row();
    }
}

inline void run_ion(const Config& cfg, const std::filesystem::path& dir) {
    IonParams params;
    params.lambda_r = Complex(cfg.get_double("lambda_re"), cfg.get_double("lambda_im"));
    params.lambda_b = Complex(cfg.get_double("Lambda_re"), cfg.get_double("Lambda_im"));
    params.delta_r = cfg.get_double("delta_R");
    params.delta_b = cfg.get_double("delta_B");
    params.gamma_r = Complex(cfg.get_double("gamma_R_re"), cfg.get_double("gamma_R_im"));
    params.gamma_b = Complex(cfg.get_double("gamma_B_re"), cfg.get_double("gamma_B_im"));
    double horizon = cfg.get_double("horizon");

    JumpRecord record = TelegraphSampler(params).sample(horizon, cfg.get_uint("seed"));

    CsvWriter rec((dir / "ion_record.csv").string(), "t,color");
    for (const PhotonEvent& e : record.events) {
        rec.field(e.time).field(std::string(to_string(e.color)));
        rec.end_row();
    }

    double bin_width = cfg.get_double("bin_width");
    if (bin_width <= 0.0) bin_width = horizon / 400.0;
    auto n_bins = static_cast<std::size_t>(std::ceil(horizon / bin_width));
    std::vector<long long> red_counts(n_bins, 0);
    for (const PhotonEvent& e : record.events) {
        if (e.color != PhotonColor::red) continue;
        auto b = static_cast<std::size_t>(e.time / bin_width);
        if (b >= n_bins) b = n_bins - 1;
        red_counts[b] += 1;
    }
    CsvWriter trace((dir / "ion_trace.csv").string(), "t_bin,red_count");
    for (std::size_t b = 0; b < n_bins; ++b) {
        trace.field(b * bin_width).field(red_counts[b]);
        trace.end_row();
    }
}

inline void run_beables_demo(const Config& cfg, const std::filesystem::path& dir) {
    double t_end = cfg.get_double("T");
    auto steps = static_cast<std::size_t>(cfg.get_int("steps"));
    Matrix h = pauli_x();
    Vector psi0(2);
    psi0 << 1.0, 0.0;
    std::vector<double> grid = uniform_grid(0.0, t_end, steps + 1);
    Trajectory pilot = evolve(HamiltonianSchedule::constant(h), psi0, grid, EvolveMethod::eig_exact);

    Matrix f0 = Matrix::Zero(2, 1), f1 = Matrix::Zero(2, 1);
    f0(0, 0) = 1.0;
    f1(1, 0) = 1.0;
    ViableFamily fam = ViableFamily::fixed({f0, f1}, {"S1", "S2"});
    RateTable table(pilot, fam, h, cfg.get_double("p_floor"));
    VisibleTrajectory visible = table.sample(cfg.get_uint("seed"));

    CsvWriter vis((dir / "beables-demo_visible.csv").string(), "t,label");
    for (std::size_t k = 0; k < visible.times.size(); ++k) {
        vis.field(visible.times[k]).field(visible.labels[static_cast<std::size_t>(visible.label_index[k])]);
        vis.end_row();
    }
    CsvWriter jumps((dir / "beables-demo_jumps.csv").string(), "t,from,to");
    for (const Jump& j : visible.jumps) {
        jumps.field(j.time)
            .field(visible.labels[static_cast<std::size_t>(j.from)])
            .field(visible.labels[static_cast<std::size_t>(j.to)]);
        jumps.end_row();
    }
}

}  // namespace experiments

// Parses and schema-checks a config without running it. Exit code 0 or 2.
inline int validate(const std::string& config_path, std::ostream& err = std::cerr) {
    try {
        experiments::resolve(config_path);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return kExitIo;
    }
}

// Runs the configured experiment. Exit codes: 0 ok, 2 config error,
// 3 numeric/convergence error, 4 I/O error.
inline int run(const std::string& config_path, std::ostream& err = std::cerr) {
    try {
        Config cfg = experiments::resolve(config_path);
        std::filesystem::path dir(cfg.get_string("output_dir"));
        std::error_code fs_err;
        std::filesystem::create_directories(dir, fs_err);
        if (fs_err) throw IoError("cannot create output directory " + dir.string());
        experiments::write_manifest(cfg, dir);

        const std::string experiment = cfg.get_string("experiment");
        if (experiment == "zeno")
            experiments::run_zeno(cfg, dir);
        else if (experiment == "decay")
            experiments::run_decay(cfg, dir);
        else if (experiment == "ion")
            experiments::run_ion(cfg, dir);
        else if (experiment == "beables-demo")
            experiments::run_beables_demo(cfg, dir);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        err << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace jumpkit

#endif
