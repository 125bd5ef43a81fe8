// Command-line front end: benchmark runner, synthetic data generator,
// dataset diagnostics, and hyperparameter sweeps.

#include "oslo/bench.hpp"
#include "oslo/diagnostics.hpp"
#include "oslo/episodes.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

oslo::FeatureSet load_or_throw(const std::string& path) {
    try {
        return oslo::load_features(path);
    } catch (const std::exception& e) {
        throw DataError(e.what());
    }
}

struct BenchFlags {
    std::string features_path;
    std::string methods = "oslo";
    std::string mode = "standard";
    std::string centering;
    std::string knn_agg = "kth_distance";
    oslo::BenchConfig config;
};

void add_episode_flags(CLI::App* cmd, BenchFlags& flags) {
    cmd->add_option("--features", flags.features_path, "Feature file (one JSON record per line)")
        ->required();
    cmd->add_option("--ways", flags.config.episode.n_ways, "Closed-set classes per task");
    cmd->add_option("--shots", flags.config.episode.n_shots, "Support instances per class");
    cmd->add_option("--queries-per-class", flags.config.episode.n_query_per_class,
                    "Query instances per participating class");
    cmd->add_option("--open-classes", flags.config.episode.n_open_classes,
                    "Open-set classes per task (standard mode)");
    cmd->add_option("--mode", flags.mode, "Sampling mode: standard|broad")
        ->check(CLI::IsMember({"standard", "broad"}));
    cmd->add_option("--tasks", flags.config.n_tasks, "Number of tasks");
    cmd->add_option("--seed", flags.config.episode.rng_seed, "Benchmark seed");
    cmd->add_option("--methods", flags.methods,
                    "Comma-separated subset of oslo,oslo_no_xi,simpleshot_maxprob,knn,strong_baseline");
    cmd->add_option("--lambda-z", flags.config.solver.lambda_z, "Assignment entropy weight");
    cmd->add_option("--lambda-xi", flags.config.solver.lambda_xi, "Inlierness entropy weight");
    cmd->add_option("--max-iters", flags.config.solver.max_iters, "Maximum solver cycles");
    cmd->add_option("--rel-tol", flags.config.solver.rel_tol, "Relative objective stop tolerance");
    cmd->add_option("--offset", flags.config.solver.likelihood_offset, "Log-likelihood offset");
    cmd->add_flag("--fix-xi", flags.config.solver.fix_xi_to_one,
                  "Optimize the standard likelihood (inlierness fixed at 1)");
    cmd->add_flag("!--no-normalize-centroids", flags.config.solver.normalize_centroids,
                  "Skip the unit-sphere centroid projection");
    cmd->add_option("--knn-k", flags.config.knn.k, "Neighbor count for the k-NN detector");
    cmd->add_option("--knn-agg", flags.knn_agg, "k-NN score: kth_distance|mean_of_k")
        ->check(CLI::IsMember({"kth_distance", "mean_of_k"}));
    cmd->add_option("--centering", flags.centering,
                    "Override per-method centering: base|task")
        ->check(CLI::IsMember({"base", "task"}));
    cmd->add_option("--workers", flags.config.n_workers, "Worker thread count");
    cmd->set_config("--config", "", "Read defaults from a config file (flags win)");
}

oslo::BenchConfig resolve_flags(BenchFlags& flags) {
    flags.config.episode.mode = flags.mode == "broad" ? oslo::EpisodeMode::broad
                                                      : oslo::EpisodeMode::standard;
    flags.config.methods.clear();
    std::stringstream ss(flags.methods);
    std::string name;
    while (std::getline(ss, name, ',')) {
        if (!name.empty()) flags.config.methods.push_back(oslo::method_from_string(name));
    }
    flags.config.knn.aggregation = flags.knn_agg == "mean_of_k"
                                       ? oslo::KnnConfig::Aggregation::mean_of_k
                                       : oslo::KnnConfig::Aggregation::kth_distance;
    if (flags.centering == "base") flags.config.centering_override = oslo::CenteringKind::base;
    if (flags.centering == "task") flags.config.centering_override = oslo::CenteringKind::task;
    return flags.config;
}

void print_summary(const oslo::BenchResult& result) {
    for (const auto& [method, summary] : result.summary) {
        std::printf("%-20s", oslo::to_string(method));
        if (summary.acc) {
            std::printf(" acc %.4f±%.4f", summary.acc->mean, summary.acc->ci95_half_width);
        } else {
            std::printf(" acc       -   ");
        }
        std::printf(" auroc %.4f±%.4f aupr %.4f±%.4f prec@0.9 %.4f±%.4f\n",
                    summary.auroc.mean, summary.auroc.ci95_half_width,
                    summary.aupr.mean, summary.aupr.ci95_half_width,
                    summary.prec_at_090.mean, summary.prec_at_090.ci95_half_width);
    }
}

std::vector<double> parse_grid(const std::string& grid) {
    std::vector<double> values;
    std::stringstream ss(grid);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) values.push_back(std::stod(token));
    }
    if (values.empty()) throw CLI::ValidationError("grid", "empty grid");
    return values;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transductive few-shot open-set inference on precomputed features"};
    app.require_subcommand(1);

    BenchFlags bench_flags;
    std::string bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "Run the episodic benchmark");
    add_episode_flags(bench_cmd, bench_flags);
    bench_cmd->add_option("--out", bench_out, "Results CSV path (summary lands next to it)");

    oslo::SyntheticSpec synth_spec;
    int synth_base_classes = 0;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic feature file");
    synth_cmd->add_option("--classes", synth_spec.num_classes, "Test-split class count")->required();
    synth_cmd->add_option("--dim", synth_spec.dim, "Feature dimension")->required();
    synth_cmd->add_option("--separation", synth_spec.separation,
                          "Class direction strength relative to unit noise");
    synth_cmd->add_option("--per-class", synth_spec.samples_per_class, "Samples per class");
    synth_cmd->add_option("--seed", synth_spec.rng_seed, "Generator seed");
    synth_cmd->add_option("--base-classes", synth_base_classes,
                          "Additional base-split classes (for base centering)");
    synth_cmd->add_option("--out", synth_out, "Output path")->required();

    std::string diag_features;
    std::string diag_split = "test";
    auto* diag_cmd = app.add_subcommand("diag", "Report MIF and variance ratio for a feature file");
    diag_cmd->add_option("--features", diag_features, "Feature file")->required();
    diag_cmd->add_option("--split", diag_split, "Split to analyze: base|validation|test")
        ->check(CLI::IsMember({"base", "validation", "test"}));

    BenchFlags sweep_flags;
    std::string sweep_out;
    std::string lambda_z_grid = "0.5,1,2";
    std::string lambda_xi_grid = "0.5,1,2";
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid sweep over the entropy weights");
    add_episode_flags(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--lambda-z-grid", lambda_z_grid, "Comma-separated lambda_z values");
    sweep_cmd->add_option("--lambda-xi-grid", lambda_xi_grid, "Comma-separated lambda_xi values");
    sweep_cmd->add_option("--out", sweep_out, "Sweep CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (bench_cmd->parsed()) {
            const oslo::FeatureSet data = load_or_throw(bench_flags.features_path);
            oslo::BenchConfig config = resolve_flags(bench_flags);
            config.output_path = bench_out;
            const oslo::BenchResult result = oslo::run_benchmark(config, data);
            print_summary(result);
            if (!bench_out.empty()) {
                std::printf("wrote %zu rows to %s\n", result.rows.size(), bench_out.c_str());
            }
        } else if (synth_cmd->parsed()) {
            const oslo::Dataset test = oslo::generate_synthetic_dataset(synth_spec, oslo::Split::test);
            std::vector<const oslo::Dataset*> datasets{&test};
            oslo::Dataset base;
            if (synth_base_classes > 0) {
                oslo::SyntheticSpec base_spec = synth_spec;
                base_spec.num_classes = synth_base_classes;
                base_spec.rng_seed = oslo::splitmix64(synth_spec.rng_seed ^ 0xB5A5ULL);
                base = oslo::generate_synthetic_dataset(base_spec, oslo::Split::base,
                                                        synth_spec.num_classes, "b");
                datasets.push_back(&base);
            }
            oslo::save_features(synth_out, datasets);
            std::printf("wrote %s\n", synth_out.c_str());
        } else if (diag_cmd->parsed()) {
            const oslo::FeatureSet data = load_or_throw(diag_features);
            const oslo::Dataset& dataset = diag_split == "base" ? data.base
                                         : diag_split == "validation" ? data.validation
                                                                      : data.test;
            if (dataset.records.empty()) throw DataError("split '" + diag_split + "' is empty");
            std::printf("mif %.6f\n", oslo::mean_imposture_factor(dataset));
            std::printf("rho %.6f\n", oslo::variance_ratio(dataset));
        } else if (sweep_cmd->parsed()) {
            const oslo::FeatureSet data = load_or_throw(sweep_flags.features_path);
            oslo::BenchConfig config = resolve_flags(sweep_flags);
            const auto z_values = parse_grid(lambda_z_grid);
            const auto xi_values = parse_grid(lambda_xi_grid);
            std::FILE* out = nullptr;
            if (!sweep_out.empty()) {
                out = std::fopen(sweep_out.c_str(), "w");
                if (!out) throw std::runtime_error("cannot open sweep output: " + sweep_out);
            }
            const char* header = "lambda_z,lambda_xi,method,acc,auroc,aupr,prec_at_090";
            std::printf("%s\n", header);
            if (out) std::fprintf(out, "%s\n", header);
            for (double lz : z_values) {
                for (double lxi : xi_values) {
                    config.solver.lambda_z = lz;
                    config.solver.lambda_xi = lxi;
                    const oslo::BenchResult result = oslo::run_benchmark(config, data);
                    for (const auto& [method, summary] : result.summary) {
                        char line[256];
                        std::snprintf(line, sizeof(line), "%g,%g,%s,%.6f,%.6f,%.6f,%.6f",
                                      lz, lxi, oslo::to_string(method),
                                      summary.acc ? summary.acc->mean : -1.0,
                                      summary.auroc.mean, summary.aupr.mean,
                                      summary.prec_at_090.mean);
                        std::printf("%s\n", line);
                        if (out) std::fprintf(out, "%s\n", line);
                    }
                }
            }
            if (out) std::fclose(out);
        }
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
