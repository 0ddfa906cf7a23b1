// Command-line harness for the clustering-ensemble toolkit: ensemble
// generation, label alignment, metric evaluation, single consensus runs, and
// multi-trial experiments.

#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dskf/alignment.hpp"
#include "dskf/consensus.hpp"
#include "dskf/experiment.hpp"
#include "dskf/generation.hpp"
#include "dskf/io.hpp"

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw dskf::DataError("cannot open config file: " + path);
    try {
        json j;
        in >> j;
        if (!j.is_object()) throw dskf::DataError("config must be a JSON object: " + path);
        return j;
    } catch (const json::exception& e) {
        throw dskf::DataError("bad config file " + path + ": " + std::string(e.what()));
    }
}

// Fill an option from the config file only when it was not given on the
// command line.
template <typename T>
void config_default(const CLI::App& cmd, const json& cfg, const std::string& flag,
                    const std::string& key, T& value) {
    if (cmd.count(flag) == 0 && cfg.contains(key)) value = cfg.at(key).get<T>();
}

dskf::Distance parse_distance(const std::string& s) {
    if (s == "euclidean") return dskf::Distance::euclidean;
    if (s == "cosine") return dskf::Distance::cosine;
    throw dskf::UsageError("unknown distance: " + s);
}

dskf::ReferenceStrategy parse_strategy(const std::string& s) {
    if (s == "random") return dskf::ReferenceStrategy::random;
    if (s == "max_entropy") return dskf::ReferenceStrategy::max_entropy;
    throw dskf::UsageError("unknown reference strategy: " + s);
}

std::set<std::string> parse_metrics(const std::string& csv) {
    std::set<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = dskf::detail::trim(item);
        if (!item.empty()) out.insert(item);
    }
    return out;
}

struct CommonGenFlags {
    std::string data;
    std::string label_column;
    bool standardize = false;
    int m = 50;
    int k_min = 2;
    int k_max = 2;
    std::string distance = "euclidean";
    int max_iters = 100;
    bool kmeanspp = false;
};

void add_gen_flags(CLI::App* cmd, CommonGenFlags& g, bool need_labels) {
    cmd->add_option("--data", g.data, "Dataset CSV (header row, numeric features)")->required();
    auto* lc = cmd->add_option("--label-column", g.label_column,
                               "Header name of the ground-truth label column");
    if (need_labels) lc->required();
    cmd->add_flag("--standardize", g.standardize, "Z-score each feature column");
    cmd->add_option("-m,--m", g.m, "Number of base partitions");
    cmd->add_option("--k-min", g.k_min, "Lower bound of the per-run k draw");
    cmd->add_option("--k-max", g.k_max, "Upper bound of the per-run k draw");
    cmd->add_option("--distance", g.distance, "euclidean or cosine");
    cmd->add_option("--max-iters", g.max_iters, "K-means iteration cap");
    cmd->add_flag("--kmeanspp", g.kmeanspp, "Use k-means++ seeding");
}

dskf::Dataset load_with_flags(const CommonGenFlags& g) {
    std::optional<std::string> lc;
    if (!g.label_column.empty()) lc = g.label_column;
    dskf::Dataset ds = dskf::load_dataset(g.data, lc);
    if (g.standardize) dskf::standardize(ds);
    return ds;
}

dskf::GenerationConfig gen_config(const CommonGenFlags& g, std::uint64_t seed) {
    dskf::GenerationConfig cfg;
    cfg.m = g.m;
    cfg.k_min = g.k_min;
    cfg.k_max = g.k_max;
    cfg.distance = parse_distance(g.distance);
    cfg.max_iters = g.max_iters;
    cfg.kmeanspp = g.kmeanspp;
    cfg.seed = seed;
    return cfg;
}

struct DskfFlags {
    int m_prime = 0;  // 0 = m/2
    double sigma = -1.0;
    double beta = 1.0;
    int final_k = 2;
    std::string weighting = "f_score";
    std::string strategy = "random";
};

void add_dskf_flags(CLI::App* cmd, DskfFlags& f) {
    cmd->add_option("--m-prime", f.m_prime, "Keep the m' most diverse partitions (0 = m/2)");
    cmd->add_option("--sigma", f.sigma, "Keep partitions with diversity strictly above sigma");
    cmd->add_option("--beta", f.beta, "F-score beta for cluster weighting");
    cmd->add_option("--final-k", f.final_k, "Cluster count of the consensus partition")->required();
    cmd->add_option("--weighting", f.weighting, "f_score or uniform");
    cmd->add_option("--strategy", f.strategy, "Reference choice: random or max_entropy");
}

dskf::DskfConfig dskf_config(const DskfFlags& f) {
    dskf::DskfConfig cfg;
    if (f.sigma >= 0.0) cfg.selection = dskf::Threshold{f.sigma};
    else cfg.selection = dskf::TopMPrime{f.m_prime};
    cfg.beta = f.beta;
    cfg.final_k = f.final_k;
    if (f.weighting == "uniform") cfg.weighting = dskf::DskfConfig::Weighting::uniform;
    else if (f.weighting == "f_score") cfg.weighting = dskf::DskfConfig::Weighting::f_score;
    else throw dskf::UsageError("unknown weighting: " + f.weighting);
    cfg.reference = parse_strategy(f.strategy);
    return cfg;
}

int run(int argc, char** argv) {
    CLI::App app{"Selective clustering ensemble toolkit (kappa diversity selection, "
                 "F-score cluster weighting, weighted co-association consensus)"};
    app.require_subcommand(1);

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "Generate a k-means base ensemble");
    CommonGenFlags gen_g;
    std::uint64_t gen_seed = 0;
    std::string gen_output, gen_cfg_path;
    add_gen_flags(gen_cmd, gen_g, false);
    gen_cmd->add_option("--seed", gen_seed, "Master seed");
    gen_cmd->add_option("--config", gen_cfg_path, "JSON config file (flags override)");
    gen_cmd->add_option("--output", gen_output, "Ensemble JSON output path")->required();

    // align
    auto* align_cmd = app.add_subcommand("align", "Align an ensemble to a common reference");
    std::string align_input, align_output, align_strategy = "random", align_cfg_path;
    std::uint64_t align_seed = 0;
    align_cmd->add_option("--input", align_input, "Ensemble JSON to align")->required();
    align_cmd->add_option("--strategy", align_strategy, "random or max_entropy");
    align_cmd->add_option("--seed", align_seed, "Seed for the random reference choice");
    align_cmd->add_option("--config", align_cfg_path, "JSON config file (flags override)");
    align_cmd->add_option("--output", align_output, "Aligned ensemble JSON output")->required();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Metrics between two label files");
    std::string eval_ref, eval_comp, eval_metrics = "nmi,kappa", eval_output, eval_cfg_path;
    double eval_beta = 1.0;
    eval_cmd->add_option("--reference", eval_ref, "Reference labels, one per line")->required();
    eval_cmd->add_option("--computed", eval_comp, "Computed labels, one per line")->required();
    eval_cmd->add_option("--metrics", eval_metrics,
                         "Comma list from {nmi,kappa,smep,accuracy,f}");
    eval_cmd->add_option("--beta", eval_beta, "F-score beta");
    eval_cmd->add_option("--config", eval_cfg_path, "JSON config file (flags override)");
    eval_cmd->add_option("--output", eval_output, "Optional JSON output path");

    // ensemble (one DSKF run)
    auto* ens_cmd = app.add_subcommand("ensemble", "One generation + consensus run");
    CommonGenFlags ens_g;
    DskfFlags ens_f;
    std::uint64_t ens_seed = 0;
    std::string ens_output, ens_report, ens_cfg_path;
    add_gen_flags(ens_cmd, ens_g, false);
    add_dskf_flags(ens_cmd, ens_f);
    ens_cmd->add_option("--seed", ens_seed, "Master seed");
    ens_cmd->add_option("--config", ens_cfg_path, "JSON config file (flags override)");
    ens_cmd->add_option("--output", ens_output, "Consensus labels output path")->required();
    ens_cmd->add_option("--report", ens_report, "Optional diagnostics JSON path");

    // experiment
    auto* exp_cmd = app.add_subcommand("experiment", "Multi-trial protocol with report");
    CommonGenFlags exp_g;
    DskfFlags exp_f;
    int exp_trials = 50;
    std::uint64_t exp_seed = 0;
    std::string exp_metrics = "nmi,kappa", exp_format = "table", exp_output, exp_cfg_path;
    add_gen_flags(exp_cmd, exp_g, true);
    add_dskf_flags(exp_cmd, exp_f);
    exp_cmd->add_option("--trials", exp_trials, "Number of independent runs");
    exp_cmd->add_option("--seed", exp_seed, "Master seed");
    exp_cmd->add_option("--metrics", exp_metrics, "Comma list from {nmi,kappa}");
    exp_cmd->add_option("--format", exp_format, "table or machine");
    exp_cmd->add_option("--config", exp_cfg_path, "JSON config file (flags override)");
    exp_cmd->add_option("--output", exp_output, "Report output path (default stdout)");

    app.parse(argc, argv);

    if (gen_cmd->parsed()) {
        json cfg = load_config(gen_cfg_path);
        config_default(*gen_cmd, cfg, "--seed", "seed", gen_seed);
        config_default(*gen_cmd, cfg, "-m", "m", gen_g.m);
        config_default(*gen_cmd, cfg, "--k-min", "k_min", gen_g.k_min);
        config_default(*gen_cmd, cfg, "--k-max", "k_max", gen_g.k_max);
        config_default(*gen_cmd, cfg, "--distance", "distance", gen_g.distance);
        config_default(*gen_cmd, cfg, "--max-iters", "max_iters", gen_g.max_iters);
        dskf::Dataset ds = load_with_flags(gen_g);
        dskf::Ensemble ens = dskf::generate_ensemble(ds, gen_config(gen_g, gen_seed));
        dskf::save_ensemble(ens, gen_output);
        std::cout << "wrote " << ens.size() << " partitions to " << gen_output << "\n";
    } else if (align_cmd->parsed()) {
        json cfg = load_config(align_cfg_path);
        config_default(*align_cmd, cfg, "--seed", "seed", align_seed);
        config_default(*align_cmd, cfg, "--strategy", "strategy", align_strategy);
        dskf::Ensemble ens = dskf::load_ensemble(align_input);
        dskf::Ensemble aligned =
            dskf::align_ensemble(ens, parse_strategy(align_strategy), align_seed);
        dskf::save_ensemble(aligned, align_output);
        std::cout << "aligned to partition " << *aligned.reference_index << ", wrote "
                  << align_output << "\n";
    } else if (eval_cmd->parsed()) {
        json cfg = load_config(eval_cfg_path);
        config_default(*eval_cmd, cfg, "--metrics", "metrics", eval_metrics);
        config_default(*eval_cmd, cfg, "--beta", "beta", eval_beta);
        auto values = dskf::evaluate_partitions(eval_ref, eval_comp, parse_metrics(eval_metrics),
                                                dskf::MetricConfig{eval_beta});
        json out = json::object();
        for (auto& [name, v] : values) {
            out[name] = v;
            std::cout << name << " = " << v << "\n";
        }
        if (!eval_output.empty()) {
            std::ofstream f(eval_output);
            if (!f) throw dskf::DataError("cannot write " + eval_output);
            f << out.dump(2) << "\n";
        }
    } else if (ens_cmd->parsed()) {
        json cfg = load_config(ens_cfg_path);
        config_default(*ens_cmd, cfg, "--seed", "seed", ens_seed);
        config_default(*ens_cmd, cfg, "--final-k", "final_k", ens_f.final_k);
        dskf::Dataset ds = load_with_flags(ens_g);
        dskf::Ensemble ens = dskf::generate_ensemble(ds, gen_config(ens_g, ens_seed));
        auto [result, diag] = dskf::dskf(ens, dskf_config(ens_f), dskf::mix_seed(ens_seed, 1));
        dskf::save_labels(result, ens_output);
        std::cout << "consensus partition with k = " << result.k() << " written to "
                  << ens_output << "\n";
        if (!ens_report.empty()) {
            json j;
            j["reference_index"] = diag.reference_index;
            j["diversity"] = diag.diversity.values;
            j["selected_indices"] = diag.selected_indices;
            j["weights"] = diag.weights.normalized;
            j["timings"] = {{"align_ms", diag.align_ms},
                            {"diversity_ms", diag.diversity_ms},
                            {"selection_ms", diag.selection_ms},
                            {"weighting_ms", diag.weighting_ms},
                            {"coassociation_ms", diag.coassociation_ms},
                            {"hac_ms", diag.hac_ms},
                            {"total_ms", diag.total_ms}};
            std::ofstream f(ens_report);
            if (!f) throw dskf::DataError("cannot write " + ens_report);
            f << j.dump(2) << "\n";
        }
    } else if (exp_cmd->parsed()) {
        json cfg = load_config(exp_cfg_path);
        config_default(*exp_cmd, cfg, "--seed", "seed", exp_seed);
        config_default(*exp_cmd, cfg, "--trials", "trials", exp_trials);
        config_default(*exp_cmd, cfg, "--metrics", "metrics", exp_metrics);
        config_default(*exp_cmd, cfg, "--format", "format", exp_format);
        dskf::ExperimentSpec spec;
        spec.dataset_path = exp_g.data;
        spec.label_column = exp_g.label_column;
        spec.standardize_features = exp_g.standardize;
        spec.trials = exp_trials;
        spec.generation = gen_config(exp_g, exp_seed);
        spec.consensus = dskf_config(exp_f);
        spec.metrics = parse_metrics(exp_metrics);
        spec.output_path = exp_output;
        spec.seed = exp_seed;
        dskf::Report report = dskf::run_experiment(spec);
        dskf::ReportFormat fmt;
        if (exp_format == "table") fmt = dskf::ReportFormat::table;
        else if (exp_format == "machine") fmt = dskf::ReportFormat::machine;
        else throw dskf::UsageError("unknown format: " + exp_format);
        dskf::emit_report(report, spec.metrics, fmt, exp_output);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::ParseError& e) {
        CLI::App dummy;
        int code = dummy.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const dskf::UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const dskf::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
