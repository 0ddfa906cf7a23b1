#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dskf/alignment.hpp"
#include "dskf/consensus.hpp"
#include "dskf/generation.hpp"
#include "dskf/io.hpp"
#include "dskf/metrics.hpp"

namespace dskf {

struct ExperimentSpec {
    std::string dataset_path;
    std::optional<std::string> label_column;
    bool standardize_features = false;
    int trials = 50;
    GenerationConfig generation;
    DskfConfig consensus;
    std::set<std::string> metrics = {"nmi", "kappa"};
    std::string output_path;  // empty = stdout only
    std::uint64_t seed = 0;

    void validate() const {
        if (trials < 1) throw std::invalid_argument("trials must be at least 1");
        for (const auto& m : metrics)
            if (m != "nmi" && m != "kappa")
                throw std::invalid_argument("unknown report metric: " + m);
    }
};

struct TrialResult {
    int trial = 0;
    double base_nmi_mean = 0, base_nmi_std = 0;
    double base_kappa_mean = 0, base_kappa_std = 0;
    double dskf_nmi = 0, dskf_kappa = 0;
    double generation_ms = 0;
    DiagnosticsReport pipeline;
};

struct Report {
    std::string dataset;
    nlohmann::json config_echo;
    std::vector<TrialResult> per_trial;
    // aggregates over trials
    double dskf_nmi_mean = 0, dskf_nmi_std = 0;
    double dskf_kappa_mean = 0, dskf_kappa_std = 0;
    // pooled over all base partitions of all trials
    double base_nmi_mean = 0, base_nmi_std = 0;
    double base_kappa_mean = 0, base_kappa_std = 0;
};

namespace detail {

struct RunningStats {
    double sum = 0, sumsq = 0;
    long long count = 0;
    void add(double x) { sum += x; sumsq += x * x; ++count; }
    double mean() const { return count ? sum / count : 0.0; }
    double stddev() const {
        if (count < 2) return 0.0;
        double v = (sumsq - sum * sum / count) / (count - 1);
        return v > 0 ? std::sqrt(v) : 0.0;
    }
};

}  // namespace detail

/// Kappa of a computed partition against ground truth, aligning the computed
/// labels to the truth first. NMI needs no alignment.
inline double kappa_vs_truth(const Partition& computed, const Partition& truth) {
    Partition aligned = align_partition(computed, truth).first;
    return kappa(truth, aligned);
}

/// Multi-trial protocol: per trial, generate an ensemble with a trial-derived
/// seed, run the selective-ensemble pipeline, and score the consensus and all
/// base partitions against ground truth.
inline Report run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    Dataset data = load_dataset(spec.dataset_path, spec.label_column);
    if (!data.ground_truth)
        throw DataError("experiment requires a ground-truth label column");
    if (spec.standardize_features) standardize(data);
    const Partition& truth = *data.ground_truth;

    Report report;
    report.dataset = spec.dataset_path;
    report.config_echo = {
        {"trials", spec.trials},
        {"seed", spec.seed},
        {"standardize", spec.standardize_features},
        {"m", spec.generation.m},
        {"k_min", spec.generation.k_min},
        {"k_max", spec.generation.k_max},
        {"distance", spec.generation.distance == Distance::cosine ? "cosine" : "euclidean"},
        {"final_k", spec.consensus.final_k},
        {"beta", spec.consensus.beta},
        {"weighting",
         spec.consensus.weighting == DskfConfig::Weighting::uniform ? "uniform" : "f_score"},
    };

    detail::RunningStats dskf_nmi_stats, dskf_kappa_stats, base_nmi_all, base_kappa_all;
    for (int t = 0; t < spec.trials; ++t) {
        std::uint64_t trial_seed = mix_seed(spec.seed, t);
        GenerationConfig gen = spec.generation;
        gen.seed = trial_seed;

        TrialResult row;
        row.trial = t;
        auto t0 = std::chrono::steady_clock::now();
        Ensemble ens = generate_ensemble(data, gen);
        row.generation_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();

        detail::RunningStats bn, bk;
        for (const Partition& p : ens.partitions) {
            double pn = nmi(p, truth);
            double pk = kappa_vs_truth(p, truth);
            bn.add(pn);
            bk.add(pk);
            base_nmi_all.add(pn);
            base_kappa_all.add(pk);
        }
        row.base_nmi_mean = bn.mean();
        row.base_nmi_std = bn.stddev();
        row.base_kappa_mean = bk.mean();
        row.base_kappa_std = bk.stddev();

        auto [consensus, diag] = dskf(ens, spec.consensus, mix_seed(trial_seed, 0x5e1ec7));
        row.pipeline = std::move(diag);
        row.dskf_nmi = nmi(consensus, truth);
        row.dskf_kappa = kappa_vs_truth(consensus, truth);
        dskf_nmi_stats.add(row.dskf_nmi);
        dskf_kappa_stats.add(row.dskf_kappa);
        report.per_trial.push_back(std::move(row));
    }

    report.dskf_nmi_mean = dskf_nmi_stats.mean();
    report.dskf_nmi_std = dskf_nmi_stats.stddev();
    report.dskf_kappa_mean = dskf_kappa_stats.mean();
    report.dskf_kappa_std = dskf_kappa_stats.stddev();
    report.base_nmi_mean = base_nmi_all.mean();
    report.base_nmi_std = base_nmi_all.stddev();
    report.base_kappa_mean = base_kappa_all.mean();
    report.base_kappa_std = base_kappa_all.stddev();
    return report;
}

inline nlohmann::json report_to_json(const Report& r) {
    nlohmann::json j;
    j["dataset"] = r.dataset;
    j["config"] = r.config_echo;
    j["per_trial"] = nlohmann::json::array();
    for (const auto& row : r.per_trial) {
        j["per_trial"].push_back({
            {"trial", row.trial},
            {"base_stats",
             {{"nmi_mean", row.base_nmi_mean},
              {"nmi_std", row.base_nmi_std},
              {"kappa_mean", row.base_kappa_mean},
              {"kappa_std", row.base_kappa_std}}},
            {"dskf_nmi", row.dskf_nmi},
            {"dskf_kappa", row.dskf_kappa},
            {"timings",
             {{"generation_ms", row.generation_ms},
              {"align_ms", row.pipeline.align_ms},
              {"diversity_ms", row.pipeline.diversity_ms},
              {"selection_ms", row.pipeline.selection_ms},
              {"weighting_ms", row.pipeline.weighting_ms},
              {"coassociation_ms", row.pipeline.coassociation_ms},
              {"hac_ms", row.pipeline.hac_ms},
              {"pipeline_total_ms", row.pipeline.total_ms}}},
        });
    }
    j["aggregate"] = {
        {"means",
         {{"dskf_nmi", r.dskf_nmi_mean},
          {"dskf_kappa", r.dskf_kappa_mean},
          {"base_nmi", r.base_nmi_mean},
          {"base_kappa", r.base_kappa_mean}}},
        {"stds",
         {{"dskf_nmi", r.dskf_nmi_std},
          {"dskf_kappa", r.dskf_kappa_std},
          {"base_nmi", r.base_nmi_std},
          {"base_kappa", r.base_kappa_std}}},
    };
    return j;
}

inline Report report_from_json(const nlohmann::json& j) {
    Report r;
    r.dataset = j.at("dataset").get<std::string>();
    r.config_echo = j.at("config");
    for (const auto& row : j.at("per_trial")) {
        TrialResult t;
        t.trial = row.at("trial").get<int>();
        const auto& bs = row.at("base_stats");
        t.base_nmi_mean = bs.at("nmi_mean").get<double>();
        t.base_nmi_std = bs.at("nmi_std").get<double>();
        t.base_kappa_mean = bs.at("kappa_mean").get<double>();
        t.base_kappa_std = bs.at("kappa_std").get<double>();
        t.dskf_nmi = row.at("dskf_nmi").get<double>();
        t.dskf_kappa = row.at("dskf_kappa").get<double>();
        const auto& tm = row.at("timings");
        t.generation_ms = tm.at("generation_ms").get<double>();
        t.pipeline.align_ms = tm.at("align_ms").get<double>();
        t.pipeline.diversity_ms = tm.at("diversity_ms").get<double>();
        t.pipeline.selection_ms = tm.at("selection_ms").get<double>();
        t.pipeline.weighting_ms = tm.at("weighting_ms").get<double>();
        t.pipeline.coassociation_ms = tm.at("coassociation_ms").get<double>();
        t.pipeline.hac_ms = tm.at("hac_ms").get<double>();
        t.pipeline.total_ms = tm.at("pipeline_total_ms").get<double>();
        r.per_trial.push_back(std::move(t));
    }
    const auto& means = j.at("aggregate").at("means");
    const auto& stds = j.at("aggregate").at("stds");
    r.dskf_nmi_mean = means.at("dskf_nmi").get<double>();
    r.dskf_kappa_mean = means.at("dskf_kappa").get<double>();
    r.base_nmi_mean = means.at("base_nmi").get<double>();
    r.base_kappa_mean = means.at("base_kappa").get<double>();
    r.dskf_nmi_std = stds.at("dskf_nmi").get<double>();
    r.dskf_kappa_std = stds.at("dskf_kappa").get<double>();
    r.base_nmi_std = stds.at("base_nmi").get<double>();
    r.base_kappa_std = stds.at("base_kappa").get<double>();
    return r;
}

enum class ReportFormat { table, machine };

/// Human table (two decimals, like the tables the values are compared to) or
/// full-precision machine-readable JSON.
inline void emit_report(const Report& r, const std::set<std::string>& metrics,
                        ReportFormat format, const std::string& path = "") {
    if (metrics.empty()) throw UsageError("nothing to report: empty metric set");
    std::ostringstream body;
    if (format == ReportFormat::machine) {
        body << report_to_json(r).dump(2) << "\n";
    } else {
        body << std::fixed << std::setprecision(2);
        body << std::left << std::setw(12) << "Metric" << std::right << std::setw(10)
             << "Avg(base)" << std::setw(10) << "Std(base)" << std::setw(10) << "DSKF"
             << std::setw(10) << "Std" << "\n";
        if (metrics.count("nmi"))
            body << std::left << std::setw(12) << "NMI" << std::right << std::setw(10)
                 << r.base_nmi_mean << std::setw(10) << r.base_nmi_std << std::setw(10)
                 << r.dskf_nmi_mean << std::setw(10) << r.dskf_nmi_std << "\n";
        if (metrics.count("kappa"))
            body << std::left << std::setw(12) << "Kappa" << std::right << std::setw(10)
                 << r.base_kappa_mean << std::setw(10) << r.base_kappa_std << std::setw(10)
                 << r.dskf_kappa_mean << std::setw(10) << r.dskf_kappa_std << "\n";
    }
    if (path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(path);
        if (!out) throw DataError("cannot write report to " + path);
        out << body.str();
    }
}

/// Standalone metric evaluation between two label files. Kappa, accuracy and
/// macro-F are computed after aligning the computed partition to the
/// reference; nmi and smep need no alignment.
inline std::map<std::string, double> evaluate_partitions(const std::string& reference_path,
                                                         const std::string& computed_path,
                                                         const std::set<std::string>& metrics,
                                                         const MetricConfig& cfg = {}) {
    if (metrics.empty()) throw UsageError("nothing to report: empty metric set");
    Partition ref = load_labels(reference_path);
    Partition computed = load_labels(computed_path);
    if (ref.n() != computed.n())
        throw DataError("label files have different lengths (" + std::to_string(ref.n()) +
                        " vs " + std::to_string(computed.n()) + ")");
    std::map<std::string, double> out;
    std::optional<ClassificationScores> aligned_scores;
    auto aligned = [&]() -> const ClassificationScores& {
        if (!aligned_scores) {
            Partition ac = align_partition(computed, ref).first;
            aligned_scores = classification_scores(ref, ac, cfg);
        }
        return *aligned_scores;
    };
    for (const auto& m : metrics) {
        if (m == "nmi") out["nmi"] = nmi(ref, computed);
        else if (m == "smep") out["smep"] = smep(ref, computed);
        else if (m == "kappa") out["kappa"] = aligned().kappa;
        else if (m == "accuracy") out["accuracy"] = aligned().accuracy;
        else if (m == "f") out["f"] = aligned().macro_f;
        else throw UsageError("unknown metric: " + m);
    }
    return out;
}

}  // namespace dskf
