#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "dskf/experiment.hpp"
#include "dskf/io.hpp"
#include "test_support.hpp"

using namespace dskf;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("dskf_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name, const std::string& content) const {
        fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
};

}  // namespace

TEST_CASE("load_dataset") {
    TempDir tmp;
    SUBCASE("features plus a string label column") {
        auto p = tmp.file("ok.csv",
                          "x,y,class\n"
                          "1.0,2.0,setosa\n"
                          "3.5,-1.0,setosa\n"
                          "0.0,0.5,versicolor\n");
        Dataset ds = load_dataset(p, std::string("class"));
        CHECK(ds.n == 3);
        CHECK(ds.d == 2);
        REQUIRE(ds.ground_truth.has_value());
        CHECK(ds.ground_truth->labels() == std::vector<int>{0, 0, 1});
        CHECK(ds.row(1)[0] == doctest::Approx(3.5));
    }
    SUBCASE("no label column requested") {
        auto p = tmp.file("plain.csv", "a,b\n1,2\n3,4\n");
        Dataset ds = load_dataset(p);
        CHECK(ds.d == 2);
        CHECK_FALSE(ds.ground_truth.has_value());
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_dataset((tmp.path / "absent.csv").string()), DataError);
    }
    SUBCASE("empty file") {
        auto p = tmp.file("empty.csv", "");
        CHECK_THROWS_AS(load_dataset(p), DataError);
    }
    SUBCASE("header only") {
        auto p = tmp.file("header.csv", "a,b\n");
        CHECK_THROWS_AS(load_dataset(p), DataError);
    }
    SUBCASE("unknown label column") {
        auto p = tmp.file("nolabel.csv", "a,b\n1,2\n");
        CHECK_THROWS_AS(load_dataset(p, std::string("class")), DataError);
    }
    SUBCASE("ragged row") {
        auto p = tmp.file("ragged.csv", "a,b\n1,2\n3\n");
        CHECK_THROWS_AS(load_dataset(p), DataError);
    }
    SUBCASE("non-numeric feature") {
        auto p = tmp.file("text.csv", "a,b\n1,oops\n");
        CHECK_THROWS_AS(load_dataset(p), DataError);
    }
}

TEST_CASE("standardize") {
    Dataset ds;
    ds.n = 4;
    ds.d = 2;
    ds.features = {1, 7, 2, 7, 3, 7, 4, 7};  // column 1 is constant
    standardize(ds);
    double mean = 0, var = 0;
    for (int i = 0; i < 4; ++i) mean += ds.features[static_cast<size_t>(i) * 2];
    mean /= 4;
    for (int i = 0; i < 4; ++i) {
        double d = ds.features[static_cast<size_t>(i) * 2] - mean;
        var += d * d;
    }
    CHECK(mean == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(var / 4 == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < 4; ++i) CHECK(ds.features[static_cast<size_t>(i) * 2 + 1] == 7.0);
}

TEST_CASE("label files round-trip") {
    TempDir tmp;
    Partition p({1, 1, 2, 3, 3});
    auto path = (tmp.path / "labels.txt").string();
    save_labels(p, path);
    CHECK(same_labels(load_labels(path), p));

    CHECK_THROWS_AS(load_labels((tmp.path / "absent.txt").string()), DataError);
    CHECK_THROWS_AS(load_labels(tmp.file("bad.txt", "1\ntwo\n")), DataError);
    CHECK_THROWS_AS(load_labels(tmp.file("neg.txt", "1\n-2\n")), DataError);
    CHECK_THROWS_AS(load_labels(tmp.file("blank.txt", "\n\n")), DataError);
}

TEST_CASE("ensemble files round-trip") {
    TempDir tmp;
    Ensemble ens;
    ens.partitions = {Partition({1, 1, 2}), Partition({1, 2, 2})};
    ens.aligned = true;
    ens.reference_index = 0;
    auto path = (tmp.path / "ens.json").string();
    save_ensemble(ens, path);
    Ensemble back = load_ensemble(path);
    CHECK(back.size() == 2);
    CHECK(back.aligned);
    CHECK(*back.reference_index == 0);
    for (int i = 0; i < 2; ++i) CHECK(same_labels(back.partitions[i], ens.partitions[i]));

    CHECK_THROWS_AS(load_ensemble(tmp.file("garbage.json", "not json")), DataError);
    CHECK_THROWS_AS(load_ensemble(tmp.file("wrong.json", "{\"n\": 3}")), DataError);
}

TEST_CASE("evaluate_partitions") {
    TempDir tmp;
    auto ref = tmp.file("ref.txt", "1\n1\n1\n1\n2\n");
    auto comp = tmp.file("comp.txt", "1\n1\n1\n2\n2\n");

    SUBCASE("selected metrics") {
        auto out = evaluate_partitions(ref, comp, {"smep", "accuracy", "kappa", "nmi", "f"});
        CHECK(out.at("smep") == doctest::Approx(0.55).epsilon(0.005));
        CHECK(out.at("accuracy") == doctest::Approx(0.8));
        CHECK(out.size() == 5);
    }
    SUBCASE("identity evaluation") {
        auto out = evaluate_partitions(ref, ref, {"nmi", "kappa", "accuracy"});
        CHECK(out.at("nmi") == doctest::Approx(1.0));
        CHECK(out.at("kappa") == doctest::Approx(1.0));
        CHECK(out.at("accuracy") == doctest::Approx(1.0));
    }
    SUBCASE("length mismatch") {
        auto shorter = tmp.file("short.txt", "1\n2\n");
        CHECK_THROWS_AS(evaluate_partitions(ref, shorter, {"nmi"}), DataError);
    }
    SUBCASE("unknown metric") {
        CHECK_THROWS_AS(evaluate_partitions(ref, comp, {"ari"}), UsageError);
    }
    SUBCASE("empty metric set") {
        CHECK_THROWS_AS(evaluate_partitions(ref, comp, {}), UsageError);
    }
}

TEST_CASE("experiment report") {
    TempDir tmp;
    // tiny synthetic dataset: two separated blobs with labels
    std::ostringstream csv;
    csv << "x,y,class\n";
    for (int i = 0; i < 6; ++i) csv << 0.1 * i << "," << 0.05 * i << ",a\n";
    for (int i = 0; i < 6; ++i) csv << 50 + 0.1 * i << "," << 30 + 0.05 * i << ",b\n";
    auto data_path = tmp.file("blobs.csv", csv.str());

    ExperimentSpec spec;
    spec.dataset_path = data_path;
    spec.label_column = "class";
    spec.trials = 3;
    spec.generation.m = 6;
    spec.generation.k_min = 2;
    spec.generation.k_max = 3;
    spec.consensus.final_k = 2;
    spec.seed = 5;

    Report r = run_experiment(spec);
    REQUIRE(static_cast<int>(r.per_trial.size()) == 3);
    CHECK(r.dskf_nmi_mean == doctest::Approx(1.0));
    CHECK(r.dskf_kappa_mean == doctest::Approx(1.0));

    SUBCASE("json round-trip is lossless") {
        Report back = report_from_json(report_to_json(r));
        CHECK(back.dataset == r.dataset);
        CHECK(back.per_trial.size() == r.per_trial.size());
        CHECK(back.dskf_nmi_mean == doctest::Approx(r.dskf_nmi_mean).epsilon(1e-12));
        CHECK(back.base_kappa_std == doctest::Approx(r.base_kappa_std).epsilon(1e-12));
        CHECK(back.per_trial[1].dskf_kappa ==
              doctest::Approx(r.per_trial[1].dskf_kappa).epsilon(1e-12));
        CHECK(back.per_trial[1].pipeline.total_ms ==
              doctest::Approx(r.per_trial[1].pipeline.total_ms).epsilon(1e-12));
    }
    SUBCASE("same spec reproduces the same scores") {
        Report again = run_experiment(spec);
        for (size_t i = 0; i < r.per_trial.size(); ++i) {
            CHECK(again.per_trial[i].dskf_nmi == r.per_trial[i].dskf_nmi);
            CHECK(again.per_trial[i].base_kappa_mean == r.per_trial[i].base_kappa_mean);
        }
    }
    SUBCASE("emit_report writes both formats") {
        auto table_path = (tmp.path / "report.txt").string();
        emit_report(r, {"nmi", "kappa"}, ReportFormat::table, table_path);
        std::ifstream in(table_path);
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        CHECK(text.find("NMI") != std::string::npos);
        CHECK(text.find("Kappa") != std::string::npos);

        auto json_path = (tmp.path / "report.json").string();
        emit_report(r, {"nmi"}, ReportFormat::machine, json_path);
        std::ifstream jin(json_path);
        nlohmann::json j;
        jin >> j;
        CHECK(j.at("aggregate").at("means").at("dskf_nmi").get<double>() ==
              doctest::Approx(1.0));

        CHECK_THROWS_AS(emit_report(r, {}, ReportFormat::table), UsageError);
    }
    SUBCASE("missing ground truth is a data error") {
        ExperimentSpec bad = spec;
        bad.label_column.reset();
        CHECK_THROWS_AS(run_experiment(bad), DataError);
    }
}
