#include <doctest.h>

#include <set>

#include "dskf/generation.hpp"
#include "test_support.hpp"

using namespace dskf;

namespace {

Dataset blob_dataset() {
    // two well-separated 2-d blobs of 5 points each
    Dataset ds;
    ds.name = "blobs";
    ds.n = 10;
    ds.d = 2;
    for (int i = 0; i < 5; ++i) {
        ds.features.push_back(0.0 + 0.1 * i);
        ds.features.push_back(0.0 + 0.05 * i);
    }
    for (int i = 0; i < 5; ++i) {
        ds.features.push_back(100.0 + 0.1 * i);
        ds.features.push_back(50.0 + 0.05 * i);
    }
    return ds;
}

}  // namespace

TEST_CASE("kmeans degenerate k") {
    Dataset ds = blob_dataset();
    Partition one = kmeans(ds, 1, Distance::euclidean, 0);
    CHECK(one.k() == 1);

    Partition all = kmeans(ds, ds.n, Distance::euclidean, 0);
    CHECK(all.k() == ds.n);

    CHECK_THROWS_AS(kmeans(ds, ds.n + 1, Distance::euclidean, 0), std::invalid_argument);
}

TEST_CASE("kmeans recovers separated blobs") {
    Dataset ds = blob_dataset();
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 17ull}) {
        Partition p = kmeans(ds, 2, Distance::euclidean, seed);
        REQUIRE(p.k() == 2);
        // no blob is split: samples 0-4 share a label, 5-9 share the other
        std::set<int> first(p.labels().begin(), p.labels().begin() + 5);
        std::set<int> second(p.labels().begin() + 5, p.labels().end());
        CHECK(first.size() == 1);
        CHECK(second.size() == 1);
        CHECK(*first.begin() != *second.begin());
    }
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
    Dataset ds = blob_dataset();
    Partition a = kmeans(ds, 3, Distance::euclidean, 42);
    Partition b = kmeans(ds, 3, Distance::euclidean, 42);
    CHECK(same_labels(a, b));
}

TEST_CASE("lloyd objective is non-increasing") {
    Dataset ds = blob_dataset();
    for (auto dist : {Distance::euclidean, Distance::cosine}) {
        std::vector<double> trace;
        kmeans(ds, 3, dist, 5, 100, false, &trace);
        for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
    }
}

TEST_CASE("cosine mode ignores positive row rescaling") {
    Dataset ds = blob_dataset();
    Dataset scaled = ds;
    Rng rng(8);
    for (int i = 0; i < scaled.n; ++i) {
        double f = 0.5 + rng.uniform01() * 5.0;
        for (int j = 0; j < scaled.d; ++j)
            scaled.features[static_cast<size_t>(i) * scaled.d + j] *= f;
    }
    Partition a = kmeans(ds, 2, Distance::cosine, 3);
    Partition b = kmeans(scaled, 2, Distance::cosine, 3);
    CHECK(same_grouping(a, b));
}

TEST_CASE("generate_ensemble") {
    Dataset ds = blob_dataset();
    GenerationConfig cfg;
    cfg.m = 3;
    cfg.k_min = cfg.k_max = 2;
    cfg.seed = 9;

    SUBCASE("forced k bounds the cluster count") {
        Ensemble ens = generate_ensemble(ds, cfg);
        CHECK(ens.size() == 3);
        for (const auto& p : ens.partitions) CHECK(p.k() <= 2);
    }
    SUBCASE("same seed reproduces the ensemble") {
        Ensemble a = generate_ensemble(ds, cfg);
        Ensemble b = generate_ensemble(ds, cfg);
        REQUIRE(a.size() == b.size());
        for (int i = 0; i < a.size(); ++i) CHECK(same_labels(a.partitions[i], b.partitions[i]));
    }
    SUBCASE("k is drawn inside the configured range") {
        GenerationConfig wide = cfg;
        wide.m = 20;
        wide.k_min = 2;
        wide.k_max = 5;
        Ensemble ens = generate_ensemble(ds, wide);
        for (const auto& p : ens.partitions) {
            CHECK(p.k() >= 1);
            CHECK(p.k() <= 5);
        }
    }
    SUBCASE("degenerate data still yields partitions") {
        Dataset flat;
        flat.n = 6;
        flat.d = 2;
        flat.features.assign(12, 1.0);
        Ensemble ens = generate_ensemble(flat, cfg);
        CHECK(ens.size() == 3);
        for (const auto& p : ens.partitions) CHECK(p.k() == 1);
    }
    SUBCASE("invalid configs rejected") {
        GenerationConfig bad = cfg;
        bad.m = 1;
        CHECK_THROWS_AS(generate_ensemble(ds, bad), std::invalid_argument);
        bad = cfg;
        bad.k_max = ds.n + 1;
        CHECK_THROWS_AS(generate_ensemble(ds, bad), std::invalid_argument);
    }
}

TEST_CASE("every produced partition has only non-empty clusters") {
    Dataset ds = blob_dataset();
    GenerationConfig cfg;
    cfg.m = 10;
    cfg.k_min = 2;
    cfg.k_max = 8;
    cfg.seed = 31;
    Ensemble ens = generate_ensemble(ds, cfg);
    for (const auto& p : ens.partitions)
        for (int sz : p.cluster_sizes()) CHECK(sz > 0);
}
