#include <doctest.h>

#include <cmath>

#include "dskf/alignment.hpp"
#include "dskf/metrics.hpp"
#include "test_support.hpp"

using namespace dskf;
using dskf::test::random_partition;
using dskf::test::range_partition;
using dskf::test::toy_cluster;
using dskf::test::toy_references;

TEST_CASE("entropy in nats") {
    CHECK(entropy(Partition({1, 1, 1, 1})) == doctest::Approx(0.0));
    CHECK(entropy(Partition({1, 1, 2, 2})) == doctest::Approx(std::log(2.0)));
    CHECK(entropy(Partition({1, 1, 1, 2})) == doctest::Approx(0.5623).epsilon(1e-3));
}

TEST_CASE("nmi") {
    Partition p({1, 1, 2, 2});
    CHECK(nmi(p, Partition({3, 3, 4, 4})) == doctest::Approx(1.0));
    CHECK(nmi(p, Partition({1, 2, 1, 2})) == doctest::Approx(0.0));
    CHECK(nmi(p, Partition({1, 1, 1, 2})) == doctest::Approx(0.346).epsilon(1e-2));
    // single-cluster convention
    CHECK(nmi(Partition({1, 1}), Partition({2, 2})) == 0.0);
}

TEST_CASE("bnmi") {
    auto c = toy_cluster();
    auto refs = toy_references();
    CHECK(bnmi(c, refs[0]) == doctest::Approx(1.0));
    CHECK(bnmi(c, refs[4]) == doctest::Approx(0.0));  // 20 of 45 is not a majority
    // hand-evaluated small case: positives pool to {0, 1}
    CHECK(bnmi(make_cluster({0, 1, 2}), range_partition({2, 2, 2})) ==
          doctest::Approx(0.479).epsilon(1e-2));
}

TEST_CASE("max criterion") {
    auto c = toy_cluster();
    auto refs = toy_references();
    CHECK(max_criterion(c, refs[0]) == doctest::Approx(1.0));
    CHECK(max_criterion(c, refs[1]) == doctest::Approx(0.60).epsilon(5e-3));
    CHECK(max_criterion(c, refs[3]) == doctest::Approx(0.0));  // exactly half is not positive
}

TEST_CASE("apmm") {
    auto c = toy_cluster();
    auto refs = toy_references();
    CHECK(apmm(c, refs[0]) == doctest::Approx(1.0));
    CHECK(apmm(c, refs[1]) == doctest::Approx(0.765).epsilon(1e-2));
    // cluster of 4 in n=8, split 2+2 by the reference
    CHECK(apmm(make_cluster({0, 1, 2, 3}), range_partition({2, 2, 4})) ==
          doctest::Approx(2.0 / 3.0));
    CHECK_THROWS_AS(apmm(make_cluster({0, 1}), Partition({1, 2})), std::invalid_argument);
}

TEST_CASE("enmi") {
    auto c = toy_cluster();
    auto refs = toy_references();
    CHECK(enmi(c, refs[0]) == doctest::Approx(0.50).epsilon(5e-3));
    CHECK(enmi(c, refs[3]) == doctest::Approx(0.50).epsilon(5e-3));
    CHECK(enmi(make_cluster({0, 1}), range_partition({2, 2})) ==
          doctest::Approx(0.816).epsilon(1e-2));
}

TEST_CASE("sme") {
    auto c = toy_cluster();
    auto refs = toy_references();
    CHECK(sme(c, refs[0]) == doctest::Approx(1.0));
    CHECK(sme(c, refs[1]) == doctest::Approx(0.75));
    CHECK(sme(c, refs[4]) == doctest::Approx(20.0 / 45.0));
}

TEST_CASE("smep") {
    Partition ref({1, 1, 1, 1, 2});
    CHECK(smep(Partition({1, 1, 1, 2, 2}), ref) == doctest::Approx(0.55).epsilon(0.005));
    CHECK(smep(Partition({1, 1, 1, 1, 1}), ref) == doctest::Approx(0.65).epsilon(0.005));
    Partition p({1, 2, 2, 3, 3, 3});
    CHECK(smep(p, p) == doctest::Approx(1.0));
}

TEST_CASE("classification scores") {
    SUBCASE("perfect agreement") {
        Partition p({1, 1, 2, 2});
        auto s = classification_scores(p, p);
        CHECK(s.accuracy == doctest::Approx(1.0));
        CHECK(s.kappa == doctest::Approx(1.0));
        CHECK(s.macro_f == doctest::Approx(1.0));
    }
    SUBCASE("constant prediction has zero kappa") {
        auto s = classification_scores(Partition({1, 1, 2, 2}), Partition({1, 1, 1, 1}));
        CHECK(s.kappa == doctest::Approx(0.0));
    }
    SUBCASE("hand-computed 3/4 agreement") {
        auto s = classification_scores(Partition({1, 1, 2, 2}), Partition({1, 2, 2, 2}));
        CHECK(s.accuracy == doctest::Approx(0.75));
        CHECK(s.kappa == doctest::Approx(0.5));
    }
    SUBCASE("degenerate chance agreement") {
        CHECK(classification_scores(Partition({3, 3}), Partition({3, 3})).kappa == 1.0);
    }
    SUBCASE("size mismatch rejected") {
        CHECK_THROWS_AS(classification_scores(Partition({1}), Partition({1, 2})),
                        std::invalid_argument);
    }
}

TEST_CASE("cluster F-score") {
    auto c = toy_cluster();
    auto refs = toy_references();
    CHECK(cluster_f(c, 0, refs[1], {}, FMatchMode::best_match) ==
          doctest::Approx(30.0 / 35.0).epsilon(1e-9));
    CHECK(cluster_f(c, 0, refs[4], {}, FMatchMode::best_match) ==
          doctest::Approx(40.0 / 65.0).epsilon(1e-9));

    Partition ref({1, 1, 2, 2});
    CHECK(cluster_f(make_cluster({0, 1}), 1, ref) == doctest::Approx(1.0));
    CHECK(cluster_f(make_cluster({0, 1}), 7, ref) == 0.0);  // label absent

    // precision 1, recall 0.75, beta 0.5
    Partition ref2 = range_partition({4});
    double f = cluster_f(make_cluster({0, 1, 2}), 1, ref2, MetricConfig{0.5});
    CHECK(f == doctest::Approx(0.9375));
}

TEST_CASE("metric ranges and symmetry on random inputs") {
    Rng rng(2024);
    for (int rep = 0; rep < 40; ++rep) {
        int n = static_cast<int>(rng.uniform_int(2, 25));
        Partition p = random_partition(rng, n, 4);
        Partition q = random_partition(rng, n, 4);

        double v = nmi(p, q);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v == doctest::Approx(nmi(q, p)).epsilon(1e-12));

        double s = smep(p, q);
        CHECK(s > 0.0);
        CHECK(s <= 1.0 + 1e-12);
        CHECK(s == doctest::Approx(smep(q, p)).epsilon(1e-12));

        auto cs = classification_scores(p, q);
        CHECK(cs.accuracy >= 0.0);
        CHECK(cs.accuracy <= 1.0);
        CHECK(cs.kappa >= -1.0 - 1e-12);
        CHECK(cs.kappa <= 1.0 + 1e-12);
        CHECK(cs.kappa == doctest::Approx(classification_scores(q, p).kappa).epsilon(1e-12));
        for (auto& pl : cs.per_label) {
            CHECK(pl.recall >= 0.0);
            CHECK(pl.recall <= 1.0);
            CHECK(pl.precision >= 0.0);
            CHECK(pl.precision <= 1.0);
            CHECK(pl.f_score >= 0.0);
            CHECK(pl.f_score <= 1.0);
        }

        Cluster c = p.clusters().front();
        for (double m : {bnmi(c, q), max_criterion(c, q), enmi(c, q), sme(c, q)}) {
            CHECK(m >= 0.0);
            CHECK(m <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("sme is 1 exactly when the cluster appears verbatim in the reference") {
    Partition ref = range_partition({3, 2, 4});
    CHECK(sme(make_cluster({3, 4}), ref) == doctest::Approx(1.0));
    CHECK(sme(make_cluster({3, 4, 5}), ref) < 1.0);
}

TEST_CASE("F-beta is monotone in precision at fixed recall") {
    double last = -1.0;
    for (double precision : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        double f = detail::f_beta(precision, 0.6, 1.0);
        CHECK(f >= last);
        last = f;
    }
}
