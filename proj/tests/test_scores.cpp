#include <doctest.h>

#include <cmath>
#include <random>

#include "fusekit/scores.hpp"

using namespace fusekit;

namespace {

Embedding make(const std::string& subject, const std::string& sample,
               std::vector<double> v) {
    return Embedding{subject, sample, "", std::move(v)};
}

}  // namespace

TEST_CASE("euclidean distance basics") {
    const auto a = make("s1", "a", {1.0, 2.0, 3.0});
    CHECK(euclidean_distance(a, a) == 0.0);

    const auto origin = make("s1", "a", {0.0, 0.0});
    const auto p34 = make("s2", "b", {3.0, 4.0});
    CHECK(euclidean_distance(origin, p34) == doctest::Approx(5.0).epsilon(1e-15));

    const auto wrong_dim = make("s3", "c", {1.0});
    CHECK_THROWS_WITH_AS(euclidean_distance(a, wrong_dim),
                         doctest::Contains("dimension mismatch"),
                         std::invalid_argument);
}

TEST_CASE("euclidean distance matches a direct summation oracle") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> a(128), b(128);
        for (auto& v : a) v = unif(rng);
        for (auto& v : b) v = unif(rng);
        long double sum = 0.0L;
        for (int i = 0; i < 128; ++i)
            sum += (static_cast<long double>(a[i]) - b[i]) *
                   (static_cast<long double>(a[i]) - b[i]);
        const double expected = static_cast<double>(std::sqrt(sum));
        const double got = euclidean_distance(std::span<const double>(a),
                                              std::span<const double>(b));
        CHECK(std::abs(got - expected) <= 1e-12 * expected);
    }
}

TEST_CASE("distance symmetry and triangle inequality") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(-5.0, 5.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> a(16), b(16), c(16);
        for (auto& v : a) v = unif(rng);
        for (auto& v : b) v = unif(rng);
        for (auto& v : c) v = unif(rng);
        std::span<const double> sa(a), sb(b), sc(c);
        CHECK(euclidean_distance(sa, sb) == euclidean_distance(sb, sa));
        CHECK(euclidean_distance(sa, sc) <=
              euclidean_distance(sa, sb) + euclidean_distance(sb, sc) + 1e-12);
    }
}

TEST_CASE("distance_to_probability fixed points") {
    CHECK(distance_to_probability(0.0) == 1.0);
    CHECK(distance_to_probability(1.0) == 0.5);
    CHECK(distance_to_probability(3.0) == 0.25);
    CHECK_THROWS_AS(distance_to_probability(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(distance_to_probability(std::nan("")), std::invalid_argument);
}

TEST_CASE("distance_to_probability is strictly decreasing into ]0,1]") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(0.0, 100.0);
    for (int rep = 0; rep < 200; ++rep) {
        double d1 = unif(rng), d2 = unif(rng);
        if (d1 == d2) continue;
        if (d1 > d2) std::swap(d1, d2);
        const double p1 = distance_to_probability(d1);
        const double p2 = distance_to_probability(d2);
        CHECK(p1 > p2);
        CHECK(p1 <= 1.0);
        CHECK(p2 > 0.0);
    }
}

TEST_CASE("score_trials cardinality and labels") {
    const auto r1 = make("s1", "ref", {0.0, 0.0});
    const auto p_same = make("s1", "p0", {0.0, 0.0});

    SUBCASE("identical pair gives one genuine record at 1.0") {
        const auto set = score_trials({r1}, {p_same}, "sys", "set");
        REQUIRE(set.records.size() == 1);
        CHECK(set.records[0].label == Label::genuine);
        CHECK(set.records[0].score == 1.0);
    }

    SUBCASE("2 references x 3 probes gives 6 records") {
        const auto set = score_trials(
            {r1, make("s2", "ref", {1.0, 0.0})},
            {p_same, make("s2", "p0", {0.5, 0.5}), make("s3", "p0", {2.0, 2.0})},
            "sys", "set");
        CHECK(set.records.size() == 6);
    }

    SUBCASE("25 x 25 single-sample grid: 25 genuine, 600 impostor") {
        std::vector<Embedding> refs, probes;
        std::mt19937 rng(1);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int i = 0; i < 25; ++i) {
            const std::string subject = "id" + std::to_string(i);
            refs.push_back(make(subject, "ref", {unif(rng), unif(rng)}));
            probes.push_back(make(subject, "probe", {unif(rng), unif(rng)}));
        }
        const auto set = score_trials(refs, probes, "sys", "set");
        std::size_t genuine = 0;
        for (const auto& r : set.records)
            if (r.label == Label::genuine) ++genuine;
        CHECK(set.records.size() == 625);
        CHECK(genuine == 25);
        CHECK(set.records.size() - genuine == 600);
    }

    SUBCASE("empty inputs rejected") {
        CHECK_THROWS_AS(score_trials({}, {p_same}, "sys", "set"), std::invalid_argument);
        CHECK_THROWS_AS(score_trials({r1}, {}, "sys", "set"), std::invalid_argument);
    }
}
