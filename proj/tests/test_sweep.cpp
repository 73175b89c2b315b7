#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "kneadlab/sweep.hpp"

using namespace kneadlab;

TEST_CASE("entropy curve on a small grid") {
    SweepOptions opts;
    opts.with_laps = false;
    SweepReport report = entropy_curve(2.0, {1.0, 1.5, 2.0}, opts);
    REQUIRE(report.records.size() == 3);

    CHECK(report.records[0].entropy_kneading.value == 0.0);
    CHECK((report.records[0].flags & kFlagNoRoot) != 0);
    CHECK((report.records[0].flags & kFlagNearCritical) != 0);  // w_2 = 0 exactly

    // kneading-root value at a = 1.5, stable from depth 128 onwards
    CHECK(report.records[1].entropy_kneading.value == Approx(0.270310).margin(5e-4));
    CHECK(report.records[2].entropy_kneading.value == Approx(std::log(2.0)).margin(1e-3));
    CHECK(report.violations.empty());

    SweepReport single = entropy_curve(2.0, {a_full(2.0)}, opts);
    REQUIRE(single.records.size() == 1);
    CHECK(single.records[0].entropy_kneading.value == Approx(std::log(2.0)).margin(1e-3));
}

TEST_CASE("entropy curve honors worker count") {
    SweepOptions serial;
    SweepOptions parallel;
    parallel.workers = 4;
    std::vector<double> grid;
    for (int i = 0; i < 41; ++i) grid.push_back(0.8 + i * 0.025);
    SweepReport a = entropy_curve(2.0, grid, serial);
    SweepReport b = entropy_curve(2.0, grid, parallel);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].entropy_kneading.value == b.records[i].entropy_kneading.value);
        CHECK(a.records[i].word.str() == b.records[i].word.str());
        CHECK(a.records[i].flags == b.records[i].flags);
    }
}

TEST_CASE("monotonicity audit") {
    SECTION("monotone synthetic input") {
        SweepReport report;
        for (int i = 0; i < 4; ++i) {
            SweepRecord rec;
            rec.a = 1.0 + i;
            // RLRL < RLLL: at position 3 the prefix RL is odd, so R < L
            rec.word = KneadingWord::parse(i < 2 ? "RLRL" : "RLLL");
            rec.entropy_kneading.value = 0.1 * i;
            rec.entropy_kneading.error_bound = 1e-6;
            report.records.push_back(rec);
        }
        monotonicity_audit(report);
        CHECK(report.violations.empty());
        CHECK(report.max_entropy_backstep == 0.0);
    }
    SECTION("two swapped records give exactly one word violation") {
        SweepReport report;
        const char* words[] = {"RLRL", "RLRR", "RLLR", "RLLL"};  // increasing order
        int order[] = {0, 2, 1, 3};  // swap the middle two
        for (int i = 0; i < 4; ++i) {
            SweepRecord rec;
            rec.a = 1.0 + i;
            rec.word = KneadingWord::parse(words[order[i]]);
            rec.entropy_kneading.value = 0.0;
            report.records.push_back(rec);
        }
        monotonicity_audit(report);
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == Violation::Kind::word_order);
        CHECK(report.violations[0].i == 1);
        CHECK(report.violations[0].j == 2);
    }
    SECTION("entropy backstep beyond the slack is reported") {
        SweepReport report;
        for (int i = 0; i < 3; ++i) {
            SweepRecord rec;
            rec.a = 1.0 + i;
            rec.word = KneadingWord::parse("RL");
            rec.entropy_kneading.value = i == 1 ? 0.5 : 0.1;
            rec.entropy_kneading.error_bound = 1e-3;
            report.records.push_back(rec);
        }
        monotonicity_audit(report, 0.01);
        REQUIRE(report.violations.size() == 1);
        CHECK(report.violations[0].kind == Violation::Kind::entropy_order);
        CHECK(report.violations[0].magnitude == Approx(0.4));
        CHECK(report.max_entropy_backstep == Approx(0.4));
    }
}

TEST_CASE("sweep flags instead of failures") {
    // the itinerary at a_full for large r drifts out within 30 symbols;
    // the record must carry flags, not throw
    double r = 3.7;
    SweepOptions opts;
    SweepReport report = entropy_curve(r, {0.6, 1.0, a_full(r)}, opts);
    REQUIRE(report.records.size() == 3);
    CHECK(report.records[1].flags & kFlagNearCritical);  // a = 1: w_2 = 0
    CHECK(report.records[1].entropy_kneading.value == 0.0);  // superstable period 2
    for (const SweepRecord& rec : report.records) CHECK(rec.entropy_kneading.value >= 0.0);
}

TEST_CASE("locate symbol change") {
    SECTION("period-2 transition at a = 1") {
        SymbolChange change = locate_symbol_change(2.0, 2, 0.8, 1.2);
        CHECK(change.a_star == Approx(1.0).margin(1e-10));
        CHECK(change.before == Symbol::R);
        CHECK(change.after == Symbol::L);
        CHECK_FALSE(change.even_parity);  // prefix (R): one reversing symbol
    }
    SECTION("period-3 transition") {
        SymbolChange change = locate_symbol_change(2.0, 3, 1.7, 1.8);
        CHECK(change.a_star == Approx(1.754877666).margin(1e-8));
    }
    SECTION("bracket across a lower-period superstable point") {
        // prefixes differ at position 2 across a = 1
        CHECK_THROWS_AS(locate_symbol_change(2.0, 3, 0.6, 1.2), PrefixMismatch);
    }
}

TEST_CASE("continuity in the exponent") {
    CHECK(r_continuity_probe(1.6, 2.0, 10, 1e-6));
    CHECK(r_continuity_probe(1.9, 2.5, 10, 1e-7));
    CHECK_THROWS_AS(r_continuity_probe(1.0, 2.0, 2, 1e-6), NearCritical);
}

TEST_CASE("entropy continuity probe") {
    CHECK(entropy_continuity_probe(2.0, 1.7549, 1e-3, 64) <= 0.02);
    CHECK(entropy_continuity_probe(2.0, 2.0 - 1e-3, 1e-3, 32) <= 0.02);
    CHECK(entropy_continuity_probe(2.0, 1.6, 0.0, 64) == 0.0);
}

TEST_CASE("symbol transitions match parity at superstable points") {
    // every transition found near an admissible word's parameter obeys the
    // signed order: even parity L -> R, odd parity R -> L
    for (double r : {2.0, 2.5}) {
        std::vector<SuperstablePoint> points = enumerate_superstable(r, 8);
        CHECK(points.size() >= 10);
        for (const SuperstablePoint& point : points) {
            const int n = point.word.length();
            SignPattern sigma = SignPattern::from_word(point.word.prefix());
            FixedPointResult fp =
                thurston_fixed_point(sigma, r, default_initial_vector(sigma), 1e-12);
            double delta = 1e-5;
            for (; delta >= 1e-9; delta *= 0.1) {
                try {
                    SymbolChange change =
                        locate_symbol_change(r, n, point.a - delta, point.a + delta);
                    CHECK(change.a_star == Approx(point.a).margin(1e-7));
                    // the located transition is the Thurston fixed point
                    CHECK(change.a_star == Approx(fp.omega.z[0]).margin(1e-8));
                    break;  // ParityViolation inside would fail the test
                } catch (const PrefixMismatch&) {
                    continue;  // bracket still spans a neighboring transition
                } catch (const NoBracket&) {
                    continue;
                }
            }
        }
    }
}
