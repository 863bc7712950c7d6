#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include <qexp/io.hpp>

#include "support.hpp"

using namespace qexp;
using testing_support::fig;
using testing_support::random_strict_base;
using testing_support::uniform_in;

namespace {

void expect_kind(ErrorKind kind, const std::function<void()>& fn) {
    try {
        fn();
        FAIL() << "no error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), kind) << e.what();
    }
}

} // namespace

TEST(Csv, BaseRoundTrip) {
    std::mt19937_64 rng(61);
    for (int i = 0; i < 50; ++i) {
        const BasePair Q = random_strict_base(rng, 1.05, 6.0);
        const std::string text = emit(base_table(Q), Format::csv);
        const auto back = bases_from_csv(text);
        ASSERT_EQ(back.size(), 1u);
        EXPECT_EQ(back[0].q0(), Q.q0());
        EXPECT_EQ(back[0].q1(), Q.q1());
        EXPECT_EQ(emit(base_table(back[0]), Format::csv), text);
    }
    const std::string b = emit(base_table(new_base(3.0, 1.5)), Format::csv);
    EXPECT_EQ(b, "q0,q1,ell,r,right,greedy_switch,lazy_switch,strict\n3,1.5,0,2,2,0.66666666666666663,0.66666666666666663,false\n");
}

TEST(Csv, BaseDerivedFieldsAreChecked) {
    expect_kind(ErrorKind::ParseError, [] {
        bases_from_csv("q0,q1,ell,r,right,greedy_switch,lazy_switch,strict\n3,1.5,0,2,2,0.7,0.66666666666666663,false\n");
    });
    expect_kind(ErrorKind::ParseError, [] {
        bases_from_csv("q0,q1,ell,r,right,greedy_switch,lazy_switch,strict\n3,1.5,0,2,2,0.66666666666666663,"
                       "0.66666666666666663,true\n");
    });
}

TEST(Csv, OrbitRoundTrip) {
    std::mt19937_64 rng(62);
    for (int i = 0; i < 20; ++i) {
        const BasePair Q = random_strict_base(rng);
        const OrbitRecord o = expansion(Q, uniform_in(rng, 0.0, Q.right()), 30, i % 2 ? MapKind::greedy : MapKind::lazy);
        const std::string text = emit(orbit_table(o), Format::csv);
        const auto rows = orbit_rows_from_csv(text);
        ASSERT_EQ(rows.size(), 31u);
        EXPECT_EQ(rows.back().digit, -1);
        for (std::size_t k = 0; k < 30; ++k) {
            EXPECT_EQ(rows[k].x, o.points[k]);
            EXPECT_EQ(rows[k].digit, o.digits[k]);
        }
        EXPECT_EQ(emit(orbit_table(rows), Format::csv), text);
    }
}

TEST(Csv, StepRoundTrip) {
    const DensityPair d = invariant_densities(fig());
    for (const StepFunction* f : {&d.h_greedy, &d.h_lazy}) {
        const std::string text = emit(step_table(*f), Format::csv);
        EXPECT_EQ(text, to_csv(*f));
        const StepFunction g = step_function_from_csv(text);
        EXPECT_EQ(g, *f);
        EXPECT_EQ(emit(step_table(g), Format::csv), text);
    }
}

TEST(Csv, TransferRoundTrip) {
    const IterationTrace t = iterate({fig(), MapKind::greedy}, StepFunction::constant(fig().right(), 1 / fig().right()), 25);
    const std::string text = emit(transfer_table(t.records), Format::csv);
    const auto back = transfer_records_from_csv(text);
    ASSERT_EQ(back.size(), t.records.size());
    for (std::size_t k = 0; k < back.size(); ++k) {
        EXPECT_EQ(back[k].index, t.records[k].index);
        EXPECT_EQ(back[k].l1_increment, t.records[k].l1_increment);
        EXPECT_TRUE(std::isnan(back[k].integral));
    }
    EXPECT_EQ(emit(transfer_table(back), Format::csv), text);
}

TEST(Csv, PartitionRoundTrip) {
    const auto rows = partition_rows(level_partition(fig(), 6));
    const std::string text = emit(partition_table(rows), Format::csv);
    const auto back = partition_rows_from_csv(text);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        EXPECT_EQ(back[k].word, rows[k].word);
        EXPECT_EQ(back[k].left, rows[k].left);
        EXPECT_EQ(back[k].image_right, rows[k].image_right);
    }
    EXPECT_EQ(emit(partition_table(back), Format::csv), text);
}

TEST(Csv, ReportRoundTrip) {
    const std::vector<SampleReport> reports{univoque_fraction(fig(), 8, 500, 42),
                                            birkhoff_report(fig(), MapKind::lazy, 8, 1000, 18446744073709551615ULL)};
    const std::string text = emit(report_table(reports), Format::csv);
    const auto back = reports_from_csv(text);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].seed, 18446744073709551615ULL);
    EXPECT_EQ(back[0].statistic, "univoque");
    EXPECT_EQ(back[1].mean, reports[1].mean);
    EXPECT_EQ(emit(report_table(back), Format::csv), text);
}

TEST(Json, BaseHasAllFields) {
    const auto j = nlohmann::json::parse(emit(base_table(fig()), Format::json));
    ASSERT_TRUE(j.is_array());
    ASSERT_EQ(j.size(), 1u);
    for (const char* k : {"q0", "q1", "ell", "r", "right", "greedy_switch", "lazy_switch", "strict"}) {
        EXPECT_TRUE(j[0].contains(k)) << k;
    }
    EXPECT_EQ(j[0]["q0"].get<double>(), fig().q0());
    EXPECT_TRUE(j[0]["strict"].get<bool>());
}

TEST(Json, NullDigitOnLastOrbitRow) {
    const auto j = nlohmann::json::parse(emit(orbit_table(expansion(fig(), 0.5, 3, MapKind::greedy)), Format::json));
    ASSERT_EQ(j.size(), 4u);
    EXPECT_TRUE(j[3]["digit"].is_null());
    EXPECT_EQ(j[0]["digit"].get<int>(), 0);
}

TEST(Text, AlignedColumns) {
    const std::string t = emit(gap_table(chebyshev_gap(fig(), invariant_densities(fig()))), Format::table);
    EXPECT_NE(t.find("mean_greedy"), std::string::npos);
    EXPECT_NE(t.find("0.635838"), std::string::npos);
}

TEST(Files, WriteAndRead) {
    const std::string path = ::testing::TempDir() + "qexp_io_test.csv";
    write_output(path, "a,b\n1,2\n");
    EXPECT_EQ(read_file(path), "a,b\n1,2\n");
    std::remove(path.c_str());
    expect_kind(ErrorKind::IoError, [] { write_output("/nonexistent-dir/x.csv", "x"); });
    expect_kind(ErrorKind::IoError, [] { read_file("/nonexistent-dir/x.csv"); });
}

TEST(Parse, Errors) {
    expect_kind(ErrorKind::ParseError, [] { parse_csv("x,y\n", {"x", "z"}); });
    expect_kind(ErrorKind::ParseError, [] { parse_csv("x,y\n1\n", {"x", "y"}); });
    expect_kind(ErrorKind::ParseError, [] { orbit_rows_from_csv("step,x,digit\n0,abc,1\n"); });
    expect_kind(ErrorKind::ParseError, [] { orbit_rows_from_csv("step,x,digit\n0,0.5,2\n"); });
    expect_kind(ErrorKind::ParseError, [] { parse_csv("", {"x"}); });
}
