#include "credcurve/ingest.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

namespace credcurve {
namespace {

const char* kIssues =
    "bond_id,issuer_id,issue_date,maturity_date,coupon_rate,coupon_freq,face,callable,convertible,variable_rate,senior\n"
    "A-5Y,ACME,2023-06-01,2028-06-01,0.05,2,100,false,false,false,true\n"
    "A-10Y,ACME,2023-06-01,2033-06-01,0.055,2,100,false,false,false,true\n"
    "A-30Y,ACME,2023-06-01,2053-06-01,0.06,2,1000,false,false,false,true\n"
    "A-CALL,ACME,2023-06-01,2030-06-01,0.05,2,100,true,false,false,true\n"
    "G-2Y,GLOBEX,2023-09-15,2025-09-15,0.04,4,100,false,false,false,true\n";

std::vector<IssueRecord> issues() {
    std::istringstream in(kIssues);
    return parse_issues(in).records;
}

IssueRecord issue(std::string id, std::string issuer, Date issued, int years) {
    IssueRecord r;
    r.bond_id = std::move(id);
    r.issuer_id = std::move(issuer);
    r.issue_date = issued;
    r.maturity_date = issued.add_months(12 * years);
    r.coupon_rate = 0.05;
    r.coupon_freq = 2;
    return r;
}

TEST(ParseIssues, ReadsAllColumns) {
    const auto r = issues();
    ASSERT_EQ(r.size(), 5u);
    EXPECT_EQ(r[2].bond_id, "A-30Y");
    EXPECT_EQ(r[2].face, 1000.0);
    EXPECT_EQ(r[3].flags.callable, true);
    EXPECT_EQ(r[4].coupon_freq, 4);
    EXPECT_EQ(r[4].maturity_date, Date::from_ymd(2025, 9, 15));
}

TEST(ParseIssues, ColumnsByNameAndUnknownIgnored) {
    std::istringstream in(
        "senior,face,extra,bond_id,issuer_id,coupon_freq,coupon_rate,maturity_date,issue_date,callable,convertible,"
        "variable_rate\r\n"
        "1,100,zzz,B1,X,1,0.03,2030-01-01,2020-01-01,0,0,0\r\n");
    const auto r = parse_issues(in, true).records;
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].bond_id, "B1");
    EXPECT_TRUE(r[0].is_vanilla());
}

TEST(ParseIssues, LenientSkipsStrictThrows) {
    const std::string text = std::string(kIssues) +
                             "BAD1,ACME,2023-13-01,2028-06-01,0.05,2,100,false,false,false,true\n"
                             "BAD2,ACME,2023-06-01,2028-06-01,0.05,3,100,false,false,false,true\n"
                             "BAD3,ACME,2023-06-01,2028-06-01,-0.05,2,100,false,false,false,true\n"
                             "BAD4,ACME,2023-06-01,2028-06-01,0.05,2,100,maybe,false,false,true\n";
    std::istringstream lenient(text);
    const auto r = parse_issues(lenient, false);
    EXPECT_EQ(r.records.size(), 5u);
    EXPECT_EQ(r.warnings.size(), 4u);
    std::istringstream strict(text);
    EXPECT_ERROR_CODE(parse_issues(strict, true), ErrorCode::parse);
}

TEST(ParseIssues, MissingColumn) {
    std::istringstream in("bond_id,issuer_id\nA,B\n");
    EXPECT_ERROR_CODE(parse_issues(in), ErrorCode::parse);
}

TEST(ParsePrices, Basic) {
    std::istringstream in("bond_id,trade_date,clean_price\nA-5Y,2024-01-02,99.5\nA-5Y,2024-01-03,-1\n");
    const auto r = parse_prices(in);
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0].clean_price, 99.5);
    EXPECT_EQ(r.warnings.size(), 1u);
}

TEST(TreasuryFile, UndatedAndDated) {
    std::istringstream undated("tenor_years,zero_yield\n1,0.04\n10,0.045\n");
    const auto book = TreasuryBook::parse(undated);
    EXPECT_NEAR(book.curve_for(Date::from_ymd(2024, 1, 2)).yield(5.5), 0.0425, 1e-15);
    std::istringstream dated("as_of,tenor_years,zero_yield\n2024-01-02,1,0.04\n2024-01-03,1,0.05\n");
    const auto db = TreasuryBook::parse(dated);
    EXPECT_EQ(db.curve_for(Date::from_ymd(2024, 1, 3)).yield(1.0), 0.05);
    EXPECT_ERROR_CODE(db.curve_for(Date::from_ymd(2024, 1, 4)), ErrorCode::domain);
    std::istringstream bad("tenor_years,zero_yield\nx,0.04\n");
    EXPECT_ERROR_CODE(TreasuryBook::parse(bad), ErrorCode::parse);
}

TEST(OnTheRun, LatestIssueWins) {
    const Date today = Date::from_ymd(2024, 3, 1);
    const std::vector<IssueRecord> in{issue("OLD", "X", Date::from_ymd(2023, 3, 1), 30), issue("NEW", "X", today, 30)};
    const auto out = select_on_the_run(in, today);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].bond_id, "NEW");
    // before the new issue exists, the old one is on the run
    EXPECT_EQ(select_on_the_run(in, today.add_days(-1)).at(0).bond_id, "OLD");
}

TEST(OnTheRun, SingleAndDistinctBuckets) {
    const Date d = Date::from_ymd(2024, 3, 1);
    EXPECT_EQ(select_on_the_run({issue("A", "X", d, 5)}, d).size(), 1u);
    EXPECT_EQ(select_on_the_run({issue("A", "X", d, 5), issue("B", "X", d, 10)}, d).size(), 2u);
    EXPECT_EQ(select_on_the_run({}, d).size(), 0u);
}

TEST(OnTheRun, TieBrokenByBondId) {
    const Date d = Date::from_ymd(2024, 3, 1);
    const auto out = select_on_the_run({issue("Z", "X", d, 7), issue("M", "X", d, 7)}, d);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].bond_id, "M");
}

TEST(OnTheRun, BucketsRoundToNearestTenor) {
    const Date d = Date::from_ymd(2024, 3, 1);
    EXPECT_EQ(term_bucket(issue("A", "X", d, 12), standard_buckets()), 10.0);
    IssueRecord r = issue("A", "X", d, 1);
    r.maturity_date = d.add_months(90);
    EXPECT_EQ(term_bucket(r, standard_buckets()), 7.0);
}

TEST(OnTheRun, Idempotent) {
    const Date d = Date::from_ymd(2024, 3, 1);
    const std::vector<IssueRecord> in{issue("A", "X", d.add_days(-400), 5), issue("B", "X", d.add_days(-10), 5),
                                      issue("C", "X", d, 10), issue("D", "Y", d, 10), issue("E", "Y", d.add_days(5), 10)};
    const auto once = select_on_the_run(in, d);
    const auto twice = select_on_the_run(once, d);
    ASSERT_EQ(once.size(), twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(once[i].bond_id, twice[i].bond_id);
}

TEST(Panels, BuildsPerIssuerPanels) {
    const Date d = Date::from_ymd(2024, 1, 2);
    const std::vector<PriceRecord> prices{{"A-5Y", d, 99.0}, {"A-10Y", d, 98.0}, {"A-30Y", d, 97.0}, {"G-2Y", d, 99.5}};
    const auto ps = build_panels(issues(), prices, d);
    ASSERT_EQ(ps.panels.size(), 2u);
    EXPECT_EQ(ps.panels[0].issuer_id, "ACME");
    ASSERT_EQ(ps.panels[0].members.size(), 3u);
    EXPECT_EQ(ps.panels[0].members[0].obs.bond_id, "A-10Y");
    EXPECT_EQ(ps.panels[0].members[1].obs.bond_id, "A-30Y");
    // 1000-face bond flows are scaled to per-100
    EXPECT_NEAR(ps.panels[0].members[1].flows.amounts.back(), 103.0, 1e-12);
    const auto& m = ps.panels[0].members[2];
    EXPECT_NEAR(m.obs.dirty_price - m.obs.clean_price,
                accrued_per_hundred(ps.panels[0].bonds[2], d, AccrualConvention::paper_literal), 1e-12);
    EXPECT_GT(m.obs.dirty_price, m.obs.clean_price);
}

TEST(Panels, ExclusionsAreTallied) {
    const Date d = Date::from_ymd(2024, 1, 2);
    const std::vector<PriceRecord> prices{{"A-5Y", d, 99.0},        {"A-CALL", d, 98.0}, {"NOPE", d, 97.0},
                                          {"A-5Y", d.add_days(1), 99.0}, {"A-5Y", d, 99.1},  {"G-2Y", d, 99.5}};
    const auto ps = build_panels(issues(), prices, d);
    EXPECT_EQ(ps.excluded.non_vanilla, 1u);
    EXPECT_EQ(ps.excluded.unresolved, 1u);
    EXPECT_EQ(ps.excluded.off_date, 1u);
    EXPECT_EQ(ps.excluded.duplicate, 1u);
    EXPECT_EQ(ps.kept, 2u);
    EXPECT_EQ(ps.kept + ps.excluded.total(), prices.size());
    EXPECT_ERROR_CODE(build_panels(issues(), prices, d, {AccrualConvention::paper_literal, true}),
                      ErrorCode::unresolved_reference);
}

TEST(Panels, MaturedAndOffTheRun) {
    const Date d = Date::from_ymd(2026, 1, 2);
    std::vector<IssueRecord> is = issues();
    is.push_back(issue("A-5Y-NEW", "ACME", Date::from_ymd(2025, 6, 1), 5));
    const std::vector<PriceRecord> prices{{"A-5Y", d, 99.0}, {"A-5Y-NEW", d, 99.0}, {"G-2Y", d, 99.5}};
    const auto ps = build_panels(is, prices, d);
    EXPECT_EQ(ps.excluded.not_on_the_run, 1u);
    EXPECT_EQ(ps.excluded.matured, 1u);
    EXPECT_EQ(ps.kept, 1u);
}

TEST(Panels, TradeDatesSorted) {
    const std::vector<PriceRecord> prices{{"A", Date::from_ymd(2024, 1, 5), 1}, {"B", Date::from_ymd(2024, 1, 2), 1},
                                          {"C", Date::from_ymd(2024, 1, 5), 1}};
    const auto d = trade_dates(prices);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_LT(d[0], d[1]);
}

TEST(Csv, QuotedFieldsAndNumbers) {
    std::istringstream in("\xEF\xBB\xBF" "a,b\n\"x, y\",\"say \"\"hi\"\"\"\n\n");
    const auto t = CsvTable::read(in);
    ASSERT_EQ(t.rows().size(), 1u);
    EXPECT_EQ(t.get(t.rows()[0], "a"), "x, y");
    EXPECT_EQ(t.get(t.rows()[0], "b"), "say \"hi\"");
    EXPECT_EQ(format_number(0.1 + 0.2), "0.3");
    EXPECT_EQ(format_number(std::nan("")), "NA");
    EXPECT_ERROR_CODE(parse_number("1.5x", "v"), ErrorCode::parse);
    EXPECT_ERROR_CODE(parse_int("2.5", "v"), ErrorCode::parse);
}

}  // namespace
}  // namespace credcurve
