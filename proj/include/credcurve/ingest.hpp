/**
 * @file ingest.hpp
 * @brief Issue, price and Treasury files; vanilla and on-the-run filtering; panel assembly
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include "credcurve/cashflow.hpp"
#include "credcurve/basis.hpp"
#include "credcurve/csv.hpp"
#include "credcurve/curves.hpp"
#include "credcurve/date.hpp"
#include "credcurve/error.hpp"

namespace credcurve {

/// One row of issues.csv; the same fields as the instrument it describes.
using IssueRecord = BondInstrument;

/// One row of prices.csv.
struct PriceRecord {
    std::string bond_id;
    Date trade_date;
    double clean_price = 0.0;  // per 100 face
};

template <typename T>
struct ParseResult {
    std::vector<T> records;
    std::vector<std::string> warnings;  // one per skipped row in lenient mode
};

namespace detail {

template <typename T, typename Fn>
ParseResult<T> parse_rows(const CsvTable& table, bool strict, const char* file, Fn&& parse_row) {
    ParseResult<T> out;
    for (const CsvRow& row : table.rows()) {
        try {
            out.records.push_back(parse_row(row));
        } catch (const Error& e) {
            const std::string msg = std::string(file) + " line " + std::to_string(row.line) + ": " + e.what();
            if (strict) fail(ErrorCode::parse, msg);
            out.warnings.push_back(msg);
        }
    }
    return out;
}

}  // namespace detail

inline ParseResult<IssueRecord> parse_issues(std::istream& in, bool strict = false) {
    const CsvTable t = CsvTable::read(in);
    t.require_columns({"bond_id", "issuer_id", "issue_date", "maturity_date", "coupon_rate", "coupon_freq", "face",
                       "callable", "convertible", "variable_rate", "senior"});
    return detail::parse_rows<IssueRecord>(t, strict, "issues", [&](const CsvRow& row) {
        IssueRecord r;
        r.bond_id = t.get(row, "bond_id");
        r.issuer_id = t.get(row, "issuer_id");
        require(!r.bond_id.empty() && !r.issuer_id.empty(), ErrorCode::parse, "empty identifier");
        r.issue_date = Date::parse(t.get(row, "issue_date"));
        r.maturity_date = Date::parse(t.get(row, "maturity_date"));
        r.coupon_rate = parse_number(t.get(row, "coupon_rate"), "coupon_rate");
        r.coupon_freq = parse_int(t.get(row, "coupon_freq"), "coupon_freq");
        r.face = parse_number(t.get(row, "face"), "face");
        r.flags.callable = parse_bool(t.get(row, "callable"), "callable");
        r.flags.convertible = parse_bool(t.get(row, "convertible"), "convertible");
        r.flags.variable_rate = parse_bool(t.get(row, "variable_rate"), "variable_rate");
        r.flags.senior = parse_bool(t.get(row, "senior"), "senior");
        static const std::set<int> freqs{0, 1, 2, 4, 12};
        require(freqs.count(r.coupon_freq) != 0, ErrorCode::parse, "coupon_freq must be one of 0,1,2,4,12");
        require(r.coupon_rate >= 0.0, ErrorCode::parse, "negative coupon_rate");
        try {
            r.validate();
        } catch (const Error& e) {
            fail(ErrorCode::parse, e.what());
        }
        return r;
    });
}

inline ParseResult<PriceRecord> parse_prices(std::istream& in, bool strict = false) {
    const CsvTable t = CsvTable::read(in);
    t.require_columns({"bond_id", "trade_date", "clean_price"});
    return detail::parse_rows<PriceRecord>(t, strict, "prices", [&](const CsvRow& row) {
        PriceRecord r;
        r.bond_id = t.get(row, "bond_id");
        require(!r.bond_id.empty(), ErrorCode::parse, "empty bond_id");
        r.trade_date = Date::parse(t.get(row, "trade_date"));
        r.clean_price = parse_number(t.get(row, "clean_price"), "clean_price");
        require(r.clean_price > 0.0, ErrorCode::parse, "clean_price must be positive");
        return r;
    });
}

/// Tabulated Treasury curves, optionally one per date (column as_of).
class TreasuryBook {
public:
    static TreasuryBook parse(std::istream& in) {
        const CsvTable t = CsvTable::read(in);
        t.require_columns({"tenor_years", "zero_yield"});
        const bool dated = t.has("as_of");
        std::map<std::optional<Date>, std::vector<std::pair<double, double>>> knots;
        for (const CsvRow& row : t.rows()) {
            try {
                std::optional<Date> d;
                if (dated) d = Date::parse(t.get(row, "as_of"));
                knots[d].emplace_back(parse_number(t.get(row, "tenor_years"), "tenor_years"),
                                      parse_number(t.get(row, "zero_yield"), "zero_yield"));
            } catch (const Error& e) {
                fail(ErrorCode::parse, "treasury line " + std::to_string(row.line) + ": " + e.what());
            }
        }
        require(!knots.empty(), ErrorCode::parse, "treasury file has no rows");
        TreasuryBook book;
        for (auto& [d, k] : knots) {
            std::sort(k.begin(), k.end());
            book.curves_.emplace(d, TreasuryCurve::tabulated(d.value_or(Date{}), std::move(k)));
        }
        return book;
    }

    void add(std::optional<Date> date, TreasuryCurve curve) { curves_.insert_or_assign(date, std::move(curve)); }

    /// Curve dated `as_of`, else the undated curve.
    TreasuryCurve curve_for(Date as_of) const {
        if (auto it = curves_.find(as_of); it != curves_.end()) return it->second;
        auto it = curves_.find(std::nullopt);
        require(it != curves_.end(), ErrorCode::domain, "no Treasury curve for " + as_of.iso());
        return it->second;
    }

private:
    std::map<std::optional<Date>, TreasuryCurve> curves_;
};

/// Standard original-term buckets in years.
inline const std::vector<double>& standard_buckets() {
    static const std::vector<double> b{1, 2, 3, 5, 7, 10, 20, 30};
    return b;
}

/// Nearest bucket to the original term (ties go to the shorter bucket).
inline double term_bucket(const IssueRecord& issue, const std::vector<double>& buckets) {
    const double term = year_fraction(issue.issue_date, issue.maturity_date);
    double best = buckets.front();
    for (double b : buckets)
        if (std::abs(term - b) < std::abs(term - best)) best = b;
    return best;
}

/// Most recent issue per original-term bucket among issues dated on or before `as_of`.
inline std::vector<IssueRecord> select_on_the_run(const std::vector<IssueRecord>& issues, Date as_of,
                                                  const std::vector<double>& buckets = standard_buckets()) {
    std::map<std::pair<std::string, double>, const IssueRecord*> best;
    for (const IssueRecord& r : issues) {
        if (r.issue_date > as_of) continue;
        const auto key = std::make_pair(r.issuer_id, term_bucket(r, buckets));
        auto [it, inserted] = best.emplace(key, &r);
        if (inserted) continue;
        const IssueRecord* cur = it->second;
        if (r.issue_date > cur->issue_date || (r.issue_date == cur->issue_date && r.bond_id < cur->bond_id))
            it->second = &r;
    }
    std::vector<IssueRecord> out;
    for (const auto& [key, r] : best) out.push_back(*r);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.issuer_id, a.bond_id) < std::tie(b.issuer_id, b.bond_id);
    });
    return out;
}

struct ValuationConfig {
    AccrualConvention accrual = AccrualConvention::paper_literal;
    bool strict = false;
};

/// Panel members of one issuer on one date, sorted by bond id.
struct Panel {
    std::string issuer_id;
    Date as_of;
    std::vector<PanelMember> members;
    std::vector<BondInstrument> bonds;  // parallel to members
};

/// Why price records did not make it into a panel.
struct ExclusionTally {
    std::size_t off_date = 0;
    std::size_t unresolved = 0;
    std::size_t non_vanilla = 0;
    std::size_t not_on_the_run = 0;
    std::size_t matured = 0;
    std::size_t duplicate = 0;
    std::size_t invalid = 0;

    std::size_t total() const {
        return off_date + unresolved + non_vanilla + not_on_the_run + matured + duplicate + invalid;
    }
};

struct PanelSet {
    std::vector<Panel> panels;  // sorted by issuer id
    ExclusionTally excluded;
    std::size_t kept = 0;
    std::vector<std::string> warnings;
};

/// Groups the `as_of` prices into per-issuer panels of vanilla on-the-run bonds.
inline PanelSet build_panels(const std::vector<IssueRecord>& issues, const std::vector<PriceRecord>& prices, Date as_of,
                             const ValuationConfig& valuation = {}) {
    PanelSet out;
    std::map<std::string, const IssueRecord*> by_id;
    std::vector<IssueRecord> vanilla;
    for (const IssueRecord& r : issues) {
        by_id.emplace(r.bond_id, &r);
        if (r.is_vanilla()) vanilla.push_back(r);
    }
    std::set<std::string> on_the_run;
    for (const IssueRecord& r : select_on_the_run(vanilla, as_of)) on_the_run.insert(r.bond_id);

    std::map<std::string, Panel> panels;
    std::set<std::string> seen;
    for (const PriceRecord& p : prices) {
        if (p.trade_date != as_of) {
            ++out.excluded.off_date;
            continue;
        }
        auto it = by_id.find(p.bond_id);
        if (it == by_id.end()) {
            const std::string msg = "price for unknown bond " + p.bond_id;
            if (valuation.strict) fail(ErrorCode::unresolved_reference, msg);
            out.warnings.push_back(msg);
            ++out.excluded.unresolved;
            continue;
        }
        const IssueRecord& bond = *it->second;
        if (!bond.is_vanilla()) {
            ++out.excluded.non_vanilla;
            continue;
        }
        if (bond.maturity_date <= as_of) {
            ++out.excluded.matured;
            continue;
        }
        if (!on_the_run.count(bond.bond_id)) {
            ++out.excluded.not_on_the_run;
            continue;
        }
        if (!seen.insert(bond.bond_id).second) {
            const std::string msg = "duplicate price for " + bond.bond_id + " on " + as_of.iso();
            if (valuation.strict) fail(ErrorCode::duplicate_observation, msg);
            out.warnings.push_back(msg);
            ++out.excluded.duplicate;
            continue;
        }
        PanelMember m;
        try {
            m.flows = generate_schedule(bond, as_of).scaled(100.0 / bond.face);
            m.obs = {bond.bond_id, as_of, p.clean_price,
                     p.clean_price + accrued_per_hundred(bond, as_of, valuation.accrual), 1.0};
            require(std::isfinite(m.obs.dirty_price) && m.obs.dirty_price > 0.0, ErrorCode::domain,
                    "nonpositive dirty price");
        } catch (const Error& e) {
            if (valuation.strict) throw;
            out.warnings.push_back("bond " + bond.bond_id + ": " + e.what());
            ++out.excluded.invalid;
            continue;
        }
        Panel& panel = panels[bond.issuer_id];
        panel.issuer_id = bond.issuer_id;
        panel.as_of = as_of;
        panel.members.push_back(std::move(m));
        panel.bonds.push_back(bond);
        ++out.kept;
    }
    for (auto& [id, panel] : panels) {
        std::vector<std::size_t> order(panel.members.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return panel.members[a].obs.bond_id < panel.members[b].obs.bond_id;
        });
        Panel sorted{panel.issuer_id, panel.as_of, {}, {}};
        for (std::size_t i : order) {
            sorted.members.push_back(std::move(panel.members[i]));
            sorted.bonds.push_back(std::move(panel.bonds[i]));
        }
        out.panels.push_back(std::move(sorted));
    }
    return out;
}

/// Distinct trade dates in ascending order.
inline std::vector<Date> trade_dates(const std::vector<PriceRecord>& prices) {
    std::set<Date> dates;
    for (const auto& p : prices) dates.insert(p.trade_date);
    return {dates.begin(), dates.end()};
}

}  // namespace credcurve
