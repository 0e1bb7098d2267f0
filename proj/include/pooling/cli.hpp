#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pooling/axiom_lab.hpp"
#include "pooling/scenario.hpp"

namespace pooling {

/// Ordered (section, key, value) records rendered either for people or as
/// tab-separated machine lines.
class Report {
public:
    void add(std::string section, std::string key, std::string value);
    void add(std::string section, std::string key, double value);

    /// "section<TAB>key<TAB>value" per record.
    std::string machine() const;
    /// Records grouped under "[section]" headings.
    std::string human() const;
    std::string render(bool machine_form) const { return machine_form ? machine() : human(); }

    struct Record {
        std::string section, key, value;
    };
    const std::vector<Record>& records() const noexcept { return records_; }

private:
    std::vector<Record> records_;
};

/// Fixed-precision number formatting shared by every report.
std::string format_number(double x);
std::string format_vector(std::span<const double> v);

/// Ids of the built-in worked examples.
const std::vector<std::string>& demo_ids();

/// Runs a built-in example, recording every computed value next to its
/// expected value. Returns false when any value misses its expectation.
/// Throws QueryError for unknown ids.
bool run_demo(std::string_view id, Report& report, const Tolerances& tol = {});

/// Appends the report of an axiom check. Returns false for a Violated verdict.
bool report_check(const CheckReport& check, Report& report, const std::string& section);

struct QueryOutcome {
    Report report;
    /// False when a check was violated or a demo missed an expected value.
    bool ok = true;
};

/// Executes the scenario's queries in order. Unresolvable references raise
/// QueryError naming the query; other library errors propagate unchanged.
QueryOutcome run_queries(const Scenario& scenario, const CheckConfig& config);

/// Exit codes: 0 success, 1 violated check or failed demo, 2 unreadable,
/// malformed or invalid input (and other library errors), 64 usage error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pooling
