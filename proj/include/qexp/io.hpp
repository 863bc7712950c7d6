#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cylinders.hpp"
#include "ergodic.hpp"
#include "stepfn.hpp"
#include "transfer.hpp"

namespace qexp {

enum class Format { csv, json, table };

/// Column-ordered table of JSON scalars. Every output schema is a Table so
/// CSV, JSON and human tables share one column order.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
};

namespace detail {

inline std::string csv_cell(const nlohmann::json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return v.dump();
    if (v.is_number_float()) return format_real(v.get<double>());
    return v.get<std::string>();
}

inline std::string text_cell(const nlohmann::json& v) {
    if (!v.is_number_float()) return csv_cell(v);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
}

inline std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline double parse_real(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0') throw Error(ErrorKind::ParseError, "not a number: '" + s + "'");
    return v;
}

inline long long parse_integer(const std::string& s) {
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw Error(ErrorKind::ParseError, "not an integer: '" + s + "'");
    return v;
}

inline unsigned long long parse_unsigned(const std::string& s) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || *end != '\0') throw Error(ErrorKind::ParseError, "not a count: '" + s + "'");
    return v;
}

inline bool parse_bool(const std::string& s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw Error(ErrorKind::ParseError, "not a boolean: '" + s + "'");
}

} // namespace detail

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + detail::csv_cell(row[i]);
        out += '\n';
    }
    return out;
}

/// Array of objects, one per row, keys in column order.
inline std::string to_json(const Table& t) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = row[i];
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

/// Right-aligned columns, numbers rounded to 6 significant digits.
inline std::string to_text(const Table& t) {
    std::vector<std::size_t> width(t.columns.size());
    std::vector<std::vector<std::string>> cells;
    for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = t.columns[i].size();
    for (const auto& row : t.rows) {
        auto& out = cells.emplace_back();
        for (std::size_t i = 0; i < row.size(); ++i) {
            out.push_back(detail::text_cell(row[i]));
            width[i] = std::max(width[i], out.back().size());
        }
    }
    auto line = [&](const std::vector<std::string>& r) {
        std::string s;
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) s += "  ";
            s += std::string(width[i] - r[i].size(), ' ') + r[i];
        }
        return s + '\n';
    };
    std::string out = line(t.columns);
    for (const auto& r : cells) out += line(r);
    return out;
}

inline std::string emit(const Table& t, Format f) {
    switch (f) {
    case Format::csv: return to_csv(t);
    case Format::json: return to_json(t);
    case Format::table: return to_text(t);
    }
    return {};
}

/// Raw cells of a CSV with the expected header.
inline std::vector<std::vector<std::string>> parse_csv(const std::string& text,
                                                       const std::vector<std::string>& columns) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || detail::split_row(line) != columns) {
        throw Error(ErrorKind::ParseError, "unexpected CSV header: '" + line + "'");
    }
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = detail::split_row(line);
        if (cells.size() != columns.size()) throw Error(ErrorKind::ParseError, "wrong cell count: '" + line + "'");
        rows.push_back(std::move(cells));
    }
    return rows;
}

inline void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        std::fflush(stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot open '" + path + "' for writing");
    out << content;
    if (!out.flush()) throw Error(ErrorKind::IoError, "write to '" + path + "' failed");
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// BasePair

inline const std::vector<std::string>& base_columns() {
    static const std::vector<std::string> c{"q0", "q1", "ell", "r", "right", "greedy_switch", "lazy_switch", "strict"};
    return c;
}

inline Table base_table(const BasePair& Q) {
    return {base_columns(),
            {{Q.q0(), Q.q1(), Q.ell(), Q.r(), Q.right(), Q.greedy_switch(), Q.lazy_switch(), Q.strict()}}};
}

/// Rebuilds each base from (q0, q1) and checks the stored derived fields.
inline std::vector<BasePair> bases_from_csv(const std::string& text) {
    std::vector<BasePair> out;
    for (const auto& row : parse_csv(text, base_columns())) {
        BasePair Q(detail::parse_real(row[0]), detail::parse_real(row[1]));
        const double stored[] = {detail::parse_real(row[2]), detail::parse_real(row[3]), detail::parse_real(row[4]),
                                 detail::parse_real(row[5]), detail::parse_real(row[6])};
        const double fresh[] = {Q.ell(), Q.r(), Q.right(), Q.greedy_switch(), Q.lazy_switch()};
        for (std::size_t i = 0; i < 5; ++i) {
            if (stored[i] != fresh[i]) throw Error(ErrorKind::ParseError, "derived field disagrees with (q0, q1)");
        }
        if (detail::parse_bool(row[7]) != Q.strict()) throw Error(ErrorKind::ParseError, "strict flag disagrees");
        out.push_back(Q);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Orbits: row k holds x_k and the digit emitted from it (empty on the last row)

struct OrbitRow {
    std::size_t step;
    double x;
    int digit;  // -1 when absent
};

inline const std::vector<std::string>& orbit_columns() {
    static const std::vector<std::string> c{"step", "x", "digit"};
    return c;
}

inline Table orbit_table(const OrbitRecord& o) {
    Table t{orbit_columns(), {}};
    for (std::size_t k = 0; k < o.points.size(); ++k) {
        nlohmann::json digit = k < o.digits.size() ? nlohmann::json(o.digits[k]) : nlohmann::json();
        t.rows.push_back({k, o.points[k], digit});
    }
    return t;
}

inline std::vector<OrbitRow> orbit_rows_from_csv(const std::string& text) {
    std::vector<OrbitRow> out;
    for (const auto& row : parse_csv(text, orbit_columns())) {
        const int digit = row[2].empty() ? -1 : static_cast<int>(detail::parse_integer(row[2]));
        if (digit < -1 || digit > 1) throw Error(ErrorKind::ParseError, "digit must be 0 or 1");
        out.push_back({detail::parse_unsigned(row[0]), detail::parse_real(row[1]), digit});
    }
    return out;
}

inline Table orbit_table(const std::vector<OrbitRow>& rows) {
    Table t{orbit_columns(), {}};
    for (const auto& r : rows) t.rows.push_back({r.step, r.x, r.digit < 0 ? nlohmann::json() : nlohmann::json(r.digit)});
    return t;
}

// ---------------------------------------------------------------------------
// Step functions

inline const std::vector<std::string>& step_columns() {
    static const std::vector<std::string> c{"piece_index", "left", "right", "value"};
    return c;
}

inline Table step_table(const StepFunction& f) {
    Table t{step_columns(), {}};
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        t.rows.push_back({i, f.piece_left(i), f.piece_right(i), f.values()[i]});
    }
    return t;
}

// ---------------------------------------------------------------------------
// Transfer iteration

inline const std::vector<std::string>& transfer_columns() {
    static const std::vector<std::string> c{"n", "l1_increment", "breakpoint_count", "mass_outside_support"};
    return c;
}

inline Table transfer_table(const std::vector<IterateRecord>& records) {
    Table t{transfer_columns(), {}};
    for (const auto& r : records) t.rows.push_back({r.index, r.l1_increment, r.breakpoint_count, r.mass_outside_support});
    return t;
}

/// The integral column is not serialized; parsed records carry NaN there.
inline std::vector<IterateRecord> transfer_records_from_csv(const std::string& text) {
    std::vector<IterateRecord> out;
    for (const auto& row : parse_csv(text, transfer_columns())) {
        out.push_back({detail::parse_unsigned(row[0]), detail::parse_real(row[1]), detail::parse_unsigned(row[2]),
                       detail::parse_real(row[3]), std::numeric_limits<double>::quiet_NaN()});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cylinder partitions

struct PartitionRow {
    DigitWord word;
    double left;
    double right;
    double image_right;
    double weight;
};

inline const std::vector<std::string>& partition_columns() {
    static const std::vector<std::string> c{"word", "left", "right", "image_right", "weight"};
    return c;
}

inline std::vector<PartitionRow> partition_rows(const std::vector<CylinderInterval>& cylinders) {
    std::vector<PartitionRow> out;
    out.reserve(cylinders.size());
    for (const auto& c : cylinders) out.push_back({c.word, c.domain.lo, c.domain.hi, c.image.hi, c.weight});
    return out;
}

inline Table partition_table(const std::vector<PartitionRow>& rows) {
    Table t{partition_columns(), {}};
    for (const auto& r : rows) t.rows.push_back({r.word.str(), r.left, r.right, r.image_right, r.weight});
    return t;
}

inline std::vector<PartitionRow> partition_rows_from_csv(const std::string& text) {
    std::vector<PartitionRow> out;
    for (const auto& row : parse_csv(text, partition_columns())) {
        out.push_back({DigitWord::parse(row[0]), detail::parse_real(row[1]), detail::parse_real(row[2]),
                       detail::parse_real(row[3]), detail::parse_real(row[4])});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo reports

inline const std::vector<std::string>& report_columns() {
    static const std::vector<std::string> c{"statistic", "q0", "q1", "n_samples", "depth", "seed", "mean", "stderr"};
    return c;
}

inline Table report_table(const std::vector<SampleReport>& reports) {
    Table t{report_columns(), {}};
    for (const auto& r : reports) {
        t.rows.push_back({r.statistic, r.base.q0(), r.base.q1(), r.n_samples, r.depth, r.seed, r.mean, r.stderr_});
    }
    return t;
}

inline std::vector<SampleReport> reports_from_csv(const std::string& text) {
    std::vector<SampleReport> out;
    for (const auto& row : parse_csv(text, report_columns())) {
        out.push_back({BasePair(detail::parse_real(row[1]), detail::parse_real(row[2])), detail::parse_unsigned(row[3]),
                       detail::parse_unsigned(row[4]), detail::parse_unsigned(row[5]), row[0],
                       detail::parse_real(row[6]), detail::parse_real(row[7])});
    }
    return out;
}

inline Table correlation_table(const std::vector<Correlation>& cs) {
    Table t{{"n", "value", "stderr"}, {}};
    for (const auto& c : cs) t.rows.push_back({c.n, c.value, c.stderr_});
    return t;
}

inline Table gap_table(const GapResult& g) {
    return {{"mean_greedy", "midpoint", "mean_lazy", "lower_margin", "upper_margin"},
            {{g.mean_greedy, g.midpoint, g.mean_lazy, g.lower_margin(), g.upper_margin()}}};
}

} // namespace qexp
