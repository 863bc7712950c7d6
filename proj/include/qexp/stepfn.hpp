#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "maps.hpp"

namespace qexp {

/// Piecewise-constant function on [0, domain_right].
///
/// Piece i is [b_i, b_{i+1}) with b_0 = 0, except the last piece, which is
/// closed at domain_right. The stored form is canonical: breakpoints are
/// strictly increasing inside (0, domain_right) and at least
/// `merge_tolerance` apart, and adjacent values are distinct.
class StepFunction {
public:
    /// Breakpoints closer than this collapse to their midpoint.
    static constexpr double merge_tolerance = 1e-11;
    /// Adjacent values within this relative gap are merged (length-weighted).
    static constexpr double value_tolerance = 1e-12;

    StepFunction() : StepFunction(1.0, {}, {0.0}) {}

    StepFunction(double domain_right, std::vector<double> breakpoints, std::vector<double> values)
        : right_(domain_right) {
        if (!(domain_right > 0.0) || !std::isfinite(domain_right)) {
            throw Error(ErrorKind::OutOfDomain, "step function domain must be [0, R] with finite R > 0");
        }
        if (values.size() != breakpoints.size() + 1) {
            throw Error(ErrorKind::DomainMismatch, "need exactly one value per piece");
        }
        for (std::size_t i = 0; i < breakpoints.size(); ++i) {
            if (!std::isfinite(breakpoints[i]) || (i > 0 && breakpoints[i] < breakpoints[i - 1])) {
                throw Error(ErrorKind::DomainMismatch, "breakpoints must be finite and non-decreasing");
            }
        }
        for (double v : values) {
            if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "step function values must be finite");
        }
        breaks_ = std::move(breakpoints);
        values_ = std::move(values);
        canonicalize();
    }

    static StepFunction constant(double domain_right, double c) { return StepFunction(domain_right, {}, {c}); }

    /// Indicator of [a, b) (of [a, R] when b >= R), clipped to the domain.
    static StepFunction indicator(double domain_right, double a, double b) {
        a = std::clamp(a, 0.0, domain_right);
        b = std::clamp(b, 0.0, domain_right);
        if (b <= a) return constant(domain_right, 0.0);
        return StepFunction(domain_right, {a, b}, {0.0, 1.0, 0.0});
    }

    double domain_right() const noexcept { return right_; }
    const std::vector<double>& breakpoints() const noexcept { return breaks_; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::size_t piece_count() const noexcept { return values_.size(); }
    double piece_left(std::size_t i) const noexcept { return i == 0 ? 0.0 : breaks_[i - 1]; }
    double piece_right(std::size_t i) const noexcept { return i + 1 == values_.size() ? right_ : breaks_[i]; }
    double piece_length(std::size_t i) const noexcept { return piece_right(i) - piece_left(i); }

    /// Index of the piece containing x (no domain check).
    std::size_t piece_index(double x) const noexcept {
        return static_cast<std::size_t>(std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin());
    }

    double eval(double x) const {
        const double tol = 1e-12 * std::max(1.0, right_);
        if (!(x >= -tol && x <= right_ + tol)) {
            std::ostringstream os;
            os.precision(17);
            os << "eval at " << x << " outside [0, " << right_ << "]";
            throw Error(ErrorKind::OutOfDomain, os.str());
        }
        return values_[piece_index(x)];
    }
    double operator()(double x) const { return eval(x); }

    friend bool operator==(const StepFunction&, const StepFunction&) = default;

private:
    void canonicalize() {
        // Repeat until stable so that canonical input is a fixed point.
        for (int pass = 0; pass < 64; ++pass) {
            const auto before_breaks = breaks_.size();
            collapse_breakpoints();
            merge_values();
            if (breaks_.size() == before_breaks) break;
        }
    }

    void collapse_breakpoints() {
        std::vector<double> nb;
        std::vector<double> nv;
        nb.reserve(breaks_.size());
        nv.reserve(values_.size());
        nv.push_back(values_[0]);
        std::size_t i = 0;
        const std::size_t m = breaks_.size();
        while (i < m) {
            // Cluster [i, j) of breakpoints with consecutive gaps below tolerance.
            std::size_t j = i + 1;
            double sum = breaks_[i];
            while (j < m && breaks_[j] - breaks_[j - 1] < merge_tolerance) {
                sum += breaks_[j];
                ++j;
            }
            const double at = sum / static_cast<double>(j - i);
            const double value_after = values_[j];
            if (at < merge_tolerance) {
                // Zero-length leading pieces vanish.
                nb.clear();
                nv.assign(1, value_after);
            } else if (right_ - at < merge_tolerance) {
                // Zero-length trailing pieces vanish; keep the value before the cluster.
                break;
            } else if (!nb.empty() && at - nb.back() < merge_tolerance) {
                nv.back() = value_after;
            } else {
                nb.push_back(at);
                nv.push_back(value_after);
            }
            i = j;
        }
        breaks_ = std::move(nb);
        values_ = std::move(nv);
    }

    void merge_values() {
        std::vector<double> nb;
        std::vector<double> nv;
        nb.reserve(breaks_.size());
        nv.reserve(values_.size());
        double run_value = values_[0];
        double run_length = piece_length(0);
        for (std::size_t i = 1; i < values_.size(); ++i) {
            const double v = values_[i];
            const double len = piece_length(i);
            const double gap = std::abs(v - run_value);
            if (gap == 0.0 || gap <= value_tolerance * std::max(std::abs(v), std::abs(run_value))) {
                const double total = run_length + len;
                if (total > 0.0) run_value = (run_value * run_length + v * len) / total;
                run_length = total;
            } else {
                nv.push_back(run_value);
                nb.push_back(breaks_[i - 1]);
                run_value = v;
                run_length = len;
            }
        }
        nv.push_back(run_value);
        breaks_ = std::move(nb);
        values_ = std::move(nv);
    }

    double right_ = 1.0;
    std::vector<double> breaks_;
    std::vector<double> values_;
};

enum class CombineOp { add, sub };

namespace detail {

inline void require_same_domain(const StepFunction& f, const StepFunction& g) {
    const double a = f.domain_right();
    const double b = g.domain_right();
    if (std::abs(a - b) > 1e-12 * std::max(a, b)) {
        std::ostringstream os;
        os.precision(17);
        os << "domains [0, " << a << "] and [0, " << b << "] differ";
        throw Error(ErrorKind::DomainMismatch, os.str());
    }
}

} // namespace detail

/// Pointwise f op g on the merged breakpoint set.
inline StepFunction combine(const StepFunction& f, const StepFunction& g, CombineOp op) {
    detail::require_same_domain(f, g);
    const auto& fb = f.breakpoints();
    const auto& gb = g.breakpoints();
    std::vector<double> breaks;
    std::vector<double> values;
    breaks.reserve(fb.size() + gb.size());
    values.reserve(fb.size() + gb.size() + 1);
    std::size_t i = 0;
    std::size_t j = 0;
    auto apply = [op](double a, double b) { return op == CombineOp::add ? a + b : a - b; };
    values.push_back(apply(f.values()[0], g.values()[0]));
    while (i < fb.size() || j < gb.size()) {
        double next;
        if (j == gb.size() || (i < fb.size() && fb[i] < gb[j])) {
            next = fb[i++];
        } else if (i == fb.size() || gb[j] < fb[i]) {
            next = gb[j++];
        } else {
            next = fb[i++];
            ++j;
        }
        breaks.push_back(next);
        values.push_back(apply(f.values()[i], g.values()[j]));
    }
    return StepFunction(f.domain_right(), std::move(breaks), std::move(values));
}

inline StepFunction operator+(const StepFunction& f, const StepFunction& g) { return combine(f, g, CombineOp::add); }
inline StepFunction operator-(const StepFunction& f, const StepFunction& g) { return combine(f, g, CombineOp::sub); }

inline StepFunction scale(const StepFunction& f, double c) {
    std::vector<double> values = f.values();
    for (double& v : values) v *= c;
    return StepFunction(f.domain_right(), f.breakpoints(), std::move(values));
}

inline StepFunction abs(const StepFunction& f) {
    std::vector<double> values = f.values();
    for (double& v : values) v = std::abs(v);
    return StepFunction(f.domain_right(), f.breakpoints(), std::move(values));
}

inline double integrate(const StepFunction& f) {
    detail::CompensatedSum sum;
    for (std::size_t i = 0; i < f.piece_count(); ++i) sum.add(f.values()[i] * f.piece_length(i));
    return sum.value();
}

/// Integral of x f(x) over the domain.
inline double first_moment(const StepFunction& f) {
    detail::CompensatedSum sum;
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        const double a = f.piece_left(i);
        const double b = f.piece_right(i);
        sum.add(f.values()[i] * (b - a) * (a + b) * 0.5);
    }
    return sum.value();
}

/// Integral of |f| over [a, b] intersected with the domain.
inline double mass_on(const StepFunction& f, double a, double b) {
    detail::CompensatedSum sum;
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        const double lo = std::max(a, f.piece_left(i));
        const double hi = std::min(b, f.piece_right(i));
        if (hi > lo) sum.add(std::abs(f.values()[i]) * (hi - lo));
    }
    return sum.value();
}

inline double l1_norm(const StepFunction& f) { return mass_on(f, 0.0, f.domain_right()); }

inline double l1_distance(const StepFunction& f, const StepFunction& g) { return l1_norm(f - g); }

inline StepFunction normalize(const StepFunction& f) {
    const double total = integrate(f);
    if (!(total > 0.0)) {
        std::ostringstream os;
        os << "cannot normalize a step function with integral " << total;
        throw Error(ErrorKind::ZeroIntegral, os.str());
    }
    return scale(f, 1.0 / total);
}

inline bool is_nonincreasing(const StepFunction& f) {
    return std::is_sorted(f.values().rbegin(), f.values().rend());
}

inline bool is_nondecreasing(const StepFunction& f) { return std::is_sorted(f.values().begin(), f.values().end()); }

/// Monotonicity up to an absolute slack on consecutive piece values.
inline bool is_nonincreasing(const StepFunction& f, double slack) {
    const auto& v = f.values();
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[i - 1] + slack) return false;
    }
    return true;
}

inline bool is_nondecreasing(const StepFunction& f, double slack) {
    const auto& v = f.values();
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] < v[i - 1] - slack) return false;
    }
    return true;
}

/// Smallest piece value over the pieces meeting the open interval (a, b).
inline double min_value_on(const StepFunction& f, double a, double b) {
    double best = INFINITY;
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        if (f.piece_right(i) > a && f.piece_left(i) < b) best = std::min(best, f.values()[i]);
    }
    return best;
}

/// "%.17g": shortest fixed-width form that round-trips every double.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// CSV rows (piece_index,left,right,value), one per piece.
inline std::string to_csv(const StepFunction& f) {
    std::string out = "piece_index,left,right,value\n";
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        out += std::to_string(i) + ',' + format_real(f.piece_left(i)) + ',' + format_real(f.piece_right(i)) + ',' +
               format_real(f.values()[i]) + '\n';
    }
    return out;
}

inline StepFunction step_function_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "piece_index,left,right,value") {
        throw Error(ErrorKind::ParseError, "missing step function CSV header");
    }
    std::vector<double> lefts;
    std::vector<double> values;
    double right = 0.0;
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell[4];
        for (auto& c : cell) {
            if (!std::getline(row, c, ',')) throw Error(ErrorKind::ParseError, "short CSV row: " + line);
        }
        char* end = nullptr;
        const unsigned long index = std::strtoul(cell[0].c_str(), &end, 10);
        if (*end != '\0' || index != expected) throw Error(ErrorKind::ParseError, "bad piece index: " + line);
        ++expected;
        double parsed[3];
        for (int k = 0; k < 3; ++k) {
            parsed[k] = std::strtod(cell[k + 1].c_str(), &end);
            if (*end != '\0' || cell[k + 1].empty()) throw Error(ErrorKind::ParseError, "bad number: " + line);
        }
        lefts.push_back(parsed[0]);
        right = parsed[1];
        values.push_back(parsed[2]);
    }
    if (values.empty()) throw Error(ErrorKind::ParseError, "step function CSV has no pieces");
    std::vector<double> breaks(lefts.begin() + 1, lefts.end());
    return StepFunction(right, std::move(breaks), std::move(values));
}

} // namespace qexp
