#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "base.hpp"

namespace qexp {

/// Finite word over {0, 1}.
class DigitWord {
public:
    DigitWord() = default;
    explicit DigitWord(std::vector<std::uint8_t> digits) : digits_(std::move(digits)) {
        for (auto d : digits_) {
            if (d > 1) throw Error(ErrorKind::ParseError, "digits must be 0 or 1");
        }
    }

    static DigitWord parse(std::string_view text) {
        std::vector<std::uint8_t> digits;
        digits.reserve(text.size());
        for (char c : text) {
            if (c != '0' && c != '1') {
                throw Error(ErrorKind::ParseError, "digit word may only contain '0' and '1': " + std::string(text));
            }
            digits.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return DigitWord(std::move(digits));
    }

    static DigitWord repeat(int digit, std::size_t count) {
        return DigitWord(std::vector<std::uint8_t>(count, static_cast<std::uint8_t>(digit)));
    }

    std::size_t size() const noexcept { return digits_.size(); }
    bool empty() const noexcept { return digits_.empty(); }
    int operator[](std::size_t i) const noexcept { return digits_[i]; }
    const std::vector<std::uint8_t>& digits() const noexcept { return digits_; }

    void push_back(int digit) { digits_.push_back(static_cast<std::uint8_t>(digit != 0)); }
    void pop_back() { digits_.pop_back(); }

    DigitWord prefix(std::size_t n) const {
        return DigitWord(std::vector<std::uint8_t>(digits_.begin(), digits_.begin() + std::min(n, size())));
    }

    bool all_equal_to(int digit) const noexcept {
        for (auto d : digits_) {
            if (d != digit) return false;
        }
        return true;
    }

    std::string str() const {
        std::string out;
        out.reserve(digits_.size());
        for (auto d : digits_) out.push_back(static_cast<char>('0' + d));
        return out;
    }

    /// Lexicographic order on equal-length words is the order of std::vector.
    friend auto operator<=>(const DigitWord&, const DigitWord&) = default;
    friend bool operator==(const DigitWord&, const DigitWord&) = default;

private:
    std::vector<std::uint8_t> digits_;
};

/// Constant tail appended to a finite word: 0^inf or 1^inf.
enum class Tail { zeros, ones };

/// A finite word followed by a constant tail, i.e. an eventually constant
/// infinite digit sequence.
struct TailedWord {
    DigitWord word;
    Tail tail = Tail::zeros;
};

struct Step {
    int digit;
    double value;
};

/// Trajectory x_0 .. x_n of a point together with the n emitted digits.
struct OrbitRecord {
    BasePair base;
    double start;
    std::vector<double> points;
    DigitWord digits;
    MapKind kind;
};

namespace detail {

inline double domain_tolerance(const BasePair& Q) noexcept { return 1e-12 * std::max(1.0, Q.right()); }

inline double require_in_domain(const BasePair& Q, double x, const char* what) {
    const double tol = domain_tolerance(Q);
    if (!(x >= -tol && x <= Q.right() + tol)) {
        std::ostringstream os;
        os.precision(17);
        os << what << ": x = " << x << " outside [0, " << Q.right() << "]";
        throw Error(ErrorKind::OutOfDomain, os.str());
    }
    return std::clamp(x, 0.0, Q.right());
}

inline Step branch(const BasePair& Q, int digit, double x) {
    const double y = digit == 0 ? Q.q0() * x : Q.q1() * x - 1.0;
    return {digit, require_in_domain(Q, y, "branch image")};
}

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double v) noexcept {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            carry_ += (sum_ - t) + v;
        } else {
            carry_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// pi_Q of an eventually constant sequence for raw bases (no admissibility
/// check) together with its partial derivatives in q0 and q1.
struct ExpansionValue {
    double value;
    double d_q0;
    double d_q1;
};

inline ExpansionValue expansion_value(double q0, double q1, const TailedWord& seq) {
    CompensatedSum value, dq0, dq1;
    double inv_weight = 1.0;
    int zeros = 0;
    int ones = 0;
    for (std::size_t i = 0; i < seq.word.size(); ++i) {
        const int c = seq.word[i];
        inv_weight /= (c == 0 ? q0 : q1);
        (c == 0 ? zeros : ones) += 1;
        if (c == 1) {
            value.add(inv_weight);
            dq0.add(-zeros * inv_weight / q0);
            dq1.add(-ones * inv_weight / q1);
        }
    }
    if (seq.tail == Tail::ones) {
        const double t = inv_weight / (q1 - 1.0);
        value.add(t);
        dq0.add(-zeros * t / q0);
        dq1.add(-ones * t / q1 - t / (q1 - 1.0));
    }
    return {value.value(), dq0.value(), dq1.value()};
}

} // namespace detail

/// One step of the greedy map: digit 1 exactly when x >= 1/q1.
inline Step greedy_step(const BasePair& Q, double x) {
    x = detail::require_in_domain(Q, x, "greedy_step");
    return detail::branch(Q, x < Q.greedy_switch() ? 0 : 1, x);
}

/// One step of the lazy map: digit 0 exactly when x <= 1/(q0(q1-1)).
inline Step lazy_step(const BasePair& Q, double x) {
    x = detail::require_in_domain(Q, x, "lazy_step");
    return detail::branch(Q, x <= Q.lazy_switch() ? 0 : 1, x);
}

inline Step step(const BasePair& Q, double x, MapKind kind) {
    return kind == MapKind::greedy ? greedy_step(Q, x) : lazy_step(Q, x);
}

inline OrbitRecord expansion(const BasePair& Q, double x, std::size_t n, MapKind kind) {
    OrbitRecord orbit{Q, x, {}, {}, kind};
    double current = detail::require_in_domain(Q, x, "expansion");
    orbit.points.reserve(n + 1);
    orbit.points.push_back(current);
    for (std::size_t k = 0; k < n; ++k) {
        const Step s = step(Q, current, kind);
        orbit.digits.push_back(s.digit);
        current = s.value;
        orbit.points.push_back(current);
    }
    return orbit;
}

/// pi_Q(w followed by the constant tail), clamped into [0, right].
inline double evaluate(const BasePair& Q, const DigitWord& w, Tail tail) {
    const double v = detail::expansion_value(Q.q0(), Q.q1(), {w, tail}).value;
    return std::clamp(v, 0.0, Q.right());
}

/// Product A_w of the bases attached to the digits of w.
inline double word_weight(const BasePair& Q, const DigitWord& w) {
    double a = 1.0;
    for (std::size_t i = 0; i < w.size(); ++i) a *= Q.q(w[i]);
    return a;
}

struct DigitSet {
    bool zero = false;
    bool one = false;

    std::size_t size() const noexcept { return static_cast<std::size_t>(zero) + static_cast<std::size_t>(one); }
    friend bool operator==(const DigitSet&, const DigitSet&) = default;
};

/// Digits d such that the branch image of x stays inside I_Q.
inline DigitSet admissible_digits(const BasePair& Q, double x) {
    x = detail::require_in_domain(Q, x, "admissible_digits");
    return {x <= Q.lazy_switch(), x >= Q.greedy_switch()};
}

/// H^k(t) with H(t) = (1 + t)/q1, the right inverse branch of the greedy map.
inline double partial_inverse_H(const BasePair& Q, double t, std::size_t k) {
    t = detail::require_in_domain(Q, t, "partial_inverse_H");
    for (std::size_t i = 0; i < k; ++i) {
        const double next = std::min((1.0 + t) / Q.q1(), Q.right());
        if (next == t) break;
        t = next;
    }
    return t;
}

/// Linear bijection [0, 1] -> I_Q, u -> u/(q1-1).
inline double conjugacy(const BasePair& Q, double u) { return u * Q.right(); }

/// Greedy map conjugated to [0, 1].
inline double conjugate_map(const BasePair& Q, double u) {
    if (!(u >= -1e-12 && u <= 1.0 + 1e-12)) {
        std::ostringstream os;
        os.precision(17);
        os << "conjugate_map: u = " << u << " outside [0, 1]";
        throw Error(ErrorKind::OutOfDomain, os.str());
    }
    u = std::clamp(u, 0.0, 1.0);
    const double a1 = (Q.q1() - 1.0) / Q.q1();
    const double v = u < a1 ? Q.q0() * u : Q.q1() * u - (Q.q1() - 1.0);
    return std::clamp(v, 0.0, 1.0);
}

/// theta_j = A_{b_1..b_j} (x - sum_{i<=j} b_i / A_{b_1..b_i}), the normalized
/// error of the length-j prefix of `digits` as an expansion of x.
inline double normalized_error(const BasePair& Q, double x, const DigitWord& digits, std::size_t j) {
    detail::CompensatedSum partial;
    double weight = 1.0;
    for (std::size_t i = 0; i < j && i < digits.size(); ++i) {
        weight *= Q.q(digits[i]);
        if (digits[i] == 1) partial.add(1.0 / weight);
    }
    return weight * (x - partial.value());
}

} // namespace qexp
