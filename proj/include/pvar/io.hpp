#pragma once

#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pvar/element.hpp"
#include "pvar/scalar.hpp"

namespace pvar::io {

/// Exact value of an integer, p/q or decimal literal with at most 15 significant digits.
inline std::optional<Rational> exact_literal(const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) return std::nullopt;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        auto p = exact_literal(s.substr(0, slash)), q = exact_literal(s.substr(slash + 1));
        if (!p || !q || !num<Rational>::is_integer(*p) || !num<Rational>::is_integer(*q) || *q == 0) return std::nullopt;
        Rational r = *p / *q;
        r.canonicalize();
        return r;
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    std::string digits;
    long scale = 0;
    bool dot = false, any = false;
    for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'); ++i) {
        if (s[i] == '.') {
            if (dot) return std::nullopt;
            dot = true;
            continue;
        }
        any = true;
        digits += s[i];
        if (dot) ++scale;
    }
    if (!any) return std::nullopt;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t used = 0;
        long e;
        try {
            e = std::stol(s.substr(i + 1), &used);
        } catch (const std::exception&) {
            return std::nullopt;
        }
        if (used != s.size() - i - 1 || std::labs(e) > 300) return std::nullopt;
        scale -= e;
        i = s.size();
    }
    if (i != s.size()) return std::nullopt;
    auto first = digits.find_first_not_of('0');
    std::string sig = first == std::string::npos ? "0" : digits.substr(first);
    while (sig.size() > 1 && sig.back() == '0' && scale > 0) sig.pop_back(), --scale;
    if (sig.size() > 15) return std::nullopt;
    mpz_class n(sig), ten(10), d(1);
    mpz_class pow10;
    mpz_pow_ui(pow10.get_mpz_t(), ten.get_mpz_t(), static_cast<unsigned long>(std::labs(scale)));
    Rational r = scale >= 0 ? Rational(n, pow10) : Rational(n * pow10, d);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

inline double float_literal(const std::string& s) {
    if (auto r = exact_literal(s)) return r->get_d();
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + s + "'");
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size() || !std::isfinite(v)) throw ParseError("not a number: '" + s + "'");
    return v;
}

/// Literal in the backend type; Rational rejects values it cannot hold exactly.
template <class T>
T parse_scalar(const std::string& s) {
    if constexpr (num<T>::exact) {
        if (auto r = exact_literal(s)) return *r;
        float_literal(s);
        throw NotExact("'" + s + "' has more than 15 significant digits");
    } else {
        return float_literal(s);
    }
}

namespace detail {

template <class T>
bool constant_value(const Element<T>& e, T& out) {
    if (e.has_callables() || e.is_values()) return false;
    if (e.terms().empty()) return out = T(0), true;
    if (e.terms().size() != 1) return false;
    const auto& [k, c] = *e.terms().begin();
    if (!(k == TermKey<T>{})) return false;
    out = c;
    return true;
}

template <class T>
class Parser {
public:
    explicit Parser(std::string s) : s_(std::move(s)) {}

    Element<T> run() {
        Element<T> e = sum();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return e;
    }

private:
    std::string s_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what + " at column " + std::to_string(i_ + 1) + " in '" + s_ + "'");
    }

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }

    bool eat(char ch) {
        skip();
        if (i_ < s_.size() && s_[i_] == ch) return ++i_, true;
        return false;
    }

    Element<T> sum() {
        Element<T> e = product();
        for (;;) {
            if (eat('+')) e += product();
            else if (eat('-')) e -= product();
            else return e;
        }
    }

    Element<T> product() {
        Element<T> e = unary();
        for (;;) {
            if (eat('*')) {
                e = e * unary();
            } else if (eat('/')) {
                T c;
                if (!constant_value(unary(), c) || c == T(0)) fail("division only by a nonzero constant");
                e *= T(1) / c;
            } else if (implicit()) {
                e = e * power();
            } else {
                return e;
            }
        }
    }

    /// 2x, 3(1-x) and x sin(x) multiply without a '*'.
    bool implicit() {
        skip();
        return i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '(');
    }

    Element<T> unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    Element<T> power() {
        Element<T> base = atom();
        if (!eat('^')) return base;
        T k;
        if (!constant_value(exponent(), k)) fail("exponent must be a constant");
        return raise(base, k);
    }

    Element<T> exponent() {
        if (eat('-')) return -exponent();
        return atom();
    }

    Element<T> raise(const Element<T>& b, const T& k) {
        T c;
        if (constant_value(b, c)) {
            if (num<T>::is_integer(k) && k >= T(0)) return Element<T>::constant(ipow(c, num<T>::to_long(k)));
            fail("non-integer power of a constant");
        }
        if (!b.has_callables() && b.terms().size() == 1 && b.terms().begin()->second == T(1)) {
            auto key = b.terms().begin()->first;
            return Element<T>::term(T(1), key.lam * k, key.mu * k, key.rate * k);
        }
        if (is_one_minus_x(b)) return Element<T>::power_product(T(0), k);
        if (num<T>::is_integer(k) && k >= T(0)) {
            Element<T> r = Element<T>::constant(T(1));
            for (long n = num<T>::to_long(k); n > 0; --n) r = r * b;
            return r;
        }
        fail("non-integer powers apply to x^a, (1-x)^b, exp(ax) or their products");
    }

    static T ipow(T b, long n) {
        T r(1);
        while (n-- > 0) r *= b;
        return r;
    }

    static bool is_one_minus_x(const Element<T>& e) {
        if (e.has_callables() || e.is_values() || !e.is_polynomial()) return false;
        return e.coeffs() == std::vector<T>{T(1), T(-1)};
    }

    /// Returns a for an argument of the form a*x.
    T linear_rate(const Element<T>& arg) {
        if (arg.is_polynomial()) {
            auto c = arg.coeffs();
            if (c.size() == 2 && c[0] == T(0)) return c[1];
        }
        fail("argument must be a multiple of x");
    }

    Element<T> atom() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end of expression");
        if (eat('(')) {
            Element<T> e = sum();
            if (!eat(')')) fail("missing ')'");
            return e;
        }
        char ch = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return Element<T>::constant(number());
        if (!std::isalpha(static_cast<unsigned char>(ch))) fail("unexpected '" + std::string(1, ch) + "'");
        std::size_t start = i_;
        while (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) ++i_;
        std::string name = s_.substr(start, i_ - start);
        if (name == "x") return Element<T>::monomial(1);
        if (name == "pi") {
            if constexpr (num<T>::exact) {
                throw NotExact("pi is not rational; use --backend float");
            } else {
                return Element<T>::constant(std::numbers::pi);
            }
        }
        if (!eat('(')) fail("unknown name '" + name + "'");
        Element<T> arg = sum();
        if (!eat(')')) fail("missing ')'");
        if (name == "sqrt") {
            T c;
            if (constant_value(arg, c)) return Element<T>::constant(num<T>::sqrt(c));
            return raise(arg, num<T>::from_ratio(1, 2));
        }
        if (name == "exp") return Element<T>::exponential(linear_rate(arg));
        if (name == "sin" || name == "cos") {
            const double a = num<T>::to_double(linear_rate(arg));
            const bool sine = name == "sin";
            std::string label = name + "(" + num<T>::str(linear_rate(arg)) + "x)";
            return Element<T>::callable([a, sine](double x) { return sine ? std::sin(a * x) : std::cos(a * x); },
                                        label);
        }
        fail("unknown function '" + name + "'");
    }

    T number() {
        std::size_t start = i_;
        while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.')) ++i_;
        if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E') && i_ + 1 < s_.size() &&
            (std::isdigit(static_cast<unsigned char>(s_[i_ + 1])) || s_[i_ + 1] == '-' || s_[i_ + 1] == '+')) {
            i_ += 2;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        }
        return parse_scalar<T>(s_.substr(start, i_ - start));
    }
};

}  // namespace detail

/// Sums and products of constants, x^a, (1-x)^b, sqrt(.), exp(ax), sin(ax), cos(ax); "ones" is 1.
template <class T>
Element<T> parse_expr(const std::string& s) {
    if (s == "ones") return Element<T>::constant(T(1));
    return detail::Parser<T>(s).run();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        auto a = cell.find_first_not_of(" \t\r"), b = cell.find_last_not_of(" \t\r");
        cells.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

/// Non-empty lines of a file with their 1-based line numbers.
inline std::vector<std::pair<std::size_t, std::string>> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::vector<std::pair<std::size_t, std::string>> out;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) out.emplace_back(n, line);
    }
    return out;
}

/// True when every numeric cell after the header holds an exact literal.
inline bool csv_exact(const std::string& path, bool header) {
    auto lines = read_lines(path);
    for (std::size_t r = header ? 1 : 0; r < lines.size(); ++r)
        for (const auto& c : split_csv_line(lines[r].second))
            if (!exact_literal(c)) return false;
    return true;
}

template <class T>
struct Samples {
    std::vector<T> x, y, j, z;   // j and z empty when the column is absent
};

/// CSV with header x,y[,j][,z]; rows are validated with line numbers.
template <class T>
Samples<T> ingest_csv(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.empty()) throw ParseError(path + ": empty file");
    auto header = split_csv_line(lines[0].second);
    int cx = -1, cy = -1, cj = -1, cz = -1;
    for (int k = 0; k < static_cast<int>(header.size()); ++k) {
        int* slot = header[k] == "x" ? &cx : header[k] == "y" ? &cy : header[k] == "j" ? &cj : header[k] == "z" ? &cz : nullptr;
        if (!slot) throw ParseError(path + ":" + std::to_string(lines[0].first) + ": unknown column '" + header[k] + "'");
        if (*slot >= 0) throw ParseError(path + ":" + std::to_string(lines[0].first) + ": repeated column '" + header[k] + "'");
        *slot = k;
    }
    if (cx < 0 || cy < 0) throw ParseError(path + ": header must contain x and y");
    Samples<T> s;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const std::string where = path + ":" + std::to_string(lines[r].first) + ": ";
        auto cells = split_csv_line(lines[r].second);
        if (cells.size() != header.size())
            throw ParseError(where + "expected " + std::to_string(header.size()) + " cells, found " +
                             std::to_string(cells.size()));
        auto cell = [&](int k) {
            try {
                return parse_scalar<T>(cells[k]);
            } catch (const ParseError&) {
                throw ParseError(where + "bad number '" + cells[k] + "'");
            } catch (const NotExact&) {
                throw NotExact(where + "'" + cells[k] + "' is not an exact literal");
            }
        };
        s.x.push_back(cell(cx));
        s.y.push_back(cell(cy));
        if (cj >= 0) {
            s.j.push_back(cell(cj));
            if (!(s.j.back() > T(0))) throw ConstraintViolation(where + "weight must be positive");
        }
        if (cz >= 0) s.z.push_back(cell(cz));
        for (std::size_t q = 0; q + 1 < s.x.size(); ++q)
            if (s.x[q] == s.x.back()) throw DuplicateX(where + "x = " + cells[cx] + " repeats an earlier row");
    }
    if (s.x.empty()) throw ParseError(path + ": no data rows");
    return s;
}

/// Numeric grid; a first row that is not numeric is taken as a header.
template <class T>
std::vector<std::vector<T>> read_matrix(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<std::vector<T>> rows;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        auto cells = split_csv_line(lines[r].second);
        if (r == 0) {
            bool numeric = true;
            for (const auto& c : cells) {
                try {
                    float_literal(c);
                } catch (const ParseError&) {
                    numeric = false;
                }
            }
            if (!numeric) continue;
        }
        std::vector<T> row;
        for (const auto& c : cells) {
            try {
                row.push_back(parse_scalar<T>(c));
            } catch (const ParseError&) {
                throw ParseError(path + ":" + std::to_string(lines[r].first) + ": bad number '" + c + "'");
            }
        }
        if (!rows.empty() && row.size() != rows[0].size())
            throw ParseError(path + ":" + std::to_string(lines[r].first) + ": row length differs");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": no data rows");
    return rows;
}

}  // namespace pvar::io
