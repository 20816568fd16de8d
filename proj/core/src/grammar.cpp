#include "vlp/grammar.hpp"

#include "vlp/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include <fmt/format.h>

namespace vlp {

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    [[noreturn]] void fail(std::string_view what) const
    {
        throw ParseError(fmt::format("{} at column {} of '{}'", what, pos_ + 1, s_));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool done()
    {
        skip();
        return pos_ >= s_.size();
    }

    char peek()
    {
        skip();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    bool accept(char c)
    {
        if (peek() != c)
            return false;
        ++pos_;
        return true;
    }

    void expect(char c)
    {
        if (!accept(c))
            fail(fmt::format("expected '{}'", c));
    }

    std::string ident()
    {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        if (start == pos_)
            fail("expected a name");
        return std::string(s_.substr(start, pos_ - start));
    }

    double number()
    {
        skip();
        const char* first = s_.data() + pos_;
        const char* last = s_.data() + s_.size();
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr == first) {
            // from_chars rejects a leading '+'
            if (first < last && *first == '+') {
                ++pos_;
                return number();
            }
            if (first < last && *first == '-' && first + 1 < last && std::isalpha(static_cast<unsigned char>(first[1]))) {
                ++pos_;
                return -number();
            }
            if (first < last && std::isalpha(static_cast<unsigned char>(*first))) {
                const std::size_t start = pos_;
                const std::string name = ident();
                if (name == "e")
                    return std::numbers::e;
                if (name == "pi")
                    return std::numbers::pi;
                pos_ = start;
            }
            fail("expected a number");
        }
        pos_ += static_cast<std::size_t>(ptr - first);
        return v;
    }

    long integer()
    {
        const double v = number();
        if (v != std::floor(v) || std::abs(v) > 9.0e15)
            fail(fmt::format("expected an integer, got {}", v));
        return static_cast<long>(v);
    }

    std::vector<double> numbers(char sep, char stop)
    {
        std::vector<double> out;
        if (peek() == stop)
            return out;
        do
            out.push_back(number());
        while (accept(sep));
        return out;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

Exponent exponent_expr(Cursor& c)
{
    const std::string name = c.ident();
    if (name == "log")
        return Exponent::log_family();
    c.expect('(');
    Exponent out = [&]() -> Exponent {
        if (name == "constant")
            return Exponent::constant(c.number());
        if (name == "piecewise") {
            auto breaks = c.numbers(',', ';');
            c.expect(';');
            auto values = c.numbers(',', ')');
            return Exponent::piecewise(std::move(breaks), std::move(values));
        }
        if (name == "spiked") {
            const long J = c.integer();
            c.expect(',');
            const double s = c.number();
            c.expect(',');
            const double b = c.number();
            return Exponent::spiked(static_cast<int>(J), s, b);
        }
        if (name == "shuffle") {
            const Exponent inner = exponent_expr(c);
            c.expect(',');
            const long seed = c.integer();
            long depth = 8;
            if (c.accept(','))
                depth = c.integer();
            else if (const auto* step = inner.as_step(); step && step->tail)
                depth = std::min<long>(depth, step->tail->first_level - 1);
            if (seed < 0)
                c.fail("shuffle seed must be non-negative");
            if (depth < 0 || depth > 20)
                c.fail("shuffle depth must lie in [0,20]");
            const auto perm = seeded_dyadic_permutation(static_cast<std::uint64_t>(seed), static_cast<int>(depth),
                                                        inner.singular_at_zero());
            return shuffle_exponent(inner, perm, static_cast<int>(depth));
        }
        if (name == "discretize") {
            const Exponent inner = exponent_expr(c);
            c.expect(',');
            return inner.discretized(static_cast<int>(c.integer()));
        }
        if (name == "dual")
            return exponent_expr(c).dual();
        if (name == "rearrange" || name == "rearranged")
            return exponent_expr(c).rearranged();
        c.fail(fmt::format("unknown exponent '{}'", name));
    }();
    c.expect(')');
    return out;
}

MeasSet mask_set(Cursor& c, const Exponent* p)
{
    if (c.accept('[')) {
        const double a = c.number();
        c.expect(',');
        const double b = c.number();
        c.expect(']');
        return MeasSet::interval(a, b);
    }
    const std::string name = c.ident();
    if (name != "omega")
        c.fail("expected omega(n) or [a,b]");
    c.expect('(');
    const long n = c.integer();
    c.expect(')');
    if (!p)
        c.fail("omega(n) needs an exponent in scope");
    if (n < 1 || n > (1L << 30))
        c.fail("omega level out of range");
    return p->level_set(static_cast<int>(n));
}

Func func_expr(Cursor& c, const Exponent* p)
{
    const std::string name = c.ident();
    c.expect('(');
    Func out = [&]() -> Func {
        if (name == "indicator") {
            const double a = c.number();
            c.expect(',');
            return Func::indicator(a, c.number());
        }
        if (name == "const")
            return Func::constant(c.number());
        if (name == "poly" || name == "cpoly") {
            auto breaks = c.numbers(',', ';');
            c.expect(';');
            std::vector<Poly> pieces;
            do {
                std::vector<double> coeffs;
                while (c.peek() != '/' && c.peek() != ')') {
                    if (c.done())
                        c.fail("unterminated poly");
                    coeffs.push_back(c.number());
                }
                if (coeffs.empty())
                    c.fail("empty polynomial piece");
                pieces.emplace_back(std::move(coeffs));
            } while (c.accept('/'));
            return Func::piecewise_poly(std::move(breaks), std::move(pieces), name == "cpoly");
        }
        if (name == "mask") {
            const Func inner = func_expr(c, p);
            c.expect(',');
            const MeasSet set = mask_set(c, p);
            return Func::masked(inner, set);
        }
        if (name == "sum") {
            std::vector<Func> terms;
            do
                terms.push_back(func_expr(c, p));
            while (c.accept(','));
            return Func::sum(terms);
        }
        if (name == "scale") {
            const double alpha = c.number();
            c.expect(',');
            return Func::scaled(func_expr(c, p), alpha);
        }
        if (name == "sin") {
            const double a = c.number();
            c.expect(',');
            const double b = c.number();
            c.expect(',');
            return Func::analytic({AnalyticTerm::Tag::Sin, a, b, c.number()});
        }
        if (name == "exp" || name == "pow") {
            const double a = c.number();
            c.expect(',');
            const double b = c.number();
            return Func::analytic({name == "exp" ? AnalyticTerm::Tag::Exp : AnalyticTerm::Tag::Pow, a, b, 0.0});
        }
        c.fail(fmt::format("unknown function '{}'", name));
    }();
    c.expect(')');
    return out;
}

template <class T, class F>
T parse_whole(std::string_view text, F&& body)
{
    Cursor c(text);
    try {
        T out = body(c);
        if (!c.done())
            c.fail("trailing input");
        return out;
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(fmt::format("'{}': {}", text, e.what()));
    }
}

} // namespace

Exponent parse_exponent(std::string_view text)
{
    return parse_whole<Exponent>(text, [](Cursor& c) { return exponent_expr(c); });
}

Func parse_func(std::string_view text, const Exponent* p)
{
    return parse_whole<Func>(text, [p](Cursor& c) { return func_expr(c, p); });
}

FunctionalSpec parse_functional(std::string_view text)
{
    return parse_whole<FunctionalSpec>(text, [](Cursor& c) {
        FunctionalSpec psi;
        bool first = true;
        while (first || !c.done()) {
            double sign = 1.0;
            if (c.accept('-'))
                sign = -1.0;
            else if (!c.accept('+') && !first)
                c.fail("expected '+' or '-'");
            first = false;
            double weight = 1.0;
            const char next = c.peek();
            if (std::isdigit(static_cast<unsigned char>(next)) || next == '.') {
                weight = c.number();
                c.expect('*');
            }
            const std::string name = c.ident();
            c.expect('(');
            if (name == "delta") {
                const double t = c.number();
                if (!(t >= 0.0 && t <= 1.0))
                    c.fail(fmt::format("delta point {} outside [0,1]", t));
                psi.atoms.push_back({t, sign * weight});
            } else if (name == "integral") {
                Func term = Func::scaled(func_expr(c, nullptr), sign * weight);
                psi.density = psi.density ? Func::sum({*psi.density, term}) : term;
            } else {
                c.fail(fmt::format("unknown functional term '{}'", name));
            }
            c.expect(')');
        }
        return psi;
    });
}

} // namespace vlp
