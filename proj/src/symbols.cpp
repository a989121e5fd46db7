#include "th/symbols.hpp"

#include <cctype>
#include <cmath>

namespace th {

AnnulusFunction::AnnulusFunction(EvalFn f, Real r_i, Real r_o, std::string name)
    : f_(std::move(f)), r_i_(std::move(r_i)), r_o_(std::move(r_o)), name_(std::move(name)) {
    if (!(r_i_ < r_o_)) throw Error(ErrorKind::InvalidParams, "empty annulus for " + name_);
}

bool AnnulusFunction::contains(const Complex& z) const {
    Real m = abs(z);
    return m > r_i_ && m < r_o_;
}

Complex AnnulusFunction::operator()(const Complex& z) const {
    if (!contains(z))
        throw Error(ErrorKind::OutsideAnnulus,
                    "|z| outside (" + r_i_.str(6) + ", " + r_o_.str(6) + ") for " + name_);
    return f_(z);
}

int AnnulusFunction::cache_winding(std::size_t nodes) {
    winding_ = winding_number(*this, nodes);
    return *winding_;
}

Complex eval(const AnnulusFunction& f, const Complex& z) { return f(z); }

AnnulusFunction constant(const Complex& c, Real r_i, Real r_o) {
    return AnnulusFunction([c](const Complex&) { return c; }, std::move(r_i), std::move(r_o), "const");
}

AnnulusFunction monomial(long k, Real r_i, Real r_o) {
    return AnnulusFunction([k](const Complex& z) { return pow(z, k); }, std::move(r_i), std::move(r_o),
                           "z^" + std::to_string(k));
}

AnnulusFunction tilde(const AnnulusFunction& f) {
    Real ri = f.r_outer() > Real(1e29) ? Real(0) : Real(1 / f.r_outer());
    Real ro = f.r_inner() == 0 ? Real(1e30) : Real(1 / f.r_inner());
    return AnnulusFunction([f](const Complex& z) { return f.eval_unchecked(Complex(1) / z); }, ri, ro,
                           "tilde(" + f.name() + ")");
}

AnnulusFunction product(const AnnulusFunction& a, const AnnulusFunction& b) {
    Real ri = a.r_inner() > b.r_inner() ? a.r_inner() : b.r_inner();
    Real ro = a.r_outer() < b.r_outer() ? a.r_outer() : b.r_outer();
    return AnnulusFunction([a, b](const Complex& z) { return a.eval_unchecked(z) * b.eval_unchecked(z); },
                           ri, ro, a.name() + "*" + b.name());
}

std::vector<Complex> circle_nodes(std::size_t n) {
    std::vector<Complex> out(n);
    const Real step = 2 * pi() / n;
    for (std::size_t j = 0; j < n; ++j) out[j] = polar(Real(1), step * j);
    return out;
}

Real min_modulus_on_circle(const AnnulusFunction& f, std::size_t nodes) {
    Real m = -1;
    for (const auto& z : circle_nodes(nodes)) {
        Real v = abs(f(z));
        if (m < 0 || v < m) m = v;
    }
    return m;
}

namespace {

// Unwrapped phase increments; empty if some step is not resolved at this node count.
std::vector<Real> phase_steps(const std::vector<Complex>& vals, bool& resolved) {
    const Real half_pi = pi() / 2;
    const std::size_t n = vals.size();
    std::vector<Real> steps(n);
    resolved = true;
    for (std::size_t j = 0; j < n; ++j) {
        Real d = arg(vals[(j + 1) % n] / vals[j]);
        if (boost::multiprecision::abs(d) >= half_pi) resolved = false;
        steps[j] = d;
    }
    return steps;
}

std::vector<Complex> sample_nonzero(const AnnulusFunction& f, std::size_t nodes) {
    std::vector<Complex> vals;
    vals.reserve(nodes);
    for (const auto& z : circle_nodes(nodes)) {
        Complex v = f(z);
        if (v.re == 0 && v.im == 0) throw Error(ErrorKind::ZeroOnCircle, f.name() + " vanishes on |z|=1");
        vals.push_back(v);
    }
    return vals;
}

}  // namespace

int winding_number(const AnnulusFunction& f, std::size_t nodes) {
    if (nodes < 256) nodes = 256;
    for (std::size_t n = nodes; n <= (std::size_t(1) << 16); n *= 2) {
        bool ok = false;
        auto steps = phase_steps(sample_nonzero(f, n), ok);
        if (!ok) continue;
        Real total = 0;
        for (const auto& s : steps) total += s;
        Real w = total / (2 * pi());
        return static_cast<int>(std::lround(static_cast<double>(w)));
    }
    throw Error(ErrorKind::PhaseUnresolved, "phase of " + f.name() + " oscillates too fast");
}

std::vector<Complex> log_on_circle(const AnnulusFunction& f, std::size_t nodes) {
    if (winding_number(f, nodes) != 0)
        throw Error(ErrorKind::NonzeroWinding, f.name() + " has nonzero winding number");
    auto vals = sample_nonzero(f, nodes);
    std::vector<Complex> out(nodes);
    Real ph = arg(vals[0]);
    for (std::size_t j = 0; j < nodes; ++j) {
        if (j > 0) ph += arg(vals[j] / vals[j - 1]);
        out[j] = Complex(boost::multiprecision::log(abs(vals[j])), ph);
    }
    return out;
}

const char* case_name(IsingCase c) {
    switch (c) {
        case IsingCase::AboveOne: return "a>1";
        case IsingCase::Critical: return "a=1";
        case IsingCase::Zero: return "r=0";
        case IsingCase::BelowOne: return "a<1";
    }
    return "?";
}

IsingParams IsingParams::make(const Real& q, const Real& r_param) {
    if (!(q > 0 && q < 1)) throw Error(ErrorKind::InvalidParams, "q must lie in (0,1)");
    if (!(r_param > -q * q && r_param < 1))
        throw Error(ErrorKind::InvalidParams, "r_param must lie in (-q^2, 1)");
    return IsingParams{q, r_param};
}

bool IsingParams::r_is_zero() const { return boost::multiprecision::abs(r_param) < Real(1e-30); }

Real IsingParams::a() const {
    if (r_is_zero()) throw Error(ErrorKind::InvalidParams, "a undefined at r_param = 0");
    return q * q / r_param;
}

IsingCase IsingParams::which() const {
    if (r_is_zero()) return IsingCase::Zero;
    Real av = a();
    if (boost::multiprecision::abs(av - 1) < Real(1e-12)) return IsingCase::Critical;
    // r_param < 0 gives a < 0 with |a| > 1: d winds -2 as in the a > 1 case
    if (av > 1 || r_param < 0) return IsingCase::AboveOne;
    return IsingCase::BelowOne;
}

Real IsingParams::c_q() const {
    if (which() != IsingCase::BelowOne) throw Error(ErrorKind::InvalidParams, "c(q) only defined for a < 1");
    Real q4 = q * q * q * q;
    return (r_param * r_param - q4) * boost::multiprecision::pow(r_param, Real(-1.5)) /
           boost::multiprecision::sqrt(r_param - q4);
}

namespace {

// sqrt(u) with the cut along [0, +inf) and 0 <= arg u < 2 pi
Complex sqrt_cut_positive(const Complex& u) {
    Real th = arg(u);
    if (th < 0) th += 2 * pi();
    return polar(boost::multiprecision::sqrt(abs(u)), th / 2);
}

}  // namespace

AnnulusFunction ising_phi(const Real& q, const Real& r_i, const Real& r_o) {
    Real q2 = q * q;
    Real qm2 = 1 / q2;
    // the factor q makes this equal |1 - q^2 z| on the circle
    return AnnulusFunction(
        [q, q2, qm2](const Complex& z) {
            return -I() * q * sqrt_cut_positive(z - Complex(qm2)) * sqrt_cut_positive(z - Complex(q2)) /
                   sqrt_cut_positive(z);
        },
        r_i, r_o, "ising_phi");
}

AnnulusFunction ising_d(const IsingParams& p, const Real& r_i, const Real& r_o) {
    Real q2 = p.q * p.q;
    switch (p.which()) {
        case IsingCase::Critical:
            return AnnulusFunction([q2](const Complex& z) { return -(q2 * z - Complex(1)) / (z - Complex(q2)); },
                                   r_i, r_o, "ising_d");
        case IsingCase::Zero:
            return AnnulusFunction(
                [q2](const Complex& z) { return (q2 * z - Complex(1)) / (z * (z - Complex(q2))); }, r_i, r_o,
                "ising_d");
        default: {
            Real rr = p.r_param;
            return AnnulusFunction(
                [q2, rr](const Complex& z) {
                    return -((rr * z - Complex(q2)) * (q2 * z - Complex(1))) /
                           ((z - Complex(q2)) * (q2 * z - Complex(rr)));
                },
                r_i, r_o, "ising_d");
        }
    }
}

IsingAnnulus ising_default_annulus(const IsingParams& p) {
    Real q2 = p.q * p.q;
    Real inner = q2, outer = 1 / q2;
    IsingCase c = p.which();
    if (c == IsingCase::AboveOne || c == IsingCase::BelowOne) {
        Real av = boost::multiprecision::abs(p.a());
        Real in2 = av < 1 ? av : Real(1 / av);
        Real out2 = 1 / in2;
        if (in2 > inner) inner = in2;
        if (out2 < outer) outer = out2;
    }
    return IsingAnnulus{(1 + inner) / 2, (1 + outer) / 2};
}

SymbolPair ising_symbols(const IsingParams& p, std::optional<IsingAnnulus> annulus) {
    IsingAnnulus an = annulus ? *annulus : ising_default_annulus(p);
    if (!(an.r_i < 1 && an.r_o > 1)) throw Error(ErrorKind::InvalidParams, "annulus must contain |z|=1");
    SymbolPair sp;
    sp.name = "ising";
    sp.phi = ising_phi(p.q, an.r_i, an.r_o);
    AnnulusFunction d = ising_d(p, an.r_i, an.r_o);
    switch (p.which()) {
        case IsingCase::AboveOne:
        case IsingCase::Zero: {
            AnnulusFunction m = product(monomial(2, an.r_i, an.r_o), d);
            sp.d = m;
            sp.w = product(m, sp.phi);
            sp.r = 0;
            sp.s = 2;
            break;
        }
        case IsingCase::Critical: {
            AnnulusFunction m = product(monomial(1, an.r_i, an.r_o), d);
            sp.d = m;
            sp.w = product(m, sp.phi);
            sp.r = 0;
            sp.s = 1;
            break;
        }
        case IsingCase::BelowOne: {
            Real av = p.a();
            Real scale = boost::multiprecision::pow(1 - p.r_param, Real(1.5)) * p.c_q();
            if (!(an.r_o < 1 / av)) throw Error(ErrorKind::InvalidParams, "annulus reaches the pole of gamma");
            AnnulusFunction base = product(d, sp.phi);
            sp.w = AnnulusFunction(
                [base, scale, av](const Complex& z) {
                    return base.eval_unchecked(z) + Complex(scale) / (Complex(1) - av * z);
                },
                an.r_i, an.r_o, "ising_v");
            sp.hankel_extra = [scale, av](long k) {
                if (k < 0) return Complex(0);
                return Complex(scale * boost::multiprecision::pow(av, Real(k)));
            };
            sp.w_base = base;
            sp.r = 0;
            sp.s = 0;
            break;
        }
    }
    return sp;
}

// ---- expression mini-language ----

class Expr {
public:
    virtual ~Expr() = default;
    virtual Complex eval(const Complex& z) const = 0;
};

namespace {

using ExprPtr = std::shared_ptr<const Expr>;

struct ZExpr : Expr {
    Complex eval(const Complex& z) const override { return z; }
};

struct ConstExpr : Expr {
    Complex c;
    explicit ConstExpr(Complex v) : c(std::move(v)) {}
    Complex eval(const Complex&) const override { return c; }
};

struct UnaryExpr : Expr {
    char op;
    ExprPtr a;
    UnaryExpr(char o, ExprPtr x) : op(o), a(std::move(x)) {}
    Complex eval(const Complex& z) const override { return -a->eval(z); }
};

struct BinExpr : Expr {
    char op;
    ExprPtr a, b;
    BinExpr(char o, ExprPtr x, ExprPtr y) : op(o), a(std::move(x)), b(std::move(y)) {}
    Complex eval(const Complex& z) const override {
        Complex u = a->eval(z), v = b->eval(z);
        switch (op) {
            case '+': return u + v;
            case '-': return u - v;
            case '*': return u * v;
            case '/': return u / v;
            default: return pow(u, v);
        }
    }
};

struct CallExpr : Expr {
    std::string fn;
    ExprPtr a;
    CallExpr(std::string f, ExprPtr x) : fn(std::move(f)), a(std::move(x)) {}
    Complex eval(const Complex& z) const override {
        Complex u = a->eval(z);
        if (fn == "exp") return exp(u);
        if (fn == "log") return log(u);
        if (fn == "sqrt") return sqrt(u);
        if (fn == "sin") return sin(u);
        return cos(u);
    }
};

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    ExprPtr parse() {
        ExprPtr e = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::Parse, msg + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    ExprPtr sum() {
        ExprPtr e = term();
        for (;;) {
            if (eat('+')) e = std::make_shared<BinExpr>('+', e, term());
            else if (eat('-')) e = std::make_shared<BinExpr>('-', e, term());
            else return e;
        }
    }
    ExprPtr term() {
        ExprPtr e = unary();
        for (;;) {
            if (eat('*')) e = std::make_shared<BinExpr>('*', e, unary());
            else if (eat('/')) e = std::make_shared<BinExpr>('/', e, unary());
            else return e;
        }
    }
    ExprPtr unary() {
        if (eat('-')) return std::make_shared<UnaryExpr>('-', unary());
        if (eat('+')) return unary();
        return power();
    }
    ExprPtr power() {
        ExprPtr base = atom();
        if (eat('^')) return std::make_shared<BinExpr>('^', base, unary());
        return base;
    }
    ExprPtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
            if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
                std::size_t save = pos_++;
                if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
                if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                } else {
                    pos_ = save;
                }
            }
            return std::make_shared<ConstExpr>(Complex(parse_real(s_.substr(start, pos_ - start))));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            std::string id = s_.substr(start, pos_ - start);
            if (id == "z") return std::make_shared<ZExpr>();
            if (id == "i") return std::make_shared<ConstExpr>(I());
            if (id == "pi") return std::make_shared<ConstExpr>(Complex(pi()));
            if (id == "e") return std::make_shared<ConstExpr>(Complex(boost::multiprecision::exp(Real(1))));
            if (id == "exp" || id == "log" || id == "sqrt" || id == "sin" || id == "cos") {
                if (!eat('(')) fail("expected '(' after " + id);
                ExprPtr arg = sum();
                if (!eat(')')) fail("expected ')'");
                return std::make_shared<CallExpr>(id, arg);
            }
            pos_ = start;
            fail("unknown identifier '" + id + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }
};

}  // namespace

ParsedExpr::ParsedExpr(const std::string& src) : src_(src), root_(Parser(src_).parse()) {}

Complex ParsedExpr::operator()(const Complex& z) const { return root_->eval(z); }

AnnulusFunction expression_symbol(const std::string& src, const Real& r_i, const Real& r_o) {
    ParsedExpr e(src);
    return AnnulusFunction([e](const Complex& z) { return e(z); }, r_i, r_o, src);
}

std::vector<std::string> builtin_names() { return {"trivial", "exp", "generic"}; }

SymbolPair builtin_pair(const std::string& name, int r, int s) {
    SymbolPair sp;
    sp.name = name;
    sp.r = r;
    sp.s = s;
    AnnulusFunction d;
    if (name == "trivial") {
        sp.phi = constant(Complex(1), Real("0.5"), Real(2));
        d = constant(Complex(1), Real("0.5"), Real(2));
    } else if (name == "exp") {
        sp.phi = expression_symbol("exp(0.5*(z+1/z))", Real("0.5"), Real(2));
        d = expression_symbol("exp(0.3*(z-1/z))", Real("0.5"), Real(2));
    } else if (name == "generic") {
        sp.phi = expression_symbol("2*(1-0.5*z)*(1-0.2/z)", Real("0.7"), Real("1.5"));
        d = expression_symbol("exp(0.3*(z-1/z))*(1-0.4*z)/(1-0.4/z)", Real("0.7"), Real("1.5"));
    } else {
        throw Error(ErrorKind::Config, "unknown symbol family '" + name + "'");
    }
    sp.d = d;
    sp.w = product(d, sp.phi);
    return sp;
}

}  // namespace th
