#include "obslab/cli/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "obslab/errors.hpp"

namespace obslab {

struct Expression::Node {
    enum class Op { Number, X, Y, T, Add, Sub, Mul, Div, Pow, Neg, Call, Phi1, Phi2 };
    Op op = Op::Number;
    double value = 0.0;
    double (*fn)(double) = nullptr;
    int k = 0;
    int l = 0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;

    double eval(double x, double y, double t) const {
        constexpr double pi = std::numbers::pi;
        switch (op) {
            case Op::Number: return value;
            case Op::X: return x;
            case Op::Y: return y;
            case Op::T: return t;
            case Op::Add: return a->eval(x, y, t) + b->eval(x, y, t);
            case Op::Sub: return a->eval(x, y, t) - b->eval(x, y, t);
            case Op::Mul: return a->eval(x, y, t) * b->eval(x, y, t);
            case Op::Div: return a->eval(x, y, t) / b->eval(x, y, t);
            case Op::Pow: return std::pow(a->eval(x, y, t), b->eval(x, y, t));
            case Op::Neg: return -a->eval(x, y, t);
            case Op::Call: return fn(a->eval(x, y, t));
            case Op::Phi1: return std::sqrt(2.0) * std::sin(k * pi * x);
            case Op::Phi2: return 2.0 * std::sin(k * pi * x) * std::sin(l * pi * y);
        }
        return 0.0;
    }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

double (*function_named(const std::string& name))(double) {
    static const std::vector<std::pair<std::string, double (*)(double)>> table{
        {"sin", [](double v) { return std::sin(v); }},
        {"cos", [](double v) { return std::cos(v); }},
        {"tan", [](double v) { return std::tan(v); }},
        {"exp", [](double v) { return std::exp(v); }},
        {"log", [](double v) { return std::log(v); }},
        {"sqrt", [](double v) { return std::sqrt(v); }},
        {"abs", [](double v) { return std::abs(v); }},
    };
    for (const auto& [n, f] : table) {
        if (n == name) return f;
    }
    return nullptr;
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        auto n = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

    bool uses_time = false;

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw InputError("expression '" + s_ + "': " + what + " at position " +
                         std::to_string(pos_ + 1));
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr sum() {
        auto n = product();
        for (;;) {
            if (accept('+')) {
                n = make(Node::Op::Add, n, product());
            } else if (accept('-')) {
                n = make(Node::Op::Sub, n, product());
            } else {
                return n;
            }
        }
    }

    NodePtr product() {
        auto n = unary();
        for (;;) {
            if (accept('*')) {
                n = make(Node::Op::Mul, n, unary());
            } else if (accept('/')) {
                n = make(Node::Op::Div, n, unary());
            } else {
                return n;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Op::Neg, unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        auto base = atom();
        if (accept('^')) return make(Node::Op::Pow, base, unary());
        return base;
    }

    int integer() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (start == pos_) fail("expected a mode index");
        const int v = std::atoi(s_.substr(start, pos_ - start).c_str());
        if (v < 1) fail("mode index must be positive");
        return v;
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto n = sum();
            if (!accept(')')) fail("missing ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            const double v = std::strtod(begin, &end);
            if (end == begin) fail("malformed number");
            pos_ += static_cast<std::size_t>(end - begin);
            auto n = std::make_shared<Node>();
            n->value = v;
            return n;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected '" + std::string(1, c) + "'");
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        if (name == "x") return make(Node::Op::X);
        if (name == "y") return make(Node::Op::Y);
        if (name == "t") {
            uses_time = true;
            return make(Node::Op::T);
        }
        if (name == "pi" || name == "e") {
            auto n = std::make_shared<Node>();
            n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
            return n;
        }
        if (name == "phi") {
            auto n = std::make_shared<Node>();
            n->op = Node::Op::Phi1;
            n->k = integer();
            if (pos_ < s_.size() && s_[pos_] == '_') {
                ++pos_;
                n->op = Node::Op::Phi2;
                n->l = integer();
            }
            return n;
        }
        if (auto f = function_named(name)) {
            if (!accept('(')) fail("expected '(' after " + name);
            auto arg = sum();
            if (!accept(')')) fail("missing ')'");
            auto n = std::make_shared<Node>();
            n->op = Node::Op::Call;
            n->fn = f;
            n->a = arg;
            return n;
        }
        pos_ = start;
        fail("unknown name '" + name + "'");
    }
};

}  // namespace

Expression::Expression() : text_("0"), root_(std::make_shared<Node>()) {}

Expression Expression::parse(const std::string& text) {
    Parser p(text);
    Expression e;
    e.root_ = p.parse();
    e.text_ = text;
    e.uses_time_ = p.uses_time;
    return e;
}

double Expression::operator()(double x, double y, double t) const { return root_->eval(x, y, t); }

SpatialFunction Expression::spatial() const {
    auto root = root_;
    return [root](double x, double y) { return root->eval(x, y, 0.0); };
}

std::function<double(double)> Expression::temporal() const {
    auto root = root_;
    return [root](double t) { return root->eval(0.0, 0.0, t); };
}

}  // namespace obslab
