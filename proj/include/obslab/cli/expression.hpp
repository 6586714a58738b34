#pragma once

#include <functional>
#include <memory>
#include <string>

#include "obslab/domain/field.hpp"

namespace obslab {

/// Closed-form expression in x, y, t. Supports + - * / ^, unary minus,
/// parentheses, the constants pi and e, the functions sin cos tan exp log
/// sqrt abs, and eigenfunctions of the unit interval and square:
/// phi<k> = sqrt(2) sin(k pi x), phi<k>_<l> = 2 sin(k pi x) sin(l pi y).
class Expression {
public:
    struct Node;

    Expression();
    /// Throws InputError naming the offending position.
    static Expression parse(const std::string& text);

    double operator()(double x, double y = 0.0, double t = 0.0) const;
    const std::string& text() const { return text_; }
    bool uses_time() const { return uses_time_; }

    SpatialFunction spatial() const;
    std::function<double(double)> temporal() const;

private:
    std::string text_;
    std::shared_ptr<const Node> root_;
    bool uses_time_ = false;
};

}  // namespace obslab
