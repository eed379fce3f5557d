#pragma once

#include <functional>
#include <string>

namespace sievelab {

// Compiles a closed-form expression of (x, y) into a callable. Supported:
// numbers, x, y, + - * / ^, parentheses, unary minus, and the functions
// sin cos tan exp log sqrt abs step (step(t) = 1 for t > 0, else 0).
// Throws ConfigError on malformed input.
std::function<double(double, double)> compile_expr(const std::string& text);

}  // namespace sievelab
