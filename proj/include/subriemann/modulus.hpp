#pragma once

#include <functional>
#include <string>

namespace subriemann {

// Increasing omega with omega(0) = 0, used as |a(p) - a(q)| <= C * omega(|p - q|).
struct Modulus {
    enum class Kind { Linear, Hoelder, Log, Custom };

    Kind kind = Kind::Linear;
    double theta = 1.0;
    std::function<double(double)> custom;
    std::string label;

    static Modulus linear();
    static Modulus hoelder(double theta);
    // omega(s) = 1 / |log(min(s, 1/2))|
    static Modulus log();
    static Modulus make_custom(std::function<double(double)> f, std::string label);

    double operator()(double s) const;
    std::string name() const;
};

}  // namespace subriemann
