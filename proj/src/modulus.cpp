#include "subriemann/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace subriemann {

Modulus Modulus::linear() { return Modulus{Kind::Linear, 1.0, {}, "linear"}; }

Modulus Modulus::hoelder(double theta) {
    std::ostringstream os;
    os << "hoelder(" << theta << ")";
    return Modulus{Kind::Hoelder, theta, {}, os.str()};
}

Modulus Modulus::log() { return Modulus{Kind::Log, 0.0, {}, "log: 1/|log(min(s,1/2))|"}; }

Modulus Modulus::make_custom(std::function<double(double)> f, std::string label) {
    return Modulus{Kind::Custom, 0.0, std::move(f), std::move(label)};
}

double Modulus::operator()(double s) const {
    if (!(s > 0)) return 0.0;
    switch (kind) {
        case Kind::Linear: return s;
        case Kind::Hoelder: return std::pow(s, theta);
        case Kind::Log: return 1.0 / std::fabs(std::log(std::min(s, 0.5)));
        case Kind::Custom: return custom(s);
    }
    return s;
}

std::string Modulus::name() const { return label; }

}  // namespace subriemann
