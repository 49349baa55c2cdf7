#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <string>

namespace ample {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Parse "p/q" or "p" (also accepts a decimal point form like "0.25" for convenience).
inline Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            Int p(s.substr(0, slash));
            Int q(s.substr(slash + 1));
            if (q == 0) throw std::invalid_argument("zero denominator");
            return Rat(p, q);
        }
        auto dot = s.find('.');
        if (dot != std::string::npos) {
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            Int p(digits);
            Int q = 1;
            for (size_t i = dot + 1; i < s.size(); ++i) q *= 10;
            return Rat(p, q);
        }
        return Rat(Int(s));
    } catch (const std::exception&) {
        throw std::invalid_argument("bad rational: '" + s + "'");
    }
}

inline std::string rat_str(const Rat& r) {
    std::string s = numerator(r).str();
    if (denominator(r) != 1) s += "/" + denominator(r).str();
    return s;
}

}  // namespace ample
