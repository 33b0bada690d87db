#include "leaflab/io.hpp"

#include <fstream>
#include <sstream>

#include "leaflab/errors.hpp"

namespace leaflab {
namespace {

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        fail(ErrorCode::ConfigError, "cannot parse number '" + s + "'");
    }
    if (used != s.size()) fail(ErrorCode::ConfigError, "trailing characters in number '" + s + "'");
    return v;
}

Polynomial poly_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) fail(ErrorCode::ConfigError, "coefficient list must be a nonempty array");
    std::vector<Complex> c;
    for (const auto& x : j) c.push_back(complex_from_json(x));
    return Polynomial(std::move(c));
}

Json poly_to_json(const Polynomial& p) {
    Json arr = Json::array();
    for (const auto& c : p.coeffs()) arr.push_back(to_json(c));
    return arr;
}

}  // namespace

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const SpherePoint& p) { return p.is_infinite() ? Json("inf") : to_json(p.value()); }

Complex complex_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_complex(j.get<std::string>());
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    fail(ErrorCode::ConfigError, "expected a complex number as [re, im], got " + j.dump());
}

SpherePoint sphere_point_from_json(const Json& j) {
    if (j.is_string() && (j == "inf" || j == "infinity")) return SpherePoint::infinity();
    return complex_from_json(j);
}

Complex parse_complex(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (ch != ' ') s.push_back(ch);
    if (s.empty()) fail(ErrorCode::ConfigError, "empty complex literal");
    if (s.back() != 'i' && s.back() != 'j') return parse_double(s);
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag_part = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_double(t);
    };
    if (split == std::string::npos) return {0.0, imag_part(s)};
    return {parse_double(s.substr(0, split)), imag_part(s.substr(split))};
}

RationalMap map_from_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (!spec.empty() && spec.front() == '{') return map_from_json(Json::parse(spec));
    if (colon == std::string::npos) fail(ErrorCode::ConfigError, "unknown map spec '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (kind == "chebyshev") {
        const double d = parse_double(arg);
        if (d != static_cast<int>(d) || d < 2) fail(ErrorCode::ConfigError, "chebyshev degree must be an integer >= 2");
        return chebyshev(static_cast<int>(d));
    }
    if (kind == "quad") return quadratic(parse_complex(arg));
    fail(ErrorCode::ConfigError, "unknown map family '" + kind + "'");
}

RationalMap map_from_json(const Json& j) {
    if (j.is_string()) return map_from_spec(j.get<std::string>());
    if (!j.is_object() || !j.contains("num")) fail(ErrorCode::ConfigError, "map object needs a 'num' field");
    const Polynomial num = poly_from_json(j.at("num"));
    const Polynomial den = j.contains("den") ? poly_from_json(j.at("den")) : Polynomial::constant(1.0);
    try {
        return RationalMap(num, den);
    } catch (const Error& e) {
        fail(ErrorCode::ConfigError, e.what());
    }
}

Json map_to_json(const RationalMap& f) {
    Json j;
    j["num"] = poly_to_json(f.num());
    j["den"] = poly_to_json(f.den());
    return j;
}

Json cycle_to_json(const CycleInfo& c) {
    Json j;
    j["period"] = c.period;
    Json pts = Json::array();
    for (const auto& p : c.points) pts.push_back(to_json(p));
    j["points"] = pts;
    j["multiplier"] = to_json(c.multiplier);
    j["class"] = to_string(c.cls);
    return j;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write '" + path + "'");
    out << text;
}

}  // namespace leaflab
