#include "cbtau_tools/encoding.hpp"

#include "cbtau/errors.hpp"

#include <sstream>

namespace cbtau::tools {

Json encode(const Scalar& s) { return s.str(); }

Json encode(const Rational& r) { return rational_str(r); }

Json encode(const std::vector<Scalar>& v)
{
    Json out = Json::array();
    for (const auto& s : v) out.push_back(encode(s));
    return out;
}

Json encode(const Series& s)
{
    Json terms = Json::array();
    for (const auto& [e, c] : s.terms()) terms.push_back(Json::array({encode(e), encode(c)}));
    return Json{{"terms", terms}, {"cutoff", s.cutoff() ? encode(*s.cutoff()) : Json()}};
}

Json encode(const GradedSeries& g)
{
    Json out = encode(g.body);
    out["delta"] = encode(g.delta);
    return out;
}

Json encode(const Real& x) { return x.str(20, std::ios_base::scientific); }

Series decode_series(const Json& j)
{
    std::optional<Rational> cutoff;
    if (!j.at("cutoff").is_null()) cutoff = parse_rational(j.at("cutoff").get<std::string>());
    Series s(cutoff);
    for (const auto& t : j.at("terms"))
        s.add_term(parse_rational(t.at(0).get<std::string>()), Scalar::parse(t.at(1).get<std::string>()));
    return s;
}

GradedSeries decode_graded(const Json& j)
{
    return GradedSeries{Scalar::parse(j.at("delta").get<std::string>()), decode_series(j)};
}

namespace {

std::vector<std::string> split(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

}  // namespace

std::vector<Scalar> parse_scalar_list(const std::string& text)
{
    std::vector<Scalar> out;
    for (const auto& item : split(text)) out.push_back(Scalar::parse(item));
    return out;
}

std::vector<Rational> parse_rational_list(const std::string& text)
{
    std::vector<Rational> out;
    for (const auto& item : split(text)) out.push_back(parse_rational(item));
    return out;
}

}  // namespace cbtau::tools
