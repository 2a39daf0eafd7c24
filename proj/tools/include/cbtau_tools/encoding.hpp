#pragma once

#include "cbtau/bilinear.hpp"
#include "cbtau/painleve.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace cbtau::tools {

using Json = nlohmann::json;

// Scalars travel as their text form ("p/q" or "p/q+r/s*i"), which Scalar::parse reads back.
Json encode(const Scalar& s);
Json encode(const Rational& r);
Json encode(const std::vector<Scalar>& v);
// {"terms": [[exponent, coefficient], ...] sorted by exponent, "cutoff": exponent or null}
Json encode(const Series& s);
// Series fields plus "delta", the symbolic exponent every term is relative to.
Json encode(const GradedSeries& g);
Json encode(const Real& x);

Series decode_series(const Json& j);
GradedSeries decode_graded(const Json& j);

// Parses a comma-separated list of scalars, e.g. "1/7,1/11,1/13,1/3".
std::vector<Scalar> parse_scalar_list(const std::string& text);
std::vector<Rational> parse_rational_list(const std::string& text);

}  // namespace cbtau::tools
