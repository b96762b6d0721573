#pragma once

#include <map>
#include <string>

#include "json.hpp"

#include "tmp3/bases.hpp"
#include "tmp3/certify.hpp"
#include "tmp3/curves.hpp"
#include "tmp3/measure.hpp"
#include "tmp3/moment.hpp"

// JSON files exchanged by the command-line tool. Non-finite numbers are never written;
// reading one is a MalformedInput.
namespace tmp3::io {

using json = nlohmann::json;

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);  // "-" writes to stdout

// "a=1,b=-2" -> {a: 1, b: -2}
std::map<std::string, double> parse_params(const std::string& text);
CurveCase case_from_json(const json& j);  // {"case": "P4", "params": {...}}

// {"case", "params", "k", "moments": [{"i", "j", "v"}]}
MomentSequence problem_from_json(const json& j);
json problem_to_json(const MomentSequence& L);

json to_json(const Tolerances& t);
json to_json(const Interval& I);
json to_json(const Decision& d);
json to_json(const AtomicMeasure& mu);
AtomicMeasure measure_from_json(const json& j);
// [{"i", "j", "c"}] sorted by exponent
json to_json(const BivarPoly& p);
BivarPoly poly_from_json(const json& j);  // accepts the list or {"terms": list}
json to_json(const Witness& w);
json to_json(const Multiplier& m);
json to_json(const Basis& b);

// {"form": "v1" | "v2", "k", "gram0": [[...]], "gram1"?, "gram2"?}
Certificate certificate_from_json(const json& j);
json to_json(const CertificateResidual& r);

std::string to_string(FailedForm f);

}  // namespace tmp3::io
