#pragma once

// Structured-document shapes and CSV helpers.
//
//   AlphaSpec:  {"kind":"linear","theta":0.5,"a":0.8}
//               {"kind":"affine","intercept":B,"slope":A,"theta":0.5}
//               {"kind":"table","points":[[t,alpha],...]}          ("theta" optional)
//   JuryConfig: {"abilities":[0.5,0.9,0.1],"theta":0.5,"tie_break":"follow_signal",
//                "trials":100000,"seed":42}

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "tailbalance/jury_sim.hpp"
#include "tailbalance/tail_balance.hpp"

namespace tailbalance {

AlphaSpec alpha_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const AlphaSpec& alpha);

JuryConfig jury_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const JuryConfig& config);

// Shortest round-trip decimal (17 significant digits max).
std::string format_double(double x);

// Reads (t, value) rows from CSV text. Lines starting with '#' and a
// non-numeric header line are skipped; extra columns are ignored.
std::vector<Knot> read_knots_csv(std::istream& in);

}  // namespace tailbalance
